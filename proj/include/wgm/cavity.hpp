#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgm/dispersion.hpp"

namespace wgm {

/// Lossless mirror pair of one wave: real reflectivity r and transmissivity t' = sqrt(1 - r^2).
struct WaveCoupling {
    double q = 0.0;      ///< quality factor
    double order = 0.0;  ///< order used in r = 1 - order pi / Q
    double r = 0.0;
    double t = 0.0;
};

/// r = 1 - order pi / Q, t' = sqrt(1 - r^2).
///
/// `order` is the azimuthal index in the literal relation. Throws DomainError when Q <= order pi.
[[nodiscard]] WaveCoupling reflectivity_from_q(double order, double q);

/// Order entering r = 1 - order pi / Q.
enum class OrderConvention {
    Azimuthal,  ///< l itself
    Group,      ///< omega_l phi'(omega_l) / 2pi = l n_g / n_eff, which makes the linewidth exactly nu / Q
};

[[nodiscard]] std::string to_string(OrderConvention c);
[[nodiscard]] OrderConvention parse_order_convention(const std::string& s);

enum class Wave { Pump, Signal, Idler };

/// Quality factors of pump, signal and idler and the derived mirror parameters.
struct CouplingSpec {
    double q_pump = 1e8;
    double q_signal = 1e8;
    double q_idler = 1e8;
    int l_ref = 774;
    OrderConvention convention = OrderConvention::Group;

    [[nodiscard]] double q(Wave w) const;
    /// Mirror of wave `w` using the reference index l_ref.
    [[nodiscard]] WaveCoupling coupling(Wave w) const;
    /// Mirror of wave `w` sitting on resonance `l` of `d`, following `convention`.
    [[nodiscard]] WaveCoupling coupling(Wave w, const Dispersion& d, int l) const;
    void validate() const;
};

/// Order of resonance l under a convention.
[[nodiscard]] double coupling_order(const Dispersion& d, int l, OrderConvention c);

/// Pump sweep description. `resonance_fwhm_hz` is the FWHM of |A_p|^2 and
/// `sweep_span_hz` the triangular sweep amplitude; the two are kept apart.
struct PumpSweepSpec {
    double center_omega = 0.0;     ///< rad/s
    double linewidth_hz = 200e3;   ///< laser linewidth
    double resonance_fwhm_hz = 20.4e6;
    double sweep_span_hz = 1e9;
    double sweep_rate_hz = 100.0;

    /// Positivity errors throw; ordering linewidth << resonance << span (factor 10) yields warnings.
    [[nodiscard]] std::vector<std::string> validate() const;
};

/// A = t' / (1 - r e^{i phi}).
[[nodiscard]] inline std::complex<double> airy_amplitude(double phase, double r, double t) {
    return t / (1.0 - r * std::polar(1.0, phase));
}

/// Intensity |t|^2 / ((1 - rho)^2 + 4 rho sin^2(phase / 2)), `rho` the round-trip field factor.
[[nodiscard]] inline double airy_intensity(double phase, double rho, double t2) {
    const double s = std::sin(0.5 * phase);
    return t2 / ((1.0 - rho) * (1.0 - rho) + 4.0 * rho * s * s);
}

/// Single-wave cavity amplitude at omega.
[[nodiscard]] std::complex<double> airy_mode(double omega, const WaveCoupling& c, const Dispersion& d);
/// Pump cavity amplitude t_p / (1 - r_p^2 e^{i phi}).
[[nodiscard]] std::complex<double> airy_pump(double omega, const WaveCoupling& c, const Dispersion& d);

/// FWHM in round-trip phase of an intensity Airy peak with round-trip factor rho.
[[nodiscard]] double airy_phase_fwhm(double rho);

/// Pump reflectivity r_p whose |A_p|^2 FWHM equals `fwhm_hz` for a round-trip group delay `t_rt` (s).
[[nodiscard]] WaveCoupling pump_coupling_for_fwhm(double fwhm_hz, double t_rt);

/// FWHM (Hz) of |A|^2 around resonance l, solved on the actual phase curve.
/// `pump` selects the r^2 round-trip factor.
[[nodiscard]] double airy_fwhm_hz(const WaveCoupling& c, const LocalPhase& phase, bool pump = false);

/// Two-column transmission scan (frequency offset in Hz, normalized transmittance).
struct TransmissionScan {
    Eigen::VectorXd freq_offset_hz;
    Eigen::VectorXd transmittance;

    [[nodiscard]] static TransmissionScan read_csv(const std::string& path);
    void write_csv(const std::string& path) const;
};

/// Settings of the synthetic scan generator.
struct SyntheticScanSpec {
    double fwhm_hz = 20.4e6;
    double fsr_hz = 242e9;
    double depth = 0.6;
    double center_hz = 0.0;
    double span_hz = 200e6;
    int samples = 801;
    double noise = 0.01;  ///< additive Gaussian noise, std relative to unit transmittance
    std::uint64_t seed = 1;
};

/// Transmission dip generated from the pump Airy lineshape plus seeded noise.
[[nodiscard]] TransmissionScan synthetic_scan(const SyntheticScanSpec& spec);

struct AiryFitOptions {
    double fsr_hz = 242e9;  ///< period of the fitted Airy lineshape
    int max_iterations = 200;
};

struct AiryFitResult {
    double center_hz = 0.0;
    double center_sigma_hz = 0.0;
    double fwhm_hz = 0.0;
    double fwhm_sigma_hz = 0.0;
    double depth = 0.0;
    double depth_sigma = 0.0;
    double offset = 0.0;
    double baseline = 0.0;
    double noise_floor = 0.0;
    double rms_residual = 0.0;
    int iterations = 0;
};

/// Least-squares fit of a single intensity Airy dip to the transmittance reduction.
[[nodiscard]] AiryFitResult fit_airy(const TransmissionScan& scan, const AiryFitOptions& opt = {});

}  // namespace wgm
