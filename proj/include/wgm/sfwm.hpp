#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgm/cavity.hpp"
#include "wgm/dispersion.hpp"
#include "wgm/numeric.hpp"

namespace wgm {

/// Pump power and material parameters of the self/cross-phase-modulation term.
struct NonlinearParams {
    double pump_power_w = 7e-3;
    double n2_m2_per_w = 2.7e-20;
    double a_eff_m2 = 20e-12;

    void validate() const;
};

/// 2 gamma P = P_in Q n2 / (pi n R A_eff) (rad/m).
[[nodiscard]] double kerr_mismatch(const NonlinearParams& p, double q, double n, double radius);

/// Delta kappa = 2 k_p(w_p) - k_s(w_p + W) - k_i(w_p - W) - 2 gamma P (rad/m).
[[nodiscard]] double phase_mismatch(double omega_p, double omega, const Dispersion& pump, const Dispersion& signal,
                                    const Dispersion& idler, double kerr);
[[nodiscard]] inline double phase_mismatch(double omega_p, double omega, const Dispersion& d, double kerr) {
    return phase_mismatch(omega_p, omega, d, d, d, kerr);
}

/// Reduced phasematching function g = sinc(x/2) e^{i x/2} with x = L Delta kappa.
struct Phasematch {
    std::complex<double> g;
    double g2;
};
[[nodiscard]] Phasematch phasematch_strength(double l_delta_kappa);
[[nodiscard]] Phasematch phasematch_strength(double omega_p, double omega, const Dispersion& d, double kerr);

/// |g|^2 over a rectangle of pump detuning and signal-idler half difference.
struct PhasematchMap {
    Eigen::VectorXd pump_detuning;  ///< rad/s, relative to the pump reference
    Eigen::VectorXd omega;          ///< rad/s
    Eigen::MatrixXd g2;             ///< rows: pump detuning, cols: omega
    double min_g2 = 1.0;
    double max_abs_l_delta_kappa = 0.0;
};

[[nodiscard]] PhasematchMap phasematch_map(const Dispersion& d, double omega_p0, double kerr,
                                           double pump_half_span, int n_pump, double omega_half_span, int n_omega,
                                           unsigned threads = 0);

/// One signal/idler resonance pair of the generation-mode matrix.
struct GenerationMode {
    int j = 0;  ///< l_s = l_p + j, l_i = l_p - j
    int l_s = 0, l_i = 0;
    double omega_s = 0.0, omega_i = 0.0;  ///< resonance centres (rad/s)
    double omega = 0.0;                   ///< (omega_s - omega_i) / 2
    double epsilon = 0.0;                 ///< omega_s + omega_i - 2 omega_p
};

struct GenerationModeMatrix {
    int l_p = 0;
    double omega_p = 0.0;
    std::vector<GenerationMode> modes;  ///< sorted by omega, j from -n to n
};

/// Pairs (l_p + j, l_p - j) for |j| <= n_pairs with their energy defect relative to 2 omega_{l_p}.
[[nodiscard]] GenerationModeMatrix generation_modes(const Dispersion& pump, const Dispersion& signal,
                                                    const Dispersion& idler, int l_p, int n_pairs);
[[nodiscard]] inline GenerationModeMatrix generation_modes(const Dispersion& d, int l_p, int n_pairs) {
    return generation_modes(d, d, d, l_p, n_pairs);
}

/// Inputs of the spectral model.
struct SfwmSource {
    std::shared_ptr<const Dispersion> pump;
    std::shared_ptr<const Dispersion> signal;
    std::shared_ptr<const Dispersion> idler;
    int l_p = 774;
    CouplingSpec coupling;
    /// FWHM of |A_p|^2 in Hz. Unset: derived from q_pump. Zero: monochromatic pump on resonance.
    std::optional<double> pump_fwhm_hz;
    double pump_window_fwhm = 6.0;  ///< half-width of the pump integration window in pump FWHMs
    bool exact_phasematch = false;  ///< false: |g|^2 = 1
    double kerr = 0.0;              ///< 2 gamma P (rad/m)
    QuadOptions quad{};

    /// Shares one dispersion between the three waves.
    [[nodiscard]] static SfwmSource shared(std::shared_ptr<const Dispersion> d, int l_p, CouplingSpec c);
};

/// Uniform frequency grid: start + i step for i in [0, size).
struct SpectralGrid {
    double start = 0.0;
    double step = 0.0;
    Eigen::Index size = 0;

    [[nodiscard]] double at(Eigen::Index i) const { return start + static_cast<double>(i) * step; }
    [[nodiscard]] Eigen::VectorXd points() const;
    /// Grid of 2K + 1 points -K step .. K step with K = floor(half_span / step).
    [[nodiscard]] static SpectralGrid symmetric(double half_span, double step);
    /// Points of the lattice k step inside [lo, hi].
    [[nodiscard]] static SpectralGrid lattice(double lo, double hi, double step);
};

enum class Normalization { None, UnitMax, UnitArea };
[[nodiscard]] std::string to_string(Normalization n);
[[nodiscard]] Normalization parse_normalization(const std::string& s);

/// Idler spectral intensity R_i sampled on a uniform grid of Omega (rad/s).
struct BiphotonSpectrum {
    SpectralGrid grid;
    Eigen::VectorXd values;
    double omega_p0 = 0.0;
    double q_pump = 0.0, q_signal = 0.0, q_idler = 0.0;
    double pump_fwhm_hz = 0.0;
    Normalization normalization = Normalization::None;

    [[nodiscard]] Eigen::VectorXd omega() const { return grid.points(); }
};

/// Applies a normalization in place.
void normalize(BiphotonSpectrum& s, Normalization n);

/// Prepared spectral model: phase caches and mirror parameters of the three waves.
class SfwmModel {
public:
    /// Prepares caches covering |Omega| <= omega_half_span around the pump resonance.
    SfwmModel(SfwmSource source, double omega_half_span);

    [[nodiscard]] const SfwmSource& source() const { return src_; }
    [[nodiscard]] double omega_p0() const { return omega_p0_; }
    /// FWHM of |A_p|^2 (Hz); zero for a monochromatic pump.
    [[nodiscard]] double pump_fwhm_hz() const { return pump_fwhm_hz_; }
    /// FWHM (Hz) of the signal resonance closest to omega.
    [[nodiscard]] double signal_fwhm_hz(double omega) const;
    [[nodiscard]] double min_line_fwhm_hz() const;
    [[nodiscard]] const WaveCoupling& pump_coupling() const { return pump_c_; }

    /// Intensity Airy functions at absolute angular frequency.
    [[nodiscard]] double pump_intensity(double omega) const;
    [[nodiscard]] double signal_intensity(double omega) const;
    [[nodiscard]] double idler_intensity(double omega) const;
    /// |g|^2 at pump frequency w_p and half-difference Omega (1 unless exact phasematching is on).
    [[nodiscard]] double phasematch_g2(double omega_p, double omega) const;

    /// R_i(Omega): pump-frequency integral of A_p A_s A_i |g|^2.
    [[nodiscard]] double intensity(double omega) const;
    /// Integrand of `intensity` at pump offset u from the pump resonance.
    [[nodiscard]] double integrand(double u, double omega) const;

private:
    struct Line {
        double rho, t2, half_width;  // half_width: angular HWHM
    };
    [[nodiscard]] double line_intensity(const PhaseTable& t, const std::vector<Line>& lines, double omega) const;

    SfwmSource src_;
    double omega_p0_ = 0.0;
    double pump_fwhm_hz_ = 0.0;
    double pump_rho_ = 0.0, pump_t2_ = 0.0;
    WaveCoupling pump_c_;
    LocalPhase pump_phase_;
    PhaseTable signal_table_, idler_table_;
    std::vector<Line> signal_lines_, idler_lines_;
    bool monochromatic_ = false;
};

/// R_i on a uniform grid. Checks grid resolution and pump window preconditions.
[[nodiscard]] BiphotonSpectrum spectral_intensity(const SfwmModel& model, const SpectralGrid& grid,
                                                  Normalization norm = Normalization::None, unsigned threads = 0);

/// R_i at arbitrary Omega values (no resolution precondition).
[[nodiscard]] Eigen::VectorXd spectral_intensity_at(const SfwmModel& model, const Eigen::Ref<const Eigen::VectorXd>& omega,
                                                    unsigned threads = 0);

/// Two-dimensional joint spectral intensity. Rows follow omega_s, columns omega_i (absolute rad/s).
struct Jsi2D {
    Eigen::VectorXd omega_s;
    Eigen::VectorXd omega_i;
    Eigen::MatrixXd values;

    [[nodiscard]] Eigen::VectorXd signal_marginal() const { return values.rowwise().sum(); }
    [[nodiscard]] Eigen::VectorXd idler_marginal() const { return values.colwise().sum().transpose(); }
};

/// Pump-swept (mixed) JSI: 1/2 A_p((w_s + w_i)/2) |g|^2 A_s(w_s) A_i(w_i).
[[nodiscard]] Jsi2D jsi_mixed(const SfwmModel& model, const Eigen::VectorXd& omega_s, const Eigen::VectorXd& omega_i);

/// Pure-state JSI at fixed pump frequency. Energy conservation is applied exactly:
/// a cell is populated only if |w_s + w_i - 2 w_p| <= half a column step, and its value
/// is |g|^2 A_s(w_s) A_i(2 w_p - w_s).
[[nodiscard]] Jsi2D jsi_pure(const SfwmModel& model, const Eigen::VectorXd& omega_s, const Eigen::VectorXd& omega_i,
                             double omega_p);

/// Mixed JSI windows centred on every `stride`-th generation mode.
struct JsiRegion {
    GenerationMode mode;
    Jsi2D jsi;
};
[[nodiscard]] std::vector<JsiRegion> jsi_regions(const SfwmModel& model, const GenerationModeMatrix& gm,
                                                 double half_width, int points, int stride = 1);

}  // namespace wgm
