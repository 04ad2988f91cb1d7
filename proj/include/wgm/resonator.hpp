#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgm/constants.hpp"
#include "wgm/errors.hpp"
#include "wgm/material.hpp"

namespace wgm {

enum class Polarization { TE, TM };

[[nodiscard]] std::string to_string(Polarization p);
[[nodiscard]] Polarization parse_polarization(const std::string& s);

/// Whispering-gallery mode label (l, m, q, polarization).
///
/// Only the fundamental equatorial family m = l, q = 1 is modeled; anything
/// else raises UnsupportedModeError.
struct ModeIndex {
    int l = 1;
    int m = 1;
    int q = 1;
    Polarization polarization = Polarization::TE;

    ModeIndex() = default;
    ModeIndex(int l_, int m_, int q_, Polarization p);
    /// Fundamental mode (l, l, 1).
    ModeIndex(int l_, Polarization p) : ModeIndex(l_, l_, 1, p) {}

    /// nu = l + 1/2.
    [[nodiscard]] double nu() const { return l + 0.5; }
};

/// Sphere geometry and material.
struct SphereSpec {
    double radius = 0.0;  ///< m
    SellmeierModel material;

    SphereSpec() = default;
    SphereSpec(double r, SellmeierModel m);

    /// Equatorial perimeter L = 2 pi R.
    [[nodiscard]] double perimeter() const { return kTwoPi * radius; }
};

/// Sum on the right-hand side of the asymptotic Mie resonance condition.
///
/// The condition reads 1/lambda = S(nu) / (2 pi R n(lambda)), with nu = l + 1/2
/// and alpha the q-th zero of Ai(-z). `P` is n for TE and 1/n for TM.
template <class Scalar>
[[nodiscard]] Scalar mode_sum(Scalar nu, Scalar n, Polarization pol, double alpha) {
    using std::cbrt;
    using std::sqrt;
    const Scalar P = pol == Polarization::TE ? n : Scalar(1) / n;
    const Scalar n2m1 = n * n - Scalar(1);
    const Scalar c13 = Scalar(std::cbrt(0.5));  // 2^(-1/3)
    const Scalar c23 = c13 * c13;               // 2^(-2/3)
    const Scalar nu13 = cbrt(nu);
    return nu + c13 * alpha * nu13 - P / sqrt(n2m1) + Scalar(0.3) * c23 * alpha * alpha / nu13 -
           c13 * P * (n * n - Scalar(2.0 / 3.0) * P * P) / (n2m1 * sqrt(n2m1)) * alpha / (nu13 * nu13);
}

/// d S / d nu.
template <class Scalar>
[[nodiscard]] Scalar mode_sum_derivative(Scalar nu, Scalar n, Polarization pol, double alpha) {
    using std::cbrt;
    using std::sqrt;
    const Scalar P = pol == Polarization::TE ? n : Scalar(1) / n;
    const Scalar n2m1 = n * n - Scalar(1);
    const Scalar c13 = Scalar(std::cbrt(0.5));
    const Scalar c23 = c13 * c13;
    const Scalar nu13 = cbrt(nu);
    const Scalar nu23 = nu13 * nu13;
    return Scalar(1) + c13 * alpha / (Scalar(3) * nu23) - Scalar(0.1) * c23 * alpha * alpha / (nu13 * nu) +
           Scalar(2.0 / 3.0) * c13 * P * (n * n - Scalar(2.0 / 3.0) * P * P) / (n2m1 * sqrt(n2m1)) * alpha /
               (nu23 * nu);
}

/// Resonance wavelength (m) of a mode, from a bracketed solve of the Mie condition.
///
/// Throws NoRootError when the resonance falls outside the material band.
[[nodiscard]] double resonance_wavelength(const SphereSpec& sphere, const ModeIndex& mode);

/// Relative residual lambda * |1/lambda - RHS(lambda)| of the resonance condition.
[[nodiscard]] double resonance_residual(const SphereSpec& sphere, const ModeIndex& mode, double lambda_m);

/// n_eff = l lambda_l / L.
[[nodiscard]] double effective_index(const SphereSpec& sphere, const ModeIndex& mode, double lambda_l);

/// Continuous azimuthal order m(omega) = nu(omega) - 1/2, inverting the resonance
/// condition for real nu at the wavelength 2 pi c / omega. Equals l at resonance.
[[nodiscard]] double continuous_order(const SphereSpec& sphere, Polarization pol, double omega);

/// Dispersion relation k(omega) = n_eff(omega) omega / c = 2 pi m(omega) / L (rad/m).
[[nodiscard]] double dispersion_k(const SphereSpec& sphere, Polarization pol, double omega);

/// Effective group index c dk/domega (central difference).
[[nodiscard]] double effective_group_index(const SphereSpec& sphere, Polarization pol, double omega);

/// One row of a resonance table.
struct Resonance {
    ModeIndex mode;
    double wavelength;  ///< m
    double omega;       ///< rad/s
};

/// Resonances for a contiguous range of l at fixed q and polarization.
class ResonanceTable {
public:
    ResonanceTable(SphereSpec sphere, Polarization pol, int l_min, int l_max);

    /// Table covering every resonance with wavelength in [lambda_lo, lambda_hi] (m).
    [[nodiscard]] static ResonanceTable for_band(const SphereSpec& sphere, Polarization pol, double lambda_lo,
                                                 double lambda_hi);

    [[nodiscard]] const std::vector<Resonance>& entries() const { return entries_; }
    [[nodiscard]] const SphereSpec& sphere() const { return sphere_; }
    [[nodiscard]] Polarization polarization() const { return pol_; }
    /// Entry whose wavelength is closest to `lambda_m`.
    [[nodiscard]] const Resonance& nearest(double lambda_m) const;
    /// Entry for azimuthal index l. Throws DomainError if absent.
    [[nodiscard]] const Resonance& at(int l) const;

private:
    SphereSpec sphere_;
    Polarization pol_;
    std::vector<Resonance> entries_;
};

/// Angular FSR omega_{l+1} - omega_l for the pair straddling omega.
[[nodiscard]] double fsr(const SphereSpec& sphere, Polarization pol, double omega);

/// FSR sampled on a frequency grid.
[[nodiscard]] Eigen::VectorXd fsr_drift_curve(const SphereSpec& sphere, Polarization pol,
                                              const Eigen::Ref<const Eigen::VectorXd>& omega_grid);

}  // namespace wgm
