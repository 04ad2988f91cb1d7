#pragma once

#include <cmath>
#include <concepts>
#include <string>

#include <Eigen/Core>

#include "wgm/constants.hpp"
#include "wgm/errors.hpp"

namespace wgm {

/// Three-term Sellmeier model n^2 = 1 + sum_i B_i lambda^2 / (lambda^2 - C_i^2).
struct SellmeierModel {
    Eigen::Vector3d strengths;         ///< B_i (dimensionless)
    Eigen::Vector3d wavelengths_um;    ///< C_i (um)
    double valid_min_um = 0.0;
    double valid_max_um = 0.0;
    std::string source;
    int version = 1;

    /// Throws DomainError unless all coefficients are positive and the range is non-empty.
    void validate() const;

    [[nodiscard]] bool contains(double lambda_m) const {
        const double um = lambda_m * 1e6;
        return um >= valid_min_um && um <= valid_max_um;
    }
};

/// Fused silica (Malitson), valid 0.21-3.7 um.
[[nodiscard]] SellmeierModel fused_silica();

/// Loads a model from the JSON material file format (keys b1..b3, l1..l3, valid_min_um, valid_max_um, source).
[[nodiscard]] SellmeierModel load_sellmeier(const std::string& path);
void save_sellmeier(const SellmeierModel& model, const std::string& path);

namespace detail {

inline void check_range(const SellmeierModel& m, double lambda_m, bool strict) {
    const double um = lambda_m * 1e6;
    const bool ok = strict ? (um > m.valid_min_um && um < m.valid_max_um) : (um >= m.valid_min_um && um <= m.valid_max_um);
    if (!ok) throw DomainError("Sellmeier: wavelength " + std::to_string(um) + " um outside the valid range");
}

}  // namespace detail

/// Refractive index n(lambda), wavelength in metres.
template <std::floating_point Scalar>
[[nodiscard]] Scalar refractive_index(const SellmeierModel& m, Scalar lambda_m) {
    detail::check_range(m, static_cast<double>(lambda_m), false);
    const Scalar l2 = lambda_m * lambda_m * Scalar(1e12);
    Scalar s(1);
    for (int i = 0; i < 3; ++i) {
        const Scalar c2 = Scalar(m.wavelengths_um[i] * m.wavelengths_um[i]);
        s += Scalar(m.strengths[i]) * l2 / (l2 - c2);
    }
    return std::sqrt(s);
}

/// dn/dlambda in 1/m.
template <std::floating_point Scalar>
[[nodiscard]] Scalar index_derivative(const SellmeierModel& m, Scalar lambda_m) {
    detail::check_range(m, static_cast<double>(lambda_m), true);
    const Scalar lum = lambda_m * Scalar(1e6);
    const Scalar l2 = lum * lum;
    Scalar acc(0);
    for (int i = 0; i < 3; ++i) {
        const Scalar c2 = Scalar(m.wavelengths_um[i] * m.wavelengths_um[i]);
        const Scalar d = l2 - c2;
        acc += Scalar(m.strengths[i]) * c2 / (d * d);
    }
    const Scalar n = refractive_index(m, lambda_m);
    return -lum / n * acc * Scalar(1e6);
}

/// Group index n_g = n - lambda dn/dlambda.
template <std::floating_point Scalar>
[[nodiscard]] Scalar group_index(const SellmeierModel& m, Scalar lambda_m) {
    return refractive_index(m, lambda_m) - lambda_m * index_derivative(m, lambda_m);
}

/// Group velocity c / n_g (m/s).
template <std::floating_point Scalar>
[[nodiscard]] Scalar group_velocity(const SellmeierModel& m, Scalar lambda_m) {
    return Scalar(kSpeedOfLight) / group_index(m, lambda_m);
}

/// Field normalization l(omega) = sqrt(omega) / (n v_g).
///
/// Varies by well under 1% across a few THz and is therefore left out of
/// the spectral intensity; provided for completeness.
template <std::floating_point Scalar>
[[nodiscard]] Scalar ell_factor(const SellmeierModel& m, Scalar omega) {
    const Scalar lambda = Scalar(kTwoPi * kSpeedOfLight) / omega;
    return std::sqrt(omega) / (refractive_index(m, lambda) * group_velocity(m, lambda));
}

/// Element-wise refractive index over an array of wavelengths.
template <class Derived>
[[nodiscard]] Eigen::ArrayXd refractive_index(const SellmeierModel& m, const Eigen::ArrayBase<Derived>& lambda_m) {
    return lambda_m.derived().unaryExpr([&m](double l) { return refractive_index(m, l); });
}

/// Element-wise group index over an array of wavelengths.
template <class Derived>
[[nodiscard]] Eigen::ArrayXd group_index(const SellmeierModel& m, const Eigen::ArrayBase<Derived>& lambda_m) {
    return lambda_m.derived().unaryExpr([&m](double l) { return group_index(m, l); });
}

}  // namespace wgm
