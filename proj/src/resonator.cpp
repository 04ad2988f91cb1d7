#include "wgm/resonator.hpp"

#include <algorithm>

#include "wgm/airy.hpp"
#include "wgm/numeric.hpp"

namespace wgm {

namespace {

double alpha_for(int q) {
    static const double a1 = airy_zero(1);
    return q == 1 ? a1 : airy_zero(q);
}

// Solves mode_sum(nu) = target for nu by Newton, falling back to a bracketed solve.
double solve_nu(double target, double n, Polarization pol, double alpha) {
    double nu = target - std::cbrt(0.5) * alpha * std::cbrt(target);
    for (int it = 0; it < 30; ++it) {
        const double f = mode_sum(nu, n, pol, alpha) - target;
        const double step = f / mode_sum_derivative(nu, n, pol, alpha);
        nu -= step;
        if (std::abs(step) <= 1e-15 * nu) {
            // One more step lands on the rounding floor deterministically.
            nu -= (mode_sum(nu, n, pol, alpha) - target) / mode_sum_derivative(nu, n, pol, alpha);
            return nu;
        }
    }
    const auto g = [&](double x) { return mode_sum(x, n, pol, alpha) - target; };
    const auto [a, b] = expand_bracket(g, nu, 1.0, 0.5, 10.0 * target + 10.0);
    return find_root(g, a, b);
}

}  // namespace

std::string to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

Polarization parse_polarization(const std::string& s) {
    if (s == "TE" || s == "te") return Polarization::TE;
    if (s == "TM" || s == "tm") return Polarization::TM;
    throw FormatError("unknown polarization '" + s + "' (expected TE or TM)");
}

ModeIndex::ModeIndex(int l_, int m_, int q_, Polarization p) : l(l_), m(m_), q(q_), polarization(p) {
    if (l < 1 || q < 1) throw DomainError("ModeIndex: l and q must be >= 1");
    if (m != l || q != 1) throw UnsupportedModeError("ModeIndex: only m = l, q = 1 modes are modeled");
}

SphereSpec::SphereSpec(double r, SellmeierModel m) : radius(r), material(std::move(m)) {
    if (!(radius > 0.0)) throw DomainError("SphereSpec: radius must be positive");
    material.validate();
}

namespace {

double condition(const SphereSpec& s, const ModeIndex& mode, double alpha, double lambda) {
    const double n = refractive_index(s.material, lambda);
    return 1.0 / lambda - mode_sum(mode.nu(), n, mode.polarization, alpha) / (s.perimeter() * n);
}

}  // namespace

double resonance_wavelength(const SphereSpec& sphere, const ModeIndex& mode) {
    const double alpha = alpha_for(mode.q);
    const double lo = sphere.material.valid_min_um * 1e-6;
    const double hi = sphere.material.valid_max_um * 1e-6;
    const double n_ref = refractive_index(sphere.material, std::clamp(1.55e-6, lo, hi));
    const double lambda0 = std::clamp(sphere.perimeter() * n_ref / mode.nu(), lo, hi);
    const auto f = [&](double lam) { return condition(sphere, mode, alpha, lam); };
    const auto [a, b] = expand_bracket(f, lambda0, 0.01 * lambda0, lo, hi);
    return find_root(f, a, b);
}

double resonance_residual(const SphereSpec& sphere, const ModeIndex& mode, double lambda_m) {
    return std::abs(condition(sphere, mode, alpha_for(mode.q), lambda_m)) * lambda_m;
}

double effective_index(const SphereSpec& sphere, const ModeIndex& mode, double lambda_l) {
    return mode.l * lambda_l / sphere.perimeter();
}

double continuous_order(const SphereSpec& sphere, Polarization pol, double omega) {
    const double lambda = omega_to_wavelength(omega);
    const double n = refractive_index(sphere.material, lambda);
    const double target = sphere.perimeter() * n / lambda;
    return solve_nu(target, n, pol, alpha_for(1)) - 0.5;
}

double dispersion_k(const SphereSpec& sphere, Polarization pol, double omega) {
    return kTwoPi * continuous_order(sphere, pol, omega) / sphere.perimeter();
}

double effective_group_index(const SphereSpec& sphere, Polarization pol, double omega) {
    const double h = 1e-5 * omega;
    const double dk = (dispersion_k(sphere, pol, omega + h) - dispersion_k(sphere, pol, omega - h)) / (2.0 * h);
    return kSpeedOfLight * dk;
}

ResonanceTable::ResonanceTable(SphereSpec sphere, Polarization pol, int l_min, int l_max)
    : sphere_(std::move(sphere)), pol_(pol) {
    if (l_min < 1 || l_max < l_min) throw DomainError("ResonanceTable: invalid l range");
    entries_.reserve(static_cast<std::size_t>(l_max - l_min + 1));
    for (int l = l_min; l <= l_max; ++l) {
        const ModeIndex mode(l, pol);
        const double lam = resonance_wavelength(sphere_, mode);
        entries_.push_back({mode, lam, wavelength_to_omega(lam)});
    }
}

ResonanceTable ResonanceTable::for_band(const SphereSpec& sphere, Polarization pol, double lambda_lo,
                                        double lambda_hi) {
    if (!(lambda_lo < lambda_hi)) throw DomainError("ResonanceTable::for_band: empty band");
    const int l_lo = static_cast<int>(std::ceil(continuous_order(sphere, pol, wavelength_to_omega(lambda_hi))));
    const int l_hi = static_cast<int>(std::floor(continuous_order(sphere, pol, wavelength_to_omega(lambda_lo))));
    if (l_hi < l_lo) throw NoRootError("ResonanceTable::for_band: no resonance inside the band");
    return ResonanceTable(sphere, pol, std::max(1, l_lo), l_hi);
}

const Resonance& ResonanceTable::nearest(double lambda_m) const {
    return *std::min_element(entries_.begin(), entries_.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.wavelength - lambda_m) < std::abs(b.wavelength - lambda_m);
    });
}

const Resonance& ResonanceTable::at(int l) const {
    const int i = l - entries_.front().mode.l;
    if (i < 0 || i >= static_cast<int>(entries_.size())) throw DomainError("ResonanceTable::at: l outside table");
    return entries_[static_cast<std::size_t>(i)];
}

double fsr(const SphereSpec& sphere, Polarization pol, double omega) {
    const int l = static_cast<int>(std::floor(continuous_order(sphere, pol, omega)));
    const double w0 = wavelength_to_omega(resonance_wavelength(sphere, ModeIndex(l, pol)));
    const double w1 = wavelength_to_omega(resonance_wavelength(sphere, ModeIndex(l + 1, pol)));
    return w1 - w0;
}

Eigen::VectorXd fsr_drift_curve(const SphereSpec& sphere, Polarization pol,
                                const Eigen::Ref<const Eigen::VectorXd>& omega_grid) {
    Eigen::VectorXd out(omega_grid.size());
    for (Eigen::Index i = 0; i < omega_grid.size(); ++i) out[i] = fsr(sphere, pol, omega_grid[i]);
    return out;
}

}  // namespace wgm
