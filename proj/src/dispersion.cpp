#include "wgm/dispersion.hpp"

#include <algorithm>

#include "wgm/numeric.hpp"

namespace wgm {

double Dispersion::resonance_frequency(int l) const {
    const double m0 = mode_number(1.2e15);
    const double guess = 1.2e15 * l / m0;
    const auto f = [&](double w) { return mode_number(w) - l; };
    const auto [a, b] = expand_bracket(f, guess, 1e-3 * guess, 0.5 * guess, 2.0 * guess);
    return find_root(f, a, b);
}

double Dispersion::group_delay(double omega) const {
    const double h = 1e-5 * omega;
    return (round_trip_phase(omega + h) - round_trip_phase(omega - h)) / (2.0 * h);
}

double SphereDispersion::resonance_frequency(int l) const {
    return wavelength_to_omega(resonance_wavelength(sphere_, ModeIndex(l, pol_)));
}

LinearDispersion LinearDispersion::matched(const Dispersion& d, int l) {
    const double w = d.resonance_frequency(l);
    return LinearDispersion(kTwoPi * kSpeedOfLight * l / (w * d.perimeter()), d.perimeter());
}

LocalPhase make_local_phase(const Dispersion& d, int l) {
    const double w = d.resonance_frequency(l);
    const double t = d.group_delay(w);
    const double h = 0.05 * kTwoPi / t;
    // Offsets relative to l keep the differences free of the large integer part.
    auto m = [&](double x) { return d.mode_number(w + x) - l; };
    const double fm2 = m(-2 * h), fm1 = m(-h), f0 = m(0.0), fp1 = m(h), fp2 = m(2 * h);
    LocalPhase p;
    p.l = l;
    p.omega_l = w;
    p.d1 = kTwoPi * (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
    p.d2 = kTwoPi * (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
    p.d3 = kTwoPi * (-fm2 + 2 * fm1 - 2 * fp1 + fp2) / (2 * h * h * h);
    return p;
}

PhaseTable::PhaseTable(const Dispersion& d, int l_min, int l_max) {
    if (l_max < l_min) throw DomainError("PhaseTable: empty l range");
    phases_.reserve(static_cast<std::size_t>(l_max - l_min + 1));
    for (int l = l_min; l <= l_max; ++l) phases_.push_back(make_local_phase(d, l));
    for (std::size_t i = 0; i + 1 < phases_.size(); ++i)
        midpoints_.push_back(0.5 * (phases_[i].omega_l + phases_[i + 1].omega_l));
}

const LocalPhase& PhaseTable::nearest(double omega) const {
    const auto it = std::upper_bound(midpoints_.begin(), midpoints_.end(), omega);
    return phases_[static_cast<std::size_t>(it - midpoints_.begin())];
}

const LocalPhase& PhaseTable::at(int l) const {
    const int i = l - l_min();
    if (i < 0 || i >= static_cast<int>(phases_.size())) throw DomainError("PhaseTable::at: l outside table");
    return phases_[static_cast<std::size_t>(i)];
}

bool PhaseTable::covers(double omega) const {
    if (phases_.size() < 2) return false;
    const double lo = phases_.front().omega_l - 0.5 * (phases_[1].omega_l - phases_[0].omega_l);
    const auto n = phases_.size();
    const double hi = phases_.back().omega_l + 0.5 * (phases_[n - 1].omega_l - phases_[n - 2].omega_l);
    return omega >= lo && omega <= hi;
}

}  // namespace wgm
