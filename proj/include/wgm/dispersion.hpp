#pragma once

#include <memory>
#include <vector>

#include "wgm/resonator.hpp"

namespace wgm {

/// Round-trip phase model of one mode family: phi(omega) = k(omega) L = 2 pi m(omega).
class Dispersion {
public:
    virtual ~Dispersion() = default;

    /// Continuous azimuthal order m(omega); integer values are resonances.
    [[nodiscard]] virtual double mode_number(double omega) const = 0;
    [[nodiscard]] virtual double perimeter() const = 0;
    /// omega_l with m(omega_l) = l.
    [[nodiscard]] virtual double resonance_frequency(int l) const;

    [[nodiscard]] double wavenumber(double omega) const { return kTwoPi * mode_number(omega) / perimeter(); }
    [[nodiscard]] double round_trip_phase(double omega) const { return kTwoPi * mode_number(omega); }
    /// Round-trip group delay d phi / d omega (s).
    [[nodiscard]] double group_delay(double omega) const;
};

/// Sphere WGM dispersion from the continuous inversion of the resonance condition.
class SphereDispersion final : public Dispersion {
public:
    SphereDispersion(SphereSpec sphere, Polarization pol) : sphere_(std::move(sphere)), pol_(pol) {}

    [[nodiscard]] double mode_number(double omega) const override {
        return continuous_order(sphere_, pol_, omega);
    }
    [[nodiscard]] double perimeter() const override { return sphere_.perimeter(); }
    [[nodiscard]] double resonance_frequency(int l) const override;

    [[nodiscard]] const SphereSpec& sphere() const { return sphere_; }
    [[nodiscard]] Polarization polarization() const { return pol_; }

private:
    SphereSpec sphere_;
    Polarization pol_;
};

/// Dispersionless reference: constant effective index, exactly equidistant resonances.
class LinearDispersion final : public Dispersion {
public:
    LinearDispersion(double n_eff, double perimeter) : n_eff_(n_eff), perimeter_(perimeter) {}

    /// Constant-index model sharing the resonance `l` of `d`.
    [[nodiscard]] static LinearDispersion matched(const Dispersion& d, int l);

    [[nodiscard]] double mode_number(double omega) const override {
        return n_eff_ * omega * perimeter_ / (kTwoPi * kSpeedOfLight);
    }
    [[nodiscard]] double perimeter() const override { return perimeter_; }
    [[nodiscard]] double resonance_frequency(int l) const override {
        return kTwoPi * kSpeedOfLight * l / (n_eff_ * perimeter_);
    }
    [[nodiscard]] double n_eff() const { return n_eff_; }

private:
    double n_eff_;
    double perimeter_;
};

/// Cubic model of phi(omega) - 2 pi l around the resonance omega_l.
///
/// Coefficients are derivatives of the exact round-trip phase, so the offset
/// phase is available without cancellation against 2 pi l.
struct LocalPhase {
    int l = 0;
    double omega_l = 0.0;
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;

    [[nodiscard]] double operator()(double omega) const {
        const double x = omega - omega_l;
        return x * (d1 + x * (0.5 * d2 + x * d3 / 6.0));
    }
};

/// Builds the local phase model at resonance l from 5-point differences of the exact phase.
[[nodiscard]] LocalPhase make_local_phase(const Dispersion& d, int l);

/// Evaluation cache of the round-trip phase over a contiguous range of resonances.
///
/// `offset(omega)` returns phi(omega) - 2 pi l for the nearest resonance l, which
/// is all the Airy lineshapes need; accurate to ~1e-9 rad within half an FSR.
class PhaseTable {
public:
    PhaseTable() = default;
    PhaseTable(const Dispersion& d, int l_min, int l_max);

    [[nodiscard]] const LocalPhase& nearest(double omega) const;
    [[nodiscard]] const LocalPhase& at(int l) const;
    [[nodiscard]] double offset(double omega) const { return nearest(omega)(omega); }
    [[nodiscard]] int l_min() const { return phases_.empty() ? 0 : phases_.front().l; }
    [[nodiscard]] int l_max() const { return phases_.empty() ? -1 : phases_.back().l; }
    [[nodiscard]] bool covers(double omega) const;
    [[nodiscard]] const std::vector<LocalPhase>& phases() const { return phases_; }

private:
    std::vector<LocalPhase> phases_;
    std::vector<double> midpoints_;  // boundaries between consecutive resonances
};

}  // namespace wgm
