#include <gtest/gtest.h>

#include <cmath>

#include "wgm/dispersion.hpp"

using namespace wgm;

namespace {

const SphereDispersion& sphere() {
    static const SphereDispersion d(SphereSpec(135e-6, fused_silica()), Polarization::TE);
    return d;
}

}  // namespace

TEST(SphereDispersion, ResonanceFrequencyMatchesResonanceTable) {
    const double w = sphere().resonance_frequency(774);
    EXPECT_NEAR(omega_to_wavelength(w) * 1e9, 1549.972626, 1e-6);
    EXPECT_NEAR(sphere().mode_number(w), 774.0, 1e-9);
    EXPECT_NEAR(sphere().round_trip_phase(w), kTwoPi * 774, 1e-8);
}

TEST(SphereDispersion, GroupDelayIsRoundTripTime) {
    const double w = sphere().resonance_frequency(774);
    const double fsr = sphere().resonance_frequency(775) - w;
    EXPECT_NEAR(sphere().group_delay(w) * fsr / kTwoPi, 1.0, 1e-4);
}

TEST(LinearDispersion, ExactComb) {
    const auto lin = LinearDispersion::matched(sphere(), 774);
    EXPECT_NEAR(lin.resonance_frequency(774) / sphere().resonance_frequency(774), 1.0, 1e-14);
    const double f1 = lin.resonance_frequency(775) - lin.resonance_frequency(774);
    const double f2 = lin.resonance_frequency(801) - lin.resonance_frequency(800);
    EXPECT_NEAR(f1 / f2, 1.0, 1e-12);
}

TEST(LocalPhase, AccurateWithinHalfAnFsr) {
    const LocalPhase p = make_local_phase(sphere(), 774);
    const double fsr = sphere().resonance_frequency(775) - p.omega_l;
    for (double x = -0.5; x <= 0.5; x += 0.05) {
        const double w = p.omega_l + x * fsr;
        const double exact = sphere().round_trip_phase(w) - kTwoPi * 774;
        EXPECT_NEAR(p(w), exact, 1e-8) << x;
    }
    EXPECT_EQ(p(p.omega_l), 0.0);
}

TEST(PhaseTable, NearestResonanceAndCoverage) {
    const PhaseTable t(sphere(), 770, 780);
    const double w774 = sphere().resonance_frequency(774);
    const double w775 = sphere().resonance_frequency(775);
    EXPECT_EQ(t.nearest(w774 + 0.4 * (w775 - w774)).l, 774);
    EXPECT_EQ(t.nearest(w774 + 0.6 * (w775 - w774)).l, 775);
    EXPECT_TRUE(t.covers(w774));
    EXPECT_FALSE(t.covers(sphere().resonance_frequency(790)));
    EXPECT_EQ(t.at(776).l, 776);
    EXPECT_THROW((void)t.at(781), DomainError);
}
