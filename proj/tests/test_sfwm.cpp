#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wgm/sfwm.hpp"

using namespace wgm;

namespace {

std::shared_ptr<const SphereDispersion> sphere() {
    static const auto d = std::make_shared<const SphereDispersion>(SphereSpec(135e-6, fused_silica()), Polarization::TE);
    return d;
}

double fsr() { return sphere()->resonance_frequency(775) - sphere()->resonance_frequency(774); }

SfwmSource source(double q, std::optional<double> pump_fwhm_hz = 20.4e6,
                  std::shared_ptr<const Dispersion> d = sphere()) {
    CouplingSpec c;
    c.q_pump = c.q_signal = c.q_idler = q;
    SfwmSource s = SfwmSource::shared(std::move(d), 774, c);
    s.pump_fwhm_hz = pump_fwhm_hz;
    return s;
}

/// Direct R_i: full Airy functions of the exact dispersion, integrated by Boost Gauss-Kronrod.
double brute_force_intensity(const SfwmSource& src, double omega) {
    const Dispersion& d = *src.pump;
    const double w0 = d.resonance_frequency(src.l_p);
    const WaveCoupling cp = pump_coupling_for_fwhm(*src.pump_fwhm_hz, d.group_delay(w0));
    const int ls = static_cast<int>(std::lround(d.mode_number(w0 + omega)));
    const int li = static_cast<int>(std::lround(d.mode_number(w0 - omega)));
    const WaveCoupling cs = src.coupling.coupling(Wave::Signal, d, ls);
    const WaveCoupling ci = src.coupling.coupling(Wave::Idler, d, li);
    const auto f = [&](double u) {
        const double wp = w0 + u;
        return std::norm(airy_pump(wp, cp, d)) * std::norm(airy_mode(wp + omega, cs, d)) *
               std::norm(airy_mode(wp - omega, ci, d));
    };
    const double w = src.pump_window_fwhm * kTwoPi * *src.pump_fwhm_hz;
    const double us = d.resonance_frequency(ls) - (w0 + omega);
    const double ui = (w0 - omega) - d.resonance_frequency(li);
    std::vector<double> pts{-w, 0.0, w};
    for (double x : {us, ui})
        if (x > -w && x < w) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 15, 1e-11);
    return total;
}

/// Comb peak heights for j = -n..n, each the maximum over a window of three linewidths.
std::vector<double> peak_heights(double q, int n) {
    const SfwmModel model(source(q), (n + 1) * fsr());
    const auto gm = generation_modes(*sphere(), 774, n);
    const double width = model.omega_p0() / q;
    std::vector<double> h;
    for (const auto& m : gm.modes) {
        const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(121, m.omega - 3 * width, m.omega + 3 * width);
        h.push_back(spectral_intensity_at(model, w).maxCoeff());
    }
    return h;
}

}  // namespace

TEST(Kerr, MagnitudeAndLinearity) {
    NonlinearParams p;
    const double k = kerr_mismatch(p, 1e8, 1.444, 135e-6);
    EXPECT_NEAR(k, 1.543, 0.005);
    EXPECT_NEAR(kTwoPi * 135e-6 * k, 1.31e-3, 0.01e-3);
    p.pump_power_w *= 2;
    EXPECT_NEAR(kerr_mismatch(p, 1e8, 1.444, 135e-6) / k, 2.0, 1e-12);
    p.pump_power_w = -1;
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(Phasematch, ZeroAndSymmetricWithoutKerr) {
    const double w0 = sphere()->resonance_frequency(774);
    EXPECT_EQ(phase_mismatch(w0, 0.0, *sphere(), 0.0), 0.0);
    EXPECT_DOUBLE_EQ(phase_mismatch(w0, 0.0, *sphere(), 1.5), -1.5);
    for (double f : {1e9, 1e11, 1e12}) {
        const double w = kTwoPi * f;
        EXPECT_NEAR(phase_mismatch(w0, w, *sphere(), 0.0), phase_mismatch(w0, -w, *sphere(), 0.0), 1e-9);
    }
}

TEST(Phasematch, StrengthFunction) {
    EXPECT_DOUBLE_EQ(phasematch_strength(0.0).g2, 1.0);
    EXPECT_NEAR(std::abs(phasematch_strength(0.0).g - 1.0), 0.0, 1e-15);
    const double s = std::sin(0.245) / 0.245;
    EXPECT_NEAR(phasematch_strength(0.49).g2, s * s, 1e-14);
    EXPECT_NEAR(phasematch_strength(0.49).g2, 0.98, 0.001);
    EXPECT_NEAR(phasematch_strength(kTwoPi).g2, 0.0, 1e-30);
    EXPECT_NEAR(std::norm(phasematch_strength(1.3).g), phasematch_strength(1.3).g2, 1e-15);
}

TEST(Phasematch, NearUnityOverPumpSweep) {
    NonlinearParams p;
    const double kerr = kerr_mismatch(p, 1e8, 1.444, 135e-6);
    const auto m = phasematch_map(*sphere(), sphere()->resonance_frequency(774), kerr, kTwoPi * 12.5e9, 11,
                                  kTwoPi * 2e12, 41);
    EXPECT_LT(m.max_abs_l_delta_kappa, 0.49);
    EXPECT_GT(m.min_g2, 0.98);
    EXPECT_EQ(m.g2.rows(), 11);
    EXPECT_EQ(m.g2.cols(), 41);
}

TEST(Phasematch, LargeSphereLosesPhasematching) {
    const SphereDispersion big(SphereSpec(1.35, fused_silica()), Polarization::TE);
    const int l = static_cast<int>(std::lround(big.mode_number(wavelength_to_omega(1550e-9))));
    const auto m = phasematch_map(big, big.resonance_frequency(l), 0.0, kTwoPi * 12.5e9, 5, kTwoPi * 2e12, 41);
    EXPECT_LT(m.min_g2, 0.5);
}

TEST(GenerationModes, EnergyDefect) {
    const auto gm = generation_modes(*sphere(), 774, 5);
    ASSERT_EQ(gm.modes.size(), 11u);
    for (std::size_t i = 0; i < gm.modes.size(); ++i) {
        const auto& m = gm.modes[i];
        EXPECT_EQ(m.j, static_cast<int>(i) - 5);
        EXPECT_EQ(m.l_s, 774 + m.j);
        EXPECT_EQ(m.l_i, 774 - m.j);
        EXPECT_NEAR(m.epsilon, m.omega_s + m.omega_i - 2 * gm.omega_p, 1e-3);
    }
    EXPECT_EQ(gm.modes[5].epsilon, 0.0);
    for (int j = 1; j < 5; ++j) EXPECT_GT(std::abs(gm.modes[5 + j + 1].epsilon), std::abs(gm.modes[5 + j].epsilon));
    EXPECT_THROW((void)generation_modes(*sphere(), 774, 0), DomainError);
}

TEST(GenerationModes, LinearDispersionHasNoDefect) {
    const auto lin = LinearDispersion::matched(*sphere(), 774);
    const auto gm = generation_modes(lin, 774, 5);
    for (const auto& m : gm.modes) EXPECT_LT(std::abs(m.epsilon), 1e-6 * fsr());
}

TEST(SpectralIntensity, NonNegative) {
    const SfwmModel model(source(1e7), 4 * fsr());
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(2001, -3.2 * fsr(), 3.2 * fsr());
    EXPECT_GE(spectral_intensity_at(model, w).minCoeff(), 0.0);
}

TEST(SpectralIntensity, MatchesBruteForceOracle) {
    const SfwmSource src = source(1e7);
    const SfwmModel model(src, 3 * fsr());
    const double lw = kTwoPi * model.omega_p0() / kTwoPi / 1e7;
    for (double w : {0.0, 0.3 * lw, fsr() + 0.2 * lw, -2 * fsr() - 0.5 * lw}) {
        const double a = model.intensity(w);
        const double b = brute_force_intensity(src, w);
        EXPECT_NEAR(a / b, 1.0, 1e-6) << w;
    }
}

TEST(SpectralIntensity, SymmetricForLinearDispersion) {
    const auto lin = std::make_shared<const LinearDispersion>(LinearDispersion::matched(*sphere(), 774));
    for (std::optional<double> pump : {std::optional<double>(0.0), std::optional<double>(20.4e6)}) {
        const SfwmModel model(source(1e7, pump, lin), 4 * fsr());
        for (double f : {0.37, 1.02, 2.001, 2.99}) {
            const double w = f * fsr();
            const double a = model.intensity(w), b = model.intensity(-w);
            EXPECT_NEAR(a, b, 1e-9 * std::max(a, b)) << f;
        }
    }
}

TEST(SpectralIntensity, ExactPhasematchingChangesLittle) {
    SfwmSource src = source(1e7);
    const SfwmModel plain(src, 4 * fsr());
    src.exact_phasematch = true;
    src.kerr = kerr_mismatch(NonlinearParams{}, 1e7, 1.444, 135e-6);
    const SfwmModel exact(src, 4 * fsr());
    for (int j = -3; j <= 3; ++j) {
        const double w = j * fsr();
        EXPECT_NEAR(exact.intensity(w) / plain.intensity(w), 1.0, 0.01) << j;
    }
}

TEST(SpectralIntensity, QuadratureConverged) {
    SfwmSource src = source(1e8);
    const SfwmModel a(src, 2 * fsr());
    src.quad.rel_tol = 1e-12;
    const SfwmModel b(src, 2 * fsr());
    for (double w : {0.0, 1e6, fsr() + 3e6}) EXPECT_NEAR(a.intensity(w) / b.intensity(w), 1.0, 1e-6);
}

TEST(SpectralIntensity, CentralPeakWidth) {
    const SfwmModel model(source(1e7), 2 * fsr());
    const double nu = model.omega_p0() / kTwoPi;
    const double step = kTwoPi * nu / (2e7) / 10.0;
    const auto s = spectral_intensity(model, SpectralGrid::symmetric(30 * kTwoPi * nu / 1e7, step));
    const double fwhm = sampled_fwhm(s.omega(), s.values) / kTwoPi;
    EXPECT_GT(fwhm, nu / 2e7);
    EXPECT_LT(fwhm, nu / 1e7);
    EXPECT_NEAR(fwhm / 16.34e6, 1.0, 0.01);
}

TEST(SpectralIntensity, LowerQRaisesMorePeaks) {
    const auto count = [](const std::vector<double>& h) {
        const double m = *std::max_element(h.begin(), h.end());
        return std::count_if(h.begin(), h.end(), [&](double v) { return v >= 0.5 * m; });
    };
    const auto lo = peak_heights(1e6, 12);
    const auto hi = peak_heights(1e8, 12);
    EXPECT_GT(count(lo), count(hi));
}

TEST(SpectralIntensity, EnvelopeNarrowsWithQ) {
    const auto second_moment = [](const std::vector<double>& h) {
        const int n = static_cast<int>(h.size() / 2);
        double a = 0.0, b = 0.0;
        for (int k = 0; k < static_cast<int>(h.size()); ++k) {
            a += double(k - n) * double(k - n) * h[k];
            b += h[k];
        }
        return a / b;
    };
    const double m6 = second_moment(peak_heights(1e6, 12));
    const double m7 = second_moment(peak_heights(1e7, 12));
    const double m8 = second_moment(peak_heights(1e8, 12));
    EXPECT_GT(m6, m7);
    EXPECT_GT(m7, m8);
}

TEST(SpectralIntensity, Normalization) {
    const SfwmModel model(source(1e7), 2 * fsr());
    const double step = model.omega_p0() / 2e7 / 10.0;
    const auto grid = SpectralGrid::symmetric(20 * model.omega_p0() / 1e7, step);
    const auto none = spectral_intensity(model, grid);
    const auto unit_max = spectral_intensity(model, grid, Normalization::UnitMax);
    const auto unit_area = spectral_intensity(model, grid, Normalization::UnitArea);
    EXPECT_DOUBLE_EQ(unit_max.values.maxCoeff(), 1.0);
    EXPECT_NEAR(unit_area.values.sum() * step, 1.0, 1e-12);
    EXPECT_NEAR((unit_max.values * none.values.maxCoeff() - none.values).cwiseAbs().maxCoeff(), 0.0,
                1e-12 * none.values.maxCoeff());
    EXPECT_EQ(parse_normalization("unit-max"), Normalization::UnitMax);
    EXPECT_THROW((void)parse_normalization("peak"), FormatError);
}

TEST(SpectralIntensity, CoarseGridRejected) {
    const SfwmModel model(source(1e8), 2 * fsr());
    const double limit = model.omega_p0() / 2e8 / 10.0;
    EXPECT_NO_THROW((void)spectral_intensity(model, SpectralGrid::symmetric(10 * limit, limit)));
    EXPECT_THROW((void)spectral_intensity(model, SpectralGrid::symmetric(10 * limit, 1.01 * limit)), PreconditionError);
}

TEST(SpectralIntensity, PumpWindowPrecondition) {
    SfwmSource src = source(1e7);
    src.pump_window_fwhm = 3.0;
    EXPECT_THROW(SfwmModel(src, fsr()), PreconditionError);
}

TEST(Jsi, RegionsCentredOnResonances) {
    const SfwmModel model(source(1e7), 4 * fsr());
    const auto gm = generation_modes(*sphere(), 774, 3);
    const double width = model.omega_p0() / 1e7;
    const auto regions = jsi_regions(model, gm, 5 * width, 101);
    ASSERT_EQ(regions.size(), 7u);
    const double step = 10 * width / 100 * 1.001;  // absolute frequencies carry ~0.2 rad/s of rounding
    for (const auto& r : regions) {
        Eigen::Index a = 0, b = 0;
        r.jsi.values.maxCoeff(&a, &b);
        EXPECT_LE(std::abs(r.jsi.omega_s[a] - r.mode.omega_s), step);
        EXPECT_LE(std::abs(r.jsi.omega_i[b] - r.mode.omega_i), step);
    }
    for (std::size_t k = 1; k < regions.size(); ++k) {
        const double spacing = regions[k].mode.omega - regions[k - 1].mode.omega;
        EXPECT_NEAR(spacing / fsr(), 1.0, 1e-3);
        EXPECT_NEAR(spacing, 1.529e12, 0.01e12);
    }
    EXPECT_EQ(jsi_regions(model, gm, 5 * width, 11, 2).size(), 3u);
}

TEST(Jsi, CentralRegionSymmetric) {
    const SfwmModel model(source(1e7), 2 * fsr());
    const auto gm = generation_modes(*sphere(), 774, 1);
    const auto regions = jsi_regions(model, gm, 5 * model.omega_p0() / 1e7, 41);
    const auto& c = regions[1];
    ASSERT_EQ(c.mode.j, 0);
    const double m = c.jsi.values.maxCoeff();
    EXPECT_NEAR((c.jsi.values - c.jsi.values.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-9 * m);
}

TEST(Jsi, PureStateOnEnergyDiagonal) {
    const SfwmModel model(source(1e7), 2 * fsr());
    const double w0 = model.omega_p0();
    const double h = w0 / 1e7 / 10;
    const Eigen::VectorXd ws = Eigen::VectorXd::LinSpaced(41, w0 - 20 * h, w0 + 20 * h);
    const auto j = jsi_pure(model, ws, ws, w0);
    for (Eigen::Index a = 0; a < ws.size(); ++a)
        for (Eigen::Index b = 0; b < ws.size(); ++b) {
            if (a + b != ws.size() - 1) {
                EXPECT_EQ(j.values(a, b), 0.0);
            }
        }
    EXPECT_GT(j.values(20, 20), 0.0);
}
