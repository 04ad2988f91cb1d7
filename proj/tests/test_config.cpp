#include <gtest/gtest.h>

#include <filesystem>

#include "wgm/config.hpp"

using namespace wgm;

namespace {

std::string error_of(const std::string& json) {
    try {
        (void)parse_config(json);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsRoundTripLosslessly) {
    const RunConfig c;
    const std::string text = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(text)), text);
    EXPECT_EQ(dump_config(parse_config("{}")), text);
}

TEST(Config, EditedValuesRoundTrip) {
    RunConfig c;
    c.sphere.radius_m = 180e-6;
    c.mode.l = 1034;
    c.coupling.q_signal = 3.3e7;
    c.coupling.convention = OrderConvention::Azimuthal;
    c.pump.wavelength_nm = 1550.12;
    c.pump.resonance_fwhm_hz.reset();
    c.normalization = Normalization::UnitArea;
    c.analysis.idler_nm = 1561.31;
    c.seed = 42;
    c.scan.seed = c.analysis.synthetic.seed = 42;
    const auto path = std::filesystem::temp_directory_path() / "wgm_config_roundtrip.json";
    save_config(c, path.string());
    const RunConfig r = load_config(path.string());
    EXPECT_EQ(dump_config(r), dump_config(c));
    EXPECT_EQ(r.mode.l, 1034);
    EXPECT_FALSE(r.pump.resonance_fwhm_hz);
    EXPECT_DOUBLE_EQ(r.coupling.q_signal, 3.3e7);
    EXPECT_EQ(r.scan.seed, 42u);
    std::filesystem::remove(path);
}

TEST(Config, FieldPreciseErrors) {
    EXPECT_NE(error_of(R"({"sphere": {"radius_m": -1}})").find("sphere.radius_m"), std::string::npos);
    EXPECT_NE(error_of(R"({"mode": {"q": 2}})").find("mode.q"), std::string::npos);
    EXPECT_NE(error_of(R"({"couplings": {"q_idler": "high"}})").find("couplings.q_idler: expected a number"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"grids": {"jsi_points": 1.5}})").find("grids.jsi_points"), std::string::npos);
    EXPECT_NE(error_of(R"({"analysis": {"synthetic": {"n_t": 1}}})").find("analysis.synthetic.n_t"), std::string::npos);
    EXPECT_NE(error_of(R"({"normalization": "peak"})").find("normalization"), std::string::npos);
    EXPECT_NE(error_of(R"({"pump": {"wavelength_nm": null, "dwdm_channel": null}})").find("pump"), std::string::npos);
}

TEST(Config, UnknownFieldRejected) {
    EXPECT_NE(error_of(R"({"sphere": {"radius": 1e-4}})").find("sphere.radius: unknown field"), std::string::npos);
    EXPECT_NE(error_of(R"({"colour": 1})").find("colour: unknown field"), std::string::npos);
    EXPECT_NE(error_of("{not json").find("<config>"), std::string::npos);
}

TEST(Config, SpectralStepLimit) {
    RunConfig c;
    const double w = kTwoPi * 193.4e12;
    EXPECT_DOUBLE_EQ(spectral_step_hz(c, w), 193.4e12 / 2e8 / 10.0);
    c.grids.omega_step_hz = 50e3;
    EXPECT_DOUBLE_EQ(spectral_step_hz(c, w), 50e3);
    c.grids.omega_step_hz = 200e3;
    try {
        (void)spectral_step_hz(c, w);
        FAIL() << "step above the limit accepted";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("grids.omega_step_hz"), std::string::npos);
    }
}

TEST(Config, SetupFromDefaults) {
    const RunConfig c;
    const wgm::Setup s = make_setup(c, ChannelTable::load_default());
    EXPECT_DOUBLE_EQ(s.pump_nm, 1550.92);
    EXPECT_EQ(s.l_p, 774);
    EXPECT_EQ(s.coupling.l_ref, 774);
    EXPECT_NEAR(s.kerr, 1.54, 0.01);
    RunConfig fixed;
    fixed.mode.l = 780;
    EXPECT_EQ(make_setup(fixed, ChannelTable::load_default()).l_p, 780);
}
