#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "wgm/analysis.hpp"
#include "wgm/cavity.hpp"
#include "wgm/channels.hpp"
#include "wgm/material.hpp"
#include "wgm/resonator.hpp"
#include "wgm/sfwm.hpp"

namespace wgm {

struct SphereConfig {
    double radius_m = 135e-6;
    std::string material_file;  ///< empty: built-in fused silica
};

struct ModeConfig {
    std::optional<int> l;  ///< unset: resonance nearest the pump wavelength
    int q = 1;
    Polarization polarization = Polarization::TE;
};

struct CouplingConfig {
    double q_pump = 1e8;
    double q_signal = 1e8;
    double q_idler = 1e8;
    OrderConvention convention = OrderConvention::Group;
};

struct PumpConfig {
    std::optional<double> wavelength_nm;
    std::optional<int> dwdm_channel = 33;  ///< used when wavelength_nm is unset
    double power_w = 7e-3;
    /// FWHM of the pump Airy function. Unset: derived from q_pump. Zero: monochromatic.
    std::optional<double> resonance_fwhm_hz = 20.4e6;
    double linewidth_hz = 200e3;
    double sweep_span_hz = 1e9;
    double sweep_rate_hz = 100.0;
};

struct KerrConfig {
    double n2_m2_per_w = 2.7e-20;
    double a_eff_m2 = 20e-12;
    bool exact_phasematch = false;
};

struct GridConfig {
    double omega_step_hz = 0.0;           ///< 0: a tenth of the narrowest expected peak FWHM
    int comb_pairs = 3;                   ///< generation modes on each side of the pump
    double peak_window_fwhm = 30.0;       ///< half-width of each comb-peak window
    double pump_window_fwhm_multiples = 6.0;
    int ted_pad = 4;
    int dispersion_modes = 40;            ///< modes on each side of the pump in `dispersion`
    // phasematching rectangle
    double pm_pump_half_span_hz = 12.5e9;
    double pm_omega_half_span_hz = 2e12;
    int pm_pump_points = 51;
    int pm_omega_points = 201;
    // joint spectral intensity windows
    double jsi_half_width_fwhm = 5.0;
    int jsi_points = 101;
    int jsi_stride = 1;
};

struct AnalysisConfig {
    int group_size = 100;
    std::optional<double> idler_nm;  ///< unset: maximum of the spectral marginal
    std::optional<int> signal_dwdm_channel = 47;
    bool subtract_background = true;
    SyntheticSpectrogramSpec synthetic{};
};

struct OutputConfig {
    std::string dir = "out";
};

/// Complete input of one CLI run.
struct RunConfig {
    SphereConfig sphere;
    ModeConfig mode;
    CouplingConfig coupling;
    PumpConfig pump;
    KerrConfig kerr;
    GridConfig grids;
    Normalization normalization = Normalization::UnitMax;
    AnalysisConfig analysis;
    SyntheticScanSpec scan{};
    OutputConfig output;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    /// Throws FormatError naming the offending field.
    void validate() const;
};

[[nodiscard]] RunConfig load_config(const std::string& path);
[[nodiscard]] RunConfig parse_config(const std::string& json_text, const std::string& origin = "<config>");
[[nodiscard]] std::string dump_config(const RunConfig& c);
void save_config(const RunConfig& c, const std::string& path);

/// Objects derived from a validated configuration.
struct Setup {
    SphereSpec sphere;
    std::shared_ptr<const SphereDispersion> dispersion;
    double pump_nm = 0.0;  ///< requested pump wavelength
    int l_p = 0;
    double omega_p0 = 0.0;  ///< resonance frequency of l_p (rad/s)
    CouplingSpec coupling;
    NonlinearParams nonlinear;
    double kerr = 0.0;  ///< 2 gamma P (rad/m)
};

[[nodiscard]] Setup make_setup(const RunConfig& c, const ChannelTable& channels);

/// Spectral source for the configured pump mode.
[[nodiscard]] SfwmSource make_source(const RunConfig& c, const Setup& s);

/// Omega step (Hz) of the spectral grids: the configured value or the default.
[[nodiscard]] double spectral_step_hz(const RunConfig& c, double omega_p0);

}  // namespace wgm
