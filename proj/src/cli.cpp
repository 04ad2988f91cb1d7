#include "wgm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wgm/analysis.hpp"
#include "wgm/cavity.hpp"
#include "wgm/channels.hpp"
#include "wgm/config.hpp"
#include "wgm/constants.hpp"
#include "wgm/errors.hpp"
#include "wgm/numeric.hpp"
#include "wgm/resonator.hpp"
#include "wgm/sfwm.hpp"
#include "wgm/temporal.hpp"

namespace wgm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV file with a unit-bearing header and %.17g numbers.
class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
        if (!out_) throw FormatError("cannot write " + path.string());
        out_ << header << '\n';
    }
    Csv& operator<<(double v) { return cell(fmt(v)); }
    Csv& operator<<(int v) { return cell(std::to_string(v)); }
    Csv& operator<<(const std::string& v) { return cell(v); }
    void end() {
        out_ << '\n';
        first_ = true;
    }

private:
    Csv& cell(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }
    fs::path path_;
    std::ofstream out_;
    bool first_ = true;
};

void write_matrix(const fs::path& path, const std::string& corner, const Eigen::VectorXd& rows,
                  const Eigen::VectorXd& cols, const Eigen::MatrixXd& m) {
    Csv csv(path, [&] {
        std::string h = corner;
        for (Eigen::Index j = 0; j < cols.size(); ++j) h += "," + fmt(cols[j]);
        return h;
    }());
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
        csv << rows[i];
        for (Eigen::Index j = 0; j < cols.size(); ++j) csv << m(i, j);
        csv.end();
    }
}

void write_json(const fs::path& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_ted(const fs::path& path, const TedTrace& t) {
    // TedTrace::write_csv holds the canonical format.
    t.write_csv(path.string());
}

struct Options {
    std::string config;
    std::string out_dir;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> q, q_pump, q_signal, q_idler;
    std::optional<double> radius_um;
    std::optional<double> pump_nm;
    std::optional<int> l;
    std::optional<int> pairs;
    std::optional<double> step_hz;
    std::optional<std::string> normalization;
    // subcommand-specific
    double lambda_min_nm = 1500.0;
    double lambda_max_nm = 1600.0;
    int ted_peaks = 0;
    double ted_span_fwhm = 100.0;
    std::optional<double> idler_nm;
    std::optional<int> group_size;
    std::string channel_kind = "dwdm";
    std::optional<int> channel_index;
};

class Runner {
public:
    Runner(RunConfig cfg, const Options& o, std::ostream& out)
        : cfg_(std::move(cfg)), opt_(o), out_(out), dir_(cfg_.output.dir) {}

    void prepare_dir() {
        fs::create_directories(dir_);
    }

    void resonances() {
        const Setup s = setup();
        const auto table = ResonanceTable::for_band(s.sphere, cfg_.mode.polarization, opt_.lambda_min_nm * 1e-9,
                                                    opt_.lambda_max_nm * 1e-9);
        const auto path = dir_ / "resonances.csv";
        Csv csv(path, "l,q,polarization,lambda_nm,freq_THz,fsr_GHz");
        const auto& e = table.entries();
        for (const auto& r : e) {
            const double next = s.dispersion->resonance_frequency(r.mode.l + 1);
            csv << r.mode.l << r.mode.q << to_string(r.mode.polarization) << r.wavelength * 1e9
                << r.omega / kTwoPi * 1e-12 << (next - r.omega) / kTwoPi * 1e-9;
            csv.end();
        }
        const auto& near = table.nearest(s.pump_nm * 1e-9);
        wrote(path);
        out_ << "nearest to " << fmt(s.pump_nm) << " nm: l = " << near.mode.l << " at " << fmt(near.wavelength * 1e9)
             << " nm\n";
    }

    void dispersion() {
        const Setup s = setup();
        const int n = cfg_.grids.dispersion_modes;
        const double fsr0 = s.dispersion->resonance_frequency(s.l_p + 1) - s.omega_p0;
        const auto path = dir_ / "dispersion.csv";
        Csv csv(path, "l,lambda_nm,freq_THz,k_rad_per_m,n_eff,n_g_eff,fsr_GHz,fsr_drift_Hz");
        for (int l = s.l_p - n; l <= s.l_p + n; ++l) {
            const double w = s.dispersion->resonance_frequency(l);
            const double w1 = s.dispersion->resonance_frequency(l + 1);
            const double lam = omega_to_wavelength(w);
            const ModeIndex mode(l, cfg_.mode.polarization);
            const double fsr = w1 - w;
            csv << l << lam * 1e9 << w / kTwoPi * 1e-12 << dispersion_k(s.sphere, cfg_.mode.polarization, w)
                << effective_index(s.sphere, mode, lam) << effective_group_index(s.sphere, cfg_.mode.polarization, w)
                << fsr / kTwoPi * 1e-9 << (fsr - fsr0) / kTwoPi;
            csv.end();
        }
        wrote(path);
    }

    void phasematch() {
        const Setup s = setup();
        const auto& g = cfg_.grids;
        const PhasematchMap m =
            phasematch_map(*s.dispersion, s.omega_p0, s.kerr, kTwoPi * g.pm_pump_half_span_hz, g.pm_pump_points,
                           kTwoPi * g.pm_omega_half_span_hz, g.pm_omega_points, cfg_.threads);
        const auto path = dir_ / "phasematch.csv";
        write_matrix(path, "pump_detuning_Hz\\omega_offset_Hz", m.pump_detuning / kTwoPi, m.omega / kTwoPi, m.g2);
        const auto summary = dir_ / "phasematch_summary.json";
        ordered_json j;
        j["radius_m"] = cfg_.sphere.radius_m;
        j["l_p"] = s.l_p;
        j["kerr_rad_per_m"] = s.kerr;
        j["min_g2"] = m.min_g2;
        j["max_abs_l_delta_kappa"] = m.max_abs_l_delta_kappa;
        write_json(summary, j);
        wrote(path);
        wrote(summary);
        out_ << "min |g|^2 = " << fmt(m.min_g2) << "\n";
    }

    void jsi() {
        const Setup s = setup();
        const int n = pairs();
        const auto gm = generation_modes(*s.dispersion, s.l_p, n);
        const SfwmModel model(make_source(cfg_, s), (n + 1) * fsr(s));
        const double width = s.omega_p0 / std::min(cfg_.coupling.q_signal, cfg_.coupling.q_idler);
        const auto regions =
            jsi_regions(model, gm, cfg_.grids.jsi_half_width_fwhm * width, cfg_.grids.jsi_points, cfg_.grids.jsi_stride);
        const auto modes_path = dir_ / "jsi_modes.csv";
        Csv csv(modes_path, "j,l_s,l_i,signal_offset_Hz,idler_offset_Hz,omega_offset_Hz,epsilon_Hz");
        for (const auto& m : gm.modes) {
            csv << m.j << m.l_s << m.l_i << (m.omega_s - s.omega_p0) / kTwoPi << (m.omega_i - s.omega_p0) / kTwoPi
                << m.omega / kTwoPi << m.epsilon / kTwoPi;
            csv.end();
        }
        wrote(modes_path);
        for (const auto& r : regions) {
            const auto path = dir_ / ("jsi_j" + std::to_string(r.mode.j) + ".csv");
            write_matrix(path, "omega_s_offset_Hz\\omega_i_offset_Hz", (r.jsi.omega_s.array() - s.omega_p0) / kTwoPi,
                         (r.jsi.omega_i.array() - s.omega_p0) / kTwoPi, r.jsi.values);
            wrote(path);
        }
    }

    void comb() {
        const Setup s = setup();
        const int n = pairs();
        const auto gm = generation_modes(*s.dispersion, s.l_p, n);
        const SfwmModel model(make_source(cfg_, s), (n + 1) * fsr(s));
        const double step = kTwoPi * spectral_step_hz(cfg_, s.omega_p0);
        const double width = s.omega_p0 / std::min(cfg_.coupling.q_signal, cfg_.coupling.q_idler);
        const double half = cfg_.grids.peak_window_fwhm * width;

        struct Window {
            int j;
            Eigen::VectorXd omega, values;
        };
        std::vector<Window> windows;
        std::vector<double> all;
        for (const auto& m : gm.modes) {
            const SpectralGrid grid = SpectralGrid::lattice(m.omega - half, m.omega + half, step);
            windows.push_back({m.j, grid.points(), spectral_intensity_at(model, grid.points(), cfg_.threads)});
        }
        double scale = 1.0;
        if (cfg_.normalization == Normalization::UnitMax) {
            double mx = 0.0;
            for (const auto& w : windows) mx = std::max(mx, w.values.maxCoeff());
            scale = mx > 0.0 ? 1.0 / mx : 1.0;
        } else if (cfg_.normalization == Normalization::UnitArea) {
            double area = 0.0;
            for (const auto& w : windows) area += w.values.sum() * step / kTwoPi;
            scale = area > 0.0 ? 1.0 / area : 1.0;
        }
        const auto path = dir_ / "comb.csv";
        const auto peaks_path = dir_ / "comb_peaks.csv";
        Csv csv(path, "omega_offset_Hz,intensity");
        Csv pk(peaks_path, "j,omega_offset_Hz,peak_intensity,fwhm_Hz");
        for (const auto& w : windows) {
            for (Eigen::Index i = 0; i < w.omega.size(); ++i) {
                csv << w.omega[i] / kTwoPi << w.values[i] * scale;
                csv.end();
            }
            Eigen::Index im = 0;
            const double peak = w.values.maxCoeff(&im);
            pk << w.j << w.omega[im] / kTwoPi << peak * scale << sampled_fwhm(w.omega, w.values) / kTwoPi;
            pk.end();
        }
        wrote(path);
        wrote(peaks_path);
    }

    void ted() {
        const Setup s = setup();
        const double step = kTwoPi * spectral_step_hz(cfg_, s.omega_p0);
        const double width = s.omega_p0 / std::min(cfg_.coupling.q_signal, cfg_.coupling.q_idler);
        const double span = opt_.ted_peaks > 0 ? (opt_.ted_peaks + 0.5) * fsr(s) : opt_.ted_span_fwhm * width;
        const SfwmModel model(make_source(cfg_, s), span + fsr(s));
        const BiphotonSpectrum spec =
            spectral_intensity(model, SpectralGrid::symmetric(span, step), cfg_.normalization, cfg_.threads);
        const TedTrace t = ted_from_spectrum(spec, cfg_.grids.ted_pad);
        const auto path = dir_ / "ted.csv";
        write_ted(path, t);
        wrote(path);
        ordered_json j;
        j["l_p"] = s.l_p;
        j["peaks_each_side"] = opt_.ted_peaks;
        j["imag_residual"] = t.imag_residual;
        if (opt_.ted_peaks > 0) {
            const TedTrace env = tooth_envelope(t, kTwoPi / fsr(s));
            const auto env_path = dir_ / "ted_envelope.csv";
            write_ted(env_path, env);
            wrote(env_path);
            j["envelope_efold_s"] = efold_width(env.times(), env.values);
            j["round_trip_time_s"] = kTwoPi / fsr(s);
        } else {
            j["fwhm_s"] = sampled_fwhm(t.times(), t.values);
            j["efold_s"] = efold_width(t.times(), t.values);
        }
        const auto summary = dir_ / "ted_summary.json";
        write_json(summary, j);
        wrote(summary);
    }

    void herald_width() {
        TedTrace env;
        double idler_nm = 0.0;
        if (!opt_.input.empty()) {
            if (!opt_.idler_nm) throw FormatError("--idler-nm: required with --input");
            env = TedTrace::read_csv(opt_.input);
            idler_nm = *opt_.idler_nm;
        } else {
            const Setup s = setup();
            const double step = kTwoPi * spectral_step_hz(cfg_, s.omega_p0);
            const double width = s.omega_p0 / std::min(cfg_.coupling.q_signal, cfg_.coupling.q_idler);
            const double span = opt_.ted_span_fwhm * width;
            const SfwmModel model(make_source(cfg_, s), span + fsr(s));
            const BiphotonSpectrum spec =
                spectral_intensity(model, SpectralGrid::symmetric(span, step), Normalization::UnitMax, cfg_.threads);
            env = ted_from_spectrum(spec, cfg_.grids.ted_pad);
            env.imag.resize(0);
            idler_nm = opt_.idler_nm.value_or(omega_to_wavelength(s.omega_p0) * 1e9);
        }
        LinewidthOptions lo;
        lo.subtract_background = !opt_.input.empty() && cfg_.analysis.subtract_background;
        const LinewidthReport r = infer_linewidth(env, idler_nm, lo);
        const auto path = dir_ / "lineshape.csv";
        Csv csv(path, "omega_offset_Hz,h");
        for (Eigen::Index i = 0; i < r.lineshape.omega.size(); ++i) {
            csv << r.lineshape.omega[i] / kTwoPi << r.lineshape.h[i];
            csv.end();
        }
        const auto summary = dir_ / "herald_width.json";
        write_json(summary, report_json(r));
        wrote(path);
        wrote(summary);
        out_ << "linewidth " << fmt(r.linewidth_hz) << " Hz, Q " << fmt(r.q) << "\n";
    }

    void fit_airy_cmd() {
        TransmissionScan scan;
        if (!opt_.input.empty()) {
            scan = TransmissionScan::read_csv(opt_.input);
        } else {
            SyntheticScanSpec spec = cfg_.scan;
            spec.seed = cfg_.seed;
            scan = synthetic_scan(spec);
            const auto scan_path = dir_ / "scan.csv";
            scan.write_csv(scan_path.string());
            wrote(scan_path);
        }
        AiryFitOptions fo;
        fo.fsr_hz = cfg_.scan.fsr_hz;
        const AiryFitResult r = fit_airy(scan, fo);
        ordered_json j;
        j["center_hz"] = r.center_hz;
        j["center_sigma_hz"] = r.center_sigma_hz;
        j["fwhm_hz"] = r.fwhm_hz;
        j["fwhm_sigma_hz"] = r.fwhm_sigma_hz;
        j["depth"] = r.depth;
        j["depth_sigma"] = r.depth_sigma;
        j["offset"] = r.offset;
        j["baseline"] = r.baseline;
        j["noise_floor"] = r.noise_floor;
        j["rms_residual"] = r.rms_residual;
        j["iterations"] = r.iterations;
        const auto path = dir_ / "fit_airy.json";
        write_json(path, j);
        wrote(path);
        out_ << "FWHM " << fmt(r.fwhm_hz) << " +- " << fmt(r.fwhm_sigma_hz) << " Hz\n";
    }

    void spectrogram() {
        SyntheticSpectrogramSpec spec = cfg_.analysis.synthetic;
        spec.seed = cfg_.seed;
        const Spectrogram2D sg = synthetic_spectrogram(spec);
        const auto path = dir_ / "spectrogram.txt";
        write_spectrogram(sg, path.string());
        wrote(path);
    }

    void analyze() {
        Spectrogram2D sg;
        if (!opt_.input.empty()) {
            sg = ingest_spectrogram(opt_.input);
        } else {
            SyntheticSpectrogramSpec spec = cfg_.analysis.synthetic;
            spec.seed = cfg_.seed;
            sg = synthetic_spectrogram(spec);
        }
        SpectrogramAnalysisOptions ao;
        ao.group_size = opt_.group_size.value_or(cfg_.analysis.group_size);
        ao.idler_nm = opt_.idler_nm ? opt_.idler_nm : cfg_.analysis.idler_nm;
        ao.linewidth.subtract_background = cfg_.analysis.subtract_background;
        const SpectrogramAnalysis a = analyze_spectrogram(sg, ao);

        const auto spath = dir_ / "spectral_marginal.csv";
        Csv sc(spath, "lambda_nm,counts");
        for (Eigen::Index i = 0; i < a.marginals.lambda_nm.size(); ++i) {
            sc << a.marginals.lambda_nm[i] << a.marginals.spectral[i];
            sc.end();
        }
        const auto tpath = dir_ / "temporal_marginal.csv";
        Csv tc(tpath, "T_us,counts");
        for (Eigen::Index i = 0; i < a.marginals.t_s.size(); ++i) {
            tc << a.marginals.t_s[i] * 1e6 << a.marginals.temporal[i];
            tc.end();
        }
        const auto epath = dir_ / "ted_envelope.csv";
        write_ted(epath, a.envelope);
        const auto lpath = dir_ / "lineshape.csv";
        Csv lc(lpath, "omega_offset_Hz,h");
        for (Eigen::Index i = 0; i < a.linewidth.lineshape.omega.size(); ++i) {
            lc << a.linewidth.lineshape.omega[i] / kTwoPi << a.linewidth.lineshape.h[i];
            lc.end();
        }

        ordered_json j = report_json(a.linewidth);
        j["total_counts"] = a.marginals.total;
        j["group_size"] = ao.group_size;
        j["envelope_points"] = a.envelope.size();
        j["envelope_truncated"] = a.envelope.truncated;
        if (cfg_.analysis.signal_dwdm_channel) {
            const ChannelTable& ch = channels();
            const double pump_nm = cfg_.pump.wavelength_nm
                                       ? *cfg_.pump.wavelength_nm
                                       : ch.lookup(ChannelKind::DWDM, *cfg_.pump.dwdm_channel).center_nm;
            const double signal_nm = ch.lookup(ChannelKind::DWDM, *cfg_.analysis.signal_dwdm_channel).center_nm;
            const EnergyCheck e = check_energy_conservation(pump_nm, signal_nm, a.idler_nm);
            j["energy_check"] = {{"pump_nm", pump_nm},
                                 {"signal_nm", signal_nm},
                                 {"predicted_idler_nm", e.predicted_nm},
                                 {"measured_idler_nm", e.expected_nm},
                                 {"deviation_nm", e.deviation_nm},
                                 {"tolerance_nm", e.tolerance_nm},
                                 {"ok", e.ok}};
        }
        const auto jpath = dir_ / "analysis.json";
        write_json(jpath, j);
        for (const auto& p : {spath, tpath, epath, lpath, jpath}) wrote(p);
        out_ << "idler " << fmt(a.idler_nm) << " nm, linewidth " << fmt(a.linewidth.linewidth_hz) << " Hz, Q "
             << fmt(a.linewidth.q) << "\n";
    }

    void channel() {
        const ChannelTable& ch = channels();
        const ChannelKind kind = parse_channel_kind(opt_.channel_kind);
        const auto path = dir_ / (opt_.channel_kind == "cwdm" || opt_.channel_kind == "CWDM" ? "cwdm.csv" : "dwdm.csv");
        Csv csv(path, "channel,center_nm,fwhm_nm,extrapolated");
        for (const auto& c : ch.channels(kind)) {
            if (opt_.channel_index && c.index != *opt_.channel_index) continue;
            csv << c.index << c.center_nm << c.fwhm_nm << std::string(c.extrapolated ? "true" : "false");
            csv.end();
        }
        if (opt_.channel_index) {
            const Channel& c = ch.lookup(kind, *opt_.channel_index);
            out_ << "channel " << c.index << ": " << fmt(c.center_nm) << " nm, FWHM " << fmt(c.fwhm_nm) << " nm"
                 << (c.extrapolated ? " (extrapolated)" : "") << "\n";
        }
        wrote(path);
    }

    void init_config() {
        const auto path = dir_ / "config.json";
        save_config(cfg_, path.string());
        wrote(path);
    }

private:
    const ChannelTable& channels() {
        if (!channels_) channels_ = ChannelTable::load_default();
        return *channels_;
    }

    Setup setup() { return make_setup(cfg_, channels()); }

    int pairs() const { return cfg_.grids.comb_pairs; }

    static double fsr(const Setup& s) { return s.dispersion->resonance_frequency(s.l_p + 1) - s.omega_p0; }

    static ordered_json report_json(const LinewidthReport& r) {
        ordered_json j;
        j["idler_nm"] = r.idler_nm;
        j["linewidth_hz"] = r.linewidth_hz;
        j["q"] = r.q;
        j["ted_fwhm_us"] = r.ted_fwhm_s * 1e6;
        j["ted_efold_us"] = r.ted_efold_s * 1e6;
        j["background"] = r.background;
        j["windowed"] = r.windowed;
        return j;
    }

    void wrote(const fs::path& p) { out_ << "wrote " << p.string() << "\n"; }

    RunConfig cfg_;
    const Options& opt_;
    std::ostream& out_;
    fs::path dir_;
    std::optional<ChannelTable> channels_;
};

void apply_overrides(RunConfig& c, const Options& o) {
    if (!o.out_dir.empty()) c.output.dir = o.out_dir;
    if (o.seed) c.seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (o.q) c.coupling.q_pump = c.coupling.q_signal = c.coupling.q_idler = *o.q;
    if (o.q_pump) c.coupling.q_pump = *o.q_pump;
    if (o.q_signal) c.coupling.q_signal = *o.q_signal;
    if (o.q_idler) c.coupling.q_idler = *o.q_idler;
    if (o.radius_um) c.sphere.radius_m = *o.radius_um * 1e-6;
    if (o.pump_nm) c.pump.wavelength_nm = *o.pump_nm;
    if (o.l) c.mode.l = *o.l;
    if (o.pairs) c.grids.comb_pairs = *o.pairs;
    if (o.step_hz) c.grids.omega_step_hz = *o.step_hz;
    if (o.normalization) c.normalization = parse_normalization(*o.normalization);
    c.scan.seed = c.seed;
    c.analysis.synthetic.seed = c.seed;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const FormatError*>(&e)) return kExitFormat;
    if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const UnsupportedModeError*>(&e)) return kExitDomain;
    if (dynamic_cast<const PreconditionError*>(&e)) return kExitPrecondition;
    if (dynamic_cast<const NoRootError*>(&e) || dynamic_cast<const ConvergenceError*>(&e)) return kExitNumeric;
    return kExitOther;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cavity-enhanced four-wave mixing in microsphere resonators"};
    app.require_subcommand(1);
    Options o;

    const auto common = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
        sc->add_option("--out-dir", o.out_dir, "Output directory");
        sc->add_option("--seed", o.seed, "Seed of synthetic-noise generators");
        sc->add_option("--threads", o.threads, "Worker threads for grid evaluation");
    };
    const auto physics = [&](CLI::App* sc) {
        sc->add_option("--q", o.q, "Q of pump, signal and idler");
        sc->add_option("--q-pump", o.q_pump, "Pump Q");
        sc->add_option("--q-signal", o.q_signal, "Signal Q");
        sc->add_option("--q-idler", o.q_idler, "Idler Q");
        sc->add_option("--radius-um", o.radius_um, "Sphere radius (um)");
        sc->add_option("--pump-nm", o.pump_nm, "Pump wavelength (nm)");
        sc->add_option("--l", o.l, "Pump azimuthal index");
        sc->add_option("--pairs", o.pairs, "Generation modes on each side of the pump");
        sc->add_option("--step-hz", o.step_hz, "Omega grid step (Hz)");
        sc->add_option("--normalization", o.normalization, "none, unit-max or unit-area");
    };

    std::map<std::string, std::function<void(Runner&)>> actions;
    const auto add = [&](const std::string& name, const std::string& help, std::function<void(Runner&)> fn,
                         bool with_physics) {
        CLI::App* sc = app.add_subcommand(name, help);
        common(sc);
        if (with_physics) physics(sc);
        actions[name] = std::move(fn);
        return sc;
    };

    auto* res = add("resonances", "Resonance table around the pump", [](Runner& r) { r.resonances(); }, true);
    res->add_option("--lambda-min", o.lambda_min_nm, "Band start (nm)");
    res->add_option("--lambda-max", o.lambda_max_nm, "Band end (nm)");
    add("dispersion", "Wavenumber, effective indices and FSR drift", [](Runner& r) { r.dispersion(); }, true);
    add("phasematch", "Phasematching strength over pump detuning and Omega", [](Runner& r) { r.phasematch(); }, true);
    add("jsi", "Joint spectral intensity around each generation mode", [](Runner& r) { r.jsi(); }, true);
    add("comb", "Idler spectral intensity in windows around each comb peak", [](Runner& r) { r.comb(); }, true);
    auto* ted = add("ted", "Time-of-emission distribution", [](Runner& r) { r.ted(); }, true);
    ted->add_option("--peaks", o.ted_peaks, "Comb peaks on each side of the centre (0: central peak only)");
    ted->add_option("--span-fwhm", o.ted_span_fwhm, "Half span of the single-peak spectrum in line FWHMs");
    auto* hw = add("herald-width", "Comb-peak linewidth and Q from a TED envelope", [](Runner& r) { r.herald_width(); },
                   true);
    hw->add_option("--input", o.input, "TED CSV (T_us,value[,sigma]); default: simulate the central peak");
    hw->add_option("--idler-nm", o.idler_nm, "Idler wavelength (nm)");
    hw->add_option("--span-fwhm", o.ted_span_fwhm, "Half span of the simulated spectrum in line FWHMs");
    auto* fa = add("fit-airy", "Airy fit of a transmission scan", [](Runner& r) { r.fit_airy_cmd(); }, false);
    fa->add_option("--input", o.input, "Scan CSV (freq_offset_Hz,transmittance_normalized); default: synthetic");
    add("spectrogram", "Synthetic coincidence spectrogram", [](Runner& r) { r.spectrogram(); }, false);
    auto* an = add("analyze", "Spectrogram marginals, TED envelope, linewidth and Q", [](Runner& r) { r.analyze(); },
                   false);
    an->add_option("--input", o.input, "Spectrogram file; default: synthetic");
    an->add_option("--idler-nm", o.idler_nm, "Idler column (nm)");
    an->add_option("--group-size", o.group_size, "T samples per averaged block");
    auto* ch = add("channels", "DWDM/CWDM channel table", [](Runner& r) { r.channel(); }, false);
    ch->add_option("--kind", o.channel_kind, "dwdm or cwdm");
    ch->add_option("--index", o.channel_index, "Single channel to look up");
    add("init-config", "Write the default configuration", [](Runner& r) { r.init_config(); }, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitFormat;
    }

    try {
        if (o.threads && *o.threads == 0) throw FormatError("--threads: must be >= 1");
        RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
        apply_overrides(cfg, o);
        cfg.validate();
        set_default_threads(cfg.threads);
        const std::string name = app.get_subcommands().front()->get_name();
        Runner runner(cfg, o, out);
        runner.prepare_dir();
        actions.at(name)(runner);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace wgm
