#include "wgm/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wgm/constants.hpp"
#include "wgm/errors.hpp"

namespace wgm {

using nlohmann::json;

namespace {

/// Reads one JSON object, tracking the dotted path for error messages and rejecting unknown keys.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw FormatError(where() + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        convert(j_.at(key), key, out);
    }

    template <class T>
    void get(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        if (v.is_null()) {
            out.reset();
            return;
        }
        T tmp{};
        convert(v, key, tmp);
        out = tmp;
    }

    template <class F>
    void child(const char* key, F&& f) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        Reader r(j_.at(key), field(key));
        f(r);
        r.finish();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw FormatError(field(k.c_str()) + ": unknown field");
    }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? std::string("config") : path_; }
    [[nodiscard]] std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void convert(const json& v, const char* key, double& out) const {
        if (!v.is_number()) throw FormatError(field(key) + ": expected a number");
        out = v.get<double>();
    }
    void convert(const json& v, const char* key, int& out) const {
        if (!v.is_number_integer()) throw FormatError(field(key) + ": expected an integer");
        out = v.get<int>();
    }
    void convert(const json& v, const char* key, unsigned& out) const {
        if (!v.is_number_unsigned()) throw FormatError(field(key) + ": expected a non-negative integer");
        out = v.get<unsigned>();
    }
    void convert(const json& v, const char* key, std::uint64_t& out) const {
        if (!v.is_number_unsigned()) throw FormatError(field(key) + ": expected a non-negative integer");
        out = v.get<std::uint64_t>();
    }
    void convert(const json& v, const char* key, bool& out) const {
        if (!v.is_boolean()) throw FormatError(field(key) + ": expected true or false");
        out = v.get<bool>();
    }
    void convert(const json& v, const char* key, std::string& out) const {
        if (!v.is_string()) throw FormatError(field(key) + ": expected a string");
        out = v.get<std::string>();
    }
    template <class E, class Parse>
    void convert_enum(const json& v, const char* key, E& out, Parse parse) const {
        if (!v.is_string()) throw FormatError(field(key) + ": expected a string");
        try {
            out = parse(v.get<std::string>());
        } catch (const Error& e) {
            throw FormatError(field(key) + ": " + e.what());
        }
    }
    void convert(const json& v, const char* key, Polarization& out) const { convert_enum(v, key, out, parse_polarization); }
    void convert(const json& v, const char* key, OrderConvention& out) const {
        convert_enum(v, key, out, parse_order_convention);
    }
    void convert(const json& v, const char* key, Normalization& out) const { convert_enum(v, key, out, parse_normalization); }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw FormatError(field + ": " + what);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(origin + ": " + e.what());
    }
    RunConfig c;
    try {
        Reader r(j, "");
        r.child("sphere", [&](Reader& s) {
            s.get("radius_m", c.sphere.radius_m);
            s.get("material_file", c.sphere.material_file);
        });
        r.child("mode", [&](Reader& s) {
            s.get("l", c.mode.l);
            s.get("q", c.mode.q);
            s.get("polarization", c.mode.polarization);
        });
        r.child("couplings", [&](Reader& s) {
            s.get("q_pump", c.coupling.q_pump);
            s.get("q_signal", c.coupling.q_signal);
            s.get("q_idler", c.coupling.q_idler);
            s.get("order_convention", c.coupling.convention);
        });
        r.child("pump", [&](Reader& s) {
            s.get("wavelength_nm", c.pump.wavelength_nm);
            s.get("dwdm_channel", c.pump.dwdm_channel);
            s.get("power_w", c.pump.power_w);
            s.get("resonance_fwhm_hz", c.pump.resonance_fwhm_hz);
            s.get("linewidth_hz", c.pump.linewidth_hz);
            s.get("sweep_span_hz", c.pump.sweep_span_hz);
            s.get("sweep_rate_hz", c.pump.sweep_rate_hz);
        });
        r.child("kerr", [&](Reader& s) {
            s.get("n2_m2_per_w", c.kerr.n2_m2_per_w);
            s.get("a_eff_m2", c.kerr.a_eff_m2);
            s.get("exact_phasematch", c.kerr.exact_phasematch);
        });
        r.child("grids", [&](Reader& s) {
            auto& g = c.grids;
            s.get("omega_step_hz", g.omega_step_hz);
            s.get("comb_pairs", g.comb_pairs);
            s.get("peak_window_fwhm", g.peak_window_fwhm);
            s.get("pump_window_fwhm_multiples", g.pump_window_fwhm_multiples);
            s.get("ted_pad", g.ted_pad);
            s.get("dispersion_modes", g.dispersion_modes);
            s.get("pm_pump_half_span_hz", g.pm_pump_half_span_hz);
            s.get("pm_omega_half_span_hz", g.pm_omega_half_span_hz);
            s.get("pm_pump_points", g.pm_pump_points);
            s.get("pm_omega_points", g.pm_omega_points);
            s.get("jsi_half_width_fwhm", g.jsi_half_width_fwhm);
            s.get("jsi_points", g.jsi_points);
            s.get("jsi_stride", g.jsi_stride);
        });
        r.get("normalization", c.normalization);
        r.child("analysis", [&](Reader& s) {
            auto& a = c.analysis;
            s.get("group_size", a.group_size);
            s.get("idler_nm", a.idler_nm);
            s.get("signal_dwdm_channel", a.signal_dwdm_channel);
            s.get("subtract_background", a.subtract_background);
            s.child("synthetic", [&](Reader& t) {
                auto& y = a.synthetic;
                t.get("pump_nm", y.pump_nm);
                t.get("signal_nm", y.signal_nm);
                t.get("signal_fwhm_nm", y.signal_fwhm_nm);
                t.get("resolution_hz", y.resolution_hz);
                t.get("lambda_half_span_nm", y.lambda_half_span_nm);
                t.get("n_lambda", y.n_lambda);
                t.get("linewidth_hz", y.linewidth_hz);
                t.get("t_half_span_s", y.t_half_span_s);
                t.get("n_t", y.n_t);
                t.get("t_offset_s", y.t_offset_s);
                t.get("peak_counts", y.peak_counts);
                t.get("background_counts", y.background_counts);
            });
        });
        r.child("scan", [&](Reader& s) {
            s.get("fwhm_hz", c.scan.fwhm_hz);
            s.get("fsr_hz", c.scan.fsr_hz);
            s.get("depth", c.scan.depth);
            s.get("center_hz", c.scan.center_hz);
            s.get("span_hz", c.scan.span_hz);
            s.get("samples", c.scan.samples);
            s.get("noise", c.scan.noise);
        });
        r.child("output", [&](Reader& s) { s.get("dir", c.output.dir); });
        r.get("seed", c.seed);
        r.get("threads", c.threads);
        r.finish();
    } catch (const FormatError& e) {
        throw FormatError(origin + ": " + e.what());
    }
    c.scan.seed = c.seed;
    c.analysis.synthetic.seed = c.seed;
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("config file not readable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string dump_config(const RunConfig& c) {
    const auto& g = c.grids;
    const auto& a = c.analysis;
    const auto& y = a.synthetic;
    json j;
    j["sphere"] = {{"radius_m", c.sphere.radius_m}, {"material_file", c.sphere.material_file}};
    j["mode"] = {{"l", opt(c.mode.l)}, {"q", c.mode.q}, {"polarization", to_string(c.mode.polarization)}};
    j["couplings"] = {{"q_pump", c.coupling.q_pump},
                      {"q_signal", c.coupling.q_signal},
                      {"q_idler", c.coupling.q_idler},
                      {"order_convention", to_string(c.coupling.convention)}};
    j["pump"] = {{"wavelength_nm", opt(c.pump.wavelength_nm)},
                 {"dwdm_channel", opt(c.pump.dwdm_channel)},
                 {"power_w", c.pump.power_w},
                 {"resonance_fwhm_hz", opt(c.pump.resonance_fwhm_hz)},
                 {"linewidth_hz", c.pump.linewidth_hz},
                 {"sweep_span_hz", c.pump.sweep_span_hz},
                 {"sweep_rate_hz", c.pump.sweep_rate_hz}};
    j["kerr"] = {{"n2_m2_per_w", c.kerr.n2_m2_per_w},
                 {"a_eff_m2", c.kerr.a_eff_m2},
                 {"exact_phasematch", c.kerr.exact_phasematch}};
    j["grids"] = {{"omega_step_hz", g.omega_step_hz},
                  {"comb_pairs", g.comb_pairs},
                  {"peak_window_fwhm", g.peak_window_fwhm},
                  {"pump_window_fwhm_multiples", g.pump_window_fwhm_multiples},
                  {"ted_pad", g.ted_pad},
                  {"dispersion_modes", g.dispersion_modes},
                  {"pm_pump_half_span_hz", g.pm_pump_half_span_hz},
                  {"pm_omega_half_span_hz", g.pm_omega_half_span_hz},
                  {"pm_pump_points", g.pm_pump_points},
                  {"pm_omega_points", g.pm_omega_points},
                  {"jsi_half_width_fwhm", g.jsi_half_width_fwhm},
                  {"jsi_points", g.jsi_points},
                  {"jsi_stride", g.jsi_stride}};
    j["normalization"] = to_string(c.normalization);
    j["analysis"] = {{"group_size", a.group_size},
                     {"idler_nm", opt(a.idler_nm)},
                     {"signal_dwdm_channel", opt(a.signal_dwdm_channel)},
                     {"subtract_background", a.subtract_background},
                     {"synthetic",
                      {{"pump_nm", y.pump_nm},
                       {"signal_nm", y.signal_nm},
                       {"signal_fwhm_nm", y.signal_fwhm_nm},
                       {"resolution_hz", y.resolution_hz},
                       {"lambda_half_span_nm", y.lambda_half_span_nm},
                       {"n_lambda", y.n_lambda},
                       {"linewidth_hz", y.linewidth_hz},
                       {"t_half_span_s", y.t_half_span_s},
                       {"n_t", y.n_t},
                       {"t_offset_s", y.t_offset_s},
                       {"peak_counts", y.peak_counts},
                       {"background_counts", y.background_counts}}}};
    j["scan"] = {{"fwhm_hz", c.scan.fwhm_hz}, {"fsr_hz", c.scan.fsr_hz},   {"depth", c.scan.depth},
                 {"center_hz", c.scan.center_hz}, {"span_hz", c.scan.span_hz}, {"samples", c.scan.samples},
                 {"noise", c.scan.noise}};
    j["output"] = {{"dir", c.output.dir}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

void save_config(const RunConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write config file: " + path);
    out << dump_config(c);
}

void RunConfig::validate() const {
    require(sphere.radius_m > 0.0, "sphere.radius_m", "must be positive");
    if (mode.l) require(*mode.l >= 1, "mode.l", "must be >= 1");
    require(mode.q == 1, "mode.q", "only the fundamental radial order q = 1 is supported");
    require(coupling.q_pump > 0.0, "couplings.q_pump", "must be positive");
    require(coupling.q_signal > 0.0, "couplings.q_signal", "must be positive");
    require(coupling.q_idler > 0.0, "couplings.q_idler", "must be positive");
    require(pump.wavelength_nm || pump.dwdm_channel, "pump", "set wavelength_nm or dwdm_channel");
    if (pump.wavelength_nm) require(*pump.wavelength_nm > 0.0, "pump.wavelength_nm", "must be positive");
    require(pump.power_w > 0.0, "pump.power_w", "must be positive");
    if (pump.resonance_fwhm_hz) require(*pump.resonance_fwhm_hz >= 0.0, "pump.resonance_fwhm_hz", "must be >= 0");
    require(pump.linewidth_hz > 0.0, "pump.linewidth_hz", "must be positive");
    require(pump.sweep_span_hz > 0.0, "pump.sweep_span_hz", "must be positive");
    require(pump.sweep_rate_hz > 0.0, "pump.sweep_rate_hz", "must be positive");
    require(kerr.n2_m2_per_w > 0.0, "kerr.n2_m2_per_w", "must be positive");
    require(kerr.a_eff_m2 > 0.0, "kerr.a_eff_m2", "must be positive");
    require(grids.omega_step_hz >= 0.0, "grids.omega_step_hz", "must be >= 0 (0 selects the default)");
    require(grids.comb_pairs >= 0, "grids.comb_pairs", "must be >= 0");
    require(grids.peak_window_fwhm > 0.0, "grids.peak_window_fwhm", "must be positive");
    require(grids.pump_window_fwhm_multiples >= 6.0, "grids.pump_window_fwhm_multiples", "must be >= 6");
    require(grids.ted_pad >= 1, "grids.ted_pad", "must be >= 1");
    require(grids.dispersion_modes >= 1, "grids.dispersion_modes", "must be >= 1");
    require(grids.pm_pump_half_span_hz > 0.0, "grids.pm_pump_half_span_hz", "must be positive");
    require(grids.pm_omega_half_span_hz > 0.0, "grids.pm_omega_half_span_hz", "must be positive");
    require(grids.pm_pump_points >= 2, "grids.pm_pump_points", "must be >= 2");
    require(grids.pm_omega_points >= 2, "grids.pm_omega_points", "must be >= 2");
    require(grids.jsi_half_width_fwhm > 0.0, "grids.jsi_half_width_fwhm", "must be positive");
    require(grids.jsi_points >= 2, "grids.jsi_points", "must be >= 2");
    require(grids.jsi_stride >= 1, "grids.jsi_stride", "must be >= 1");
    require(analysis.group_size >= 1, "analysis.group_size", "must be >= 1");
    if (analysis.idler_nm) require(*analysis.idler_nm > 0.0, "analysis.idler_nm", "must be positive");
    const auto& y = analysis.synthetic;
    require(y.pump_nm > 0.0, "analysis.synthetic.pump_nm", "must be positive");
    require(y.signal_nm > 0.0, "analysis.synthetic.signal_nm", "must be positive");
    require(y.signal_fwhm_nm > 0.0, "analysis.synthetic.signal_fwhm_nm", "must be positive");
    require(y.resolution_hz >= 0.0, "analysis.synthetic.resolution_hz", "must be >= 0");
    require(y.lambda_half_span_nm > 0.0, "analysis.synthetic.lambda_half_span_nm", "must be positive");
    require(y.n_lambda >= 2, "analysis.synthetic.n_lambda", "must be >= 2");
    require(y.linewidth_hz > 0.0, "analysis.synthetic.linewidth_hz", "must be positive");
    require(y.t_half_span_s >= 0.0, "analysis.synthetic.t_half_span_s", "must be >= 0 (0 selects the default)");
    require(y.n_t >= 2, "analysis.synthetic.n_t", "must be >= 2");
    require(y.peak_counts > 0.0, "analysis.synthetic.peak_counts", "must be positive");
    require(y.background_counts >= 0.0, "analysis.synthetic.background_counts", "must be >= 0");
    require(scan.fwhm_hz > 0.0, "scan.fwhm_hz", "must be positive");
    require(scan.fsr_hz > scan.fwhm_hz, "scan.fsr_hz", "must exceed scan.fwhm_hz");
    require(scan.depth > 0.0 && scan.depth <= 1.0, "scan.depth", "must lie in (0, 1]");
    require(scan.span_hz > 0.0, "scan.span_hz", "must be positive");
    require(scan.samples >= 3, "scan.samples", "must be >= 3");
    require(scan.noise >= 0.0, "scan.noise", "must be >= 0");
    require(!output.dir.empty(), "output.dir", "must not be empty");
}

double spectral_step_hz(const RunConfig& c, double omega_p0) {
    const double nu = omega_p0 / kTwoPi;
    const double limit = nu / (2.0 * std::max(c.coupling.q_signal, c.coupling.q_idler)) / 10.0;
    if (c.grids.omega_step_hz == 0.0) return limit;
    if (c.grids.omega_step_hz > limit * (1.0 + 1e-12))
        throw FormatError("grids.omega_step_hz: exceeds a tenth of the narrowest expected peak FWHM (" +
                          std::to_string(limit) + " Hz)");
    return c.grids.omega_step_hz;
}

Setup make_setup(const RunConfig& c, const ChannelTable& channels) {
    c.validate();
    Setup s;
    SellmeierModel material = c.sphere.material_file.empty() ? fused_silica() : load_sellmeier(c.sphere.material_file);
    s.sphere = SphereSpec(c.sphere.radius_m, std::move(material));
    s.dispersion = std::make_shared<SphereDispersion>(s.sphere, c.mode.polarization);
    s.pump_nm = c.pump.wavelength_nm ? *c.pump.wavelength_nm
                                     : channels.lookup(ChannelKind::DWDM, *c.pump.dwdm_channel).center_nm;
    if (c.mode.l) {
        s.l_p = *c.mode.l;
    } else {
        const double lam = s.pump_nm * 1e-9;
        const auto table = ResonanceTable::for_band(s.sphere, c.mode.polarization, lam * 0.995, lam * 1.005);
        s.l_p = table.nearest(lam).mode.l;
    }
    s.omega_p0 = s.dispersion->resonance_frequency(s.l_p);
    s.coupling.q_pump = c.coupling.q_pump;
    s.coupling.q_signal = c.coupling.q_signal;
    s.coupling.q_idler = c.coupling.q_idler;
    s.coupling.l_ref = s.l_p;
    s.coupling.convention = c.coupling.convention;
    s.coupling.validate();
    s.nonlinear.pump_power_w = c.pump.power_w;
    s.nonlinear.n2_m2_per_w = c.kerr.n2_m2_per_w;
    s.nonlinear.a_eff_m2 = c.kerr.a_eff_m2;
    const double n = refractive_index(s.sphere.material, omega_to_wavelength(s.omega_p0));
    s.kerr = kerr_mismatch(s.nonlinear, c.coupling.q_pump, n, c.sphere.radius_m);
    (void)spectral_step_hz(c, s.omega_p0);
    return s;
}

SfwmSource make_source(const RunConfig& c, const Setup& s) {
    SfwmSource src = SfwmSource::shared(s.dispersion, s.l_p, s.coupling);
    src.pump_fwhm_hz = c.pump.resonance_fwhm_hz;
    src.pump_window_fwhm = c.grids.pump_window_fwhm_multiples;
    src.exact_phasematch = c.kerr.exact_phasematch;
    src.kerr = s.kerr;
    return src;
}

}  // namespace wgm
