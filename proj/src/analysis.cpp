#include "wgm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "wgm/constants.hpp"
#include "wgm/errors.hpp"
#include "wgm/numeric.hpp"

namespace wgm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_csv_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = trim(cell);
        if (t.empty()) throw FormatError(what + ": empty field");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw FormatError(what + ": '" + t + "' is not a number");
        }
        if (used != t.size()) throw FormatError(what + ": '" + t + "' is not a number");
        out.push_back(v);
    }
    return out;
}

bool strictly_monotone(const Eigen::VectorXd& v) {
    if (v.size() < 2) return true;
    const bool up = v[1] > v[0];
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    return true;
}

/// Index range [first, last] of axis values inside w.
std::pair<Eigen::Index, Eigen::Index> window_range(const Eigen::VectorXd& axis, Window w, const char* name) {
    if (!(w.hi >= w.lo)) throw DomainError(std::string("marginals: ") + name + " window is inverted");
    const double amin = axis.minCoeff(), amax = axis.maxCoeff();
    if (w.lo < amin || w.hi > amax) throw DomainError(std::string("marginals: ") + name + " window outside the axis");
    Eigen::Index first = -1, last = -1;
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
        if (axis[i] >= w.lo && axis[i] <= w.hi) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw DomainError(std::string("marginals: ") + name + " window contains no bins");
    return {first, last};
}

}  // namespace

void Spectrogram2D::validate() const {
    if (lambda_nm.size() < 1 || t_s.size() < 1) throw FormatError("spectrogram: empty axis");
    if (counts.rows() != t_s.size() || counts.cols() != lambda_nm.size())
        throw FormatError("spectrogram: counts matrix is " + std::to_string(counts.rows()) + "x" +
                          std::to_string(counts.cols()) + ", axes give " + std::to_string(t_s.size()) + "x" +
                          std::to_string(lambda_nm.size()));
    if (!strictly_monotone(lambda_nm)) throw FormatError("spectrogram: lambda_nm axis is not strictly monotone");
    if (!strictly_monotone(t_s)) throw FormatError("spectrogram: T axis is not strictly monotone");
    if (!(lambda_nm.array() > 0.0).all()) throw FormatError("spectrogram: non-positive wavelength");
    if (!counts.allFinite() || (counts.array() < 0.0).any()) throw FormatError("spectrogram: negative or non-finite counts");
}

Spectrogram2D ingest_spectrogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("spectrogram file not readable: " + path);
    Spectrogram2D sg;
    std::vector<double> lam, tus;
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        if (t[0] == '#') {
            const auto colon = t.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = trim(t.substr(1, colon - 1));
            const std::string value = trim(t.substr(colon + 1));
            if (key == "lambda_nm") lam = parse_csv_numbers(value, where);
            else if (key == "T_us") tus = parse_csv_numbers(value, where);
            else sg.metadata[key] = value;
            continue;
        }
        rows.push_back(parse_csv_numbers(t, where));
        if (rows.back().size() != lam.size())
            throw FormatError(where + ": row has " + std::to_string(rows.back().size()) + " values, expected " +
                              std::to_string(lam.size()));
    }
    if (lam.empty() || tus.empty()) throw FormatError(path + ": missing '# lambda_nm:' or '# T_us:' header");
    if (rows.size() != tus.size())
        throw FormatError(path + ": " + std::to_string(rows.size()) + " rows for " + std::to_string(tus.size()) + " T values");
    sg.lambda_nm = Eigen::Map<Eigen::VectorXd>(lam.data(), static_cast<Eigen::Index>(lam.size()));
    sg.t_s = Eigen::Map<Eigen::VectorXd>(tus.data(), static_cast<Eigen::Index>(tus.size())) * 1e-6;
    sg.counts.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(lam.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < lam.size(); ++c)
            sg.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    try {
        sg.validate();
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
    return sg;
}

void write_spectrogram(const Spectrogram2D& sg, const std::string& path) {
    sg.validate();
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write spectrogram file: " + path);
    char buf[64];
    const auto list = [&](const Eigen::VectorXd& v, double scale) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", v[i] * scale);
            out << buf;
        }
        out << '\n';
    };
    for (const auto& [k, v] : sg.metadata) out << "# " << k << ": " << v << '\n';
    out << "# lambda_nm: ";
    list(sg.lambda_nm, 1.0);
    out << "# T_us: ";
    list(sg.t_s, 1e6);
    for (Eigen::Index r = 0; r < sg.counts.rows(); ++r) list(sg.counts.row(r).transpose(), 1.0);
}

Marginals marginals(const Spectrogram2D& sg, Window lambda_nm, Window t_s) {
    const auto [c0, c1] = window_range(sg.lambda_nm, lambda_nm, "lambda");
    const auto [r0, r1] = window_range(sg.t_s, t_s, "T");
    const auto block = sg.counts.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1);
    Marginals m;
    m.lambda_nm = sg.lambda_nm.segment(c0, c1 - c0 + 1);
    m.t_s = sg.t_s.segment(r0, r1 - r0 + 1);
    m.spectral = block.colwise().sum().transpose();
    m.temporal = block.rowwise().sum();
    m.total = block.sum();
    return m;
}

Marginals marginals(const Spectrogram2D& sg) {
    return marginals(sg, {sg.lambda_nm.minCoeff(), sg.lambda_nm.maxCoeff()}, {sg.t_s.minCoeff(), sg.t_s.maxCoeff()});
}

TedTrace ted_envelope(const Spectrogram2D& sg, double lambda0_nm, int group_size) {
    if (group_size < 1) throw DomainError("ted_envelope: group_size must be >= 1");
    const double lmin = sg.lambda_nm.minCoeff(), lmax = sg.lambda_nm.maxCoeff();
    if (!(lambda0_nm >= lmin && lambda0_nm <= lmax))
        throw DomainError("ted_envelope: idler wavelength outside the lambda axis");
    Eigen::Index col = 0;
    (sg.lambda_nm.array() - lambda0_nm).abs().minCoeff(&col);

    const Eigen::Index n = sg.t_s.size();
    const Eigen::Index g = group_size;
    const Eigen::Index blocks = n / g;
    if (blocks < 1) throw PreconditionError("ted_envelope: fewer T samples than group_size");
    if (n > 1) {
        const double dt = (sg.t_s[n - 1] - sg.t_s[0]) / static_cast<double>(n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(sg.t_s[i] - sg.t_s[i - 1] - dt) > 1e-6 * std::abs(dt))
                throw PreconditionError("ted_envelope: T axis is not uniform");
    }

    TedTrace t;
    t.values.resize(blocks);
    t.sigma.resize(blocks);
    Eigen::VectorXd centers(blocks);
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const auto seg = sg.counts.col(col).segment(b * g, g);
        const double mean = seg.mean();
        t.values[b] = mean;
        t.sigma[b] = g > 1 ? std::sqrt((seg.array() - mean).square().sum() / static_cast<double>(g - 1)) : 0.0;
        centers[b] = sg.t_s.segment(b * g, g).mean();
    }
    t.t_start = centers[0];
    t.t_step = blocks > 1 ? (centers[blocks - 1] - centers[0]) / static_cast<double>(blocks - 1)
                          : (n > 1 ? sg.t_s[1] - sg.t_s[0] : 0.0) * static_cast<double>(g);
    t.truncated = blocks * g != n;
    return t;
}

double q_from_linewidth(double nu_hz, double linewidth_hz) {
    if (!(nu_hz > 0.0 && linewidth_hz > 0.0)) throw DomainError("q_from_linewidth: inputs must be positive");
    if (linewidth_hz > nu_hz) throw DomainError("q_from_linewidth: linewidth exceeds the carrier frequency");
    return nu_hz / linewidth_hz;
}

double idler_wavelength(double lambda_p, double lambda_s) {
    if (!(lambda_p > 0.0 && lambda_s > 0.0)) throw DomainError("idler_wavelength: wavelengths must be positive");
    const double inv = 2.0 / lambda_p - 1.0 / lambda_s;
    if (!(inv > 0.0)) throw DomainError("idler_wavelength: signal frequency exceeds twice the pump frequency");
    return 1.0 / inv;
}

EnergyCheck check_energy_conservation(double pump_nm, double signal_nm, double expected_idler_nm, double tolerance_nm) {
    EnergyCheck c;
    c.predicted_nm = idler_wavelength(pump_nm, signal_nm);
    c.expected_nm = expected_idler_nm;
    c.deviation_nm = c.predicted_nm - expected_idler_nm;
    c.tolerance_nm = tolerance_nm;
    c.ok = std::abs(c.deviation_nm) <= tolerance_nm;
    return c;
}

LinewidthReport infer_linewidth(const TedTrace& envelope, double idler_nm, const LinewidthOptions& opt) {
    if (!(idler_nm > 0.0)) throw DomainError("infer_linewidth: idler wavelength must be positive");
    LinewidthReport r;
    r.idler_nm = idler_nm;
    TedTrace env = envelope;
    if (opt.subtract_background) {
        const Eigen::Index n = env.size();
        const auto k = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(opt.background_fraction * static_cast<double>(n)));
        if (2 * k >= n) throw PreconditionError("infer_linewidth: envelope too short for background estimation");
        std::vector<double> edge(env.values.data(), env.values.data() + k);
        edge.insert(edge.end(), env.values.data() + n - k, env.values.data() + n);
        r.background = median(edge);
        env.values.array() -= r.background;
    }
    r.lineshape = infer_peak_lineshape(env, opt.lineshape);
    r.linewidth_hz = r.lineshape.fwhm_hz;
    r.ted_fwhm_s = r.lineshape.ted_fwhm_s;
    r.ted_efold_s = r.lineshape.ted_efold_s;
    r.windowed = r.lineshape.windowed;
    r.q = q_from_linewidth(wavelength_to_freq(idler_nm * 1e-9), r.linewidth_hz);
    return r;
}

SpectrogramAnalysis analyze_spectrogram(const Spectrogram2D& sg, const SpectrogramAnalysisOptions& opt) {
    sg.validate();
    SpectrogramAnalysis a;
    const Window lw = opt.lambda_window.value_or(Window{sg.lambda_nm.minCoeff(), sg.lambda_nm.maxCoeff()});
    const Window tw = opt.t_window.value_or(Window{sg.t_s.minCoeff(), sg.t_s.maxCoeff()});
    a.marginals = marginals(sg, lw, tw);
    if (opt.idler_nm) {
        a.idler_nm = *opt.idler_nm;
    } else {
        Eigen::Index i = 0;
        a.marginals.spectral.maxCoeff(&i);
        a.idler_nm = a.marginals.lambda_nm[i];
    }
    a.envelope = ted_envelope(sg, a.idler_nm, opt.group_size);
    a.linewidth = infer_linewidth(a.envelope, a.idler_nm, opt.linewidth);
    return a;
}

Spectrogram2D synthetic_spectrogram(const SyntheticSpectrogramSpec& s) {
    if (s.n_lambda < 2 || s.n_t < 2) throw DomainError("synthetic_spectrogram: need at least two bins per axis");
    if (!(s.linewidth_hz > 0.0 && s.signal_fwhm_nm > 0.0 && s.resolution_hz >= 0.0 && s.peak_counts > 0.0 &&
          s.background_counts >= 0.0 && s.lambda_half_span_nm > 0.0))
        throw DomainError("synthetic_spectrogram: widths and counts must be positive");

    const double nu_p = wavelength_to_freq(s.pump_nm * 1e-9);
    const double nu_s = wavelength_to_freq(s.signal_nm * 1e-9);
    const double nu_i0 = 2.0 * nu_p - nu_s;
    if (!(nu_i0 > 0.0)) throw DomainError("synthetic_spectrogram: no energy-conserving idler");
    const double lambda_i0_nm = freq_to_wavelength(nu_i0) * 1e9;

    // Filter FWHM in frequency at the signal, mirrored onto the idler and broadened by the resolution.
    const double filter_hz = kSpeedOfLight * s.signal_fwhm_nm * 1e-9 / std::pow(s.signal_nm * 1e-9, 2);
    const double width_hz = std::hypot(filter_hz, s.resolution_hz);
    const double sigma_hz = width_hz / (2.0 * std::sqrt(2.0 * std::log(2.0)));

    const double tau = 1.0 / (kPi * s.linewidth_hz);
    const double t_half = s.t_half_span_s > 0.0 ? s.t_half_span_s : 10.0 * tau;

    Spectrogram2D sg;
    sg.lambda_nm = Eigen::VectorXd::LinSpaced(s.n_lambda, lambda_i0_nm - s.lambda_half_span_nm,
                                              lambda_i0_nm + s.lambda_half_span_nm);
    sg.t_s = Eigen::VectorXd::LinSpaced(s.n_t, s.t_offset_s - t_half, s.t_offset_s + t_half);
    sg.counts.resize(s.n_t, s.n_lambda);

    Eigen::VectorXd spectral(s.n_lambda);
    for (int c = 0; c < s.n_lambda; ++c) {
        const double dnu = wavelength_to_freq(sg.lambda_nm[c] * 1e-9) - nu_i0;
        spectral[c] = std::exp(-0.5 * dnu * dnu / (sigma_hz * sigma_hz));
    }
    std::mt19937_64 rng(s.seed);
    for (int r = 0; r < s.n_t; ++r) {
        const double temporal = std::exp(-std::abs(sg.t_s[r] - s.t_offset_s) / tau);
        for (int c = 0; c < s.n_lambda; ++c) {
            const double mean = s.peak_counts * spectral[c] * temporal + s.background_counts;
            sg.counts(r, c) = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long>(mean)(rng)) : 0.0;
        }
    }

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", s.pump_nm);
    sg.metadata["pump_nm"] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", s.signal_nm);
    sg.metadata["signal_nm"] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", s.linewidth_hz);
    sg.metadata["linewidth_hz"] = buf;
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(s.seed));
    sg.metadata["seed"] = buf;
    return sg;
}

}  // namespace wgm
