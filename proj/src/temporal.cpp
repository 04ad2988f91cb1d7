#include "wgm/temporal.hpp"

#include <algorithm>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace wgm {

using cd = std::complex<double>;

Eigen::VectorXd TedTrace::times() const {
    Eigen::VectorXd t(size());
    for (Eigen::Index i = 0; i < size(); ++i) t[i] = at(i);
    return t;
}

TedTrace TedTrace::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("TED file not readable: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("T_us", 0) != 0)
        throw FormatError("TED file " + path + ": header must start with T_us");
    const bool has_sigma = line.find("sigma") != std::string::npos;
    std::vector<double> t, v, s;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a = 0, b = 0, c = 0;
        if (!(ss >> a >> b) || (has_sigma && !(ss >> c)))
            throw FormatError("TED file " + path + ": malformed row " + std::to_string(row));
        t.push_back(a * 1e-6);
        v.push_back(b);
        if (has_sigma) s.push_back(c);
    }
    if (t.size() < 3) throw FormatError("TED file " + path + ": too few samples");
    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i] - t[i - 1] - step) > 1e-6 * std::abs(step))
            throw FormatError("TED file " + path + ": T grid is not uniform");
    TedTrace tr;
    tr.t_start = t.front();
    tr.t_step = step;
    tr.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (has_sigma) tr.sigma = Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    return tr;
}

void TedTrace::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write TED file: " + path);
    const bool has_sigma = sigma.size() == values.size() && sigma.size() > 0;
    out << (has_sigma ? "T_us,value,sigma\n" : "T_us,value\n");
    char buf[96];
    for (Eigen::Index i = 0; i < size(); ++i) {
        if (has_sigma)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", at(i) * 1e6, values[i], sigma[i]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", at(i) * 1e6, values[i]);
        out << buf;
    }
}

namespace detail {

void forward_transform(double start, double step, const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index m,
                       Eigen::VectorXd& re, Eigen::VectorXd& im) {
    const Eigen::Index n = v.size();
    std::vector<cd> in(static_cast<std::size_t>(m), cd(0.0, 0.0)), out;
    for (Eigen::Index k = 0; k < n; ++k) in[static_cast<std::size_t>(k)] = (k % 2 == 0 ? 1.0 : -1.0) * v[k];
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    const double dt = kTwoPi / (static_cast<double>(m) * step);
    re.resize(m);
    im.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double t = static_cast<double>(j - m / 2) * dt;
        const cd z = step / kTwoPi * std::polar(1.0, -start * t) * out[static_cast<std::size_t>(j)];
        re[j] = z.real();
        im[j] = z.imag();
    }
}

}  // namespace detail

TedTrace ted_from_spectrum(const BiphotonSpectrum& s, int pad) {
    const Eigen::Index n = s.values.size();
    if (n < 2 || !(s.grid.step > 0.0) || s.grid.size != n)
        throw PreconditionError("ted_from_spectrum: spectrum must be on a uniform grid of >= 2 samples");
    if (pad < 1) throw PreconditionError("ted_from_spectrum: pad factor must be >= 1");
    const double vmax = s.values.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0)) throw PreconditionError("ted_from_spectrum: spectrum is identically zero");
    if (std::abs(s.values[0]) > 1e-6 * vmax || std::abs(s.values[n - 1]) > 1e-6 * vmax)
        throw PreconditionError("ted_from_spectrum: spectrum not decayed below 1e-6 of its maximum at the edges");
    double fw = 0.0;
    try {
        fw = sampled_fwhm(s.omega(), s.values);
    } catch (const PreconditionError&) {
        fw = 0.0;  // peak narrower than the grid can bracket; the edge check already passed
    }
    if (static_cast<double>(n - 1) * s.grid.step < 20.0 * fw)
        throw PreconditionError("ted_from_spectrum: span shorter than 20 peak FWHM");
    const auto m = static_cast<Eigen::Index>(static_cast<std::size_t>(pad) * next_pow2(static_cast<std::size_t>(n)));
    TedTrace t;
    detail::forward_transform(s.grid.start, s.grid.step, s.values, m, t.values, t.imag);
    t.t_step = kTwoPi / (static_cast<double>(m) * s.grid.step);
    t.t_start = -static_cast<double>(m / 2) * t.t_step;
    t.spectral_origin = s.grid.start;
    t.spectral_size = n;
    t.imag_residual = t.imag.cwiseAbs().maxCoeff() / t.values.cwiseAbs().maxCoeff();
    return t;
}

BiphotonSpectrum spectrum_from_ted(const TedTrace& ted) {
    const Eigen::Index m = ted.size();
    if (m < 2 || !(ted.t_step > 0.0)) throw PreconditionError("spectrum_from_ted: trace needs a uniform grid");
    const bool has_imag = ted.imag.size() == m;
    const double dt = ted.t_step;
    const double dw = kTwoPi / (static_cast<double>(m) * dt);
    const double w0 = ted.spectral_origin;
    const double t0 = ted.t_start;
    std::vector<cd> in(static_cast<std::size_t>(m)), out;
    for (Eigen::Index j = 0; j < m; ++j) {
        const cd v(ted.values[j], has_imag ? ted.imag[j] : 0.0);
        in[static_cast<std::size_t>(j)] = v * std::polar(1.0, w0 * static_cast<double>(j) * dt);
    }
    Eigen::FFT<double> fft;
    fft.inv(out, in);
    const Eigen::Index n = ted.spectral_size > 0 ? std::min(ted.spectral_size, m) : m;
    BiphotonSpectrum s;
    s.grid = {w0, dw, n};
    s.values.resize(n);
    const cd pre = dt * static_cast<double>(m) * std::polar(1.0, w0 * t0);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cd z = pre * std::polar(1.0, static_cast<double>(k) * dw * t0) * out[static_cast<std::size_t>(k)];
        s.values[k] = z.real();
    }
    return s;
}

namespace {

double lerp_at(const BiphotonSpectrum& s, double omega) {
    const double x = (omega - s.grid.start) / s.grid.step;
    if (x <= 0.0) return s.values[0];
    const auto n = s.values.size();
    if (x >= static_cast<double>(n - 1)) return s.values[n - 1];
    const auto i = static_cast<Eigen::Index>(std::floor(x));
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * s.values[i] + f * s.values[i + 1];
}

}  // namespace

double CombDecomposition::h_at(double offset) const {
    const Eigen::Index n = h.size();
    if (n < 2) return 0.0;
    const double step = h_offset[1] - h_offset[0];
    const double x = (offset - h_offset[0]) / step;
    if (x < 0.0 || x > static_cast<double>(n - 1)) return 0.0;
    const auto i = std::min(static_cast<Eigen::Index>(std::floor(x)), n - 2);
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * h[i] + f * h[i + 1];
}

double CombDecomposition::model(double omega) const {
    const double m = std::round((omega - anchor) / spacing);
    return envelope(omega) * h_at(omega - (anchor + m * spacing));
}

CombDecomposition comb_decompose(const BiphotonSpectrum& s, double expected_spacing) {
    const Eigen::Index n = s.values.size();
    const double step = s.grid.step;
    if (n < 3 || !(step > 0.0)) throw PreconditionError("comb_decompose: need a uniform grid");
    const double vmax = s.values.maxCoeff();
    CombDecomposition c;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double a = s.values[i - 1], b = s.values[i], d = s.values[i + 1];
        if (b > a && b >= d && b > 1e-3 * vmax) {
            const double den = a - 2.0 * b + d;
            const double delta = den != 0.0 ? 0.5 * (a - d) / den : 0.0;
            c.peak_omega.push_back(s.grid.at(i) + delta * step);
            c.peak_height.push_back(b - 0.25 * (a - d) * delta);
        }
    }
    const std::size_t np = c.peak_omega.size();
    if (np < 5) throw PreconditionError("comb_decompose: fewer than 5 resolved peaks");
    std::vector<double> sp(np - 1);
    for (std::size_t i = 0; i + 1 < np; ++i) sp[i] = c.peak_omega[i + 1] - c.peak_omega[i];
    c.spacing = median(sp);
    // Longest run of regular spacings, reported if the fixed-FSR model fails elsewhere.
    std::size_t best_lo = 0, best_len = 0, lo = 0;
    bool irregular = false;
    for (std::size_t i = 0; i <= sp.size(); ++i) {
        const bool ok = i < sp.size() && std::abs(sp[i] - c.spacing) <= 0.05 * c.spacing;
        if (i < sp.size() && !ok) irregular = true;
        if (!ok) {
            if (i - lo > best_len) {
                best_len = i - lo;
                best_lo = lo;
            }
            lo = i + 1;
        }
    }
    if (irregular) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "comb_decompose: peak spacing irregular beyond 5%%; fixed-FSR model holds for Omega in "
                      "[%.6e, %.6e] rad/s",
                      c.peak_omega[best_lo], c.peak_omega[best_lo + best_len]);
        throw PreconditionError(buf);
    }
    if (expected_spacing > 0.0 && std::abs(c.spacing - expected_spacing) > 0.05 * expected_spacing)
        throw PreconditionError("comb_decompose: spacing differs from the expected FSR by more than 5%");

    const auto top = std::max_element(c.peak_height.begin(), c.peak_height.end()) - c.peak_height.begin();
    c.anchor = c.peak_omega[static_cast<std::size_t>(top)];
    c.envelope = Pchip(c.peak_omega, c.peak_height);

    const auto half = static_cast<Eigen::Index>(std::floor(0.5 * c.spacing / step));
    c.h_offset.resize(2 * half + 1);
    for (Eigen::Index k = -half; k <= half; ++k) c.h_offset[k + half] = static_cast<double>(k) * step;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(2 * half + 1);
    int used = 0;
    const double w_lo = s.grid.start, w_hi = s.grid.at(n - 1);
    for (std::size_t p = 0; p < np; ++p) {
        const double w = c.peak_omega[p];
        if (w - 0.5 * c.spacing < w_lo || w + 0.5 * c.spacing > w_hi) continue;
        const double bg = std::min(lerp_at(s, w - 0.5 * c.spacing), lerp_at(s, w + 0.5 * c.spacing));
        const double scale = c.peak_height[p] - bg;
        if (!(scale > 0.0)) continue;
        for (Eigen::Index k = 0; k < acc.size(); ++k) acc[k] += (lerp_at(s, w + c.h_offset[k]) - bg) / scale;
        ++used;
    }
    if (used == 0) throw PreconditionError("comb_decompose: no peak has a full window inside the grid");
    c.h = acc / acc.maxCoeff();

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) err = std::max(err, std::abs(s.values[i] - c.model(s.grid.at(i))));
    c.reconstruction_error = err / vmax;
    return c;
}

TedTrace tooth_envelope(const TedTrace& ted, double period) {
    const Eigen::Index n = ted.size();
    const Eigen::VectorXd a = ted.values.cwiseAbs();
    Eigen::Index imax = 0;
    const double amax = a.maxCoeff(&imax);
    std::vector<double> tx, ty;
    if (period > 0.0) {
        if (period < 2.0 * ted.t_step) throw PreconditionError("tooth_envelope: period below two grid steps");
        // One tooth per period-wide window centred on the multiples of the period around the maximum.
        const double t0 = ted.at(imax);
        const auto k_lo = static_cast<long>(std::ceil((ted.at(0) - t0) / period - 0.5));
        const auto k_hi = static_cast<long>(std::floor((ted.at(n - 1) - t0) / period + 0.5));
        for (long k = k_lo; k <= k_hi; ++k) {
            const double lo = t0 + (static_cast<double>(k) - 0.5) * period;
            const auto i0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((lo - ted.t_start) / ted.t_step)));
            const auto i1 = std::min<Eigen::Index>(
                n - 1, static_cast<Eigen::Index>(std::ceil((lo + period - ted.t_start) / ted.t_step)) - 1);
            if (i1 < i0) continue;
            Eigen::Index j = 0;
            const double v = a.segment(i0, i1 - i0 + 1).maxCoeff(&j);
            if (v > 1e-12 * amax) {
                tx.push_back(ted.at(i0 + j));
                ty.push_back(v);
            }
        }
    } else {
        for (Eigen::Index i = 1; i + 1 < n; ++i)
            if (a[i] >= a[i - 1] && a[i] > a[i + 1] && a[i] > 1e-12 * amax) {
                tx.push_back(ted.at(i));
                ty.push_back(a[i]);
            }
    }
    if (tx.size() < 2) throw PreconditionError("tooth_envelope: fewer than two teeth");
    const Pchip p(tx, ty);
    TedTrace e = ted;
    e.imag.resize(0);
    e.sigma.resize(0);
    for (Eigen::Index i = 0; i < n; ++i) e.values[i] = p(ted.at(i));
    return e;
}

double efold_width(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    return sampled_width_at(x, y, std::exp(-1.0));
}

LineshapeResult infer_peak_lineshape(const TedTrace& env, const LineshapeOptions& opt) {
    const Eigen::Index n = env.size();
    if (n < 5 || !(env.t_step > 0.0)) throw PreconditionError("infer_peak_lineshape: need >= 5 uniform samples");
    LineshapeResult r;
    Eigen::VectorXd y = env.values;

    Eigen::VectorXd sm = y;
    for (Eigen::Index i = 1; i + 1 < n; ++i) sm[i] = (y[i - 1] + y[i] + y[i + 1]) / 3.0;
    Eigen::Index ic = 0;
    const double peak = sm.maxCoeff(&ic);
    if (!(peak > 0.0)) throw PreconditionError("infer_peak_lineshape: envelope has no positive peak");
    double tc = env.at(ic);
    if (ic > 0 && ic + 1 < n) {
        const double a = sm[ic - 1], b = sm[ic], d = sm[ic + 1];
        const double den = a - 2.0 * b + d;
        if (den != 0.0) tc += 0.5 * (a - d) / den * env.t_step;
    }
    if (!opt.recenter) tc = 0.0;
    r.t_center = tc;

    const Eigen::VectorXd tt = env.times().array() - tc;
    r.ted_fwhm_s = sampled_fwhm(tt, y);
    r.ted_efold_s = efold_width(tt, y);

    const double edge = std::max(std::abs(y[0]), std::abs(y[n - 1]));
    if (edge > opt.leakage_threshold * peak) {
        // Tukey window with 25% cosine tapers.
        const double alpha = 0.25;
        const double len = static_cast<double>(n - 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / len;
            double w = 1.0;
            if (x < alpha / 2) w = 0.5 * (1 - std::cos(kTwoPi * x / alpha));
            else if (x > 1 - alpha / 2) w = 0.5 * (1 - std::cos(kTwoPi * (1 - x) / alpha));
            y[i] *= w;
        }
        r.windowed = true;
    }

    const auto m = static_cast<Eigen::Index>(
        next_pow2(std::max<std::size_t>(64 * static_cast<std::size_t>(n), static_cast<std::size_t>(opt.min_fft_size))));
    TedTrace padded;
    padded.t_start = env.t_start - tc;
    padded.t_step = env.t_step;
    padded.values = Eigen::VectorXd::Zero(m);
    padded.values.head(n) = y;
    const double dw = kTwoPi / (static_cast<double>(m) * env.t_step);
    padded.spectral_origin = -static_cast<double>(m / 2) * dw;
    const BiphotonSpectrum spec = spectrum_from_ted(padded);
    r.omega = spec.omega();
    r.h = spec.values / spec.values.maxCoeff();
    r.fwhm_hz = sampled_fwhm(r.omega, r.h) / kTwoPi;
    return r;
}

TedTrace ted_comb_model(const CombDecomposition& c, double spectrum_step, const TedTrace& like) {
    const Eigen::Index m = like.size();
    if (m < 2 || c.h.size() < 2) throw PreconditionError("ted_comb_model: empty inputs");
    const double dt = kTwoPi / (static_cast<double>(m) * spectrum_step);
    if (std::abs(dt - like.t_step) > 1e-9 * dt || std::abs(like.t_start + static_cast<double>(m / 2) * dt) > 1e-9 * dt * m)
        throw PreconditionError("ted_comb_model: T grid does not match the spectral step");

    Eigen::VectorXd hre, him;
    detail::forward_transform(c.h_offset[0], spectrum_step, c.h, m, hre, him);

    // Teeth of the fixed-FSR comb covering the measured peaks.
    const double lo = c.peak_omega.front() - 0.5 * c.spacing;
    const double hi = c.peak_omega.back() + 0.5 * c.spacing;
    const auto m_lo = static_cast<long>(std::ceil((lo - c.anchor) / c.spacing));
    const auto m_hi = static_cast<long>(std::floor((hi - c.anchor) / c.spacing));
    std::vector<double> weights;
    for (long k = m_lo; k <= m_hi; ++k) weights.push_back(c.envelope(c.anchor + static_cast<double>(k) * c.spacing));

    TedTrace out = like;
    out.sigma.resize(0);
    out.values.resize(m);
    out.imag.resize(m);
    Eigen::VectorXd s_abs(m), h_abs(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double t = like.at(j);
        // Horner sum over teeth: sum_k H_k z^k with z = e^{-i spacing t}.
        const cd z = std::polar(1.0, -c.spacing * t);
        cd acc(0.0, 0.0);
        for (auto it = weights.rbegin(); it != weights.rend(); ++it) acc = acc * z + *it;
        const cd sum = acc * std::polar(1.0, -(c.anchor + static_cast<double>(m_lo) * c.spacing) * t);
        const cd hv(hre[j], him[j]);
        const cd v = hv * sum;
        out.values[j] = v.real();
        out.imag[j] = v.imag();
        s_abs[j] = std::abs(sum);
        h_abs[j] = std::abs(hv);
    }
    const Eigen::VectorXd tt = like.times();
    const double h_width = efold_width(tt, h_abs);
    // Central tooth of the envelope transform, restricted to one round trip.
    const double t_rt = kTwoPi / c.spacing;
    const auto j0 = m / 2;
    const auto half = std::min<Eigen::Index>(m / 2 - 1, static_cast<Eigen::Index>(0.5 * t_rt / like.t_step));
    const double tooth = efold_width(tt.segment(j0 - half, 2 * half + 1), s_abs.segment(j0 - half, 2 * half + 1));
    if (h_width < 10.0 * tooth)
        throw PreconditionError("ted_comb_model: single-peak transform is not 10x wider than an envelope tooth");
    out.imag_residual = out.imag.cwiseAbs().maxCoeff() / out.values.cwiseAbs().maxCoeff();
    return out;
}

}  // namespace wgm
