#include "wgm/sfwm.hpp"

#include <algorithm>

namespace wgm {

void NonlinearParams::validate() const {
    if (!(pump_power_w >= 0.0)) throw DomainError("NonlinearParams: pump power must be non-negative");
    if (!(n2_m2_per_w > 0.0 && a_eff_m2 > 0.0)) throw DomainError("NonlinearParams: n2 and A_eff must be positive");
}

double kerr_mismatch(const NonlinearParams& p, double q, double n, double radius) {
    p.validate();
    if (!(q > 0.0 && n > 0.0 && radius > 0.0)) throw DomainError("kerr_mismatch: Q, n and R must be positive");
    return p.pump_power_w * q * p.n2_m2_per_w / (kPi * n * radius * p.a_eff_m2);
}

double phase_mismatch(double omega_p, double omega, const Dispersion& pump, const Dispersion& signal,
                      const Dispersion& idler, double kerr) {
    return 2.0 * pump.wavenumber(omega_p) - signal.wavenumber(omega_p + omega) - idler.wavenumber(omega_p - omega) -
           kerr;
}

Phasematch phasematch_strength(double x) {
    const double h = 0.5 * x;
    const double sinc = std::abs(h) < 1e-8 ? 1.0 - h * h / 6.0 : std::sin(h) / h;
    return {sinc * std::polar(1.0, h), sinc * sinc};
}

namespace {

// L Delta kappa from mode numbers, which keeps the cancellation between the three phases exact in l.
double l_delta_kappa(const Dispersion& d, double omega_p, double omega, double kerr) {
    const double dm = 2.0 * d.mode_number(omega_p) - d.mode_number(omega_p + omega) - d.mode_number(omega_p - omega);
    return kTwoPi * dm - d.perimeter() * kerr;
}

Eigen::VectorXd centred_linspace(double half_span, int n) {
    if (n < 1) throw DomainError("grid needs at least one point");
    if (n == 1) return Eigen::VectorXd::Zero(1);
    return Eigen::VectorXd::LinSpaced(n, -half_span, half_span);
}

}  // namespace

Phasematch phasematch_strength(double omega_p, double omega, const Dispersion& d, double kerr) {
    return phasematch_strength(l_delta_kappa(d, omega_p, omega, kerr));
}

PhasematchMap phasematch_map(const Dispersion& d, double omega_p0, double kerr, double pump_half_span, int n_pump,
                             double omega_half_span, int n_omega, unsigned threads) {
    PhasematchMap m;
    m.pump_detuning = centred_linspace(pump_half_span, n_pump);
    m.omega = centred_linspace(omega_half_span, n_omega);
    m.g2.resize(n_pump, n_omega);
    Eigen::MatrixXd ldk(n_pump, n_omega);
    parallel_for(static_cast<std::size_t>(n_pump), threads, [&](std::size_t r) {
        const auto i = static_cast<Eigen::Index>(r);
        for (Eigen::Index j = 0; j < n_omega; ++j) {
            const double x = l_delta_kappa(d, omega_p0 + m.pump_detuning[i], m.omega[j], kerr);
            ldk(i, j) = x;
            m.g2(i, j) = phasematch_strength(x).g2;
        }
    });
    m.min_g2 = m.g2.minCoeff();
    m.max_abs_l_delta_kappa = ldk.cwiseAbs().maxCoeff();
    return m;
}

GenerationModeMatrix generation_modes(const Dispersion& pump, const Dispersion& signal, const Dispersion& idler,
                                      int l_p, int n_pairs) {
    if (n_pairs < 1) throw DomainError("generation_modes: n_pairs must be >= 1");
    if (l_p - n_pairs < 1) throw DomainError("generation_modes: idler index below 1");
    GenerationModeMatrix gm;
    gm.l_p = l_p;
    gm.omega_p = pump.resonance_frequency(l_p);
    for (int j = -n_pairs; j <= n_pairs; ++j) {
        GenerationMode g;
        g.j = j;
        g.l_s = l_p + j;
        g.l_i = l_p - j;
        g.omega_s = signal.resonance_frequency(g.l_s);
        g.omega_i = idler.resonance_frequency(g.l_i);
        g.omega = 0.5 * (g.omega_s - g.omega_i);
        g.epsilon = g.omega_s + g.omega_i - 2.0 * gm.omega_p;
        gm.modes.push_back(g);
    }
    std::sort(gm.modes.begin(), gm.modes.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
    return gm;
}

SfwmSource SfwmSource::shared(std::shared_ptr<const Dispersion> d, int l_p, CouplingSpec c) {
    SfwmSource s;
    s.pump = d;
    s.signal = d;
    s.idler = std::move(d);
    s.l_p = l_p;
    s.coupling = c;
    return s;
}

Eigen::VectorXd SpectralGrid::points() const {
    Eigen::VectorXd p(size);
    for (Eigen::Index i = 0; i < size; ++i) p[i] = at(i);
    return p;
}

SpectralGrid SpectralGrid::symmetric(double half_span, double step) {
    if (!(step > 0.0 && half_span >= 0.0)) throw DomainError("SpectralGrid: step must be positive");
    const auto k = static_cast<Eigen::Index>(std::floor(half_span / step + 1e-9));
    return {-static_cast<double>(k) * step, step, 2 * k + 1};
}

SpectralGrid SpectralGrid::lattice(double lo, double hi, double step) {
    if (!(step > 0.0 && hi >= lo)) throw DomainError("SpectralGrid: invalid lattice window");
    const double k0 = std::ceil(lo / step - 1e-9);
    const double k1 = std::floor(hi / step + 1e-9);
    return {k0 * step, step, static_cast<Eigen::Index>(k1 - k0) + 1};
}

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::None: return "none";
        case Normalization::UnitMax: return "unit-max";
        case Normalization::UnitArea: return "unit-area";
    }
    return "none";
}

Normalization parse_normalization(const std::string& s) {
    if (s == "none") return Normalization::None;
    if (s == "unit-max") return Normalization::UnitMax;
    if (s == "unit-area") return Normalization::UnitArea;
    throw FormatError("unknown normalization '" + s + "' (expected none, unit-max or unit-area)");
}

void normalize(BiphotonSpectrum& s, Normalization n) {
    if (n == Normalization::UnitMax) {
        const double m = s.values.maxCoeff();
        if (m > 0.0) s.values /= m;
    } else if (n == Normalization::UnitArea) {
        const double a = s.values.sum() * s.grid.step;
        if (a > 0.0) s.values /= a;
    }
    s.normalization = n;
}

SfwmModel::SfwmModel(SfwmSource source, double omega_half_span) : src_(std::move(source)) {
    if (!src_.pump || !src_.signal || !src_.idler) throw PreconditionError("SfwmModel: dispersions must be set");
    src_.coupling.validate();
    if (!(src_.pump_window_fwhm >= 6.0))
        throw PreconditionError("SfwmModel: pump integration window must cover >= 6 pump FWHM");

    pump_phase_ = make_local_phase(*src_.pump, src_.l_p);
    omega_p0_ = pump_phase_.omega_l;
    if (src_.pump_fwhm_hz) {
        if (*src_.pump_fwhm_hz < 0.0) throw DomainError("SfwmModel: pump FWHM must be >= 0");
        monochromatic_ = *src_.pump_fwhm_hz == 0.0;
        if (!monochromatic_) {
            pump_c_ = pump_coupling_for_fwhm(*src_.pump_fwhm_hz, pump_phase_.d1);
            pump_fwhm_hz_ = *src_.pump_fwhm_hz;
        }
    } else {
        pump_c_ = src_.coupling.coupling(Wave::Pump, *src_.pump, src_.l_p);
        pump_fwhm_hz_ = airy_fwhm_hz(pump_c_, pump_phase_, true);
    }
    pump_rho_ = pump_c_.r * pump_c_.r;
    pump_t2_ = pump_c_.t * pump_c_.t;

    const double fsr = kTwoPi / pump_phase_.d1;
    const double margin = src_.pump_window_fwhm * kTwoPi * pump_fwhm_hz_ + 2.0 * fsr;
    auto build = [&](const Dispersion& d, double lo, double hi, double q, PhaseTable& table, std::vector<Line>& lines) {
        const int l_lo = static_cast<int>(std::floor(d.mode_number(lo)));
        const int l_hi = static_cast<int>(std::ceil(d.mode_number(hi)));
        table = PhaseTable(d, std::max(1, l_lo), l_hi);
        for (const auto& p : table.phases()) {
            const double order = src_.coupling.convention == OrderConvention::Group ? p.omega_l * p.d1 / kTwoPi : p.l;
            const WaveCoupling c = reflectivity_from_q(order, q);
            lines.push_back({c.r, c.t * c.t, 0.5 * airy_phase_fwhm(c.r) / p.d1});
        }
    };
    build(*src_.signal, omega_p0_ - omega_half_span - margin, omega_p0_ + omega_half_span + margin,
          src_.coupling.q_signal, signal_table_, signal_lines_);
    build(*src_.idler, omega_p0_ - omega_half_span - margin, omega_p0_ + omega_half_span + margin,
          src_.coupling.q_idler, idler_table_, idler_lines_);
}

double SfwmModel::line_intensity(const PhaseTable& t, const std::vector<Line>& lines, double omega) const {
    if (!t.covers(omega)) throw DomainError("SfwmModel: frequency outside the prepared span");
    const LocalPhase& p = t.nearest(omega);
    const Line& ln = lines[static_cast<std::size_t>(p.l - t.l_min())];
    return airy_intensity(p(omega), ln.rho, ln.t2);
}

double SfwmModel::signal_fwhm_hz(double omega) const {
    const LocalPhase& p = signal_table_.nearest(omega);
    return 2.0 * signal_lines_[static_cast<std::size_t>(p.l - signal_table_.l_min())].half_width / kTwoPi;
}

double SfwmModel::min_line_fwhm_hz() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : signal_lines_) m = std::min(m, 2.0 * l.half_width / kTwoPi);
    for (const auto& l : idler_lines_) m = std::min(m, 2.0 * l.half_width / kTwoPi);
    return m;
}

double SfwmModel::pump_intensity(double omega) const {
    if (monochromatic_) throw PreconditionError("SfwmModel: monochromatic pump has no lineshape");
    return airy_intensity(pump_phase_(omega), pump_rho_, pump_t2_);
}

double SfwmModel::signal_intensity(double omega) const { return line_intensity(signal_table_, signal_lines_, omega); }
double SfwmModel::idler_intensity(double omega) const { return line_intensity(idler_table_, idler_lines_, omega); }

double SfwmModel::phasematch_g2(double omega_p, double omega) const {
    if (!src_.exact_phasematch) return 1.0;
    const LocalPhase& s = signal_table_.nearest(omega_p + omega);
    const LocalPhase& i = idler_table_.nearest(omega_p - omega);
    const double x = kTwoPi * (2 * src_.l_p - s.l - i.l) + 2.0 * pump_phase_(omega_p) - s(omega_p + omega) -
                     i(omega_p - omega) - src_.pump->perimeter() * src_.kerr;
    return phasematch_strength(x).g2;
}

double SfwmModel::integrand(double u, double omega) const {
    const double wp = omega_p0_ + u;
    return pump_intensity(wp) * signal_intensity(wp + omega) * idler_intensity(wp - omega) * phasematch_g2(wp, omega);
}

double SfwmModel::intensity(double omega) const {
    const double ws0 = omega_p0_ + omega;
    const double wi0 = omega_p0_ - omega;
    if (!signal_table_.covers(ws0) || !idler_table_.covers(wi0))
        throw DomainError("SfwmModel: Omega outside the prepared span");
    const LocalPhase& ps = signal_table_.nearest(ws0);
    const LocalPhase& pi = idler_table_.nearest(wi0);
    const Line& ls = signal_lines_[static_cast<std::size_t>(ps.l - signal_table_.l_min())];
    const Line& li = idler_lines_[static_cast<std::size_t>(pi.l - idler_table_.l_min())];

    if (monochromatic_)
        return airy_intensity(ps(ws0), ls.rho, ls.t2) * airy_intensity(pi(wi0), li.rho, li.t2) *
               phasematch_g2(omega_p0_, omega);

    const bool exact = src_.exact_phasematch;
    const double base = kTwoPi * (2 * src_.l_p - ps.l - pi.l) - src_.pump->perimeter() * src_.kerr;
    const auto f = [&](double u) {
        const double wp = omega_p0_ + u;
        const double dp = pump_phase_(wp);
        const double ds = ps(wp + omega);
        const double di = pi(wp - omega);
        double v = airy_intensity(dp, pump_rho_, pump_t2_) * airy_intensity(ds, ls.rho, ls.t2) *
                   airy_intensity(di, li.rho, li.t2);
        if (exact) v *= phasematch_strength(base + 2.0 * dp - ds - di).g2;
        return v;
    };

    const double hp = 0.5 * kTwoPi * pump_fwhm_hz_;
    const double w = src_.pump_window_fwhm * 2.0 * hp;
    const double us = ps.omega_l - ws0;
    const double ui = wi0 - pi.omega_l;
    std::vector<double> br{0.0, -hp, hp, us, us - ls.half_width, us + ls.half_width, ui, ui - li.half_width,
                           ui + li.half_width};
    return integrate(f, -w, w, std::move(br), src_.quad).value;
}

BiphotonSpectrum spectral_intensity(const SfwmModel& model, const SpectralGrid& grid, Normalization norm,
                                    unsigned threads) {
    if (!(grid.step > 0.0) || grid.size < 1) throw PreconditionError("spectral_intensity: empty or non-uniform grid");
    const auto& c = model.source().coupling;
    const double nu = model.omega_p0() / kTwoPi;
    const double q_max = std::max(c.q_signal, c.q_idler);
    const double limit = kTwoPi * nu / (2.0 * q_max) / 10.0;
    if (grid.step > limit * (1.0 + 1e-12))
        throw PreconditionError("spectral_intensity: grid step exceeds a tenth of the narrowest comb FWHM (" +
                                std::to_string(limit / kTwoPi) + " Hz)");
    BiphotonSpectrum s;
    s.grid = grid;
    s.values = spectral_intensity_at(model, grid.points(), threads);
    s.omega_p0 = model.omega_p0();
    s.q_pump = c.q_pump;
    s.q_signal = c.q_signal;
    s.q_idler = c.q_idler;
    s.pump_fwhm_hz = model.pump_fwhm_hz();
    normalize(s, norm);
    return s;
}

Eigen::VectorXd spectral_intensity_at(const SfwmModel& model, const Eigen::Ref<const Eigen::VectorXd>& omega,
                                      unsigned threads) {
    Eigen::VectorXd v(omega.size());
    parallel_for(static_cast<std::size_t>(omega.size()), threads, [&](std::size_t i) {
        const auto k = static_cast<Eigen::Index>(i);
        v[k] = model.intensity(omega[k]);
    });
    return v;
}

Jsi2D jsi_mixed(const SfwmModel& model, const Eigen::VectorXd& omega_s, const Eigen::VectorXd& omega_i) {
    Jsi2D j{omega_s, omega_i, Eigen::MatrixXd(omega_s.size(), omega_i.size())};
    Eigen::VectorXd as(omega_s.size()), ai(omega_i.size());
    for (Eigen::Index a = 0; a < omega_s.size(); ++a) as[a] = model.signal_intensity(omega_s[a]);
    for (Eigen::Index b = 0; b < omega_i.size(); ++b) ai[b] = model.idler_intensity(omega_i[b]);
    for (Eigen::Index a = 0; a < omega_s.size(); ++a) {
        for (Eigen::Index b = 0; b < omega_i.size(); ++b) {
            const double wp = 0.5 * (omega_s[a] + omega_i[b]);
            const double om = 0.5 * (omega_s[a] - omega_i[b]);
            j.values(a, b) = 0.5 * model.pump_intensity(wp) * model.phasematch_g2(wp, om) * as[a] * ai[b];
        }
    }
    return j;
}

Jsi2D jsi_pure(const SfwmModel& model, const Eigen::VectorXd& omega_s, const Eigen::VectorXd& omega_i,
               double omega_p) {
    if (omega_i.size() < 2) throw PreconditionError("jsi_pure: idler grid needs >= 2 points");
    Jsi2D j{omega_s, omega_i, Eigen::MatrixXd::Zero(omega_s.size(), omega_i.size())};
    const double step = std::abs(omega_i[1] - omega_i[0]);
    const double pump = model.pump_fwhm_hz() > 0.0 ? model.pump_intensity(omega_p) : 1.0;
    for (Eigen::Index a = 0; a < omega_s.size(); ++a) {
        const double wi = 2.0 * omega_p - omega_s[a];
        Eigen::Index b = 0;
        (omega_i.array() - wi).abs().minCoeff(&b);
        if (std::abs(omega_i[b] - wi) > 0.5 * step * (1.0 + 1e-12)) continue;
        j.values(a, b) = pump * model.phasematch_g2(omega_p, 0.5 * (omega_s[a] - wi)) *
                         model.signal_intensity(omega_s[a]) * model.idler_intensity(wi);
    }
    return j;
}

std::vector<JsiRegion> jsi_regions(const SfwmModel& model, const GenerationModeMatrix& gm, double half_width,
                                   int points, int stride) {
    if (stride < 1) throw DomainError("jsi_regions: stride must be >= 1");
    std::vector<JsiRegion> out;
    const Eigen::VectorXd offs = centred_linspace(half_width, points);
    for (const auto& m : gm.modes) {
        if (m.j % stride != 0) continue;
        const Eigen::VectorXd ws = offs.array() + m.omega_s;
        const Eigen::VectorXd wi = offs.array() + m.omega_i;
        out.push_back({m, jsi_mixed(model, ws, wi)});
    }
    return out;
}

}  // namespace wgm
