#include "wgm/cavity.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "wgm/numeric.hpp"

namespace wgm {

WaveCoupling reflectivity_from_q(double order, double q) {
    if (!(order > 0.0)) throw DomainError("reflectivity_from_q: order must be positive");
    if (!(q > order * kPi)) throw DomainError("reflectivity_from_q: Q <= order*pi gives a degenerate cavity");
    const double loss = order * kPi / q;
    const double r = 1.0 - loss;
    // 1 - r^2 = loss (2 - loss), written to avoid cancellation as r -> 1.
    return {q, order, r, std::sqrt(loss * (2.0 - loss))};
}

std::string to_string(OrderConvention c) { return c == OrderConvention::Group ? "group" : "azimuthal"; }

OrderConvention parse_order_convention(const std::string& s) {
    if (s == "group") return OrderConvention::Group;
    if (s == "azimuthal") return OrderConvention::Azimuthal;
    throw FormatError("unknown order convention '" + s + "' (expected group or azimuthal)");
}

double coupling_order(const Dispersion& d, int l, OrderConvention c) {
    if (c == OrderConvention::Azimuthal) return l;
    const double w = d.resonance_frequency(l);
    return w * d.group_delay(w) / kTwoPi;
}

double CouplingSpec::q(Wave w) const {
    switch (w) {
        case Wave::Pump: return q_pump;
        case Wave::Signal: return q_signal;
        case Wave::Idler: return q_idler;
    }
    return q_pump;
}

WaveCoupling CouplingSpec::coupling(Wave w) const { return reflectivity_from_q(l_ref, q(w)); }

WaveCoupling CouplingSpec::coupling(Wave w, const Dispersion& d, int l) const {
    return reflectivity_from_q(coupling_order(d, l, convention), q(w));
}

void CouplingSpec::validate() const {
    if (!(q_pump > 0.0 && q_signal > 0.0 && q_idler > 0.0)) throw DomainError("CouplingSpec: Q must be positive");
    if (l_ref < 1) throw DomainError("CouplingSpec: l_ref must be >= 1");
    for (Wave w : {Wave::Pump, Wave::Signal, Wave::Idler}) (void)coupling(w);
}

std::vector<std::string> PumpSweepSpec::validate() const {
    if (!(linewidth_hz > 0.0 && resonance_fwhm_hz > 0.0 && sweep_span_hz > 0.0 && sweep_rate_hz > 0.0))
        throw DomainError("PumpSweepSpec: all widths and rates must be positive");
    std::vector<std::string> warnings;
    if (!(10.0 * linewidth_hz <= resonance_fwhm_hz))
        warnings.emplace_back("pump linewidth is not 10x narrower than the resonance bandwidth");
    if (!(10.0 * resonance_fwhm_hz <= sweep_span_hz))
        warnings.emplace_back("resonance bandwidth is not 10x narrower than the sweep span");
    return warnings;
}

std::complex<double> airy_mode(double omega, const WaveCoupling& c, const Dispersion& d) {
    return airy_amplitude(d.round_trip_phase(omega), c.r, c.t);
}

std::complex<double> airy_pump(double omega, const WaveCoupling& c, const Dispersion& d) {
    return airy_amplitude(d.round_trip_phase(omega), c.r * c.r, c.t);
}

double airy_phase_fwhm(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("airy_phase_fwhm: round-trip factor must lie in (0, 1)");
    const double s = (1.0 - rho) / (2.0 * std::sqrt(rho));
    if (s >= 1.0) throw DomainError("airy_phase_fwhm: peak too broad to have a half maximum");
    return 4.0 * std::asin(s);
}

WaveCoupling pump_coupling_for_fwhm(double fwhm_hz, double t_rt) {
    if (!(fwhm_hz > 0.0 && t_rt > 0.0)) throw DomainError("pump_coupling_for_fwhm: inputs must be positive");
    const double dphi = kTwoPi * fwhm_hz * t_rt;
    if (dphi >= kTwoPi) throw DomainError("pump_coupling_for_fwhm: FWHM exceeds the FSR");
    const double s = std::sin(0.25 * dphi);
    // rho = r_p^2 solves (1 - rho) = 2 s sqrt(rho); r_p = sqrt(rho) is its positive root.
    const double rp = std::sqrt(s * s + 1.0) - s;
    const double loss = 1.0 - rp;
    WaveCoupling c;
    c.r = rp;
    c.t = std::sqrt(loss * (2.0 - loss));
    c.order = 0.0;
    c.q = 0.0;
    return c;
}

double airy_fwhm_hz(const WaveCoupling& c, const LocalPhase& phase, bool pump) {
    const double rho = pump ? c.r * c.r : c.r;
    const double t2 = c.t * c.t;
    const double half = 0.5 * airy_intensity(0.0, rho, t2);
    const double x_max = 0.999 * kPi / phase.d1;
    const auto g = [&](double x) { return airy_intensity(phase(phase.omega_l + x), rho, t2) - half; };
    const double right = find_root(g, 0.0, x_max);
    const double left = find_root(g, -x_max, 0.0);
    return (right - left) / kTwoPi;
}

TransmissionScan TransmissionScan::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("scan file not readable: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("scan file " + path + ": missing header");
    if (line.find("freq_offset_Hz") == std::string::npos)
        throw FormatError("scan file " + path + ": header must name freq_offset_Hz,transmittance_normalized");
    std::vector<double> f, t;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double a = 0, b = 0;
        char comma = 0;
        if (!(ss >> a >> comma >> b) || comma != ',')
            throw FormatError("scan file " + path + ": malformed row " + std::to_string(row));
        f.push_back(a);
        t.push_back(b);
    }
    if (f.size() < 3) throw FormatError("scan file " + path + ": too few samples");
    TransmissionScan s;
    s.freq_offset_hz = Eigen::Map<Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    s.transmittance = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    return s;
}

void TransmissionScan::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write scan file: " + path);
    out << "freq_offset_Hz,transmittance_normalized\n";
    char buf[64];
    for (Eigen::Index i = 0; i < freq_offset_hz.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", freq_offset_hz[i], transmittance[i]);
        out << buf;
    }
}

TransmissionScan synthetic_scan(const SyntheticScanSpec& spec) {
    if (spec.samples < 3 || !(spec.span_hz > 0.0)) throw DomainError("synthetic_scan: invalid grid");
    const WaveCoupling c = pump_coupling_for_fwhm(spec.fwhm_hz, 1.0 / spec.fsr_hz);
    const double rho = c.r * c.r;
    const double peak = airy_intensity(0.0, rho, c.t * c.t);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.noise);
    TransmissionScan s;
    s.freq_offset_hz.resize(spec.samples);
    s.transmittance.resize(spec.samples);
    for (int i = 0; i < spec.samples; ++i) {
        const double f = -0.5 * spec.span_hz + spec.span_hz * i / (spec.samples - 1);
        const double phase = kTwoPi * (f - spec.center_hz) / spec.fsr_hz;
        s.freq_offset_hz[i] = f;
        s.transmittance[i] = 1.0 - spec.depth * airy_intensity(phase, rho, c.t * c.t) / peak + noise(rng);
    }
    return s;
}

}  // namespace wgm
