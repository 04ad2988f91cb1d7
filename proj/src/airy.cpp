#include "wgm/airy.hpp"

#include <cmath>

#include "wgm/constants.hpp"
#include "wgm/errors.hpp"
#include "wgm/numeric.hpp"

namespace wgm {

namespace {

constexpr double kAi0 = 0.355028053887817239260;
constexpr double kDAi0 = -0.258819403792806798405;
constexpr double kAsymptoticStart = 8.0;
constexpr double kMinX = -100.0;

// One Taylor step of y'' = x y from x0 to x0 + h.
AiryValue taylor_step(double x0, AiryValue y, double h) {
    double am1 = 0.0;
    double a0 = y.ai;
    double a1 = y.dai;
    double val = a0 + a1 * h;
    double der = a1;
    double hk = h;  // h^(k-1) for k = 2 below
    double ak_prev = a0, ak = a1;
    int small = 0;
    for (int k = 0; k < 200; ++k) {
        const double anext = (x0 * ak_prev + am1) / ((k + 2.0) * (k + 1.0));
        am1 = ak_prev;
        ak_prev = ak;
        ak = anext;
        const double dv = anext * hk * h;
        const double dd = (k + 2.0) * anext * hk;
        val += dv;
        der += dd;
        hk *= h;
        const bool tiny = std::abs(dv) <= 1e-18 * std::abs(val) && std::abs(dd) <= 1e-18 * (std::abs(der) + 1e-300);
        // The series can have isolated zero coefficients, so require a run of negligible terms.
        small = tiny ? small + 1 : 0;
        if (small >= 3) break;
    }
    return {val, der};
}

AiryValue integrate(double x0, AiryValue y, double x1) {
    const double span = x1 - x0;
    const double hmax = 0.25 / std::max(1.0, std::sqrt(std::max(std::abs(x0), std::abs(x1))) / 2.0);
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / hmax)));
    const double h = span / n;
    double x = x0;
    for (int i = 0; i < n; ++i) {
        y = taylor_step(x, y, h);
        x = x0 + (i + 1) * h;
    }
    return y;
}

AiryValue asymptotic(double x) {
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double pref = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
    double u = 1.0, su = 1.0, sv = 1.0;
    double zk = 1.0;
    for (int k = 1; k < 40; ++k) {
        // u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k)
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
        zk *= -zeta;
        const double tu = u / zk;
        const double tv = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u / zk;
        su += tu;
        sv += tv;
        if (std::abs(tu) < 1e-17 && std::abs(tv) < 1e-17) break;
    }
    const double x14 = std::pow(x, 0.25);
    return {pref / x14 * su, -pref * x14 * sv};
}

}  // namespace

AiryValue airy_ai_full(double x) {
    if (!(x >= kMinX)) throw DomainError("airy_ai: argument below supported range");
    if (x >= kAsymptoticStart) return asymptotic(x);
    if (x > 2.0) return integrate(kAsymptoticStart, asymptotic(kAsymptoticStart), x);
    return integrate(0.0, {kAi0, kDAi0}, x);
}

double airy_zero(int q) {
    if (q < 1 || q > 10) throw DomainError("airy_zero: q must lie in [1, 10]");
    const double t = 3.0 * kPi * (4.0 * q - 1.0) / 8.0;
    const double guess = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t) - 5.0 / 36.0 / std::pow(t, 4));
    return find_root([](double z) { return airy_ai(-z); }, guess - 0.1, guess + 0.1);
}

}  // namespace wgm
