#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include <Eigen/Core>

#include "wgm/errors.hpp"

namespace wgm {

/// Options for `find_root`.
struct RootOptions {
    double x_tol = 0.0;      ///< absolute tolerance on x (0 = machine precision of the bracket)
    int max_iter = 200;
};

/// Bracketed scalar root: bisection safeguarding a secant step.
///
/// Requires `f(a)` and `f(b)` of opposite sign (or one of them zero).
/// Deterministic for a given bracket; throws NoRootError otherwise.
template <class F>
[[nodiscard]] double find_root(F&& f, double a, double b, const RootOptions& opt = {}) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(std::signbit(fa) != std::signbit(fb)) || std::isnan(fa) || std::isnan(fb)) {
        throw NoRootError("find_root: no sign change in bracket");
    }
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    for (int it = 0; it < opt.max_iter; ++it) {
        const double tol = std::max(opt.x_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)));
        if (b - a <= tol) break;
        double x = a - fa * (b - a) / (fb - fa);
        const double mid = 0.5 * (a + b);
        // Fall back to bisection when the secant leaves the inner half of the bracket.
        const double lo = a + 0.25 * (b - a);
        const double hi = b - 0.25 * (b - a);
        if (!(x > lo && x < hi)) x = mid;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

/// Grows `[a, b]` geometrically around `x0` until `f` changes sign, staying inside `[lo, hi]`.
template <class F>
[[nodiscard]] std::pair<double, double> expand_bracket(F&& f, double x0, double half_width, double lo, double hi,
                                                       int max_steps = 60) {
    double a = std::max(lo, x0 - half_width);
    double b = std::min(hi, x0 + half_width);
    double fa = f(a);
    double fb = f(b);
    for (int i = 0; i < max_steps; ++i) {
        if (std::signbit(fa) != std::signbit(fb) || fa == 0.0 || fb == 0.0) return {a, b};
        half_width *= 2.0;
        const double na = std::max(lo, x0 - half_width);
        const double nb = std::min(hi, x0 + half_width);
        if (na == a && nb == b) break;
        if (na != a) fa = f(a = na);
        if (nb != b) fb = f(b = nb);
    }
    throw NoRootError("expand_bracket: no sign change inside the admissible interval");
}

/// Result of an adaptive integration.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

/// Options for `integrate`.
struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_subdivisions = 2000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kKronrodWeights[7];
    double g = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodNodes[j];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrodWeights[j] * s;
        if (j % 2 == 1) g += kGaussWeights[j / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) quadrature over `[a, b]`.
///
/// `breaks` are interior points where the integrand has sharp features; the
/// initial partition is split there. The interval with the largest error
/// estimate is bisected until the total error meets the tolerance.
template <class F>
[[nodiscard]] QuadResult integrate(F&& f, double a, double b, std::vector<double> breaks = {},
                                   const QuadOptions& opt = {}) {
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double x : breaks)
        if (x > pts.back() && x < b) pts.push_back(x);
    pts.push_back(b);

    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto s = detail::gk15(f, pts[i], pts[i + 1]);
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    int evals = 15 * static_cast<int>(heap.size());
    int splits = 0;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && splits < opt.max_subdivisions) {
        const auto s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        const auto l = detail::gk15(f, s.a, m);
        const auto r = detail::gk15(f, m, s.b);
        total += l.value + r.value - s.value;
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        evals += 30;
        ++splits;
    }
    // Re-sum in a fixed order so the result does not depend on heap history rounding.
    std::vector<detail::Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    double v = 0.0, e = 0.0;
    for (const auto& s : segs) {
        v += s.value;
        e += s.error;
    }
    return {v, e, evals};
}

/// Full width at half maximum of the peak at the global maximum of `y(x)`.
///
/// Half-maximum crossings are located by linear interpolation between samples.
/// Throws PreconditionError when the peak is not bracketed by half-max crossings.
[[nodiscard]] double sampled_fwhm(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Width of the region around the maximum where `y >= level * max(y)`.
[[nodiscard]] double sampled_width_at(const Eigen::Ref<const Eigen::VectorXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, double level);

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    /// Evaluates the interpolant; clamps to the end values outside the knots.
    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, d_;
};

[[nodiscard]] double median(std::vector<double> v);
[[nodiscard]] std::size_t next_pow2(std::size_t n);

/// Runs `fn(i)` for `i` in `[0, n)` on up to `threads` workers using contiguous chunks.
/// Each index is written by exactly one worker, so results are schedule independent.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Process-wide default worker count (1 unless changed via `set_default_threads`).
[[nodiscard]] unsigned default_threads();
void set_default_threads(unsigned n);

}  // namespace wgm
