#pragma once

namespace wgm {

/// Airy function Ai(x) and its derivative.
struct AiryValue {
    double ai;
    double dai;
};

/// Ai(x) and Ai'(x) for x >= -100.
///
/// Taylor stepping of y'' = x y from the origin on the oscillatory side and
/// from the asymptotic expansion at x = 8 (stepped backwards) on the decaying side.
[[nodiscard]] AiryValue airy_ai_full(double x);
[[nodiscard]] inline double airy_ai(double x) { return airy_ai_full(x).ai; }

/// q-th zero of Ai(-z), i.e. the positive root alpha_q with Ai(-alpha_q) = 0. Valid for 1 <= q <= 10.
[[nodiscard]] double airy_zero(int q);

}  // namespace wgm
