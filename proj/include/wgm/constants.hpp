#pragma once

#include <numbers>

namespace wgm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Speed of light in vacuum (m/s).
inline constexpr double kSpeedOfLight = 299792458.0;

[[nodiscard]] constexpr double wavelength_to_omega(double lambda_m) { return kTwoPi * kSpeedOfLight / lambda_m; }
[[nodiscard]] constexpr double omega_to_wavelength(double omega) { return kTwoPi * kSpeedOfLight / omega; }
[[nodiscard]] constexpr double wavelength_to_freq(double lambda_m) { return kSpeedOfLight / lambda_m; }
[[nodiscard]] constexpr double freq_to_wavelength(double nu) { return kSpeedOfLight / nu; }

}  // namespace wgm
