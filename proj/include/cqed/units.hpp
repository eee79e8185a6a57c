#pragma once

#include <numbers>

namespace cqed {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;     // m/s
inline constexpr double kHbar = 1.054'571'817e-34;         // J s

// Ordinary frequency -> angular frequency (rad/s).
constexpr double ghz(double v) { return kTwoPi * v * 1e9; }
constexpr double mhz(double v) { return kTwoPi * v * 1e6; }
constexpr double khz(double v) { return kTwoPi * v * 1e3; }

// Angular frequency (rad/s) -> ordinary frequency.
constexpr double to_ghz(double w) { return w / (kTwoPi * 1e9); }
constexpr double to_mhz(double w) { return w / (kTwoPi * 1e6); }

constexpr double picowatt(double v) { return v * 1e-12; }
constexpr double nanosecond(double v) { return v * 1e-9; }
constexpr double microsecond(double v) { return v * 1e-6; }

} // namespace cqed
