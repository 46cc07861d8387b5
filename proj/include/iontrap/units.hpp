#pragma once

#include <cmath>

// All frequencies inside the library are angular (rad/s); all times are
// seconds.  Config files and CLI output use cyclic units (kHz, Hz, MHz) and
// microseconds, converted exactly once at the boundary.

namespace iontrap {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double rad_per_Hz = two_pi;
inline constexpr double rad_per_kHz = two_pi * 1e3;
inline constexpr double rad_per_MHz = two_pi * 1e6;

inline constexpr double from_kHz(double f) { return f * rad_per_kHz; }
inline constexpr double from_Hz(double f) { return f * rad_per_Hz; }
inline constexpr double to_kHz(double w) { return w / rad_per_kHz; }
inline constexpr double to_Hz(double w) { return w / rad_per_Hz; }

inline constexpr double from_us(double t) { return t * 1e-6; }
inline constexpr double to_us(double t) { return t * 1e6; }

}  // namespace iontrap
