#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace rlocus {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

// Sign of the feedback gain being traced. Negative gains use the phase
// target 0 instead of pi.
enum class GainSign { Positive, Negative };

inline double phase_target(GainSign sign) {
    return sign == GainSign::Positive ? kPi : 0.0;
}

inline const char* to_string(GainSign sign) {
    return sign == GainSign::Positive ? "positive" : "negative";
}

}  // namespace rlocus
