#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace thzbf {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The link-budget examples this library reproduces (lambda = 1 mm at 0.3 THz)
// are stated with the rounded engineering value of c.
inline constexpr double kSpeedOfLight = 3.0e8;      // m/s
inline constexpr double kPlanck = 6.62607015e-34;   // J s
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double angle)
{
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0.0;
    return r;
}

} // namespace thzbf
