#pragma once

#include <span>
#include <vector>

#include "thzbf/constants.hpp"
#include "thzbf/geometry.hpp"

// Data-parallel inner loops. Each OpenMP kernel has a `_serial` twin with the
// same arithmetic in a single loop; the serial versions are the reference the
// tests and benchmarks compare against.
namespace thzbf::kernels {

// Trapezoidal integral of F(phi, theta) sin(theta) over the sphere.
double pattern_integral(const ElementPattern& pattern, int n_azimuth, int n_elevation);
double pattern_integral_serial(const ElementPattern& pattern, int n_azimuth, int n_elevation);

// |w^H a(psi)| for each probe angle, a the ULA steering vector with the
// given spacing (in wavelengths).
std::vector<double> array_factor_sweep(const CVector& weights, std::span<const double> probes,
                                       double spacing_over_lambda = 0.5);
std::vector<double> array_factor_sweep_serial(const CVector& weights, std::span<const double> probes,
                                              double spacing_over_lambda = 0.5);

// |w^H a(psi, f)| on a (frequency x probe) grid, row-major by frequency.
// The weights are applied at the carrier; `spacing_over_lambda` refers to
// the carrier wavelength.
std::vector<double> squint_sweep(const CVector& weights, double carrier_hz, std::span<const double> frequencies,
                                 std::span<const double> probes, double spacing_over_lambda = 0.5);
std::vector<double> squint_sweep_serial(const CVector& weights, double carrier_hz,
                                        std::span<const double> frequencies, std::span<const double> probes,
                                        double spacing_over_lambda = 0.5);

// Noiseless |w_r^H H f_t|^2 for every (rx, tx) column pair. Result(r, t).
Eigen::MatrixXd pair_powers(const CMatrix& channel, const CMatrix& tx_codewords, const CMatrix& rx_codewords);
Eigen::MatrixXd pair_powers_serial(const CMatrix& channel, const CMatrix& tx_codewords,
                                   const CMatrix& rx_codewords);

} // namespace thzbf::kernels
