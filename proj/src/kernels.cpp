#include "thzbf/kernels.hpp"

#include <cmath>

namespace thzbf::kernels {

namespace {

// Trapezoid weight along elevation: endpoints count half. Azimuth is
// periodic so every sample has full weight.
inline double elevation_weight(int j, int n) { return (j == 0 || j == n) ? 0.5 : 1.0; }

inline double af_at(const CVector& w, double sine, double spacing)
{
    const double step = kTwoPi * spacing * sine;
    cplx acc(0.0, 0.0);
    for (Eigen::Index m = 0; m < w.size(); ++m)
        acc += std::conj(w(m)) * std::polar(1.0, m * step);
    return std::abs(acc) / std::sqrt(static_cast<double>(w.size()));
}

} // namespace

double pattern_integral(const ElementPattern& pattern, int n_azimuth, int n_elevation)
{
    const double dphi = kTwoPi / n_azimuth;
    const double dtheta = kPi / n_elevation;
    double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
    for (int j = 0; j <= n_elevation; ++j) {
        const double theta = j * dtheta;
        const double wt = elevation_weight(j, n_elevation) * std::sin(theta);
        double row = 0.0;
        for (int i = 0; i < n_azimuth; ++i)
            row += pattern(Direction(i * dphi, theta));
        sum += wt * row;
    }
    return sum * dphi * dtheta;
}

double pattern_integral_serial(const ElementPattern& pattern, int n_azimuth, int n_elevation)
{
    const double dphi = kTwoPi / n_azimuth;
    const double dtheta = kPi / n_elevation;
    double sum = 0.0;
    for (int j = 0; j <= n_elevation; ++j) {
        const double theta = j * dtheta;
        const double wt = elevation_weight(j, n_elevation) * std::sin(theta);
        double row = 0.0;
        for (int i = 0; i < n_azimuth; ++i)
            row += pattern(Direction(i * dphi, theta));
        sum += wt * row;
    }
    return sum * dphi * dtheta;
}

std::vector<double> array_factor_sweep(const CVector& weights, std::span<const double> probes,
                                       double spacing_over_lambda)
{
    std::vector<double> out(probes.size());
    const auto n = static_cast<std::ptrdiff_t>(probes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = af_at(weights, std::sin(probes[i]), spacing_over_lambda);
    return out;
}

std::vector<double> array_factor_sweep_serial(const CVector& weights, std::span<const double> probes,
                                              double spacing_over_lambda)
{
    std::vector<double> out(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i)
        out[i] = af_at(weights, std::sin(probes[i]), spacing_over_lambda);
    return out;
}

std::vector<double> squint_sweep(const CVector& weights, double carrier_hz, std::span<const double> frequencies,
                                 std::span<const double> probes, double spacing_over_lambda)
{
    const auto nf = static_cast<std::ptrdiff_t>(frequencies.size());
    const auto np = static_cast<std::ptrdiff_t>(probes.size());
    std::vector<double> out(frequencies.size() * probes.size());
#pragma omp parallel for collapse(2) schedule(static)
    for (std::ptrdiff_t fi = 0; fi < nf; ++fi)
        for (std::ptrdiff_t pi = 0; pi < np; ++pi) {
            const double xi = frequencies[fi] / carrier_hz;
            out[fi * np + pi] = af_at(weights, xi * std::sin(probes[pi]), spacing_over_lambda);
        }
    return out;
}

std::vector<double> squint_sweep_serial(const CVector& weights, double carrier_hz,
                                        std::span<const double> frequencies, std::span<const double> probes,
                                        double spacing_over_lambda)
{
    std::vector<double> out;
    out.reserve(frequencies.size() * probes.size());
    for (double f : frequencies) {
        const double xi = f / carrier_hz;
        for (double p : probes)
            out.push_back(af_at(weights, xi * std::sin(p), spacing_over_lambda));
    }
    return out;
}

Eigen::MatrixXd pair_powers(const CMatrix& channel, const CMatrix& tx_codewords, const CMatrix& rx_codewords)
{
    const CMatrix hf = channel * tx_codewords; // N_r x N_tx_beams
    const auto n_rx = rx_codewords.cols();
    Eigen::MatrixXd out(n_rx, tx_codewords.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < n_rx; ++r)
        out.row(r) = (rx_codewords.col(r).adjoint() * hf).cwiseAbs2();
    return out;
}

Eigen::MatrixXd pair_powers_serial(const CMatrix& channel, const CMatrix& tx_codewords,
                                   const CMatrix& rx_codewords)
{
    Eigen::MatrixXd out(rx_codewords.cols(), tx_codewords.cols());
    for (Eigen::Index r = 0; r < rx_codewords.cols(); ++r)
        for (Eigen::Index t = 0; t < tx_codewords.cols(); ++t) {
            const cplx y = rx_codewords.col(r).dot(channel * tx_codewords.col(t));
            out(r, t) = std::norm(y);
        }
    return out;
}

} // namespace thzbf::kernels
