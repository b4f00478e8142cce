#pragma once

#include <random>

#include "thzbf/constants.hpp"

namespace test {

inline thzbf::CMatrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    thzbf::CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m(i) = scale * thzbf::cplx(g(rng), g(rng));
    return m;
}

// Plain loop over elements, no Eigen expression templates.
inline thzbf::CVector ula_vector(int n, double sine, double d_over_lambda = 0.5)
{
    thzbf::CVector a(n);
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), 2.0 * thzbf::kPi * d_over_lambda * m * sine);
    return a;
}

} // namespace test
