#pragma once

#include <vector>

#include "thzbf/constants.hpp"

namespace thzbf {

enum class HybridKind { Fully, Partially, Dynamic };

class HybridArchitecture
{
public:
    static HybridArchitecture fully(int n_antennas, int n_rf);
    // N_t must be divisible by N_RF; antenna i feeds RF chain i / (N_t / N_RF).
    static HybridArchitecture partially(int n_antennas, int n_rf);
    // Boolean N_t x N_RF switch matrix with exactly one 1 per row. An empty
    // matrix starts from the partially-connected assignment.
    static HybridArchitecture dynamic(int n_antennas, int n_rf, Eigen::MatrixXi switch_matrix = {});

    HybridKind kind() const { return kind_; }
    int n_antennas() const { return n_antennas_; }
    int n_rf() const { return n_rf_; }
    const Eigen::MatrixXi& switch_matrix() const { return switch_; }

private:
    HybridKind kind_ = HybridKind::Fully;
    int n_antennas_ = 0;
    int n_rf_ = 0;
    Eigen::MatrixXi switch_;
};

struct HybridResult
{
    CMatrix f_ab;                         // N_t x N_RF analog network
    CMatrix f_dp;                         // N_RF x N_s digital precoder
    Eigen::MatrixXi switch_matrix;        // final W_S (dynamic), block pattern (partially), empty (fully)
    double residual;                      // ||target - F_AB F_DP||_F
    std::vector<double> residual_trace;   // after every iteration, non-increasing
    int iterations;
};

struct HybridOptions
{
    int max_iters = 50;
    double rel_tol = 1e-8;
};

// Alternating minimisation: least-squares digital step, entrywise phase
// step on the analog network (and switch reassignment for dynamic).
HybridResult project_hybrid(const CMatrix& target, const HybridArchitecture& arch, HybridOptions opts = {});

} // namespace thzbf
