#pragma once

#include <random>
#include <string>
#include <vector>

#include "thzbf/beamforming.hpp"
#include "thzbf/constants.hpp"

namespace thzbf {

inline constexpr int kOmniIndex = -1;

struct TracePoint
{
    int stage;
    int tx_index; // kOmniIndex when that side is in omni mode
    int rx_index;
    double power;
};

// One test slot. Slots hold several points only for parallel training,
// where N_RF beams share a slot.
using TestSlot = std::vector<TracePoint>;

struct TrainingOutcome
{
    int tx_index = 0;
    int rx_index = 0;
    double achieved_gain = 0.0; // noiseless |w^H H f| of the selected pair
    int tests_used = 0;         // number of slots in the trace
    std::vector<TestSlot> trace;
};

struct Measurement
{
    cplx y;
    double power;
};

// y = w^H H f s + w^H n with s = 1 and CN(0, noise_var) noise.
Measurement measure(const CMatrix& channel, const CVector& f, const CVector& w, double noise_var,
                    std::mt19937_64& rng);

// Single active element at full power.
CVector omni_codeword(int n_antennas);

TrainingOutcome exhaustive_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, double noise_var,
                                 std::mt19937_64& rng);

enum class Side { Receiver, Transmitter };

// Sweeps `first` with the other side omni, then the other side with `first`
// omni.
TrainingOutcome one_sided_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, Side first,
                                double noise_var, std::mt19937_64& rng);

// Exhaustive pair sweep with n_rf beam pairs per slot.
TrainingOutcome parallel_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, int n_rf,
                               double noise_var, std::mt19937_64& rng);

// Receiver tree descent with the transmitter omni, then transmitter descent
// against the chosen receive leaf. The stage-1 root is not tested.
TrainingOutcome tree_train_one_side(const CMatrix& channel, const HierarchicalCodebook& tx,
                                    const HierarchicalCodebook& rx, double noise_var, std::mt19937_64& rng);

// Both sides descend together, testing all M^2 child pairs per stage.
TrainingOutcome tree_train_both_side(const CMatrix& channel, const HierarchicalCodebook& tx,
                                     const HierarchicalCodebook& rx, double noise_var, std::mt19937_64& rng);

enum class TrainingMethod { Exhaustive, OneSided, Parallel, TreeOne, TreeBoth };

TrainingMethod parse_training_method(const std::string& name);
std::string to_string(TrainingMethod method);

// N^2, 2N, ceil(N^2/N_RF), 2M log_M N, M^2 log_M N.
long long predict_cost(TrainingMethod method, int n_beams, int m_ary = 2, int n_rf = 1);

// Exact integer log_M N; DomainError when N is not a power of M.
int tree_depth(int n_beams, int m_ary);

} // namespace thzbf
