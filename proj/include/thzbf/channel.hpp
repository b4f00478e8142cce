#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "thzbf/constants.hpp"
#include "thzbf/geometry.hpp"
#include "thzbf/propagation.hpp"

namespace thzbf {

struct RaySpec
{
    int cluster_index = 0;
    int ray_index = 0;
    Direction aod{0.0};
    Direction aoa{0.0};
    double distance_m = 1.0;
    double cluster_arrival_s = 0.0; // T_i, zero for the first cluster
    double ray_arrival_s = 0.0;     // T_ij, zero for the first ray of a cluster

    double delay() const { return cluster_arrival_s + ray_arrival_s; }
};

struct RayContribution
{
    RaySpec ray;
    double path_gain;  // alpha
    double tx_gain;    // G_t, linear
    double rx_gain;    // G_r, linear
    cplx amplitude;    // sqrt(alpha G_t G_r)
};

struct ChannelTap
{
    double delay_s;
    CMatrix matrix; // N_r x N_t
};

/// Multipath channel as a set of delayed taps. Each tap is the sum of the
/// rank-one ray terms that share its delay; taps are sorted by delay.
class ChannelMatrix
{
public:
    ChannelMatrix(int n_rx, int n_tx, std::vector<ChannelTap> taps, std::vector<RayContribution> rays = {});

    int n_rx() const { return n_rx_; }
    int n_tx() const { return n_tx_; }
    const std::vector<ChannelTap>& taps() const { return taps_; }
    const std::vector<RayContribution>& rays() const { return rays_; }

    // Sum of all taps: the frequency-flat channel seen by a narrowband beam.
    CMatrix narrowband() const;

private:
    int n_rx_;
    int n_tx_;
    std::vector<ChannelTap> taps_;
    std::vector<RayContribution> rays_;
};

struct SynthesisParams
{
    double frequency_hz = 0.3e12;
    double gamma_cluster_s = 1e-9;
    double gamma_ray_s = 1e-9;
    // Isotropic elements when empty.
    std::optional<ElementPattern> element_pattern;
    double efficiency = 1.0;
};

// Builds H(t) = sum_ij delta(t - tau_ij) sqrt(alpha_ij G_t G_r) a_r a_t^H.
// Per-ray gains are the element gain at the ray angle plus the array gain
// 10 log10(N). Both response vectors use the unified (transmit-sign) form so
// that steering codewords a(phi) align with the channel's own vectors.
ChannelMatrix synthesize_channel(const Medium& medium, const ArrayGeometry& tx, const ArrayGeometry& rx,
                                 std::span<const RaySpec> rays, const SynthesisParams& params);

struct RandomRayParams
{
    int n_clusters = 2;
    int rays_per_cluster = 3;
    double cluster_rate_hz = 1.0 / 5e-9; // exponential inter-cluster arrival rate
    double ray_rate_hz = 1.0 / 0.5e-9;   // exponential intra-cluster arrival rate
    double base_distance_m = 10.0;       // distance of the first arrival
    bool random_elevation = false;       // elevation U[0, pi] instead of pi/2
};

// Saleh-Valenzuela style ray draw: azimuths uniform on [-pi/2, pi/2),
// exponential inter-arrival times with T_1 = T_i1 = 0, distances growing
// with the excess delay (d = d_0 + c tau).
std::vector<RaySpec> generate_rays(const RandomRayParams& params, std::uint64_t seed);

// Single zero-delay tap gain * a_r a_t^H.
ChannelMatrix los_channel(cplx gain, const CVector& a_r, const CVector& a_t);

// Virtual channel W H F. Both transforms must be unitary.
CMatrix beamspace_transform(const CMatrix& h, const CMatrix& w_lens, const CMatrix& f_lens);

// n points uniform in sine over [-1, 1).
std::vector<double> dft_grid(int n);

// Unitary matrix with columns (1/sqrt(n)) e^{j pi r s_c}, r = 0..n-1.
CMatrix dft_matrix(int n, std::span<const double> spatial_frequencies);
CMatrix dft_matrix(int n);

struct BeamSelection
{
    std::vector<int> tx_indices; // descending column energy
    std::vector<int> rx_indices; // descending row energy
    CMatrix reduced;
    double captured_energy_ratio;
};

BeamSelection select_beams(const CMatrix& h_virtual, int count_tx, int count_rx);

} // namespace thzbf
