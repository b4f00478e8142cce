#include "thzbf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

bool is_unitary(const CMatrix& u, double tol)
{
    if (u.rows() != u.cols())
        return false;
    const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

std::vector<int> top_indices(const Eigen::VectorXd& energy, int count)
{
    std::vector<int> idx(energy.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Lowest index wins ties.
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return energy(a) > energy(b); });
    idx.resize(count);
    return idx;
}

} // namespace

ChannelMatrix::ChannelMatrix(int n_rx, int n_tx, std::vector<ChannelTap> taps, std::vector<RayContribution> rays)
    : n_rx_(n_rx), n_tx_(n_tx), taps_(std::move(taps)), rays_(std::move(rays))
{
    for (std::size_t i = 0; i < taps_.size(); ++i) {
        if (taps_[i].delay_s < 0.0)
            throw DomainError("ChannelMatrix", "tap delays must be non-negative");
        if (i > 0 && !(taps_[i].delay_s > taps_[i - 1].delay_s))
            throw DomainError("ChannelMatrix", "tap delays must be sorted ascending");
        if (taps_[i].matrix.rows() != n_rx_ || taps_[i].matrix.cols() != n_tx_)
            throw DomainError("ChannelMatrix", "tap dimension mismatch");
    }
}

CMatrix ChannelMatrix::narrowband() const
{
    CMatrix h = CMatrix::Zero(n_rx_, n_tx_);
    for (const auto& t : taps_)
        h += t.matrix;
    return h;
}

ChannelMatrix synthesize_channel(const Medium& medium, const ArrayGeometry& tx, const ArrayGeometry& rx,
                                 std::span<const RaySpec> rays, const SynthesisParams& params)
{
    if (rays.empty())
        throw DomainError("synthesize_channel", "ray list is empty");

    const ElementPattern pattern = params.element_pattern.value_or(isotropic_pattern());
    const double d = directivity(pattern);
    if (!(params.efficiency >= 0.0 && params.efficiency <= 1.0))
        throw DomainError("synthesize_channel", "efficiency must lie in [0, 1]");

    std::map<double, CMatrix> by_delay;
    std::vector<RayContribution> contributions;
    contributions.reserve(rays.size());

    for (const auto& ray : rays) {
        PathGeometry pg{params.frequency_hz, ray.distance_m,   ray.cluster_arrival_s,
                        ray.ray_arrival_s,   params.gamma_cluster_s, params.gamma_ray_s};
        const double alpha = path_gain(medium, pg);
        const double ge_t = params.efficiency * pattern(ray.aod) * d;
        const double ge_r = params.efficiency * pattern(ray.aoa) * d;
        // Element gain times N, in linear units.
        const double g_t = ge_t * tx.size();
        const double g_r = ge_r * rx.size();
        const cplx amp(std::sqrt(alpha * g_t * g_r), 0.0);

        const CVector a_t = response_vector(tx, ray.aod);
        const CVector a_r = response_vector(rx, ray.aoa);
        CMatrix term = amp * a_r * a_t.adjoint();

        auto [it, inserted] = by_delay.try_emplace(ray.delay(), CMatrix::Zero(rx.size(), tx.size()));
        it->second += term;
        contributions.push_back({ray, alpha, g_t, g_r, amp});
    }

    std::vector<ChannelTap> taps;
    taps.reserve(by_delay.size());
    for (auto& [delay, m] : by_delay)
        taps.push_back({delay, std::move(m)});
    return ChannelMatrix(rx.size(), tx.size(), std::move(taps), std::move(contributions));
}

std::vector<RaySpec> generate_rays(const RandomRayParams& p, std::uint64_t seed)
{
    if (p.n_clusters < 1 || p.rays_per_cluster < 1)
        throw DomainError("generate_rays", "need at least one cluster and one ray");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> az(-kPi / 2, kPi / 2);
    std::uniform_real_distribution<double> el(0.0, kPi);
    std::exponential_distribution<double> cluster_gap(p.cluster_rate_hz);
    std::exponential_distribution<double> ray_gap(p.ray_rate_hz);

    std::vector<RaySpec> rays;
    double t_cluster = 0.0;
    for (int i = 0; i < p.n_clusters; ++i) {
        if (i > 0)
            t_cluster += cluster_gap(rng);
        double t_ray = 0.0;
        for (int j = 0; j < p.rays_per_cluster; ++j) {
            if (j > 0)
                t_ray += ray_gap(rng);
            RaySpec r;
            r.cluster_index = i;
            r.ray_index = j;
            const double aod_el = p.random_elevation ? el(rng) : kPi / 2;
            r.aod = Direction(az(rng), aod_el);
            const double aoa_el = p.random_elevation ? el(rng) : kPi / 2;
            r.aoa = Direction(az(rng), aoa_el);
            r.cluster_arrival_s = t_cluster;
            r.ray_arrival_s = t_ray;
            r.distance_m = p.base_distance_m + kSpeedOfLight * (t_cluster + t_ray);
            rays.push_back(r);
        }
    }
    return rays;
}

ChannelMatrix los_channel(cplx gain, const CVector& a_r, const CVector& a_t)
{
    if (std::abs(a_r.norm() - 1.0) > 1e-9 || std::abs(a_t.norm() - 1.0) > 1e-9)
        throw DomainError("los_channel", "response vectors must be unit-norm");
    std::vector<ChannelTap> taps;
    taps.push_back({0.0, gain * a_r * a_t.adjoint()});
    return ChannelMatrix(static_cast<int>(a_r.size()), static_cast<int>(a_t.size()), std::move(taps));
}

CMatrix beamspace_transform(const CMatrix& h, const CMatrix& w_lens, const CMatrix& f_lens)
{
    if (w_lens.cols() != h.rows() || f_lens.rows() != h.cols())
        throw DomainError("beamspace_transform", "dimension mismatch");
    if (!is_unitary(w_lens, 1e-8) || !is_unitary(f_lens, 1e-8))
        throw DomainError("beamspace_transform", "lens transforms must be unitary");
    return w_lens * h * f_lens;
}

std::vector<double> dft_grid(int n)
{
    if (n < 1)
        throw DomainError("dft_grid", "size must be at least 1");
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k)
        g[k] = -1.0 + 2.0 * k / n;
    return g;
}

CMatrix dft_matrix(int n, std::span<const double> freqs)
{
    if (n < 1 || static_cast<int>(freqs.size()) != n)
        throw DomainError("dft_matrix", "need exactly n spatial frequencies");
    std::vector<double> sorted(freqs.begin(), freqs.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DomainError("dft_matrix", "duplicate spatial frequencies");

    CMatrix u(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            u(r, c) = std::polar(scale, kPi * r * freqs[c]);
    if (!is_unitary(u, 1e-10))
        throw DomainError("dft_matrix", "spatial frequencies do not give a unitary matrix");
    return u;
}

CMatrix dft_matrix(int n)
{
    const auto g = dft_grid(n);
    return dft_matrix(n, g);
}

BeamSelection select_beams(const CMatrix& hv, int count_tx, int count_rx)
{
    if (count_tx < 0 || count_rx < 0 || count_tx > hv.cols() || count_rx > hv.rows())
        throw DomainError("select_beams", "counts exceed the virtual channel dimensions");
    const Eigen::MatrixXd e = hv.cwiseAbs2();
    BeamSelection sel;
    sel.tx_indices = top_indices(e.colwise().sum().transpose(), count_tx);
    sel.rx_indices = top_indices(e.rowwise().sum(), count_rx);
    sel.reduced.resize(count_rx, count_tx);
    for (int r = 0; r < count_rx; ++r)
        for (int c = 0; c < count_tx; ++c)
            sel.reduced(r, c) = hv(sel.rx_indices[r], sel.tx_indices[c]);
    const double total = e.sum();
    sel.captured_energy_ratio = total > 0.0 ? sel.reduced.squaredNorm() / total : 1.0;
    return sel;
}

} // namespace thzbf
