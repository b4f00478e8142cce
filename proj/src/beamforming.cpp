#include "thzbf/beamforming.hpp"

#include <algorithm>
#include <cmath>

#include "thzbf/errors.hpp"
#include "thzbf/geometry.hpp"
#include "thzbf/kernels.hpp"

namespace thzbf {

namespace {

constexpr int kScanSteps = 1 << 14;
constexpr double kIncludeTol = 1e-12;

bool passes(double gain, double rho) { return gain >= rho * (1.0 - kIncludeTol); }

double refine_edge(const Codeword& cw, double rho, double inside, double outside)
{
    for (int it = 0; it < 80 && std::abs(inside - outside) > 1e-14; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (passes(array_factor(cw, mid), rho))
            inside = mid;
        else
            outside = mid;
    }
    return inside;
}

int int_pow(int base, int exp)
{
    int r = 1;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

} // namespace

Codeword::Codeword(CVector weights, bool constant_modulus, std::optional<double> steering_sine)
    : weights_(std::move(weights)), constant_modulus_(constant_modulus), steering_sine_(steering_sine)
{
    if (weights_.size() < 1)
        throw DomainError("Codeword", "codeword is empty");
    if (std::abs(weights_.norm() - 1.0) > 1e-12)
        throw DomainError("Codeword", "weights must have unit norm");
    if (constant_modulus_) {
        const double target = 1.0 / std::sqrt(static_cast<double>(weights_.size()));
        if ((weights_.cwiseAbs().array() - target).abs().maxCoeff() > 1e-12)
            throw DomainError("Codeword", "constant-modulus codeword has unequal entry magnitudes");
    }
}

Codeword Codeword::steering(int n_antennas, double sine)
{
    return Codeword(steering_vector_sine(n_antennas, sine), true, sine);
}

Codebook::Codebook(std::vector<Codeword> codewords) : codewords_(std::move(codewords))
{
    if (codewords_.empty())
        throw DomainError("Codebook", "codebook is empty");
    for (const auto& c : codewords_)
        if (c.size() != codewords_.front().size())
            throw DomainError("Codebook", "codewords differ in length");
}

CMatrix Codebook::matrix() const
{
    CMatrix m(n_antennas(), size());
    for (int i = 0; i < size(); ++i)
        m.col(i) = codewords_[i].weights();
    return m;
}

double array_factor(const Codeword& codeword, double probe_angle)
{
    const CVector a = steering_vector(codeword.size(), probe_angle);
    return std::abs(codeword.weights().dot(a));
}

double array_factor_closed_form_sine(int n, double x)
{
    const double den = n * std::sin(kPi / 2.0 * x);
    if (std::abs(den) < 1e-300 || std::abs(std::sin(kPi / 2.0 * x)) < 1e-15)
        return 1.0; // x on the grating lattice 2k
    return std::abs(std::sin(n * kPi / 2.0 * x) / den);
}

double array_factor_closed_form(int n, double phi, double psi)
{
    return array_factor_closed_form_sine(n, std::sin(psi) - std::sin(phi));
}

std::vector<AngleInterval> beam_coverage(const Codeword& codeword, double rho)
{
    if (!(rho > 0.0 && rho <= 1.0))
        throw DomainError("beam_coverage", "threshold must lie in (0, 1]");

    std::vector<double> probes;
    probes.reserve(kScanSteps + 2);
    for (int i = 0; i <= kScanSteps; ++i)
        probes.push_back(-kPi / 2 + kPi * i / kScanSteps);
    if (auto s = codeword.steering_sine()) {
        probes.push_back(std::asin(std::clamp(*s, -1.0, 1.0)));
        std::sort(probes.begin(), probes.end());
    }
    const auto gains = kernels::array_factor_sweep(codeword.weights(), probes);

    std::vector<AngleInterval> out;
    std::size_t i = 0;
    while (i < probes.size()) {
        if (!passes(gains[i], rho)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < probes.size() && passes(gains[j + 1], rho))
            ++j;
        const double lo = i == 0 ? probes[0] : refine_edge(codeword, rho, probes[i], probes[i - 1]);
        const double hi = j + 1 == probes.size() ? probes[j] : refine_edge(codeword, rho, probes[j], probes[j + 1]);
        out.push_back({lo, hi});
        i = j + 1;
    }
    return out;
}

double total_width(const std::vector<AngleInterval>& intervals)
{
    double w = 0.0;
    for (const auto& iv : intervals)
        w += iv.width();
    return w;
}

double coverage_threshold(int n_antennas, int n_beams)
{
    if (n_antennas < 1)
        throw DomainError("coverage_threshold", "antenna count must be at least 1");
    const double na = n_antennas;
    if (n_beams == n_antennas)
        return 1.0 / (na * std::sin(kPi / (2.0 * na)));
    if (n_beams == 2 * n_antennas)
        return std::sqrt(2.0) / (2.0 * na * std::sin(kPi / (4.0 * na)));
    throw DomainError("coverage_threshold", "beam count must be N_a or 2 N_a");
}

double steering_sine(int n_beams, int index) { return -1.0 + (2.0 * index + 1.0) / n_beams; }

Codebook steering_codebook(int n_antennas, int n_beams)
{
    if (n_beams < 1)
        throw DomainError("steering_codebook", "beam count must be at least 1");
    std::vector<Codeword> cws;
    cws.reserve(n_beams);
    for (int k = 0; k < n_beams; ++k)
        cws.push_back(Codeword::steering(n_antennas, steering_sine(n_beams, k)));
    return Codebook(std::move(cws));
}

HierarchicalCodebook::HierarchicalCodebook(int m_ary, int depth, int n_antennas)
    : m_(m_ary), depth_(depth), n_antennas_(n_antennas)
{
    if (m_ary < 2 || depth < 1)
        throw DomainError("hierarchical_codebook", "need M >= 2 and S >= 1");
    if (n_antennas < 1)
        throw DomainError("hierarchical_codebook", "antenna count must be at least 1");

    for (int s = 1; s <= depth_; ++s) {
        const int beams = int_pow(m_, s);
        const int active = active_elements(s);
        const double scale = 1.0 / std::sqrt(static_cast<double>(active));
        std::vector<Codeword> cws;
        cws.reserve(beams);
        for (int i = 0; i < beams; ++i) {
            const double sine = steering_sine(beams, i);
            CVector w = CVector::Zero(n_antennas_);
            const double step = kPi * sine;
            for (int m = 0; m < active; ++m)
                w(m) = std::polar(scale, m * step);
            cws.emplace_back(std::move(w), active == n_antennas_, sine);
        }
        stages_.emplace_back(std::move(cws));
        const Codeword& first = stages_.back()[0];
        thresholds_.push_back(array_factor(first, std::asin(-1.0 + 2.0 / beams)));
    }
}

int HierarchicalCodebook::active_elements(int s) const
{
    return std::max(1, n_antennas_ / int_pow(m_, depth_ - s));
}

const Codebook& HierarchicalCodebook::stage(int s) const
{
    if (s < 1 || s > depth_)
        throw DomainError("HierarchicalCodebook::stage", "stage out of range");
    return stages_[s - 1];
}

double HierarchicalCodebook::stage_threshold(int s) const
{
    stage(s);
    return thresholds_[s - 1];
}

std::vector<int> HierarchicalCodebook::children(int s, int index) const
{
    if (s < 1 || s >= depth_)
        throw DomainError("HierarchicalCodebook::children", "stage has no children");
    std::vector<int> c(m_);
    for (int k = 0; k < m_; ++k)
        c[k] = m_ * index + k;
    return c;
}

AngleInterval HierarchicalCodebook::sine_cell(int s, int index) const
{
    const int beams = stage(s).size();
    return {-1.0 + 2.0 * index / beams, -1.0 + 2.0 * (index + 1) / beams};
}

double spectral_efficiency(const CMatrix& h_eff, const CMatrix& f, double power_w, double noise_var_w,
                           int n_streams)
{
    if (n_streams < 1 || f.cols() != n_streams || h_eff.cols() != f.rows())
        throw DomainError("spectral_efficiency", "dimension mismatch");
    if (std::abs(f.squaredNorm() - n_streams) > 1e-8)
        throw DomainError("spectral_efficiency", "precoder must satisfy ||F||_F^2 = N_s");
    if (!(noise_var_w > 0.0) || power_w < 0.0)
        throw DomainError("spectral_efficiency", "noise variance must be positive and power non-negative");
    // det(I + c H F F^H H^H) = det(I + c F^H H^H H F), the smaller N_s x N_s form.
    const double c = power_w / (noise_var_w * n_streams);
    const CMatrix hf = h_eff * f;
    CMatrix g = CMatrix::Identity(n_streams, n_streams) + c * hf.adjoint() * hf;
    Eigen::LLT<CMatrix> llt(g);
    if (llt.info() != Eigen::Success)
        throw DomainError("spectral_efficiency", "matrix not positive definite");
    double sum = 0.0;
    for (int i = 0; i < n_streams; ++i)
        sum += std::log2(llt.matrixL()(i, i).real());
    return 2.0 * sum;
}

} // namespace thzbf
