#include "thzbf/irs_training.hpp"

#include <algorithm>
#include <cmath>

#include "thzbf/beamforming.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/training.hpp"

namespace thzbf {

namespace {

constexpr double kSurfaceWavelength = 1e-3;

CVector a(int n, double angle) { return steering_vector(n, angle); }

double grid_angle(int n, int k) { return std::asin(steering_sine(n, k)); }

// Maps a sine value into [-1, 1) modulo 2.
double wrap_sine(double s) { return s - 2.0 * std::floor((s + 1.0) / 2.0); }

int node_id(int s, int index)
{
    int first = 0;
    int width = 1;
    for (int k = 0; k < s; ++k) {
        first += width;
        width *= 3;
    }
    return first + index;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Prober
{
    double noise_var;
    std::mt19937_64& rng;
    std::vector<IrsTracePoint>& trace;

    // y = w^H H f + n; the power logged is |y - cancel|^2.
    cplx probe(const CMatrix& h, const CVector& f, const CVector& w, int phase, int codeword, int tx_id, int rx_id,
               cplx cancel = {0.0, 0.0})
    {
        const cplx y = measure(h, f, w, noise_var, rng).y - cancel;
        trace.push_back({phase, static_cast<int>(trace.size()), codeword, tx_id, rx_id, std::norm(y)});
        return y;
    }
};

// Index of the strongest entry; the first maximum wins.
int argmax(const std::vector<double>& p, std::size_t from = 0)
{
    std::size_t best = from;
    for (std::size_t i = from + 1; i < p.size(); ++i)
        if (p[i] > p[best])
            best = i;
    return static_cast<int>(best);
}

struct Pick
{
    int index;
    cplx y;
};

void require_pulse(const char* op, double peak, double med, double factor, const std::string& where)
{
    if (!(peak > 0.0) || peak < factor * med)
        throw ProtocolError(op, "no energy pulse detected in " + where);
}

// Known LoS component used to cancel the direct path: H_LoS ~ g a_rx a_tx^H.
struct LosEstimate
{
    cplx gain;
    double bs_angle;
    double user_angle;

    cplx forward(int n, const CVector& f, const CVector& w) const
    {
        return gain * w.dot(a(n, user_angle)) * a(n, bs_angle).dot(f);
    }
    cplx reverse(int n, const CVector& w_user, const CVector& f_bs) const
    {
        return gain * f_bs.dot(a(n, bs_angle)) * a(n, user_angle).dot(w_user);
    }
};

} // namespace

IrsLink::IrsLink(int n, IrsAngles angles, cplx g_los, cplx g_m, cplx g_n)
    : n_(n), depth_(0), angles_(angles), surface_(ArrayGeometry::ula(std::max(n, 1), kSurfaceWavelength))
{
    if (n < 3)
        throw DomainError("IrsLink", "grid size must be a power of 3");
    depth_ = tree_depth(n, 3);
    const auto& g = angles_;
    h_los_ = g_los * a(n, g.user_los) * a(n, g.bs_los).adjoint();
    m_ = g_m * a(n, g.irs_bs) * a(n, g.bs_irs).adjoint();
    nm_ = g_n * a(n, g.user_irs) * a(n, g.irs_user).adjoint();
    h_los_rev_ = g_los * a(n, g.bs_los) * a(n, g.user_los).adjoint();
    m_rev_ = g_n * a(n, g.irs_user + kPi) * a(n, g.user_irs).adjoint();
    n_rev_ = g_m * a(n, g.bs_irs) * a(n, g.irs_bs + kPi).adjoint();
}

IrsLink IrsLink::on_grid(int n, IrsGridIndices idx, cplx g_los, cplx g_m, cplx g_n)
{
    for (int k : {idx.bs_los, idx.user_los, idx.bs_irs, idx.irs_bs, idx.irs_user, idx.user_irs})
        if (k < 0 || k >= n)
            throw DomainError("IrsLink::on_grid", "grid index out of range");
    IrsAngles ang{grid_angle(n, idx.bs_los),  grid_angle(n, idx.user_los), grid_angle(n, idx.bs_irs),
                  grid_angle(n, idx.irs_bs),  grid_angle(n, idx.irs_user), grid_angle(n, idx.user_irs)};
    return IrsLink(n, ang, g_los, g_m, g_n);
}

CMatrix IrsLink::forward(const IrsState& irs) const
{
    return nm_ * irs.reflection().asDiagonal() * m_ + h_los_;
}

CMatrix IrsLink::reverse(const IrsState& irs) const
{
    return n_rev_ * irs.reflection().asDiagonal() * m_rev_ + h_los_rev_;
}

CMatrix IrsLink::bs_round_trip(const IrsState& irs) const { return n_rev_ * irs.reflection().asDiagonal() * m_; }

CMatrix IrsLink::user_round_trip(const IrsState& irs) const { return nm_ * irs.reflection().asDiagonal() * m_rev_; }

IrsScenario IrsLink::scenario(double power_w, double noise_var_w, int n_streams) const
{
    IrsScenario s{h_los_, m_, nm_, power_w, noise_var_w, n_streams};
    s.validate();
    return s;
}

double irs_codeword_sine_difference(int n, int index)
{
    if (index < 1 || index > 2 * n)
        throw DomainError("irs_codeword_sine_difference", "index must lie in 1..2N");
    return 2.0 * (index - n) / n;
}

std::vector<IrsState> irs_codeword_set(const ArrayGeometry& surface, int n)
{
    std::vector<IrsState> set;
    set.reserve(2 * n + 1);
    set.push_back(IrsState::off(surface.size()));
    for (int i = 1; i <= 2 * n; ++i)
        set.push_back(theta_direct_sine(irs_codeword_sine_difference(n, i), surface));
    return set;
}

int nearest_grid_index(int n, double angle)
{
    const double k = std::round((std::sin(angle) + 1.0) * n / 2.0 - 0.5);
    return std::clamp(static_cast<int>(k), 0, n - 1);
}

long long cooperative_cost(int n) { return 18LL * n + 12LL * tree_depth(n, 3) - 3; }

long long primary_cost(int n)
{
    tree_depth(n, 3);
    return 6LL * n;
}

long long irs_exhaustive_cost(int n)
{
    const long long nn = static_cast<long long>(n) * n;
    return nn + nn * nn;
}

IrsTrainingOutcome cooperative_train(const IrsLink& link, double known_irs_bs_angle, const IrsProtocolOptions& opt,
                                     std::mt19937_64& rng)
{
    const char* op = "cooperative_train";
    const int n = link.n();
    const int depth = link.depth();
    const HierarchicalCodebook tree(3, depth, n);
    const auto codewords = irs_codeword_set(link.surface(), n);
    const int n_cw = static_cast<int>(codewords.size());

    IrsTrainingOutcome out{};
    Prober pr{opt.noise_var, rng, out.trace};
    auto wide = [&](int i) -> const CVector& { return tree.node(1, i).weights(); };

    // Phase 1: 3 x 3 wide pairs, IRS sweeps all 2N + 1 codewords in each.
    std::vector<std::vector<double>> p1(9, std::vector<double>(n_cw));
    std::vector<cplx> off_y(9);
    for (int q = 0; q < 9; ++q) {
        const int qb = q / 3;
        const int qu = q % 3;
        for (int j = 0; j < n_cw; ++j) {
            const cplx y = pr.probe(link.forward(codewords[j]), wide(qb), wide(qu), 1, j, node_id(1, qb), node_id(1, qu));
            p1[q][j] = std::norm(y);
            if (j == 0)
                off_y[q] = y;
        }
    }
    int pulse_q = -1;
    int pulse_cw = -1;
    double best_excess = -1.0;
    double pulse_peak = 0.0;
    double pulse_med = 0.0;
    for (int q = 0; q < 9; ++q) {
        const double med = median(p1[q]);
        const int j = argmax(p1[q], 1);
        const double excess = p1[q][j] - med;
        if (excess > best_excess) {
            best_excess = excess;
            pulse_q = q;
            pulse_cw = j;
            pulse_peak = p1[q][j];
            pulse_med = med;
        }
    }
    require_pulse(op, pulse_peak, pulse_med, opt.pulse_factor, "phase 1");

    // Phase 2, step 1 reuses the IRS-off slot of every interval.
    std::vector<double> off_power(9);
    for (int q = 0; q < 9; ++q)
        off_power[q] = p1[q][0];
    const int los_q = argmax(off_power);

    // Step 2: BS holds its wide beam, user descends the tree (forward link).
    const CMatrix h_off = link.h_los();
    const CVector& f_los_wide = wide(los_q / 3);
    int user = los_q % 3;
    cplx last_y = off_y[los_q];
    CVector last_tx = f_los_wide;
    CVector last_rx = wide(user);
    for (int s = 2; s <= depth; ++s) {
        std::vector<double> pw;
        std::vector<cplx> ys;
        for (int c = 0; c < 3; ++c) {
            const int idx = 3 * user + c;
            ys.push_back(pr.probe(h_off, f_los_wide, tree.node(s, idx).weights(), 2, 0, node_id(1, los_q / 3),
                                  node_id(s, idx)));
            pw.push_back(std::norm(ys.back()));
        }
        const int b = argmax(pw);
        user = 3 * user + b;
        last_y = ys[b];
        last_rx = tree.node(s, user).weights();
    }
    const double user_los = std::asin(steering_sine(n, user));

    // Step 3: user transmits its narrow beam, BS descends (reverse link).
    const CMatrix h_off_rev = link.h_los_rev();
    const CVector w_user = tree.node(depth, user).weights();
    int bs = los_q / 3;
    bool reverse_last = false;
    for (int s = 2; s <= depth; ++s) {
        std::vector<double> pw;
        std::vector<cplx> ys;
        for (int c = 0; c < 3; ++c) {
            const int idx = 3 * bs + c;
            ys.push_back(pr.probe(h_off_rev, w_user, tree.node(s, idx).weights(), 2, 0, node_id(depth, user),
                                  node_id(s, idx)));
            pw.push_back(std::norm(ys.back()));
        }
        const int b = argmax(pw);
        bs = 3 * bs + b;
        last_y = ys[b];
        reverse_last = true;
    }
    const double bs_los = std::asin(steering_sine(n, bs));

    // Complex LoS gain from the last direct-path measurement.
    LosEstimate los{1.0, bs_los, user_los};
    if (reverse_last) {
        const CVector f_bs = tree.node(depth, bs).weights();
        los.gain = last_y / los.reverse(n, w_user, f_bs);
    } else {
        los.gain = last_y / los.forward(n, last_tx, last_rx);
    }

    // Phase 3: IRS on with the detected codeword, LoS component removed.
    const IrsState& theta = codewords[pulse_cw];
    const CMatrix h_on = link.forward(theta);
    const CVector& f_wide = wide(pulse_q / 3);
    int user_r = pulse_q % 3;
    for (int s = 2; s <= depth; ++s) {
        std::vector<double> pw;
        for (int c = 0; c < 3; ++c) {
            const int idx = 3 * user_r + c;
            const CVector& w = tree.node(s, idx).weights();
            pr.probe(h_on, f_wide, w, 3, pulse_cw, node_id(1, pulse_q / 3), node_id(s, idx), los.forward(n, f_wide, w));
            pw.push_back(out.trace.back().power);
        }
        user_r = 3 * user_r + argmax(pw);
    }
    // The reverse cascade needs theta_direct(phi_RN + pi, phi_RM + pi),
    // whose sine difference equals the forward one: the same codeword.
    const CMatrix h_on_rev = link.reverse(theta);
    const CVector w_un = tree.node(depth, user_r).weights();
    int bs_r = pulse_q / 3;
    for (int s = 2; s <= depth; ++s) {
        std::vector<double> pw;
        for (int c = 0; c < 3; ++c) {
            const int idx = 3 * bs_r + c;
            const CVector& f = tree.node(s, idx).weights();
            pr.probe(h_on_rev, w_un, f, 3, pulse_cw, node_id(depth, user_r), node_id(s, idx),
                     los.reverse(n, w_un, f));
            pw.push_back(out.trace.back().power);
        }
        bs_r = 3 * bs_r + argmax(pw);
    }

    const double delta = irs_codeword_sine_difference(n, pulse_cw);
    const double s_rn = wrap_sine(std::sin(known_irs_bs_angle) - delta);
    out.angles = {bs_los,
                  user_los,
                  std::asin(steering_sine(n, bs_r)),
                  known_irs_bs_angle,
                  std::asin(std::clamp(s_rn, -1.0, 1.0)),
                  std::asin(steering_sine(n, user_r))};
    const auto& g = out.angles;
    out.indices = {bs,
                   user,
                   bs_r,
                   nearest_grid_index(n, g.irs_bs),
                   nearest_grid_index(n, g.irs_user),
                   user_r};
    out.irs_codeword = pulse_cw;
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

IrsTrainingOutcome primary_train(const IrsLink& link, const IrsProtocolOptions& opt, std::mt19937_64& rng)
{
    const char* op = "primary_train";
    const int n = link.n();
    const Codebook narrow = steering_codebook(n, n);
    const CVector omni = omni_codeword(n);
    const int leaf0 = node_id(link.depth(), 0);
    const IrsState off = IrsState::off(link.surface().size());

    IrsTrainingOutcome out{};
    Prober pr{opt.noise_var, rng, out.trace};

    // Sweeps one side's narrow beams; `cancel` predicts the LoS term.
    auto sweep = [&](const CMatrix& h, int phase, int codeword, auto cancel) {
        std::vector<double> pw;
        std::vector<cplx> ys;
        for (int k = 0; k < n; ++k) {
            const CVector& beam = narrow[k].weights();
            const cplx c = cancel(beam);
            ys.push_back(pr.probe(h, omni, beam, phase, codeword, kOmniIndex, leaf0 + k, c));
            pw.push_back(std::norm(ys.back()));
        }
        const int b = argmax(pw);
        return Pick{b, ys[b]};
    };
    auto none = [](const CVector&) { return cplx(0.0, 0.0); };

    // Phase 1: IRS off, omni transmitter, the other side sweeps.
    const int user_los = sweep(link.forward(off), 1, 0, none).index;
    const Pick bs_pick = sweep(link.reverse(off), 1, 0, none);
    const int bs_los = bs_pick.index;
    const double phi_uh = grid_angle(n, user_los);
    const double phi_bh = grid_angle(n, bs_los);
    LosEstimate los{1.0, phi_bh, phi_uh};
    los.gain = bs_pick.y / los.reverse(n, omni, narrow[bs_los].weights());

    // Phase 2: omni transceiver, IRS sweeps return-mode codewords.
    auto return_sweep = [&](bool user_side) {
        std::vector<double> pw;
        for (int k = 0; k < n; ++k) {
            const IrsState th = theta_return(grid_angle(n, k), link.surface());
            const CMatrix h = user_side ? link.user_round_trip(th) : link.bs_round_trip(th);
            pr.probe(h, omni, omni, 2, 2 * n + 1 + k, kOmniIndex, kOmniIndex);
            pw.push_back(out.trace.back().power);
        }
        const int b = argmax(pw);
        require_pulse(op, pw[b], median(pw), opt.pulse_factor, "phase 2");
        return b;
    };
    const int rm = return_sweep(false);
    // The user's signal arrives at the IRS from phi_R,N + pi.
    const int rn_in = return_sweep(true);
    const double phi_rm = grid_angle(n, rm);
    const double phi_rn = std::asin(-steering_sine(n, rn_in));

    // Phase 3: direct mode bridges BS and user; LoS is cancelled.
    const IrsState fwd = theta_direct(phi_rm, phi_rn, link.surface());
    const IrsState rev = theta_direct(phi_rn + kPi, phi_rm + kPi, link.surface());
    const double delta = std::sin(phi_rm) - std::sin(phi_rn);
    int cw = static_cast<int>(std::lround(delta * n / 2.0)) + n;
    if (cw < 1)
        cw += n;
    const int user_irs =
        sweep(link.forward(fwd), 3, cw, [&](const CVector& w) { return los.forward(n, omni, w); }).index;
    const int bs_irs =
        sweep(link.reverse(rev), 3, cw, [&](const CVector& f) { return los.reverse(n, omni, f); }).index;

    out.angles = {phi_bh, phi_uh, grid_angle(n, bs_irs), phi_rm, phi_rn, grid_angle(n, user_irs)};
    out.indices = {bs_los, user_los, bs_irs, rm, nearest_grid_index(n, phi_rn), user_irs};
    out.irs_codeword = cw;
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

} // namespace thzbf
