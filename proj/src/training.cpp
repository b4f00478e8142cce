#include "thzbf/training.hpp"

#include <cmath>

#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

cplx draw_noise(double noise_var, std::mt19937_64& rng)
{
    if (noise_var <= 0.0)
        return {0.0, 0.0};
    std::normal_distribution<double> n(0.0, std::sqrt(noise_var / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

double noisy_power(cplx clean, double noise_var, std::mt19937_64& rng)
{
    return std::norm(clean + draw_noise(noise_var, rng));
}

void check_dims(const char* op, const CMatrix& h, int n_tx, int n_rx)
{
    if (h.cols() != n_tx || h.rows() != n_rx)
        throw DomainError(op, "codebook sizes do not match the channel");
}

double pair_gain(const CMatrix& h, const CVector& f, const CVector& w) { return std::abs(w.dot(h * f)); }

// Running argmax where the first maximum seen wins.
struct Best
{
    double power = -1.0;
    int tx = -1;
    int rx = -1;
    void offer(double p, int t, int r)
    {
        if (p > power) {
            power = p;
            tx = t;
            rx = r;
        }
    }
};

// Descends one tree with the other side held at `other`. `tx_side` says
// which side of the link the tree belongs to.
int descend(const CMatrix& h, const HierarchicalCodebook& tree, const CVector& other, bool tx_side, int other_index,
            int stage_offset, double noise_var, std::mt19937_64& rng, std::vector<TestSlot>& trace)
{
    int current = 0;
    for (int s = 1; s <= tree.depth(); ++s) {
        const int first = s == 1 ? 0 : tree.m_ary() * current;
        Best best;
        for (int c = 0; c < tree.m_ary(); ++c) {
            const int idx = first + c;
            const CVector& cw = tree.node(s, idx).weights();
            const cplx y = tx_side ? other.dot(h * cw) : cw.dot(h * other);
            const double p = noisy_power(y, noise_var, rng);
            if (tx_side)
                trace.push_back({{stage_offset + s, idx, other_index, p}});
            else
                trace.push_back({{stage_offset + s, other_index, idx, p}});
            best.offer(p, idx, idx);
        }
        current = best.tx;
    }
    return current;
}

void check_tree(const char* op, const CMatrix& h, const HierarchicalCodebook& tx, const HierarchicalCodebook& rx)
{
    if (tx.m_ary() != rx.m_ary() || tx.depth() != rx.depth())
        throw DomainError(op, "transmit and receive trees must share M and depth");
    if (h.cols() != tx.n_antennas() || h.rows() != rx.n_antennas())
        throw DomainError(op, "tree sizes do not match the channel");
}

} // namespace

Measurement measure(const CMatrix& channel, const CVector& f, const CVector& w, double noise_var,
                    std::mt19937_64& rng)
{
    if (channel.cols() != f.size() || channel.rows() != w.size())
        throw DomainError("measure", "codeword sizes do not match the channel");
    if (noise_var < 0.0)
        throw DomainError("measure", "noise variance must be non-negative");
    const cplx y = w.dot(channel * f) + draw_noise(noise_var, rng);
    return {y, std::norm(y)};
}

CVector omni_codeword(int n_antennas)
{
    if (n_antennas < 1)
        throw DomainError("omni_codeword", "antenna count must be at least 1");
    CVector e = CVector::Zero(n_antennas);
    e(0) = 1.0;
    return e;
}

TrainingOutcome exhaustive_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, double noise_var,
                                 std::mt19937_64& rng)
{
    return parallel_train(channel, tx, rx, 1, noise_var, rng);
}

TrainingOutcome parallel_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, int n_rf,
                               double noise_var, std::mt19937_64& rng)
{
    check_dims("parallel_train", channel, tx.n_antennas(), rx.n_antennas());
    if (n_rf < 1)
        throw DomainError("parallel_train", "n_rf must be at least 1");
    const CMatrix y = rx.matrix().adjoint() * channel * tx.matrix(); // (rx, tx)

    TrainingOutcome out{};
    Best best;
    TestSlot slot;
    for (int t = 0; t < tx.size(); ++t)
        for (int r = 0; r < rx.size(); ++r) {
            const double p = noisy_power(y(r, t), noise_var, rng);
            slot.push_back({1, t, r, p});
            best.offer(p, t, r);
            if (static_cast<int>(slot.size()) == n_rf) {
                out.trace.push_back(std::move(slot));
                slot.clear();
            }
        }
    if (!slot.empty())
        out.trace.push_back(std::move(slot));
    out.tx_index = best.tx;
    out.rx_index = best.rx;
    out.achieved_gain = std::abs(y(best.rx, best.tx));
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

TrainingOutcome one_sided_train(const CMatrix& channel, const Codebook& tx, const Codebook& rx, Side first,
                                double noise_var, std::mt19937_64& rng)
{
    check_dims("one_sided_train", channel, tx.n_antennas(), rx.n_antennas());
    const CVector tx_omni = omni_codeword(tx.n_antennas());
    const CVector rx_omni = omni_codeword(rx.n_antennas());

    TrainingOutcome out{};
    auto sweep_rx = [&](int stage) {
        Best b;
        for (int r = 0; r < rx.size(); ++r) {
            const double p = noisy_power(rx[r].weights().dot(channel * tx_omni), noise_var, rng);
            out.trace.push_back({{stage, kOmniIndex, r, p}});
            b.offer(p, kOmniIndex, r);
        }
        return b.rx;
    };
    auto sweep_tx = [&](int stage) {
        Best b;
        const CVector ho = channel.adjoint() * rx_omni; // w^H H f = (H^H w)^H f
        for (int t = 0; t < tx.size(); ++t) {
            const double p = noisy_power(ho.dot(tx[t].weights()), noise_var, rng);
            out.trace.push_back({{stage, t, kOmniIndex, p}});
            b.offer(p, t, kOmniIndex);
        }
        return b.tx;
    };

    if (first == Side::Receiver) {
        out.rx_index = sweep_rx(1);
        out.tx_index = sweep_tx(2);
    } else {
        out.tx_index = sweep_tx(1);
        out.rx_index = sweep_rx(2);
    }
    out.achieved_gain = pair_gain(channel, tx[out.tx_index].weights(), rx[out.rx_index].weights());
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

TrainingOutcome tree_train_one_side(const CMatrix& channel, const HierarchicalCodebook& tx,
                                    const HierarchicalCodebook& rx, double noise_var, std::mt19937_64& rng)
{
    check_tree("tree_train_one_side", channel, tx, rx);
    TrainingOutcome out{};
    const CVector tx_omni = omni_codeword(tx.n_antennas());
    out.rx_index = descend(channel, rx, tx_omni, false, kOmniIndex, 0, noise_var, rng, out.trace);
    const int s = rx.depth();
    const CVector w = rx.node(s, out.rx_index).weights();
    out.tx_index = descend(channel, tx, w, true, out.rx_index, s, noise_var, rng, out.trace);
    out.achieved_gain = pair_gain(channel, tx.node(s, out.tx_index).weights(), w);
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

TrainingOutcome tree_train_both_side(const CMatrix& channel, const HierarchicalCodebook& tx,
                                     const HierarchicalCodebook& rx, double noise_var, std::mt19937_64& rng)
{
    check_tree("tree_train_both_side", channel, tx, rx);
    TrainingOutcome out{};
    const int m = tx.m_ary();
    int ct = 0;
    int cr = 0;
    for (int s = 1; s <= tx.depth(); ++s) {
        const int ft = s == 1 ? 0 : m * ct;
        const int fr = s == 1 ? 0 : m * cr;
        Best best;
        for (int a = 0; a < m; ++a) {
            const CVector hf = channel * tx.node(s, ft + a).weights();
            for (int b = 0; b < m; ++b) {
                const double p = noisy_power(rx.node(s, fr + b).weights().dot(hf), noise_var, rng);
                out.trace.push_back({{s, ft + a, fr + b, p}});
                best.offer(p, ft + a, fr + b);
            }
        }
        ct = best.tx;
        cr = best.rx;
    }
    const int s = tx.depth();
    out.tx_index = ct;
    out.rx_index = cr;
    out.achieved_gain = pair_gain(channel, tx.node(s, ct).weights(), rx.node(s, cr).weights());
    out.tests_used = static_cast<int>(out.trace.size());
    return out;
}

TrainingMethod parse_training_method(const std::string& name)
{
    if (name == "exhaustive")
        return TrainingMethod::Exhaustive;
    if (name == "one_sided")
        return TrainingMethod::OneSided;
    if (name == "parallel")
        return TrainingMethod::Parallel;
    if (name == "tree_one")
        return TrainingMethod::TreeOne;
    if (name == "tree_both")
        return TrainingMethod::TreeBoth;
    throw DomainError("predict_cost", "unknown training method '" + name + "'");
}

std::string to_string(TrainingMethod method)
{
    switch (method) {
    case TrainingMethod::Exhaustive:
        return "exhaustive";
    case TrainingMethod::OneSided:
        return "one_sided";
    case TrainingMethod::Parallel:
        return "parallel";
    case TrainingMethod::TreeOne:
        return "tree_one";
    case TrainingMethod::TreeBoth:
        return "tree_both";
    }
    return "unknown";
}

int tree_depth(int n_beams, int m_ary)
{
    if (m_ary < 2 || n_beams < m_ary)
        throw DomainError("predict_cost", "tree search needs M >= 2 and N >= M");
    int s = 0;
    int n = 1;
    while (n < n_beams) {
        n *= m_ary;
        ++s;
    }
    if (n != n_beams)
        throw DomainError("predict_cost", "N must be a power of M for tree search");
    return s;
}

long long predict_cost(TrainingMethod method, int n_beams, int m_ary, int n_rf)
{
    if (n_beams < 1)
        throw DomainError("predict_cost", "beam count must be at least 1");
    const long long n = n_beams;
    switch (method) {
    case TrainingMethod::Exhaustive:
        return n * n;
    case TrainingMethod::OneSided:
        return 2 * n;
    case TrainingMethod::Parallel:
        if (n_rf < 1)
            throw DomainError("predict_cost", "n_rf must be at least 1");
        return (n * n + n_rf - 1) / n_rf;
    case TrainingMethod::TreeOne:
        return 2LL * m_ary * tree_depth(n_beams, m_ary);
    case TrainingMethod::TreeBoth:
        return 1LL * m_ary * m_ary * tree_depth(n_beams, m_ary);
    }
    throw DomainError("predict_cost", "unknown training method");
}

} // namespace thzbf
