#include "thzbf/hybrid.hpp"

#include <cmath>
#include <limits>

#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

cplx unit_phase(cplx z, cplx fallback)
{
    const double m = std::abs(z);
    return m > 0.0 ? z / m : fallback;
}

CMatrix least_squares(const CMatrix& a, const CMatrix& target)
{
    return a.completeOrthogonalDecomposition().solve(target);
}

struct Progress
{
    std::vector<double> trace;
    bool done(double current, double target_norm, const HybridOptions& opts)
    {
        const double prev = trace.empty() ? std::numeric_limits<double>::infinity() : trace.back();
        trace.push_back(current);
        if (current <= 1e-14 * target_norm)
            return true;
        return std::isfinite(prev) && (prev - current) <= opts.rel_tol * prev;
    }
};

HybridResult solve_fully(const CMatrix& t, int n_rf, const HybridOptions& opts)
{
    const int nt = static_cast<int>(t.rows());
    const int ns = static_cast<int>(t.cols());
    const double c = 1.0 / std::sqrt(static_cast<double>(nt));

    CMatrix a(nt, n_rf);
    for (int k = 0; k < n_rf; ++k)
        for (int i = 0; i < nt; ++i) {
            const cplx dft = std::polar(1.0, kTwoPi * i * k / nt);
            a(i, k) = c * (k < ns ? unit_phase(t(i, k), dft) : dft);
        }
    CMatrix d = least_squares(a, t);

    Progress prog;
    const double tn = t.norm();
    int it = 0;
    prog.trace.push_back((t - a * d).norm());
    while (it < opts.max_iters) {
        ++it;
        for (int i = 0; i < nt; ++i) {
            Eigen::RowVectorXcd r = t.row(i) - a.row(i) * d;
            for (int k = 0; k < n_rf; ++k) {
                r += a(i, k) * d.row(k);
                const cplx corr = (r * d.row(k).adjoint())(0, 0);
                a(i, k) = c * unit_phase(corr, a(i, k) / c);
                r -= a(i, k) * d.row(k);
            }
        }
        d = least_squares(a, t);
        if (prog.done((t - a * d).norm(), tn, opts))
            break;
    }
    return {a, d, {}, prog.trace.back(), prog.trace, it};
}

// Analog network with one phase per antenna routed to a single RF chain.
HybridResult solve_switched(const CMatrix& t, int n_rf, std::vector<int> assign, bool reassign,
                            const HybridOptions& opts, std::vector<cplx> phase = {}, Progress prog = {})
{
    const int nt = static_cast<int>(t.rows());
    const double c = 1.0 / std::sqrt(static_cast<double>(nt));

    auto build = [&](const std::vector<cplx>& ph) {
        CMatrix a = CMatrix::Zero(nt, n_rf);
        for (int i = 0; i < nt; ++i)
            a(i, assign[i]) = c * ph[i];
        return a;
    };

    if (phase.empty()) {
        phase.resize(nt);
        for (int i = 0; i < nt; ++i)
            phase[i] = unit_phase(t.row(i).sum(), cplx(1.0, 0.0));
    }
    CMatrix a = build(phase);
    CMatrix d = least_squares(a, t);

    const double tn = t.norm();
    if (prog.trace.empty())
        prog.trace.push_back((t - a * d).norm());
    int it = 0;
    while (it < opts.max_iters) {
        ++it;
        for (int i = 0; i < nt; ++i) {
            const double ti = t.row(i).squaredNorm();
            int best = assign[i];
            cplx best_corr = t.row(i) * d.row(best).adjoint();
            double best_cost = ti + c * c * d.row(best).squaredNorm() - 2.0 * c * std::abs(best_corr);
            if (reassign) {
                for (int k = 0; k < n_rf; ++k) {
                    const cplx corr = t.row(i) * d.row(k).adjoint();
                    const double cost = ti + c * c * d.row(k).squaredNorm() - 2.0 * c * std::abs(corr);
                    if (cost < best_cost - 1e-15 * (ti + 1.0)) {
                        best = k;
                        best_cost = cost;
                        best_corr = corr;
                    }
                }
            }
            assign[i] = best;
            phase[i] = unit_phase(best_corr, phase[i]);
        }
        a = build(phase);
        d = least_squares(a, t);
        if (prog.done((t - a * d).norm(), tn, opts))
            break;
    }

    Eigen::MatrixXi ws = Eigen::MatrixXi::Zero(nt, n_rf);
    for (int i = 0; i < nt; ++i)
        ws(i, assign[i]) = 1;
    return {a, d, ws, prog.trace.back(), prog.trace, it};
}

std::vector<int> assignment_of(const Eigen::MatrixXi& ws)
{
    std::vector<int> a(ws.rows());
    for (Eigen::Index i = 0; i < ws.rows(); ++i)
        for (Eigen::Index k = 0; k < ws.cols(); ++k)
            if (ws(i, k) == 1)
                a[i] = static_cast<int>(k);
    return a;
}

Eigen::MatrixXi block_switch(int nt, int n_rf)
{
    Eigen::MatrixXi ws = Eigen::MatrixXi::Zero(nt, n_rf);
    const int per = nt / n_rf;
    for (int i = 0; i < nt; ++i)
        ws(i, std::min(i / per, n_rf - 1)) = 1;
    return ws;
}

void check_counts(const char* op, int nt, int n_rf)
{
    if (nt < 1 || n_rf < 1 || n_rf > nt)
        throw DomainError(op, "need 1 <= N_RF <= N_t");
}

} // namespace

HybridArchitecture HybridArchitecture::fully(int n_antennas, int n_rf)
{
    check_counts("HybridArchitecture::fully", n_antennas, n_rf);
    HybridArchitecture a;
    a.kind_ = HybridKind::Fully;
    a.n_antennas_ = n_antennas;
    a.n_rf_ = n_rf;
    return a;
}

HybridArchitecture HybridArchitecture::partially(int n_antennas, int n_rf)
{
    check_counts("HybridArchitecture::partially", n_antennas, n_rf);
    if (n_antennas % n_rf != 0)
        throw DomainError("HybridArchitecture::partially", "N_t must be divisible by N_RF");
    HybridArchitecture a;
    a.kind_ = HybridKind::Partially;
    a.n_antennas_ = n_antennas;
    a.n_rf_ = n_rf;
    a.switch_ = block_switch(n_antennas, n_rf);
    return a;
}

HybridArchitecture HybridArchitecture::dynamic(int n_antennas, int n_rf, Eigen::MatrixXi switch_matrix)
{
    check_counts("HybridArchitecture::dynamic", n_antennas, n_rf);
    if (switch_matrix.size() == 0)
        switch_matrix = block_switch(n_antennas, n_rf);
    if (switch_matrix.rows() != n_antennas || switch_matrix.cols() != n_rf)
        throw DomainError("HybridArchitecture::dynamic", "switch matrix must be N_t x N_RF");
    for (Eigen::Index i = 0; i < switch_matrix.rows(); ++i) {
        int sum = 0;
        for (Eigen::Index k = 0; k < switch_matrix.cols(); ++k) {
            const int v = switch_matrix(i, k);
            if (v != 0 && v != 1)
                throw DomainError("HybridArchitecture::dynamic", "switch matrix must be Boolean");
            sum += v;
        }
        if (sum != 1)
            throw DomainError("HybridArchitecture::dynamic", "each switch-matrix row must sum to 1");
    }
    HybridArchitecture a;
    a.kind_ = HybridKind::Dynamic;
    a.n_antennas_ = n_antennas;
    a.n_rf_ = n_rf;
    a.switch_ = std::move(switch_matrix);
    return a;
}

HybridResult project_hybrid(const CMatrix& target, const HybridArchitecture& arch, HybridOptions opts)
{
    if (target.rows() != arch.n_antennas())
        throw DomainError("project_hybrid", "target rows must equal N_t");
    if (target.cols() < 1 || target.cols() > arch.n_rf())
        throw DomainError("project_hybrid", "need 1 <= N_s <= N_RF");
    if (opts.max_iters < 1)
        throw DomainError("project_hybrid", "max_iters must be positive");

    switch (arch.kind()) {
    case HybridKind::Fully:
        return solve_fully(target, arch.n_rf(), opts);
    case HybridKind::Partially:
        return solve_switched(target, arch.n_rf(), assignment_of(arch.switch_matrix()), false, opts);
    case HybridKind::Dynamic: {
        // Converge on the starting assignment first, then let rows move. The
        // result can only improve on the fixed-switch solution.
        HybridResult fixed = solve_switched(target, arch.n_rf(), assignment_of(arch.switch_matrix()), false, opts);
        const std::vector<int> assign = assignment_of(fixed.switch_matrix);
        std::vector<cplx> phase(assign.size());
        const double scale = std::sqrt(static_cast<double>(arch.n_antennas()));
        for (std::size_t i = 0; i < assign.size(); ++i)
            phase[i] = fixed.f_ab(static_cast<Eigen::Index>(i), assign[i]) * scale;
        Progress prog;
        prog.trace = fixed.residual_trace;
        HybridResult moved = solve_switched(target, arch.n_rf(), assign, true, opts, phase, prog);
        moved.iterations += fixed.iterations;
        return moved;
    }
    }
    throw DomainError("project_hybrid", "unknown architecture");
}

} // namespace thzbf
