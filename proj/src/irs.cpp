#include "thzbf/irs.hpp"

#include <cmath>

#include "thzbf/beamforming.hpp"
#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

void require_ula(const char* op, const ArrayGeometry& g)
{
    if (g.kind() != ArrayKind::ULA)
        throw DomainError(op, "IRS codewords are defined for a ULA surface");
}

double spacing_over_lambda(const ArrayGeometry& g) { return g.spacing() / g.wavelength(); }

} // namespace

IrsState::IrsState(std::vector<double> phases, double amplitude) : phases_(std::move(phases)), amplitude_(amplitude)
{
    if (!(amplitude >= 0.0 && amplitude <= 1.0))
        throw DomainError("IrsState", "amplitude must lie in [0, 1]");
    for (double& p : phases_) {
        if (!std::isfinite(p))
            throw DomainError("IrsState", "phases must be finite");
        p = wrap_two_pi(p);
    }
}

IrsState IrsState::off(int n_elements) { return IrsState(std::vector<double>(n_elements, 0.0), 0.0); }

CVector IrsState::reflection() const
{
    CVector d(size());
    for (int i = 0; i < size(); ++i)
        d(i) = std::polar(amplitude_, -phases_[i]);
    return d;
}

CMatrix IrsState::matrix() const { return reflection().asDiagonal(); }

void IrsScenario::validate() const
{
    if (m.cols() != h_los.cols() || n.rows() != h_los.rows() || n.cols() != m.rows())
        throw DomainError("IrsScenario", "channel dimensions are inconsistent");
    if (n_streams < 1 || n_streams > std::min(h_los.rows(), h_los.cols()))
        throw DomainError("IrsScenario", "need 1 <= n_streams <= min(N_t, N_r)");
    if (!(noise_var_w > 0.0) || power_w < 0.0)
        throw DomainError("IrsScenario", "noise variance must be positive and power non-negative");
}

CMatrix effective_channel(const IrsScenario& s, const IrsState& irs)
{
    if (irs.size() != s.n_irs() || s.n.cols() != s.m.rows() || s.n.rows() != s.h_los.rows() ||
        s.m.cols() != s.h_los.cols())
        throw DomainError("effective_channel", "dimension mismatch");
    return s.n * irs.reflection().asDiagonal() * s.m + s.h_los;
}

CMatrix eigen_precoder(const CMatrix& h, int n_streams)
{
    if (n_streams < 1 || n_streams > h.cols())
        throw DomainError("eigen_precoder", "stream count exceeds transmit dimension");
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
    return svd.matrixV().leftCols(n_streams);
}

double irs_objective(const IrsScenario& s, const IrsState& irs)
{
    s.validate();
    const CMatrix h = effective_channel(s, irs);
    return spectral_efficiency(h, eigen_precoder(h, s.n_streams), s.power_w, s.noise_var_w, s.n_streams);
}

AoResult ao_joint_beamforming(const IrsScenario& s, const AoOptions& opt)
{
    s.validate();
    if (opt.max_iters < 1 || opt.sweeps < 1)
        throw DomainError("ao_joint_beamforming", "iteration counts must be positive");

    IrsState state = opt.initial.value_or(IrsState(std::vector<double>(s.n_irs(), 0.0), 1.0));
    if (state.size() != s.n_irs())
        throw DomainError("ao_joint_beamforming", "initial state size does not match the IRS");
    const double beta = state.amplitude();
    std::vector<double> phases = state.phases();

    const int nr = static_cast<int>(s.h_los.rows());
    const double c = s.power_w / (s.noise_var_w * s.n_streams);
    auto objective = [&](const CMatrix& h, const CMatrix& f) {
        return spectral_efficiency(h, f, s.power_w, s.noise_var_w, s.n_streams);
    };

    CMatrix h = effective_channel(s, state);
    CMatrix f = eigen_precoder(h, s.n_streams);
    double current = objective(h, f);

    AoResult out{f, state, {current}, 0};
    for (int it = 0; it < opt.max_iters; ++it) {
        // Phase step: each theta_i enters H_eff F as a rank-one term, so the
        // determinant is maximised in closed form by theta_i = arg(a).
        for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
            for (int i = 0; i < s.n_irs(); ++i) {
                const CVector u = beta * s.n.col(i);
                const Eigen::RowVectorXcd vh = s.m.row(i);
                const cplx xi = std::polar(1.0, -phases[i]);
                const CMatrix h_minus = h - xi * u * vh;
                const CMatrix b = h_minus * f;
                const CVector q = (vh * f).adjoint();
                const CVector w = b * q;
                CMatrix k = CMatrix::Identity(nr, nr) + c * b * b.adjoint() + c * q.squaredNorm() * u * u.adjoint();
                const CVector kinv_u = k.llt().solve(u);
                const cplx a = w.dot(kinv_u);
                if (std::abs(a) == 0.0)
                    continue;
                const double theta = wrap_two_pi(std::arg(a));
                const CMatrix h_new = h_minus + std::polar(1.0, -theta) * u * vh;
                const double candidate = objective(h_new, f);
                if (candidate >= current) {
                    phases[i] = theta;
                    h = h_new;
                    current = candidate;
                }
            }
        }
        const CMatrix f_new = eigen_precoder(h, s.n_streams);
        const double with_new_f = objective(h, f_new);
        if (with_new_f >= current) {
            f = f_new;
            current = with_new_f;
        }
        const double prev = out.trace.back();
        out.trace.push_back(current);
        out.iterations = it + 1;
        if (current - prev <= opt.tol * std::max(std::abs(prev), 1e-300))
            break;
    }
    out.f = f;
    out.irs = IrsState(phases, beta);
    return out;
}

IrsState theta_direct_sine(double sine_difference, const ArrayGeometry& irs, double amplitude)
{
    require_ula("theta_direct", irs);
    const double k = kTwoPi * spacing_over_lambda(irs) * sine_difference;
    std::vector<double> p(irs.size());
    for (int n = 0; n < irs.size(); ++n)
        p[n] = std::fmod(n * k, kTwoPi);
    return IrsState(std::move(p), amplitude);
}

IrsState theta_direct(double phi_in, double phi_out, const ArrayGeometry& irs, double amplitude)
{
    return theta_direct_sine(std::sin(phi_in) - std::sin(phi_out), irs, amplitude);
}

IrsState theta_return(double phi_in, const ArrayGeometry& irs, double amplitude)
{
    require_ula("theta_return", irs);
    return theta_direct_sine(2.0 * std::sin(phi_in), irs, amplitude);
}

} // namespace thzbf
