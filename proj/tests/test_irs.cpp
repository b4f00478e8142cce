#include <cmath>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "thzbf/beamforming.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/irs.hpp"

using namespace thzbf;

namespace {

IrsState random_state(std::mt19937_64& rng, int n, double beta = 1.0)
{
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    std::vector<double> p(n);
    for (double& x : p)
        x = ph(rng);
    return IrsState(p, beta);
}

IrsScenario random_scenario(std::mt19937_64& rng, int nt, int nr, int ni, int ns, double power = 1.0)
{
    IrsScenario s;
    s.h_los = test::gaussian_matrix(rng, nr, nt, 0.1);
    s.m = test::gaussian_matrix(rng, ni, nt);
    s.n = test::gaussian_matrix(rng, nr, ni);
    s.power_w = power;
    s.noise_var_w = 1.0;
    s.n_streams = ns;
    return s;
}

// Smallest ||x - e^{j g} y|| over the global phase g.
double phase_aligned_distance(const CVector& x, const CVector& y)
{
    const cplx inner = y.dot(x);
    const cplx rot = std::abs(inner) > 0 ? inner / std::abs(inner) : cplx(1.0);
    return (x - rot * y).norm();
}

} // namespace

TEST_SUITE("irs")
{
    TEST_CASE("state conventions")
    {
        const IrsState s({0.5, -0.5, 7.0}, 0.8);
        CHECK(s.phases()[1] == doctest::Approx(kTwoPi - 0.5));
        CHECK(s.phases()[2] == doctest::Approx(7.0 - kTwoPi));
        const CVector d = s.reflection();
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(d(i)) == doctest::Approx(0.8));
            CHECK(std::abs(d(i) - std::polar(0.8, -s.phases()[i])) < 1e-15);
        }
        CHECK_THROWS_AS(IrsState({0.0}, 1.5), DomainError);
        CHECK(IrsState::off(4).reflection().norm() == 0.0);
    }

    TEST_CASE("effective channel")
    {
        std::mt19937_64 rng(1);
        IrsScenario s = random_scenario(rng, 4, 3, 8, 1);
        const IrsState theta = random_state(rng, 8);
        CHECK((effective_channel(s, IrsState::off(8)) - s.h_los).norm() == 0.0);
        IrsScenario empty = s;
        empty.m.setZero();
        empty.n.setZero();
        CHECK((effective_channel(empty, theta) - s.h_los).norm() == 0.0);
        CHECK_THROWS_AS(effective_channel(s, random_state(rng, 7)), DomainError);

        // Rank-one cascade with matched phases adds coherently.
        const CVector a = test::gaussian_matrix(rng, 3, 1), b = test::gaussian_matrix(rng, 4, 1);
        const CVector mv = test::gaussian_matrix(rng, 8, 1), nv = test::gaussian_matrix(rng, 8, 1);
        IrsScenario r;
        r.h_los = CMatrix::Zero(3, 4);
        r.m = mv * b.adjoint();
        r.n = a * nv.adjoint();
        std::vector<double> phases(8);
        double coherent = 0.0;
        for (int i = 0; i < 8; ++i) {
            phases[i] = std::arg(std::conj(nv(i)) * mv(i));
            coherent += std::abs(nv(i)) * std::abs(mv(i));
        }
        const double beta = 0.7;
        const CMatrix h = effective_channel(r, IrsState(phases, beta));
        CMatrix oracle(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                cplx acc = 0.0;
                for (int k = 0; k < 8; ++k)
                    acc += r.n(i, k) * std::polar(beta, -phases[k]) * r.m(k, j);
                oracle(i, j) = acc;
            }
        CHECK((h - oracle).norm() < 1e-12);
        CHECK(h.norm() == doctest::Approx(beta * coherent * a.norm() * b.norm()).epsilon(1e-12));

        // Linearity of the cascade in the reflection diagonal.
        const IrsState t1 = random_state(rng, 8, 0.4), t2 = random_state(rng, 8, 0.5);
        const CMatrix lhs = s.n * (t1.reflection() + t2.reflection()).asDiagonal() * s.m;
        CHECK((lhs - (effective_channel(s, t1) - s.h_los) - (effective_channel(s, t2) - s.h_los)).norm() < 1e-12);
    }

    TEST_CASE("AO without IRS is eigen-beamforming")
    {
        std::mt19937_64 rng(2);
        IrsScenario s;
        s.h_los = test::gaussian_matrix(rng, 6, 5);
        s.m = CMatrix::Zero(0, 5);
        s.n = CMatrix::Zero(6, 0);
        s.power_w = 4.0;
        s.noise_var_w = 0.5;
        s.n_streams = 2;
        const auto r = ao_joint_beamforming(s);
        Eigen::JacobiSVD<CMatrix> svd(s.h_los);
        double expected = 0.0;
        for (int i = 0; i < 2; ++i)
            expected += std::log2(1.0 + s.power_w / (s.noise_var_w * 2) * std::pow(svd.singularValues()(i), 2));
        CHECK(r.trace.back() == doctest::Approx(expected).epsilon(1e-10));
    }

    TEST_CASE("AO trace is monotone and beats random phases")
    {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 5; ++t) {
            const IrsScenario s = random_scenario(rng, 8, 8, 16, 2);
            const auto r = ao_joint_beamforming(s);
            for (std::size_t i = 1; i < r.trace.size(); ++i)
                CHECK(r.trace[i] >= r.trace[i - 1]);
            CHECK(irs_objective(s, r.irs) >= r.trace.back() - 1e-9);
            for (int k = 0; k < 20; ++k)
                CHECK(r.trace.back() >= irs_objective(s, random_state(rng, 16)));
            CHECK(r.f.squaredNorm() == doctest::Approx(2.0));
        }
    }

    TEST_CASE("rank-one single stream dominance")
    {
        std::mt19937_64 rng(4);
        IrsScenario s;
        s.h_los = test::gaussian_matrix(rng, 8, 1, 0.1) * test::gaussian_matrix(rng, 1, 8);
        s.m = test::gaussian_matrix(rng, 16, 1) * test::gaussian_matrix(rng, 1, 8);
        s.n = test::gaussian_matrix(rng, 8, 1) * test::gaussian_matrix(rng, 1, 16);
        s.n_streams = 1;
        const double best = ao_joint_beamforming(s).trace.back();
        for (int k = 0; k < 50; ++k)
            CHECK(best >= irs_objective(s, random_state(rng, 16)));
    }

    TEST_CASE("more power raises the converged objective")
    {
        std::mt19937_64 rng(5);
        IrsScenario s = random_scenario(rng, 6, 6, 12, 2);
        const double low = ao_joint_beamforming(s).trace.back();
        s.power_w *= 4;
        CHECK(ao_joint_beamforming(s).trace.back() > low);
    }

    TEST_CASE("reflection codeword identities")
    {
        const auto g = ArrayGeometry::ula(64, 1e-3);
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
        const auto a = [&](double phi) { return response_vector(g, Direction(phi)); };
        const IrsState flat = theta_return(0.0, g);
        for (double p : flat.phases())
            CHECK(p == 0.0);
        for (int t = 0; t < 100; ++t) {
            const double in = ang(rng), out = ang(rng);
            const CVector ret = theta_return(in, g).reflection().asDiagonal() * a(in);
            CHECK(phase_aligned_distance(ret, a(in + kPi)) < 1e-9);
            const CVector twice = theta_return(in + kPi, g).reflection().asDiagonal() * ret;
            CHECK(phase_aligned_distance(twice, a(in)) < 1e-9);

            const CVector dir = theta_direct(in, out, g).reflection().asDiagonal() * a(in);
            CHECK(phase_aligned_distance(dir, a(out)) < 1e-9);
            const CVector round =
                theta_direct(out, in, g).reflection().asDiagonal() * theta_direct(in, out, g).reflection();
            CHECK(phase_aligned_distance(round, CVector::Ones(64)) < 1e-9);
        }
        const IrsState same = theta_direct(0.4, 0.4, g);
        for (double p : same.phases())
            CHECK(std::abs(std::remainder(p, kTwoPi)) < 1e-12);
        CHECK_THROWS_AS(theta_return(0.1, ArrayGeometry::urpa(4, 4, 1e-3)), DomainError);
    }
}
