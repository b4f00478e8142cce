#include <cmath>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/hybrid.hpp"

using namespace thzbf;

namespace {

// Active entries have modulus 1/sqrt(N_t), inactive ones are zero.
bool constant_modulus(const CMatrix& f, const Eigen::MatrixXi& mask, double tol = 1e-9)
{
    const double unit = 1.0 / std::sqrt(static_cast<double>(f.rows()));
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            const double m = std::abs(f(i, j));
            const bool active = mask.size() == 0 || mask(i, j) != 0;
            if (active ? std::abs(m - unit) > tol : m > tol)
                return false;
        }
    return true;
}

void check_trace(const HybridResult& r)
{
    for (std::size_t i = 1; i < r.residual_trace.size(); ++i)
        CHECK(r.residual_trace[i] <= r.residual_trace[i - 1] * (1 + 1e-12) + 1e-14);
}

} // namespace

TEST_SUITE("hybrid")
{
    TEST_CASE("architecture validation")
    {
        CHECK_THROWS_AS(HybridArchitecture::partially(10, 3), DomainError);
        Eigen::MatrixXi bad = Eigen::MatrixXi::Zero(4, 2);
        bad(0, 0) = bad(1, 0) = bad(2, 1) = 1;
        CHECK_THROWS_AS(HybridArchitecture::dynamic(4, 2, bad), DomainError);
        bad(3, 0) = bad(3, 1) = 1;
        CHECK_THROWS_AS(HybridArchitecture::dynamic(4, 2, bad), DomainError);
        bad(3, 1) = 0;
        CHECK_NOTHROW(HybridArchitecture::dynamic(4, 2, bad));
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(project_hybrid(test::gaussian_matrix(rng, 6, 2), HybridArchitecture::fully(8, 2)),
                        DomainError);
        CHECK_THROWS_AS(project_hybrid(test::gaussian_matrix(rng, 8, 3), HybridArchitecture::fully(8, 2)),
                        DomainError);
    }

    TEST_CASE("exactly representable target is a fixed point")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> ph(0.0, kTwoPi);
        CMatrix fab(16, 4);
        for (Eigen::Index i = 0; i < fab.size(); ++i)
            fab(i) = std::polar(0.25, ph(rng));
        Eigen::VectorXd gains(4);
        gains << 2.0, 1.0, 0.5, 3.0;
        const CMatrix target = fab * gains.cast<cplx>().asDiagonal();
        const auto r = project_hybrid(target, HybridArchitecture::fully(16, 4));
        CHECK(r.residual < 1e-9 * target.norm());
        CHECK((r.f_ab * r.f_dp - target).norm() < 1e-9 * target.norm());
    }

    TEST_CASE("square fully connected network represents any target")
    {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 20; ++t) {
            const CMatrix target = test::gaussian_matrix(rng, 8, 3);
            const auto r = project_hybrid(target, HybridArchitecture::fully(8, 8));
            CHECK(r.residual < 1e-6);
        }
    }

    TEST_CASE("structural constraints and monotone residuals")
    {
        std::mt19937_64 rng(5);
        const int nt = 16, nrf = 4, ns = 2;
        for (int t = 0; t < 5; ++t) {
            const CMatrix target = test::gaussian_matrix(rng, nt, ns);
            const auto full = project_hybrid(target, HybridArchitecture::fully(nt, nrf));
            CHECK(constant_modulus(full.f_ab, {}));
            check_trace(full);

            const auto part = project_hybrid(target, HybridArchitecture::partially(nt, nrf));
            CHECK(constant_modulus(part.f_ab, part.switch_matrix));
            for (int i = 0; i < nt; ++i)
                CHECK(part.switch_matrix(i, i / (nt / nrf)) == 1);
            check_trace(part);

            const auto dyn = project_hybrid(target, HybridArchitecture::dynamic(nt, nrf));
            CHECK(constant_modulus(dyn.f_ab, dyn.switch_matrix));
            CHECK((dyn.switch_matrix.rowwise().sum().array() == 1).all());
            check_trace(dyn);

            for (const auto* r : {&full, &part, &dyn})
                CHECK(r->residual == doctest::Approx((target - r->f_ab * r->f_dp).norm()).epsilon(1e-9));
        }
    }

    TEST_CASE("constraint nesting orders the residuals")
    {
        std::mt19937_64 rng(7);
        struct Shape
        {
            int nt, nrf, ns;
        };
        for (Shape s : {Shape{8, 2, 1}, Shape{8, 4, 2}, Shape{16, 4, 2}, Shape{16, 4, 4}, Shape{32, 8, 3}}) {
            for (int t = 0; t < 20; ++t) {
                const CMatrix target = test::gaussian_matrix(rng, s.nt, s.ns);
                const double full = project_hybrid(target, HybridArchitecture::fully(s.nt, s.nrf)).residual;
                const double dyn = project_hybrid(target, HybridArchitecture::dynamic(s.nt, s.nrf)).residual;
                const double part = project_hybrid(target, HybridArchitecture::partially(s.nt, s.nrf)).residual;
                CHECK(full <= dyn + 1e-9);
                CHECK(dyn <= part + 1e-9);
            }
        }
    }
}
