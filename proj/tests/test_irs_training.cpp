#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "thzbf/errors.hpp"
#include "thzbf/geometry.hpp"
#include "thzbf/irs_training.hpp"

using namespace thzbf;

namespace {

IrsGridIndices random_indices(std::mt19937_64& rng, int n)
{
    std::uniform_int_distribution<int> pick(0, n - 1);
    IrsGridIndices idx{};
    idx.bs_los = pick(rng);
    idx.user_los = pick(rng);
    idx.bs_irs = pick(rng);
    idx.irs_bs = pick(rng);
    idx.irs_user = pick(rng);
    idx.user_irs = pick(rng);
    return idx;
}

IrsLink make_link(int n, const IrsGridIndices& idx)
{
    return IrsLink::on_grid(n, idx, cplx(0.05, 0.02), cplx(1.0, 0.0), cplx(0.6, 0.8));
}

} // namespace

TEST_SUITE("irs_training")
{
    TEST_CASE("closed-form costs")
    {
        CHECK(cooperative_cost(3) == 18 * 3 + 12 * 1 - 3);
        CHECK(cooperative_cost(27) == 519);
        CHECK(cooperative_cost(81) == 18 * 81 + 12 * 4 - 3);
        CHECK(irs_exhaustive_cost(27) == 532170);
        CHECK(primary_cost(27) == 162);
        CHECK_THROWS_AS(cooperative_cost(10), DomainError);
    }

    TEST_CASE("codeword set")
    {
        const int n = 9;
        const auto link = make_link(n, {0, 1, 2, 3, 4, 5});
        const auto set = irs_codeword_set(link.surface(), n);
        REQUIRE(set.size() == 2 * n + 1);
        CHECK(set[0].amplitude() == 0.0);
        CHECK(irs_codeword_sine_difference(n, 1) == doctest::Approx(2.0 * (1 - n) / n));
        CHECK(irs_codeword_sine_difference(n, 2 * n) == doctest::Approx(2.0));
    }

    TEST_CASE("reverse link swaps the terminals")
    {
        std::mt19937_64 rng(1);
        const int n = 9;
        const auto idx = random_indices(rng, n);
        const auto link = make_link(n, idx);
        const auto& ang = link.angles();
        const auto a = [&](double phi) { return steering_vector(n, phi); };
        const IrsState off = IrsState::off(n);
        CHECK((link.reverse(off) - link.h_los_rev()).norm() == 0.0);
        // LoS gain is seen with the user beam as transmitter in reverse.
        CHECK(std::abs(a(ang.bs_los).dot(link.h_los_rev() * a(ang.user_los))) == doctest::Approx(std::abs(cplx(0.05, 0.02))));
        CHECK(std::abs(a(ang.user_los).dot(link.h_los() * a(ang.bs_los))) == doctest::Approx(std::abs(cplx(0.05, 0.02))));
        // The cascade gains are traversed in the opposite order.
        CHECK(link.m().norm() == doctest::Approx(link.n_rev().norm()));
        CHECK(link.n_mat().norm() == doctest::Approx(link.m_rev().norm()));
    }

    TEST_CASE("cooperative protocol recovers every angle")
    {
        std::mt19937_64 rng(2);
        for (int n : {3, 9, 27, 81}) {
            const int trials = n == 81 ? 5 : 20;
            for (int t = 0; t < trials; ++t) {
                const auto idx = random_indices(rng, n);
                const auto link = make_link(n, idx);
                const auto out = cooperative_train(link, link.angles().irs_bs, {}, rng);
                CHECK(out.indices == idx);
                CHECK(out.tests_used == cooperative_cost(n));
                CHECK(out.angles.bs_los == doctest::Approx(link.angles().bs_los));
                CHECK(out.angles.irs_user == doctest::Approx(link.angles().irs_user));
                int slots = 0;
                std::set<std::pair<int, int>> seen;
                for (const auto& p : out.trace) {
                    if (seen.insert({p.phase, p.slot}).second)
                        ++slots;
                }
                CHECK(slots == out.tests_used);
            }
        }
    }

    TEST_CASE("primary protocol recovers every angle")
    {
        std::mt19937_64 rng(3);
        for (int n : {3, 9, 27}) {
            for (int t = 0; t < 20; ++t) {
                const auto idx = random_indices(rng, n);
                const auto link = make_link(n, idx);
                const auto out = primary_train(link, {}, rng);
                CHECK(out.indices == idx);
                CHECK(out.tests_used == primary_cost(n));
            }
        }
    }

    TEST_CASE("primary uses fewer tests than cooperative")
    {
        std::mt19937_64 rng(4);
        for (int n : {9, 27, 81}) {
            const auto link = make_link(n, random_indices(rng, n));
            CHECK(primary_train(link, {}, rng).tests_used < cooperative_train(link, link.angles().irs_bs, {}, rng).tests_used);
        }
    }

    TEST_CASE("phase-1 pulse slot maps to the IRS codeword")
    {
        std::mt19937_64 rng(5);
        const int n = 9;
        const auto idx = random_indices(rng, n);
        const auto link = make_link(n, idx);
        const auto out = cooperative_train(link, link.angles().irs_bs, {}, rng);
        std::set<int> codewords;
        for (const auto& p : out.trace)
            if (p.phase == 1) {
                CHECK(p.irs_codeword == p.slot % (2 * n + 1));
                codewords.insert(p.irs_codeword);
            }
        CHECK(codewords.size() == 2 * n + 1);
        CHECK(out.irs_codeword >= 1);
        CHECK(out.irs_codeword <= 2 * n);
    }

    TEST_CASE("missing pulse is reported")
    {
        std::mt19937_64 rng(6);
        const auto idx = random_indices(rng, 9);
        const auto dead = IrsLink::on_grid(9, idx, cplx(0.05, 0.0), cplx(0.0), cplx(0.0));
        CHECK_THROWS_AS(cooperative_train(dead, dead.angles().irs_bs, {}, rng), ProtocolError);
    }

    TEST_CASE("noisy runs stay within budget")
    {
        std::mt19937_64 rng(7);
        IrsProtocolOptions opt;
        opt.noise_var = 1e-6;
        int ok = 0;
        for (int t = 0; t < 20; ++t) {
            const auto idx = random_indices(rng, 9);
            const auto link = make_link(9, idx);
            try {
                const auto out = cooperative_train(link, link.angles().irs_bs, opt, rng);
                CHECK(out.tests_used == cooperative_cost(9));
                ok += out.indices == idx;
            } catch (const ProtocolError&) {
            }
        }
        CHECK(ok >= 18);
    }

    TEST_CASE("grid lookup")
    {
        for (int n : {3, 9, 27})
            for (int k = 0; k < n; ++k)
                CHECK(nearest_grid_index(n, std::asin(-1.0 + (2.0 * k + 1.0) / n)) == k);
    }
}
