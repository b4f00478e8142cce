#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "support.hpp"
#include "thzbf/beamforming.hpp"
#include "thzbf/channel.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/training.hpp"

using namespace thzbf;

namespace {

struct Instance
{
    CMatrix h;
    int tx, rx;
};

Instance on_grid(std::mt19937_64& rng, int n_antennas, int n_beams)
{
    std::uniform_int_distribution<int> pick(0, n_beams - 1);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    const int tx = pick(rng), rx = pick(rng);
    const CMatrix h = los_channel(std::polar(1.0, ph(rng)), test::ula_vector(n_antennas, steering_sine(n_beams, rx)),
                                  test::ula_vector(n_antennas, steering_sine(n_beams, tx)))
                          .narrowband();
    return {h, tx, rx};
}

int flattened_points(const TrainingOutcome& o)
{
    int n = 0;
    for (const auto& slot : o.trace)
        n += static_cast<int>(slot.size());
    return n;
}

double pair_gain(const CMatrix& h, const CVector& f, const CVector& w) { return std::abs(w.dot(h * f)); }

} // namespace

TEST_SUITE("training")
{
    TEST_CASE("measurement model")
    {
        std::mt19937_64 rng(1);
        const CVector a = test::ula_vector(8, 0.25);
        const CMatrix h = los_channel(cplx(0.0, 0.5), a, a).narrowband();
        CHECK(measure(h, a, a, 0.0, rng).power == doctest::Approx(0.25).epsilon(1e-14));

        const CMatrix zero = CMatrix::Zero(8, 8);
        double mean = 0.0;
        const int trials = 20000;
        for (int i = 0; i < trials; ++i)
            mean += measure(zero, a, a, 2.0, rng).power;
        CHECK(mean / trials == doctest::Approx(2.0).epsilon(0.05));

        const CMatrix u = dft_matrix(8);
        const CMatrix ray = los_channel(1.0, u.col(2), u.col(5)).narrowband();
        CHECK(measure(ray, u.col(4), u.col(2), 0.0, rng).power < 1e-28);
        CHECK(measure(ray, u.col(5), u.col(1), 0.0, rng).power < 1e-28);
    }

    TEST_CASE("test counts")
    {
        std::mt19937_64 rng(2);
        const int n = 27;
        const Codebook book = steering_codebook(n, n);
        const HierarchicalCodebook tree(3, 3, n);
        const auto inst = on_grid(rng, n, n);
        CHECK(exhaustive_train(inst.h, book, book, 0.0, rng).tests_used == 729);
        CHECK(one_sided_train(inst.h, book, book, Side::Receiver, 0.0, rng).tests_used == 54);
        CHECK(parallel_train(inst.h, book, book, 3, 0.0, rng).tests_used == 243);
        CHECK(parallel_train(inst.h, book, book, 1, 0.0, rng).tests_used == 729);
        CHECK(parallel_train(inst.h, book, book, 4, 0.0, rng).tests_used == 183);
        CHECK(tree_train_one_side(inst.h, tree, tree, 0.0, rng).tests_used == 18);
        CHECK(tree_train_both_side(inst.h, tree, tree, 0.0, rng).tests_used == 27);

        CHECK(predict_cost(TrainingMethod::Exhaustive, 27) == 729);
        CHECK(predict_cost(TrainingMethod::TreeOne, 27, 3) == 18);
        CHECK(predict_cost(TrainingMethod::TreeBoth, 81, 3) == 36);
        CHECK(predict_cost(TrainingMethod::Parallel, 27, 2, 4) == 183);
        CHECK(predict_cost(TrainingMethod::TreeOne, 16, 2) == predict_cost(TrainingMethod::TreeBoth, 16, 2));
        CHECK_THROWS_AS(parse_training_method("sector"), DomainError);
        CHECK_THROWS_AS(predict_cost(TrainingMethod::TreeOne, 10, 3), DomainError);
        for (auto m : {TrainingMethod::Exhaustive, TrainingMethod::OneSided, TrainingMethod::Parallel,
                       TrainingMethod::TreeOne, TrainingMethod::TreeBoth})
            CHECK(parse_training_method(to_string(m)) == m);
    }

    TEST_CASE("predicted cost equals measured cost")
    {
        std::mt19937_64 rng(3);
        for (int m : {2, 3}) {
            for (int s : {2, 3, 4}) {
                const int n = static_cast<int>(std::pow(m, s));
                const Codebook book = steering_codebook(n, n);
                const HierarchicalCodebook tree(m, s, n);
                for (int t = 0; t < 10; ++t) {
                    const auto inst = on_grid(rng, n, n);
                    for (int nrf : {1, 2, 3}) {
                        CHECK(parallel_train(inst.h, book, book, nrf, 0.1, rng).tests_used ==
                              predict_cost(TrainingMethod::Parallel, n, m, nrf));
                    }
                    CHECK(exhaustive_train(inst.h, book, book, 0.1, rng).tests_used ==
                          predict_cost(TrainingMethod::Exhaustive, n, m));
                    CHECK(one_sided_train(inst.h, book, book, Side::Transmitter, 0.1, rng).tests_used ==
                          predict_cost(TrainingMethod::OneSided, n, m));
                    CHECK(tree_train_one_side(inst.h, tree, tree, 0.1, rng).tests_used ==
                          predict_cost(TrainingMethod::TreeOne, n, m));
                    CHECK(tree_train_both_side(inst.h, tree, tree, 0.1, rng).tests_used ==
                          predict_cost(TrainingMethod::TreeBoth, n, m));
                }
            }
        }
    }

    TEST_CASE("noiseless on-grid recovery and outcome invariants")
    {
        std::mt19937_64 rng(4);
        const int n = 27;
        const Codebook book = steering_codebook(n, n);
        const HierarchicalCodebook tree(3, 3, n);
        for (int t = 0; t < 30; ++t) {
            const auto inst = on_grid(rng, n, n);
            const TrainingOutcome outs[] = {
                exhaustive_train(inst.h, book, book, 0.0, rng),
                one_sided_train(inst.h, book, book, Side::Receiver, 0.0, rng),
                one_sided_train(inst.h, book, book, Side::Transmitter, 0.0, rng),
                parallel_train(inst.h, book, book, 3, 0.0, rng),
                tree_train_one_side(inst.h, tree, tree, 0.0, rng),
                tree_train_both_side(inst.h, tree, tree, 0.0, rng),
            };
            for (const auto& o : outs) {
                CHECK(o.tx_index == inst.tx);
                CHECK(o.rx_index == inst.rx);
                CHECK(o.tests_used == static_cast<int>(o.trace.size()));
                CHECK(o.achieved_gain ==
                      doctest::Approx(pair_gain(inst.h, book[o.tx_index].weights(), book[o.rx_index].weights())));
            }
            CHECK(flattened_points(outs[3]) == n * n);
        }
    }

    TEST_CASE("tree trace structure")
    {
        std::mt19937_64 rng(5);
        const HierarchicalCodebook tree(3, 3, 27);
        const auto inst = on_grid(rng, 27, 27);
        const auto both = tree_train_both_side(inst.h, tree, tree, 0.0, rng);
        std::set<int> stages;
        for (const auto& slot : both.trace)
            for (const auto& p : slot)
                stages.insert(p.stage);
        CHECK(stages.size() == 3);

        const auto one = tree_train_one_side(inst.h, tree, tree, 0.0, rng);
        int omni_tx = 0;
        for (const auto& slot : one.trace)
            for (const auto& p : slot)
                omni_tx += p.tx_index == kOmniIndex;
        CHECK(omni_tx == 9);
    }

    TEST_CASE("omni phase loses the array gain")
    {
        std::mt19937_64 rng(6);
        const int n = 16;
        const Codebook book = steering_codebook(n, n);
        const auto inst = on_grid(rng, n, n);
        const auto o = one_sided_train(inst.h, book, book, Side::Receiver, 0.0, rng);
        const auto e = exhaustive_train(inst.h, book, book, 0.0, rng);
        double omni_peak = 0.0, full_peak = 0.0;
        for (const auto& slot : o.trace)
            for (const auto& p : slot)
                if (p.tx_index == kOmniIndex)
                    omni_peak = std::max(omni_peak, p.power);
        for (const auto& slot : e.trace)
            for (const auto& p : slot)
                full_peak = std::max(full_peak, p.power);
        CHECK(full_peak / omni_peak == doctest::Approx(double(n)).epsilon(1e-9));
    }

    TEST_CASE("off-grid worst case meets the coverage threshold")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> sine(-1.0, 1.0), ph(0.0, kTwoPi);
        const int n = 32;
        const Codebook book = steering_codebook(n, n);
        const double rho = coverage_threshold(n, n);
        for (int t = 0; t < 200; ++t) {
            const cplx alpha = std::polar(1.0, ph(rng));
            const CMatrix h =
                los_channel(alpha, test::ula_vector(n, sine(rng)), test::ula_vector(n, sine(rng))).narrowband();
            const auto o = exhaustive_train(h, book, book, 0.0, rng);
            CHECK(o.achieved_gain / std::abs(alpha) >= rho * rho - 1e-9);
        }
    }

    TEST_CASE("success probability grows with SNR")
    {
        const int n = 16;
        const Codebook book = steering_codebook(n, n);
        std::vector<double> rate;
        for (double noise : {4.0, 0.5, 0.05}) {
            std::mt19937_64 rng(8);
            int ok = 0;
            for (int t = 0; t < 500; ++t) {
                const auto inst = on_grid(rng, n, n);
                const auto o = exhaustive_train(inst.h, book, book, noise, rng);
                ok += o.tx_index == inst.tx && o.rx_index == inst.rx;
            }
            rate.push_back(ok / 500.0);
        }
        CHECK(rate[0] <= rate[1]);
        CHECK(rate[1] <= rate[2]);
        CHECK(rate[2] > 0.95);
    }

    TEST_CASE("ties go to the lowest index")
    {
        std::mt19937_64 rng(9);
        const Codebook book = steering_codebook(8, 8);
        const CMatrix zero = CMatrix::Zero(8, 8);
        const auto o = exhaustive_train(zero, book, book, 0.0, rng);
        CHECK(o.tx_index == 0);
        CHECK(o.rx_index == 0);
    }
}
