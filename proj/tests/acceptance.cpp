// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "thzbf/beamforming.hpp"
#include "thzbf/channel.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/geometry.hpp"
#include "thzbf/irs.hpp"
#include "thzbf/irs_training.hpp"
#include "thzbf/propagation.hpp"
#include "thzbf/training.hpp"
#include "thzbf/wideband.hpp"

using namespace thzbf;

namespace {

struct Check
{
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what)
    {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double ipow(int base, int exp)
{
    double r = 1.0;
    for (int i = 0; i < exp; ++i)
        r *= base;
    return r;
}

int log_m(int n, int m)
{
    int s = 0;
    for (int v = 1; v < n; v *= m)
        ++s;
    return s;
}

CMatrix random_gaussian(std::mt19937_64& rng, int rows, int cols)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m(i) = cplx(g(rng), g(rng));
    return m;
}

double phase_aligned_distance(const CVector& x, const CVector& y)
{
    const cplx inner = y.dot(x);
    const cplx rot = std::abs(inner) > 0 ? inner / std::abs(inner) : cplx(1.0);
    return (x - rot * y).norm();
}

// Pure LoS channel with both ends on the codebook grid.
CMatrix grid_channel(std::mt19937_64& rng, int n, int tx, int rx)
{
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    return los_channel(std::polar(1.0, ph(rng)), steering_vector_sine(n, steering_sine(n, rx)),
                       steering_vector_sine(n, steering_sine(n, tx)))
        .narrowband();
}

Check far_field()
{
    Check c;
    const double d1 = far_field_distance(0.1, wavelength(0.3e12));
    const double d2 = far_field_distance(ArrayGeometry::ula(101, wavelength(0.3e12)));
    c.expect(std::abs(d1 - 20.0) < 5e-4 * 20.0, "aperture 10 cm gave " + std::to_string(d1));
    c.expect(std::abs(d2 - 5.0) < 5e-4 * 5.0, "101-element ULA gave " + std::to_string(d2));
    return c;
}

Check absorption_round_trip()
{
    Check c;
    const Medium m = Medium::standard();
    const double f[] = {0.14e12, 0.26e12, 0.35e12, 0.41e12, 0.67e12, 0.85e12};
    const double k[] = {-42.2, -38.5, -27.8, -22.4, -18.5, -20.9};
    for (int i = 0; i < 6; ++i) {
        const double back = 10.0 * std::log10(absorption_coefficient(m, f[i]));
        c.expect(std::round(back * 10.0) / 10.0 == k[i] && std::abs(back - k[i]) < 1e-12,
                 "table point " + std::to_string(i) + " gave " + std::to_string(back));
    }
    return c;
}

Check training_costs()
{
    Check c;
    std::mt19937_64 rng(3);
    for (int m : {3, 2}) {
        const std::vector<int> sizes = m == 3 ? std::vector<int>{9, 27, 81} : std::vector<int>{8, 16, 64};
        for (int n : sizes) {
            const int s = log_m(n, m);
            const Codebook book = steering_codebook(n, n);
            const HierarchicalCodebook tree(m, s, n);
            const CMatrix h = grid_channel(rng, n, 1, n - 2);
            const int ex = exhaustive_train(h, book, book, 0.0, rng).tests_used;
            const int os = one_sided_train(h, book, book, Side::Receiver, 0.0, rng).tests_used;
            const int par = parallel_train(h, book, book, 3, 0.0, rng).tests_used;
            const int t1 = tree_train_one_side(h, tree, tree, 0.0, rng).tests_used;
            const int t2 = tree_train_both_side(h, tree, tree, 0.0, rng).tests_used;
            const std::string tag = " (N=" + std::to_string(n) + ", M=" + std::to_string(m) + ")";
            if (m == 3) {
                c.expect(ex == n * n, "exhaustive" + tag);
                c.expect(os == 2 * n, "one-sided" + tag);
                c.expect(par == (n * n + 2) / 3, "parallel" + tag);
                c.expect(t1 == 2 * m * s, "tree one-side" + tag);
                c.expect(t2 == static_cast<int>(ipow(m, 2)) * s, "tree both-side" + tag);
            } else {
                c.expect(t1 == t2, "M=2 tree counts differ" + tag);
            }
        }
    }
    return c;
}

Check irs_cost()
{
    Check c;
    std::mt19937_64 rng(4);
    const IrsLink link = IrsLink::on_grid(27, {3, 20, 7, 11, 25, 0}, cplx(0.05, 0.02), 1.0, cplx(0.6, 0.8));
    const auto out = cooperative_train(link, link.angles().irs_bs, {}, rng);
    c.expect(out.tests_used == 519, "cooperative used " + std::to_string(out.tests_used));
    c.expect(cooperative_cost(27) == 18 * 27 + 12 * 3 - 3, "closed form");
    c.expect(irs_exhaustive_cost(27) == 532170, "exhaustive count");
    return c;
}

Check array_factor_oracle()
{
    Check c;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> na(1, 256);
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const int n = na(rng);
        const double phi = ang(rng), psi = ang(rng);
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m)
            acc += std::polar(1.0 / n, kPi * m * (std::sin(psi) - std::sin(phi)));
        worst = std::max(worst, std::abs(std::abs(acc) - array_factor_closed_form(n, phi, psi)));
    }
    c.expect(worst <= 1e-10, "max deviation " + std::to_string(worst));
    return c;
}

Check worst_case_gain()
{
    Check c;
    const int n = 64;
    const double rho = 1.0 / (n * std::sin(kPi / (2 * n)));
    const Codebook book = steering_codebook(n, n);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2), ph(0.0, kTwoPi);
    double worst = 1.0;
    for (int t = 0; t < 1000; ++t) {
        const double at = ang(rng), ar = ang(rng);
        const cplx alpha = std::polar(1.0, ph(rng));
        const CMatrix h = los_channel(alpha, steering_vector(n, ar), steering_vector(n, at)).narrowband();
        const auto o = exhaustive_train(h, book, book, 0.0, rng);
        worst = std::min({worst, array_factor(book[o.tx_index], at), array_factor(book[o.rx_index], ar)});
    }
    c.expect(worst >= rho - 1e-9, "worst one-side gain " + std::to_string(worst) + " < " + std::to_string(rho));
    return c;
}

Check squint()
{
    Check c;
    const double fc = 0.14e12, bw = 10e9;
    const auto s = WidebandSetup::half_wavelength(fc, bw, 80, 1.0 / bw);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
    for (int t = 0; t < 2000; ++t) {
        const double phi = ang(rng), psi = ang(rng);
        const Codeword cw = Codeword::steering(80, std::sin(phi));
        c.expect(std::abs(squint_gain(s, phi, psi, fc) - array_factor(cw, psi)) <= 1e-12, "xi = 1 reduction");
        c.expect(squint_direction(psi, fc, fc) == psi, "squint_direction identity");
    }
    const double phi = kPi / 4;
    std::vector<double> probes;
    for (double p = 0.5; p < 1.1; p += 1e-5)
        probes.push_back(p);
    const std::vector<double> edges = {fc - bw / 2, fc + bw / 2};
    const auto samples = squint_pattern(s, phi, edges, probes);
    double peak[2];
    for (int e = 0; e < 2; ++e) {
        auto first = samples.begin() + e * probes.size();
        peak[e] = std::max_element(first, first + probes.size(), [](const SquintSample& a, const SquintSample& b) {
                      return a.gain < b.gain;
                  })->psi_rad;
    }
    c.expect((peak[0] - phi) * (peak[1] - phi) < 0.0,
             "edge peaks " + std::to_string(peak[0]) + ", " + std::to_string(peak[1]) + " do not straddle");
    return c;
}

Check reflection_identities()
{
    Check c;
    const auto g = ArrayGeometry::ula(64, wavelength(0.3e12));
    const auto a = [&](double phi) { return response_vector(g, Direction(phi)); };
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const double in = ang(rng), out = ang(rng);
        const CVector ret = theta_return(in, g).reflection().asDiagonal() * a(in);
        const CVector dir = theta_direct(in, out, g).reflection().asDiagonal() * a(in);
        worst = std::max({worst, phase_aligned_distance(ret, a(in + kPi)), phase_aligned_distance(dir, a(out))});
    }
    c.expect(worst <= 1e-9, "max deviation " + std::to_string(worst));
    return c;
}

Check ao_monotone()
{
    Check c;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    for (int t = 0; t < 20; ++t) {
        IrsScenario s;
        s.h_los = 0.1 * random_gaussian(rng, 16, 16);
        s.m = random_gaussian(rng, 32, 16);
        s.n = random_gaussian(rng, 16, 32);
        s.power_w = 1.0;
        s.noise_var_w = 1.0;
        s.n_streams = 2;
        const auto r = ao_joint_beamforming(s);
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            c.expect(r.trace[i] >= r.trace[i - 1], "trace decreased on instance " + std::to_string(t));
        for (int b = 0; b < 50; ++b) {
            std::vector<double> phases(32);
            for (double& p : phases)
                p = ph(rng);
            c.expect(r.trace.back() >= irs_objective(s, IrsState(phases)),
                     "random baseline won on instance " + std::to_string(t));
        }
    }
    return c;
}

Check end_to_end()
{
    Check c;
    const int n = 27, trials = 100;
    const Codebook book = steering_codebook(n, n);
    const HierarchicalCodebook tree(3, 3, n);
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const char* names[] = {"exhaustive", "one_sided", "parallel", "tree_one", "tree_both"};
    int ok[7] = {};
    for (int t = 0; t < trials; ++t) {
        const int tx = pick(rng), rx = pick(rng);
        const CMatrix h = grid_channel(rng, n, tx, rx);
        const TrainingOutcome outs[] = {
            exhaustive_train(h, book, book, 0.0, rng),
            one_sided_train(h, book, book, Side::Receiver, 0.0, rng),
            parallel_train(h, book, book, 3, 0.0, rng),
            tree_train_one_side(h, tree, tree, 0.0, rng),
            tree_train_both_side(h, tree, tree, 0.0, rng),
        };
        for (int k = 0; k < 5; ++k)
            ok[k] += outs[k].tx_index == tx && outs[k].rx_index == rx;

        const IrsGridIndices idx{pick(rng), pick(rng), pick(rng), pick(rng), pick(rng), pick(rng)};
        const IrsLink link = IrsLink::on_grid(n, idx, cplx(0.05, 0.02), 1.0, cplx(0.6, 0.8));
        try {
            ok[5] += cooperative_train(link, link.angles().irs_bs, {}, rng).indices == idx;
        } catch (const Error&) {
        }
        try {
            ok[6] += primary_train(link, {}, rng).indices == idx;
        } catch (const Error&) {
        }
    }
    for (int k = 0; k < 5; ++k)
        c.expect(ok[k] == trials, std::string(names[k]) + " " + std::to_string(ok[k]) + "/100");
    c.expect(ok[5] == trials, "cooperative IRS " + std::to_string(ok[5]) + "/100");
    c.expect(ok[6] == trials, "primary IRS " + std::to_string(ok[6]) + "/100");
    return c;
}

} // namespace

int main()
{
    struct Criterion
    {
        const char* name;
        std::function<Check()> run;
    };
    const Criterion criteria[] = {
        {"far-field worked examples", far_field},
        {"absorption table round trip", absorption_round_trip},
        {"training cost identities", training_costs},
        {"IRS protocol cost", irs_cost},
        {"array factor closed form", array_factor_oracle},
        {"worst-case training gain", worst_case_gain},
        {"squint reductions", squint},
        {"IRS codeword identities", reflection_identities},
        {"AO monotonicity and dominance", ao_monotone},
        {"noiseless end-to-end recovery", end_to_end},
    };
    int failed = 0;
    int id = 1;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Check r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d %s (%.2f s)%s%s\n", r.ok ? "PASS" : "FAIL", id++, c.name, secs, r.ok ? "" : ": ",
                    r.detail.c_str());
        failed += !r.ok;
    }
    return failed == 0 ? 0 : 1;
}
