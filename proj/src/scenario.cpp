#include "thzbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "thzbf/beamforming.hpp"
#include "thzbf/channel.hpp"
#include "thzbf/errors.hpp"
#include "thzbf/io.hpp"
#include "thzbf/irs.hpp"
#include "thzbf/irs_training.hpp"
#include "thzbf/kernels.hpp"
#include "thzbf/propagation.hpp"
#include "thzbf/wideband.hpp"

namespace fs = std::filesystem;

namespace thzbf {

namespace {

// Thin wrapper that turns YAML access failures into SchemaError with the
// line of the node involved.
class Node
{
public:
    Node(YAML::Node node, std::string source) : node_(std::move(node)), source_(std::move(source)) {}

    int line() const { return node_.Mark().line >= 0 ? node_.Mark().line + 1 : 0; }
    const YAML::Node& raw() const { return node_; }

    [[noreturn]] void fail(const std::string& message) const { throw SchemaError(source_, line(), message); }

    bool has(const std::string& key) const { return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull(); }

    Node at(const std::string& key) const
    {
        if (!node_.IsMap())
            fail("expected a table");
        if (!has(key))
            fail("missing key '" + key + "'");
        return Node(node_[key], source_);
    }

    void only(std::initializer_list<const char*> keys) const
    {
        if (!node_.IsMap())
            fail("expected a table");
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : node_) {
            const auto name = kv.first.as<std::string>();
            if (!allowed.count(name))
                throw SchemaError(source_, Node(kv.first, source_).line(), "unknown key '" + name + "'");
        }
    }

    template <typename T>
    T as(const char* what) const
    {
        if (!node_.IsScalar())
            fail(std::string("expected ") + what);
        try {
            return node_.as<T>();
        } catch (const YAML::Exception&) {
            fail(std::string("expected ") + what + ", got '" + node_.Scalar() + "'");
        }
    }

    double real() const { return as<double>("a number"); }
    long long integer() const { return as<long long>("an integer"); }
    std::string text() const { return as<std::string>("a string"); }

    std::vector<Node> items() const
    {
        if (!node_.IsSequence())
            fail("expected a list");
        std::vector<Node> out;
        for (const auto& item : node_)
            out.emplace_back(item, source_);
        if (out.empty())
            fail("list must not be empty");
        return out;
    }

    double real(const std::string& key, double fallback) const { return has(key) ? at(key).real() : fallback; }
    int positive(const std::string& key) const
    {
        const Node n = at(key);
        const long long v = n.integer();
        if (v < 1 || v > 1'000'000'000)
            n.fail(key + " must be a positive integer");
        return static_cast<int>(v);
    }
    int positive(const std::string& key, int fallback) const { return has(key) ? positive(key) : fallback; }

private:
    YAML::Node node_;
    std::string source_;
};

// {start, stop, count} or an explicit list.
std::vector<double> sweep(const Node& n)
{
    if (n.raw().IsSequence()) {
        std::vector<double> out;
        for (const auto& item : n.items())
            out.push_back(item.real());
        return out;
    }
    n.only({"start", "stop", "count"});
    const double a = n.at("start").real();
    const double b = n.at("stop").real();
    const int count = n.positive("count");
    if (count == 1)
        return {a};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
        out[i] = a + (b - a) * i / (count - 1);
    return out;
}

std::vector<int> int_list(const Node& n)
{
    std::vector<int> out;
    if (n.raw().IsScalar()) {
        const long long v = n.integer();
        if (v < 1)
            n.fail("expected a positive integer");
        return {static_cast<int>(v)};
    }
    for (const auto& item : n.items()) {
        const long long v = item.integer();
        if (v < 1)
            item.fail("expected a positive integer");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

cplx complex_value(const Node& n)
{
    if (n.raw().IsScalar())
        return {n.real(), 0.0};
    const auto parts = n.items();
    if (parts.size() != 2)
        n.fail("complex values are [re, im]");
    return {parts[0].real(), parts[1].real()};
}

struct Context
{
    fs::path config_dir;
    std::string source;
};

Medium load_medium(const Node& root, const Context& ctx)
{
    if (!root.has("medium"))
        return Medium::standard();
    const Node m = root.at("medium");
    if (m.raw().IsScalar()) {
        if (m.text() != "standard")
            m.fail("medium must be 'standard' or a table with a 'file' key");
        return Medium::standard();
    }
    m.only({"file", "temperature_k", "pressure_atm"});
    fs::path file = m.at("file").text();
    if (file.is_relative())
        file = ctx.config_dir / file;
    if (!fs::exists(file))
        m.at("file").fail("absorption table not found: " + file.string());
    return Medium::from_file(file, m.real("temperature_k", 296.0), m.real("pressure_atm", 1.0));
}

// kind, counts, and spacing given either in wavelengths or in meters.
ArrayGeometry load_geometry(const Node& g, double wavelength_m)
{
    g.only({"kind", "n", "ny", "nz", "rings", "circles", "radii_m", "spacing_wavelengths", "spacing_m",
            "secondary_spacing_wavelengths", "secondary_spacing_m"});
    auto spacing = [&](const char* in_lambda, const char* in_m) {
        if (g.has(in_lambda) && g.has(in_m))
            g.fail(std::string("give either ") + in_lambda + " or " + in_m);
        if (g.has(in_lambda))
            return g.at(in_lambda).real() * wavelength_m;
        if (g.has(in_m))
            return g.at(in_m).real();
        return 0.0;
    };
    const std::string kind = g.at("kind").text();
    if (kind == "ula")
        return ArrayGeometry::ula(g.positive("n"), wavelength_m, spacing("spacing_wavelengths", "spacing_m"));
    if (kind == "urpa")
        return ArrayGeometry::urpa(g.positive("ny"), g.positive("nz"), wavelength_m,
                                   spacing("spacing_wavelengths", "spacing_m"),
                                   spacing("secondary_spacing_wavelengths", "secondary_spacing_m"));
    if (kind == "uhpa")
        return ArrayGeometry::uhpa(g.positive("rings"), wavelength_m, spacing("spacing_wavelengths", "spacing_m"));
    if (kind == "ucpa") {
        std::vector<double> radii;
        if (g.has("radii_m"))
            for (const auto& r : g.at("radii_m").items())
                radii.push_back(r.real());
        return ArrayGeometry::ucpa(g.positive("circles"), wavelength_m, std::move(radii));
    }
    g.at("kind").fail("unknown array kind '" + kind + "'");
}

class OutputSet
{
public:
    OutputSet(fs::path dir, bool write) : dir_(std::move(dir)), write_(write) {}

    // Returns nullptr in validate-only mode.
    std::unique_ptr<std::ofstream> open(const std::string& name)
    {
        names_.push_back(name);
        if (!write_)
            return nullptr;
        auto out = std::make_unique<std::ofstream>(dir_ / name, std::ios::binary);
        if (!*out)
            throw Error("run_scenario", "cannot write " + (dir_ / name).string());
        return out;
    }

    const std::vector<std::string>& names() const { return names_; }
    bool writing() const { return write_; }

private:
    fs::path dir_;
    bool write_;
    std::vector<std::string> names_;
};

// Runs body(rep) for every repetition, possibly concurrently, and returns the
// results in repetition order.
template <typename R, typename F>
std::vector<R> monte_carlo(int reps, F body)
{
    std::vector<R> results(reps);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int rep = 0; rep < reps; ++rep) {
        try {
            results[rep] = body(rep);
        } catch (...) {
#pragma omp critical(thzbf_mc_failure)
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return results;
}

// ----------------------------------------------------------------- pathloss

void run_pathloss(const Node& root, const Context& ctx, OutputSet& out)
{
    root.only({"kind", "seed", "output", "medium", "frequencies", "distances"});
    const Medium medium = load_medium(root, ctx);
    const auto freqs = sweep(root.at("frequencies"));
    std::vector<double> dists;
    for (const auto& d : root.at("distances").items())
        dists.push_back(d.real());
    for (double f : freqs)
        if (f < medium.min_frequency() || f > medium.max_frequency())
            root.at("frequencies").fail("frequency " + format_double(f) + " Hz lies outside the absorption table [" +
                                        format_double(medium.min_frequency()) + ", " +
                                        format_double(medium.max_frequency()) + "] Hz");
    auto file = out.open("pathloss.csv");
    if (!file)
        return;
    CsvWriter csv(*file, {"f_hz", "distance_m", "spreading_db", "absorption_db", "total_db"});
    for (double d : dists)
        for (double f : freqs) {
            const double spread = to_db(spreading_loss(f, d));
            const double absorb = to_db(absorption_loss(medium, f, d));
            csv.cell(f).cell(d).cell(spread).cell(absorb).cell(spread + absorb);
            csv.end_row();
        }
}

// ----------------------------------------------------------------- pattern

void run_pattern(const Node& root, const Context&, OutputSet& out)
{
    root.only({"kind", "seed", "output", "frequency_hz", "arrays", "antennas", "steering", "probes"});
    const double f = root.real("frequency_hz", 0.3e12);
    const double lambda = wavelength(f);
    std::vector<ArrayGeometry> arrays;
    if (root.has("arrays") == root.has("antennas"))
        root.fail("give exactly one of 'arrays' or 'antennas'");
    if (root.has("arrays"))
        for (const auto& g : root.at("arrays").items())
            arrays.push_back(load_geometry(g, lambda));
    else
        for (int n : int_list(root.at("antennas")))
            arrays.push_back(ArrayGeometry::ula(n, lambda));
    const double steer = root.real("steering", 0.0);
    std::vector<double> probes;
    if (root.has("probes"))
        probes = sweep(root.at("probes"));
    else
        probes = sweep(Node(YAML::Load("{start: -1.5707963267948966, stop: 1.5707963267948966, count: 1801}"), ""));

    auto pattern = out.open("pattern.csv");
    auto hpbw = out.open("hpbw.csv");
    if (!pattern)
        return;
    CsvWriter csv(*pattern, {"n_antennas", "psi_rad", "gain"});
    CsvWriter widths(*hpbw, {"n_antennas", "hpbw_rad"});
    for (const auto& g : arrays) {
        const CVector w = response_vector(g, Direction(steer));
        std::vector<double> gains;
        if (g.kind() == ArrayKind::ULA) {
            gains = kernels::array_factor_sweep(w, probes, g.spacing() / g.wavelength());
        } else {
            gains.resize(probes.size());
            for (std::size_t i = 0; i < probes.size(); ++i)
                gains[i] = std::abs(w.dot(response_vector(g, Direction(probes[i]))));
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
            csv.cell(g.size()).cell(probes[i]).cell(gains[i]);
            csv.end_row();
        }
        // Main-lobe width from the contiguous run of probes around the peak.
        const auto peak = std::max_element(gains.begin(), gains.end()) - gains.begin();
        auto lo = peak, hi = peak;
        while (lo > 0 && gains[lo - 1] >= kHalfPowerThreshold * gains[peak])
            --lo;
        while (hi + 1 < static_cast<long>(gains.size()) && gains[hi + 1] >= kHalfPowerThreshold * gains[peak])
            ++hi;
        widths.cell(g.size()).cell(probes[hi] - probes[lo]);
        widths.end_row();
    }
}

// ----------------------------------------------------------------- coverage

void run_coverage(const Node& root, const Context&, OutputSet& out)
{
    root.only({"kind", "seed", "output", "antennas", "beams", "rho"});
    const int na = root.positive("antennas");
    const int nb = root.positive("beams", na);
    const double rho = root.has("rho") ? root.at("rho").real() : coverage_threshold(na, nb);
    const Codebook book = steering_codebook(na, nb);
    auto file = out.open("coverage.csv");
    if (!file)
        return;
    CsvWriter csv(*file, {"beam", "steering_sine", "lo_rad", "hi_rad", "rho"});
    for (int k = 0; k < book.size(); ++k)
        for (const auto& iv : beam_coverage(book[k], rho)) {
            csv.cell(k).cell(steering_sine(nb, k)).cell(iv.lo).cell(iv.hi).cell(rho);
            csv.end_row();
        }
}

// ----------------------------------------------------------------- train

struct TrainRow
{
    TrainingMethod method;
    TrainingOutcome outcome;
    long long predicted;
    bool correct;
};

enum class ChannelModel { LosOnGrid, LosRandom, Clustered };

void run_train(const Node& root, const Context& ctx, OutputSet& out, std::uint64_t seed)
{
    root.only({"kind", "seed", "output", "antennas", "beams", "m_ary", "n_rf", "methods", "repetitions",
               "noise_var", "channel", "medium"});
    const int na = root.positive("antennas");
    const int nb = root.positive("beams", na);
    const int m = root.positive("m_ary", 2);
    const int n_rf = root.positive("n_rf", 1);
    const int reps = root.positive("repetitions", 1);
    const double noise = root.real("noise_var", 0.0);
    if (noise < 0.0)
        root.at("noise_var").fail("noise_var must be non-negative");

    std::vector<TrainingMethod> methods;
    for (const auto& item : root.at("methods").items()) {
        try {
            methods.push_back(parse_training_method(item.text()));
        } catch (const Error& e) {
            item.fail(e.what());
        }
    }

    ChannelModel model = ChannelModel::LosOnGrid;
    RandomRayParams rays;
    double carrier = 0.3e12;
    if (root.has("channel")) {
        const Node ch = root.at("channel");
        ch.only({"model", "clusters", "rays_per_cluster", "frequency_hz", "base_distance_m"});
        const std::string name = ch.at("model").text();
        if (name == "los_on_grid")
            model = ChannelModel::LosOnGrid;
        else if (name == "los_random")
            model = ChannelModel::LosRandom;
        else if (name == "clustered")
            model = ChannelModel::Clustered;
        else
            ch.at("model").fail("channel model must be los_on_grid, los_random or clustered");
        rays.n_clusters = ch.positive("clusters", rays.n_clusters);
        rays.rays_per_cluster = ch.positive("rays_per_cluster", rays.rays_per_cluster);
        rays.base_distance_m = ch.real("base_distance_m", rays.base_distance_m);
        carrier = ch.real("frequency_hz", carrier);
    }
    const Medium medium = load_medium(root, ctx);

    const bool needs_tree = std::any_of(methods.begin(), methods.end(), [](TrainingMethod t) {
        return t == TrainingMethod::TreeOne || t == TrainingMethod::TreeBoth;
    });
    const Codebook book = steering_codebook(na, nb);
    std::optional<HierarchicalCodebook> tree;
    if (needs_tree)
        tree.emplace(m, tree_depth(nb, m), na);
    for (TrainingMethod t : methods)
        (void)predict_cost(t, nb, m, n_rf); // surfaces domain errors before any work

    const ArrayGeometry array = ArrayGeometry::ula(na, wavelength(carrier));
    auto body = [&](int rep) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(rep));
        CMatrix h;
        std::optional<std::pair<int, int>> truth;
        if (model == ChannelModel::Clustered) {
            SynthesisParams sp;
            sp.frequency_hz = carrier;
            h = synthesize_channel(medium, array, array, generate_rays(rays, seed + rep), sp).narrowband();
        } else {
            std::uniform_real_distribution<double> phase(0.0, kTwoPi);
            double st, sr;
            if (model == ChannelModel::LosOnGrid) {
                std::uniform_int_distribution<int> pick(0, nb - 1);
                const int kt = pick(rng), kr = pick(rng);
                truth = {kt, kr};
                st = steering_sine(nb, kt);
                sr = steering_sine(nb, kr);
            } else {
                std::uniform_real_distribution<double> sine(-1.0, 1.0);
                st = sine(rng);
                sr = sine(rng);
            }
            h = los_channel(std::polar(1.0, phase(rng)), steering_vector_sine(na, sr), steering_vector_sine(na, st))
                    .narrowband();
        }
        // Noiseless reference: the best pair of the leaf codebook.
        if (!truth) {
            const Eigen::MatrixXd p = kernels::pair_powers(h, book.matrix(), book.matrix());
            Eigen::Index r, c;
            p.maxCoeff(&r, &c);
            truth = {static_cast<int>(c), static_cast<int>(r)};
        }
        std::vector<TrainRow> rows;
        for (TrainingMethod t : methods) {
            TrainingOutcome o;
            switch (t) {
            case TrainingMethod::Exhaustive:
                o = exhaustive_train(h, book, book, noise, rng);
                break;
            case TrainingMethod::OneSided:
                o = one_sided_train(h, book, book, Side::Receiver, noise, rng);
                break;
            case TrainingMethod::Parallel:
                o = parallel_train(h, book, book, n_rf, noise, rng);
                break;
            case TrainingMethod::TreeOne:
                o = tree_train_one_side(h, *tree, *tree, noise, rng);
                break;
            case TrainingMethod::TreeBoth:
                o = tree_train_both_side(h, *tree, *tree, noise, rng);
                break;
            }
            const bool ok = o.tx_index == truth->first && o.rx_index == truth->second;
            rows.push_back({t, std::move(o), predict_cost(t, nb, m, n_rf), ok});
        }
        return rows;
    };

    if (!out.writing()) {
        out.open("train.csv");
        for (TrainingMethod t : methods)
            out.open("trace_" + to_string(t) + ".csv");
        return;
    }
    const auto results = monte_carlo<std::vector<TrainRow>>(reps, body);
    auto file = out.open("train.csv");
    CsvWriter csv(*file, {"rep", "method", "tx_index", "rx_index", "tests_used", "predicted", "achieved_gain",
                          "correct"});
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& r : results[rep]) {
            csv.cell(rep).cell(to_string(r.method)).cell(r.outcome.tx_index).cell(r.outcome.rx_index);
            csv.cell(r.outcome.tests_used).cell(r.predicted).cell(r.outcome.achieved_gain).cell(r.correct ? 1 : 0);
            csv.end_row();
        }
    for (const auto& r : results.front()) {
        auto trace = out.open("trace_" + to_string(r.method) + ".csv");
        write_training_trace(*trace, r.outcome);
    }
}

// ----------------------------------------------------------------- squint

void run_squint(const Node& root, const Context&, OutputSet& out)
{
    root.only({"kind", "seed", "output", "carrier_hz", "bandwidth_hz", "antennas", "steering", "frequencies",
               "probes"});
    const double fc = root.at("carrier_hz").real();
    const double bw = root.at("bandwidth_hz").real();
    const int na = root.positive("antennas");
    const double steer = root.at("steering").real();
    const WidebandSetup setup = WidebandSetup::half_wavelength(fc, bw, na, 1.0 / bw);
    setup.validate();
    std::vector<double> freqs;
    if (root.has("frequencies")) {
        freqs = sweep(root.at("frequencies"));
    } else {
        for (int i = 0; i < 5; ++i)
            freqs.push_back(fc - bw / 2 + bw * i / 4);
    }
    std::vector<double> probes;
    if (root.has("probes"))
        probes = sweep(root.at("probes"));
    else
        for (int i = 0; i <= 3600; ++i)
            probes.push_back(-kPi / 2 + kPi * i / 3600);

    auto squint = out.open("squint.csv");
    auto peaks = out.open("peaks.csv");
    if (!squint)
        return;
    const auto samples = squint_pattern(setup, steer, freqs, probes);
    write_squint_csv(*squint, samples);
    CsvWriter csv(*peaks, {"f_hz", "peak_psi_rad", "peak_gain", "predicted_peak_rad"});
    for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
        const auto first = samples.begin() + static_cast<long>(fi * probes.size());
        const auto best = std::max_element(first, first + static_cast<long>(probes.size()),
                                           [](const SquintSample& a, const SquintSample& b) { return a.gain < b.gain; });
        // The beam peaks where (f / f_c) sin(psi) = sin(phi).
        const double arg = std::sin(steer) * fc / freqs[fi];
        const double predicted = std::abs(arg) <= 1.0 ? std::asin(arg) : std::nan("");
        csv.cell(freqs[fi]).cell(best->psi_rad).cell(best->gain).cell(predicted);
        csv.end_row();
    }
}

// ----------------------------------------------------------------- irs-train

struct IrsRow
{
    std::string protocol;
    IrsTrainingOutcome outcome;
    bool correct;
};

void run_irs_train(const Node& root, const Context&, OutputSet& out, std::uint64_t seed)
{
    root.only({"kind", "seed", "output", "n", "protocols", "repetitions", "noise_var", "pulse_factor", "gains"});
    const int n = root.positive("n");
    const int reps = root.positive("repetitions", 1);
    IrsProtocolOptions opt;
    opt.noise_var = root.real("noise_var", 0.0);
    opt.pulse_factor = root.real("pulse_factor", opt.pulse_factor);
    std::vector<std::string> protocols;
    for (const auto& p : root.at("protocols").items()) {
        const auto name = p.text();
        if (name != "cooperative" && name != "primary")
            p.fail("protocol must be cooperative or primary");
        protocols.push_back(name);
    }
    cplx g_los(0.05, 0.02), g_m(1.0, 0.0), g_n(0.6, 0.8);
    if (root.has("gains")) {
        const Node g = root.at("gains");
        g.only({"los", "bs_irs", "irs_user"});
        if (g.has("los"))
            g_los = complex_value(g.at("los"));
        if (g.has("bs_irs"))
            g_m = complex_value(g.at("bs_irs"));
        if (g.has("irs_user"))
            g_n = complex_value(g.at("irs_user"));
    }
    (void)tree_depth(n, 3);

    if (!out.writing()) {
        out.open("irs_train.csv");
        for (const auto& p : protocols)
            out.open("irs_trace_" + p + ".csv");
        return;
    }
    auto body = [&](int rep) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(rep));
        std::uniform_int_distribution<int> pick(0, n - 1);
        IrsGridIndices idx{};
        idx.bs_los = pick(rng);
        idx.user_los = pick(rng);
        idx.bs_irs = pick(rng);
        idx.irs_bs = pick(rng);
        idx.irs_user = pick(rng);
        idx.user_irs = pick(rng);
        const IrsLink link = IrsLink::on_grid(n, idx, g_los, g_m, g_n);
        std::vector<IrsRow> rows;
        for (const auto& p : protocols) {
            IrsTrainingOutcome o = p == "cooperative" ? cooperative_train(link, link.angles().irs_bs, opt, rng)
                                                      : primary_train(link, opt, rng);
            const bool ok = o.indices == idx;
            rows.push_back({p, std::move(o), ok});
        }
        return rows;
    };
    const auto results = monte_carlo<std::vector<IrsRow>>(reps, body);
    auto file = out.open("irs_train.csv");
    CsvWriter csv(*file, {"rep", "protocol", "tests_used", "correct"});
    for (int rep = 0; rep < reps; ++rep)
        for (const auto& r : results[rep]) {
            csv.cell(rep).cell(r.protocol).cell(r.outcome.tests_used).cell(r.correct ? 1 : 0);
            csv.end_row();
        }
    for (const auto& r : results.front()) {
        auto trace = out.open("irs_trace_" + r.protocol + ".csv");
        write_irs_trace(*trace, r.outcome);
    }
}

// ----------------------------------------------------------------- irs-opt

void run_irs_opt(const Node& root, const Context&, OutputSet& out, std::uint64_t seed)
{
    root.only({"kind", "seed", "output", "n_t", "n_r", "n_irs", "streams", "power_w", "noise_var_w", "los_scale",
               "max_iters", "baselines", "repetitions"});
    const int nt = root.positive("n_t");
    const int nr = root.positive("n_r");
    const int ni = root.positive("n_irs");
    const int ns = root.positive("streams", 1);
    const double power = root.real("power_w", 1.0);
    const double noise = root.real("noise_var_w", 1.0);
    const double los_scale = root.real("los_scale", 0.1);
    const int reps = root.positive("repetitions", 1);
    const int baselines = root.positive("baselines", 50);
    AoOptions ao;
    ao.max_iters = root.positive("max_iters", ao.max_iters);
    if (ns > std::min(nt, nr))
        root.at("streams").fail("streams must not exceed min(n_t, n_r)");

    if (!out.writing()) {
        out.open("ao_trace.csv");
        out.open("ao_summary.csv");
        return;
    }
    struct Result
    {
        std::optional<AoResult> ao;
        double best_random = 0.0;
    };
    auto body = [&](int rep) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(rep));
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        auto draw = [&](int r, int c, double scale) {
            CMatrix x(r, c);
            for (Eigen::Index i = 0; i < x.size(); ++i)
                x(i) = scale * cplx(gauss(rng), gauss(rng));
            return x;
        };
        IrsScenario s;
        s.h_los = draw(nr, nt, los_scale);
        s.m = draw(ni, nt, 1.0);
        s.n = draw(nr, ni, 1.0);
        s.power_w = power;
        s.noise_var_w = noise;
        s.n_streams = ns;
        Result r{ao_joint_beamforming(s, ao)};
        std::uniform_real_distribution<double> phase(0.0, kTwoPi);
        for (int b = 0; b < baselines; ++b) {
            std::vector<double> p(ni);
            for (double& x : p)
                x = phase(rng);
            r.best_random = std::max(r.best_random, irs_objective(s, IrsState(p)));
        }
        return r;
    };
    const auto results = monte_carlo<Result>(reps, body);
    auto trace = out.open("ao_trace.csv");
    CsvWriter tcsv(*trace, {"rep", "iteration", "objective"});
    auto summary = out.open("ao_summary.csv");
    CsvWriter scsv(*summary, {"rep", "iterations", "optimized", "best_random", "dominates"});
    for (int rep = 0; rep < reps; ++rep) {
        const AoResult& ao_rep = *results[rep].ao;
        const double best = results[rep].best_random;
        for (std::size_t i = 0; i < ao_rep.trace.size(); ++i) {
            tcsv.cell(rep).cell(static_cast<long long>(i)).cell(ao_rep.trace[i]);
            tcsv.end_row();
        }
        scsv.cell(rep).cell(ao_rep.iterations).cell(ao_rep.trace.back()).cell(best);
        scsv.cell(ao_rep.trace.back() >= best ? 1 : 0);
        scsv.end_row();
    }
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw SchemaError(p.string(), 0, "cannot read config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioSummary execute(const fs::path& config, const std::optional<fs::path>& override_dir, bool write)
{
    const std::string text = read_file(config);
    const std::string source = config.string();
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw SchemaError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
    }
    const Node root(doc, source);
    if (!doc.IsMap())
        throw SchemaError(source, 1, "config must be a table");

    ScenarioSummary summary;
    const Node kind_node = root.at("kind");
    try {
        summary.kind = parse_scenario_kind(kind_node.text());
    } catch (const DomainError& e) {
        kind_node.fail(e.what());
    }
    if (root.has("seed")) {
        const Node s = root.at("seed");
        const long long v = s.integer();
        if (v < 0)
            s.fail("seed must be non-negative");
        summary.seed = static_cast<std::uint64_t>(v);
    } else if (is_stochastic(summary.kind)) {
        root.fail("seed is required for " + to_string(summary.kind) + " scenarios");
    }

    const Context ctx{config.has_parent_path() ? config.parent_path() : fs::path("."), source};
    if (override_dir)
        summary.output_dir = *override_dir;
    else if (root.has("output"))
        summary.output_dir = ctx.config_dir / root.at("output").text();
    else
        summary.output_dir = ctx.config_dir / "out" / config.stem();

    if (write)
        fs::create_directories(summary.output_dir);
    OutputSet out(summary.output_dir, write);
    const std::uint64_t seed = summary.seed.value_or(0);
    switch (summary.kind) {
    case ScenarioKind::Pathloss:
        run_pathloss(root, ctx, out);
        break;
    case ScenarioKind::Pattern:
        run_pattern(root, ctx, out);
        break;
    case ScenarioKind::Coverage:
        run_coverage(root, ctx, out);
        break;
    case ScenarioKind::Train:
        run_train(root, ctx, out, seed);
        break;
    case ScenarioKind::Squint:
        run_squint(root, ctx, out);
        break;
    case ScenarioKind::IrsTrain:
        run_irs_train(root, ctx, out, seed);
        break;
    case ScenarioKind::IrsOpt:
        run_irs_opt(root, ctx, out, seed);
        break;
    }
    summary.outputs = out.names();
    summary.outputs.push_back("manifest.json");

    if (write) {
        nlohmann::ordered_json manifest;
        manifest["config"] = config.filename().string();
        manifest["config_fnv1a64"] = fnv1a64_hex(text);
        manifest["kind"] = to_string(summary.kind);
        manifest["seed"] = summary.seed ? nlohmann::ordered_json(*summary.seed) : nlohmann::ordered_json(nullptr);
        manifest["version"] = kVersion;
        manifest["outputs"] = out.names();
        std::ofstream m(summary.output_dir / "manifest.json", std::ios::binary);
        m << manifest.dump(2) << '\n';
        if (!m)
            throw Error("run_scenario", "cannot write manifest.json");
    }
    return summary;
}

const std::map<std::string, ScenarioKind>& kind_names()
{
    static const std::map<std::string, ScenarioKind> names = {
        {"pathloss", ScenarioKind::Pathloss}, {"pattern", ScenarioKind::Pattern},
        {"coverage", ScenarioKind::Coverage}, {"train", ScenarioKind::Train},
        {"squint", ScenarioKind::Squint},     {"irs-train", ScenarioKind::IrsTrain},
        {"irs-opt", ScenarioKind::IrsOpt},
    };
    return names;
}

} // namespace

ScenarioKind parse_scenario_kind(const std::string& name)
{
    const auto it = kind_names().find(name);
    if (it == kind_names().end())
        throw DomainError("parse_scenario_kind", "unknown scenario kind '" + name + "'");
    return it->second;
}

std::string to_string(ScenarioKind kind)
{
    for (const auto& [name, k] : kind_names())
        if (k == kind)
            return name;
    return "unknown";
}

bool is_stochastic(ScenarioKind kind)
{
    return kind == ScenarioKind::Train || kind == ScenarioKind::IrsTrain || kind == ScenarioKind::IrsOpt;
}

ScenarioSummary validate_scenario(const fs::path& config, const std::optional<fs::path>& output_override)
{
    return execute(config, output_override, false);
}

ScenarioSummary run_scenario(const fs::path& config, const std::optional<fs::path>& output_override)
{
    return execute(config, output_override, true);
}

std::vector<CostRow> compare_costs(const std::vector<TrainingMethod>& methods, const std::vector<int>& n_values,
                                   int m_ary, int n_rf)
{
    std::vector<CostRow> rows;
    std::mt19937_64 rng(0);
    for (int n : n_values) {
        const Codebook book = steering_codebook(n, n);
        const CMatrix h =
            los_channel(1.0, steering_vector_sine(n, steering_sine(n, n / 3)), steering_vector_sine(n, steering_sine(n, 0)))
                .narrowband();
        for (TrainingMethod t : methods) {
            const long long predicted = predict_cost(t, n, m_ary, n_rf);
            TrainingOutcome o;
            switch (t) {
            case TrainingMethod::Exhaustive:
                o = exhaustive_train(h, book, book, 0.0, rng);
                break;
            case TrainingMethod::OneSided:
                o = one_sided_train(h, book, book, Side::Receiver, 0.0, rng);
                break;
            case TrainingMethod::Parallel:
                o = parallel_train(h, book, book, n_rf, 0.0, rng);
                break;
            case TrainingMethod::TreeOne:
            case TrainingMethod::TreeBoth: {
                const HierarchicalCodebook tree(m_ary, tree_depth(n, m_ary), n);
                o = t == TrainingMethod::TreeOne ? tree_train_one_side(h, tree, tree, 0.0, rng)
                                                 : tree_train_both_side(h, tree, tree, 0.0, rng);
                break;
            }
            }
            rows.push_back({t, n, predicted, o.tests_used});
        }
    }
    return rows;
}

void write_cost_table(std::ostream& out, const std::vector<CostRow>& rows)
{
    CsvWriter csv(out, {"method", "N", "predicted", "measured"});
    for (const auto& r : rows) {
        csv.cell(to_string(r.method)).cell(r.n_beams).cell(r.predicted).cell(r.measured);
        csv.end_row();
    }
}

std::string fnv1a64_hex(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace thzbf
