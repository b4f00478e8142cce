#include "thzbf/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "thzbf/constants.hpp"
#include "thzbf/errors.hpp"

namespace thzbf {

namespace {

void require_positive(const char* op, const char* what, double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(op, std::string(what) + " must be positive and finite");
}

} // namespace

Medium::Medium(double temperature_k, double pressure_atm, std::vector<AbsorptionPoint> table)
    : temperature_(temperature_k), pressure_(pressure_atm), table_(std::move(table))
{
    require_positive("Medium", "temperature", temperature_);
    require_positive("Medium", "pressure", pressure_);
    if (table_.empty())
        throw DomainError("Medium", "absorption table is empty");
    for (std::size_t i = 0; i < table_.size(); ++i) {
        const double f = table_[i].frequency_hz;
        if (!(f > 0.0) || f > 10e12)
            throw DomainError("Medium", "table frequency outside (0, 10 THz]");
        if (!std::isfinite(table_[i].k_db))
            throw DomainError("Medium", "table k_db is not finite");
        if (i > 0 && !(f > table_[i - 1].frequency_hz))
            throw DomainError("Medium", "table frequencies must be strictly increasing");
    }
}

Medium Medium::standard()
{
    return Medium(296.0, 1.0,
                  {{0.14e12, -42.2},
                   {0.26e12, -38.5},
                   {0.35e12, -27.8},
                   {0.41e12, -22.4},
                   {0.67e12, -18.5},
                   {0.85e12, -20.9}});
}

Medium Medium::from_file(const std::filesystem::path& path, double temperature_k, double pressure_atm)
{
    std::ifstream in(path);
    if (!in)
        throw DomainError("Medium::from_file", "cannot open " + path.string());
    std::vector<AbsorptionPoint> table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        AbsorptionPoint p{};
        if (!(ss >> p.frequency_hz >> p.k_db))
            throw DomainError("Medium::from_file",
                              path.string() + ":" + std::to_string(lineno) + ": expected `frequency_hz, k_db`");
        table.push_back(p);
    }
    return Medium(temperature_k, pressure_atm, std::move(table));
}

double Medium::absorption_db(double frequency_hz) const
{
    if (!(frequency_hz >= min_frequency() && frequency_hz <= max_frequency()))
        throw RangeError("absorption_coefficient", "frequency outside absorption table hull");
    auto it = std::lower_bound(table_.begin(), table_.end(), frequency_hz,
                               [](const AbsorptionPoint& p, double f) { return p.frequency_hz < f; });
    if (it->frequency_hz == frequency_hz)
        return it->k_db;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (frequency_hz - lo.frequency_hz) / (hi.frequency_hz - lo.frequency_hz);
    return lo.k_db + t * (hi.k_db - lo.k_db);
}

double spreading_loss(double frequency_hz, double distance_m)
{
    require_positive("spreading_loss", "frequency", frequency_hz);
    require_positive("spreading_loss", "distance", distance_m);
    const double r = 4.0 * kPi * frequency_hz * distance_m / kSpeedOfLight;
    return r * r;
}

double absorption_coefficient(const Medium& medium, double frequency_hz)
{
    return from_db(medium.absorption_db(frequency_hz));
}

double absorption_loss(const Medium& medium, double frequency_hz, double distance_m)
{
    require_positive("absorption_loss", "distance", distance_m);
    return std::exp(absorption_coefficient(medium, frequency_hz) * distance_m);
}

double path_gain(const Medium& medium, const PathGeometry& g)
{
    require_positive("path_gain", "gamma_cluster", g.gamma_cluster_s);
    require_positive("path_gain", "gamma_ray", g.gamma_ray_s);
    if (g.cluster_arrival_s < 0.0 || g.ray_arrival_s < 0.0)
        throw DomainError("path_gain", "arrival times must be non-negative");
    const double loss = spreading_loss(g.frequency_hz, g.distance_m) *
                        absorption_loss(medium, g.frequency_hz, g.distance_m);
    return std::exp(-g.cluster_arrival_s / g.gamma_cluster_s) * std::exp(-g.ray_arrival_s / g.gamma_ray_s) / loss;
}

double background_noise_psd(double frequency_hz, double temperature_k)
{
    require_positive("background_noise_psd", "frequency", frequency_hz);
    require_positive("background_noise_psd", "temperature", temperature_k);
    const double hf = kPlanck * frequency_hz;
    return hf / std::expm1(hf / (kBoltzmann * temperature_k));
}

double reradiation_noise_psd(double st, const Medium& medium, double frequency_hz, double distance_m)
{
    if (!(st >= 0.0))
        throw DomainError("reradiation_noise_psd", "transmit PSD must be non-negative");
    // 1 - 1/L_abs = 1 - e^{-kd}
    const double k = absorption_coefficient(medium, frequency_hz);
    return st / spreading_loss(frequency_hz, distance_m) * -std::expm1(-k * distance_m);
}

double total_noise_psd(double background, std::span<const ReradiationTerm> terms)
{
    double total = background;
    for (const auto& t : terms) {
        if (!(t.eta >= 0.0 && t.eta <= 1.0))
            throw DomainError("total_noise_psd", "eta must lie in [0, 1]");
        total += t.eta * t.psd;
    }
    return total;
}

} // namespace thzbf
