#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace thzbf {

struct AbsorptionPoint
{
    double frequency_hz;
    double k_db; // 10 log10(k * 1 m), k in 1/m
};

/// Atmosphere through which a THz link propagates.
///
/// The absorption table holds the total molecular absorption coefficient at
/// a set of frequencies. Values between nodes are interpolated linearly in dB
/// (log-linear in k); frequencies outside the table are rejected rather than
/// extrapolated because k(f) jumps at absorption lines.
class Medium
{
public:
    Medium(double temperature_k, double pressure_atm, std::vector<AbsorptionPoint> table);

    // 296 K, 1 atm, with the six low-absorption window centers between
    // 0.14 and 0.85 THz.
    static Medium standard();

    // Two-column text file `frequency_hz, k_db`; `#` starts a comment line.
    static Medium from_file(const std::filesystem::path& path, double temperature_k = 296.0,
                            double pressure_atm = 1.0);

    double temperature() const { return temperature_; }
    double pressure() const { return pressure_; }
    std::span<const AbsorptionPoint> table() const { return table_; }

    double min_frequency() const { return table_.front().frequency_hz; }
    double max_frequency() const { return table_.back().frequency_hz; }

    // k(f) in dB, interpolated.
    double absorption_db(double frequency_hz) const;

private:
    double temperature_;
    double pressure_;
    std::vector<AbsorptionPoint> table_;
};

struct PathGeometry
{
    double frequency_hz;
    double distance_m;
    double cluster_arrival_s = 0.0; // T_i
    double ray_arrival_s = 0.0;     // T_ij
    double gamma_cluster_s = 1.0;   // cluster decay constant
    double gamma_ray_s = 1.0;       // ray decay constant
};

// Friis spreading loss (4 pi f d / c)^2.
double spreading_loss(double frequency_hz, double distance_m);

// Total absorption coefficient k(f) in 1/m.
double absorption_coefficient(const Medium& medium, double frequency_hz);

// Molecular absorption loss e^{k(f) d}.
double absorption_loss(const Medium& medium, double frequency_hz, double distance_m);

// Linear path gain of one ray including cluster/ray decay.
double path_gain(const Medium& medium, const PathGeometry& geom);

// Planck background noise PSD in W/Hz.
double background_noise_psd(double frequency_hz, double temperature_k);

// Re-radiated absorption noise PSD for transmit PSD `st`.
double reradiation_noise_psd(double st, const Medium& medium, double frequency_hz, double distance_m);

struct ReradiationTerm
{
    double psd;
    double eta; // fraction captured by the receiver, in [0, 1]
};

double total_noise_psd(double background, std::span<const ReradiationTerm> terms);

} // namespace thzbf
