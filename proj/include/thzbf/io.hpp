#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thzbf/beamforming.hpp"
#include "thzbf/channel.hpp"
#include "thzbf/irs_training.hpp"
#include "thzbf/training.hpp"
#include "thzbf/wideband.hpp"

namespace thzbf {

// 12 significant digits, the format used by every CSV this library writes.
std::string format_double(double value);

class CsvWriter
{
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(const std::string& value);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

// stage,tx_index,rx_index,power; one row per measurement, omni as -1.
void write_training_trace(std::ostream& out, const TrainingOutcome& outcome);
// phase,slot,irs_codeword,tx_beam,rx_beam,power
void write_irs_trace(std::ostream& out, const IrsTrainingOutcome& outcome);
// f_hz,psi_rad,gain
void write_squint_csv(std::ostream& out, std::span<const SquintSample> samples);

// One codeword per line as re,im pairs.
void write_codebook(std::ostream& out, const Codebook& codebook);
Codebook read_codebook(std::istream& in);
// stage,index followed by re,im pairs.
void write_tree_codebook(std::ostream& out, const HierarchicalCodebook& tree);

// Plain-text channel description: medium reference, carrier, array
// geometries, decay constants and the ray list. Everything needed to
// rebuild the tap matrices.
//
//   medium standard            (or: medium file <path> <T_K> <P_atm>)
//   frequency <hz>
//   tx ula <N> <dx_m>
//   rx urpa <Ny> <Nz> <dy_m> <dz_m>
//   decay <gamma_cluster_s> <gamma_ray_s>
//   ray <cluster> <ray> <aod_az> <aod_el> <aoa_az> <aoa_el> <distance_m> <T_i> <T_ij>
struct ChannelDescription
{
    std::string medium = "standard";
    double temperature_k = 296.0;
    double pressure_atm = 1.0;
    double frequency_hz = 0.3e12;
    std::optional<ArrayGeometry> tx;
    std::optional<ArrayGeometry> rx;
    double gamma_cluster_s = 1e-9;
    double gamma_ray_s = 1e-9;
    std::vector<RaySpec> rays;
};

void write_channel(std::ostream& out, const ChannelDescription& desc);
// SchemaError with the offending line on malformed input.
ChannelDescription read_channel(std::istream& in, const std::string& source = "channel");
ChannelMatrix build_channel(const ChannelDescription& desc);

std::string describe_geometry(const ArrayGeometry& g);
// Parses "ula N dx", "urpa Ny Nz dy dz", "uhpa V dx", "ucpa C r1 .. rC".
ArrayGeometry parse_geometry(const std::vector<std::string>& tokens, double wavelength_m);

} // namespace thzbf
