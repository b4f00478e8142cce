#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thzbf/training.hpp"

namespace thzbf {

inline constexpr const char* kVersion = THZBF_VERSION;

enum class ScenarioKind { Pathloss, Pattern, Coverage, Train, Squint, IrsTrain, IrsOpt };

ScenarioKind parse_scenario_kind(const std::string& name);
std::string to_string(ScenarioKind kind);
// Kinds that draw random numbers and therefore require a seed.
bool is_stochastic(ScenarioKind kind);

struct ScenarioSummary
{
    ScenarioKind kind;
    std::optional<std::uint64_t> seed;
    std::filesystem::path output_dir;
    std::vector<std::string> outputs; // file names relative to output_dir, manifest last
};

// Parses and checks a config without running it. SchemaError carries the
// YAML line of the offending node.
ScenarioSummary validate_scenario(const std::filesystem::path& config,
                                  const std::optional<std::filesystem::path>& output_override = std::nullopt);

// Runs the scenario and writes its CSVs plus manifest.json. The output
// directory defaults to out/<config stem> next to the config file, and an
// override (the CLI passes THZBF_OUTPUT_DIR) wins over the config's own
// `output` key.
ScenarioSummary run_scenario(const std::filesystem::path& config,
                             const std::optional<std::filesystem::path>& output_override = std::nullopt);

struct CostRow
{
    TrainingMethod method;
    int n_beams;
    long long predicted;
    long long measured;
};

// Runs each method on a noiseless on-grid LoS channel and counts its tests.
std::vector<CostRow> compare_costs(const std::vector<TrainingMethod>& methods, const std::vector<int>& n_values,
                                   int m_ary, int n_rf);
// method,N,predicted,measured
void write_cost_table(std::ostream& out, const std::vector<CostRow>& rows);

// 64-bit FNV-1a, lower-case hex, 16 digits.
std::string fnv1a64_hex(const std::string& bytes);

} // namespace thzbf
