#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fbreak/harness.hpp"

namespace fbreak {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Mode { Test, Simulate, Reproduce };

std::string_view to_string(Mode m) noexcept;
Mode mode_from_string(std::string_view name);

// Parsed and merged settings: defaults < JSON config < command-line flags < FB_SEED.
struct CliConfig {
    Mode mode = Mode::Test;
    std::optional<std::filesystem::path> input_path;
    std::optional<std::filesystem::path> config_path;
    std::filesystem::path output_dir = ".";
    std::optional<std::string> preset;

    Scheme scheme = Scheme::Fixed;
    LossFunction loss = LossFunction::quadratic();
    std::vector<StatisticChoice> statistics;  // empty = Qmax with nuL
    VarianceKind variance = VarianceKind::NuL;
    std::vector<double> alphas{0.05};
    std::optional<std::size_t> in_sample;    // test mode default T/2
    std::size_t horizon = 1;
    BlockRule block_rule;
    std::size_t replications = 5000;
    std::uint64_t seed = 20240601;
    std::size_t threads = 0;

    // simulate mode
    Family family = Family::S1;
    std::size_t total_obs = 200;
    double delta = 0.0;
    std::vector<double> grid;
    double lambda0 = 0.5;
    std::optional<std::size_t> duration;
    std::size_t switch_period = 30;

    std::vector<StatisticChoice> resolved_statistics() const;
    void validate() const;
};

// "Qmax", "tstat", "MQmax[nu2]" or "MQmax:nu2"
StatisticChoice parse_statistic(std::string_view text, VarianceKind default_variance);

// Merges a JSON object of settings (keys are the long flag names) into cfg.
void apply_settings(CliConfig& cfg, std::string_view json_text);

struct DataSet {
    std::vector<std::string> columns;
    SimulatedPath path;
};

// Header row naming y and x1..xq; '#' lines and blank lines are skipped.
DataSet parse_csv(std::string_view text);
DataSet read_csv(const std::filesystem::path& path);

struct TestRun {
    SampleDesign design;
    BlockPartition partition;
    std::vector<TestReport> reports;
    bool any_reject = false;
};

TestRun run_data_test(const DataSet& data, const CliConfig& cfg);
std::string test_report_json(const TestRun& run, const CliConfig& cfg);
void print_test_report(std::ostream& os, const TestRun& run);

ExperimentSpec experiment_from_config(const CliConfig& cfg);

struct Preset {
    std::string name;
    std::string description;
    std::vector<ExperimentSpec> runs;
    bool curve = false;  // figure presets: long format is the primary output
};

std::vector<std::string> preset_names();
Preset make_preset(std::string_view name, std::size_t replications, std::uint64_t seed,
                   std::size_t threads);

struct PresetOutput {
    std::string table_csv;  // wide table (tables) or long format (figures)
    std::string long_csv;
    std::string manifest_json;
    double runtime_seconds = 0.0;
};

PresetOutput run_preset(const Preset& preset);

// Writes <name>.csv, <name>_long.csv and <name>_manifest.json; returns the table path.
std::filesystem::path cmd_reproduce(std::string_view preset, const std::filesystem::path& out_dir,
                                    std::size_t replications, std::uint64_t seed,
                                    std::size_t threads);

// Full command-line entry point. Returns 0/1 (test mode rejection) or 2 on error.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace fbreak
