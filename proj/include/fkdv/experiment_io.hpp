#pragma once

#include "fkdv/diagnostics.hpp"
#include "fkdv/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fkdv {

struct InitialDataSpec {
    std::string kind = "gaussian"; // gaussian | one_sided
    double amplitude = 1.0;
    double width = 3.0;
    double center = 0.0;
    // one_sided extras
    double gamma = 1.3;
    double x_s = -10.0;
    double bump_radius = 6.0;
    double mollify_mu = 0.0; // premollification scale (0 = off)
};

struct OutputSpec {
    std::size_t cadence = 50;
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "jsonl"};
};

struct ExperimentConfig {
    double alpha = 0.75;
    std::uint64_t seed = 12345;
    std::size_t n_points = 2048;
    double half_length = 30.0 * M_PI;
    double dt = 1e-3;
    double t_final = 1.0;
    std::string scheme = "etdrk4";
    bool dealias = true;
    double contamination_threshold = 1e-6;
    InitialDataSpec initial_data;
    int m = 2;
    std::vector<DiagnosticWindow> windows;
    OutputSpec output;

    // Regularity thresholds implied by alpha (derived metadata).
    double s_alpha() const { return 2.0 - alpha / 2.0; }          // data threshold
    double s_of_alpha() const { return 1.5 - 3.0 * alpha / 8.0; } // well-posedness floor

    SolverConfig solver_config() const;
};

/// Parses the sectioned key-value format; reports the first syntax error
/// with its line number (FormatError) and every violated constraint with the
/// rule it breaks (ConfigError).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Lossless serialization: parse(serialize(cfg)) == cfg.
std::string serialize_config(const ExperimentConfig& cfg);

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

/// Output directory with the FKDV_OUTPUT_DIR override applied.
std::filesystem::path resolve_output_dir(const OutputSpec& spec);

// -------------------------------------------------------------- snapshots ---

struct Snapshot {
    std::uint32_t version = 1;
    std::uint64_t n_points = 0;
    double half_length = 0.0;
    double alpha = 0.0;
    double t = 0.0;
    std::uint64_t step_count = 0;
    std::vector<double> values; // little-endian f64 on disk, grid order
};

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

Snapshot make_snapshot(const SolverState& state, double alpha);
SolverState state_from_snapshot(const Snapshot& snap);

// ----------------------------------------------------------------- output ---

/// Column-oriented CSV: first column t, one column per named series.
void write_csv(const std::filesystem::path& path, const std::vector<double>& t,
               const std::vector<std::pair<std::string, std::vector<double>>>& columns);

/// Appends one JSON object per line.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::filesystem::path& path);
    void write_line(const std::string& json_object);

  private:
    std::filesystem::path path_;
};

} // namespace fkdv
