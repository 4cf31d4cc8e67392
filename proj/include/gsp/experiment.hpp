#pragma once

#include "gsp/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gsp {

enum class Mode { Eigen, Linear, Semilinear, System };

struct PotentialSpec {
    std::string type = "power"; // power | exp | table
    double c = 0.0;
    double s = 2.0;
    double r0 = 0.0;
    std::filesystem::path table;
};

struct NonlinearitySpec {
    std::string type = "rational"; // constant | rational | exp_decay
    double value = 1.0;
    double kappa = 1.0;
    double K = 2.0;
    double s = 1.0;
};

struct ExperimentConfig {
    PotentialSpec potential;
    int space_dim = 1;
    double points_per_unit = 200.0;
    double spectral_scale = 20.0;
    double truncation_factor = 4.0;
    std::optional<double> r_max; // explicit grid, bypasses the truncation search
    std::optional<std::size_t> n;
    Mode mode = Mode::Eigen;
    int max_sector = 8;
    double margin = 0.5;
    std::string forcing = "groundstate"; // groundstate | groundstate_plus_second
    double forcing_weight = 0.5;
    std::vector<NonlinearitySpec> nonlinearities;
    double a = 0.0, b = 1.0, c = 1.0, d = 0.0;
    std::vector<double> offsets; // mu - Lambda (or mu - Lambda*), sorted, nonzero
    double damping = 0.5;
    int max_iter = 500;
    double tol_x = 1e-9;
    bool all_solutions = false;
    std::vector<double> solution_offsets;
    std::filesystem::path output_dir = "gsp_out";
    std::uint64_t seed = 42;
    std::string source; // raw text, hashed into the run record
};

/// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOverrides {
    std::optional<double> points_per_unit;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

struct RunOutcome {
    int exit_code = 0;
    std::string message;
    std::size_t rows = 0;
};

/// 0 ok, 2 config error, 3 numerical failure, 4 certificate failure.
int exit_code_for(ErrorKind kind) noexcept;

/// Writes spectrum.json, sweep.csv, solution_<mu>.csv and timing.json.
RunOutcome run_experiment(ExperimentConfig cfg, const RunOverrides& overrides = {});

/// gsp_curve.csv and blowup_curve.csv from a sweep file. Throws MalformedInput.
void write_report(const std::filesystem::path& sweep_csv, const std::filesystem::path& out_dir);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

} // namespace gsp
