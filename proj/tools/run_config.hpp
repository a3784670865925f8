#pragma once

// JSON run configuration for the command-line driver.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetdisc/constweights.hpp"
#include "hetdisc/solver.hpp"

namespace hetdisc::cli {

// Schema violation; what() starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunConfig {
    // agents
    std::vector<double> delta;
    std::vector<double> theta0;
    // preferences
    double gamma = 1.0;
    double eta = 1.0;
    double phi = 0.0;
    // technology
    double A = 1.0;
    double a = 0.36;
    // solver
    std::size_t grid_size = 512;
    double k_min = 1e-3;
    long T = 200;
    TailMode tail_mode = TailMode::DictatorContinuation;
    double tolerance = 1e-10;
    Interpolation interpolation = Interpolation::MonotoneCubic;
    // simulate
    double k0 = 0.1;
    // axioms
    double axioms_b = 3.0;
    long axioms_t_max = 4;
    long axioms_tau_max = 4;
    std::size_t axioms_random_samples = 0;
    // compare
    std::vector<double> theta_bar;  // empty: theta0
    long replan_period = 20;
    std::vector<double> z_upper;    // empty: default bounds

    [[nodiscard]] SolverConfig solver_config(int threads) const;
    [[nodiscard]] ConstWeightConfig const_weight_config(int threads) const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace hetdisc::cli
