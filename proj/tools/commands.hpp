#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "hetdisc/solver.hpp"
#include "run_config.hpp"

namespace hetdisc::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // ran, but a certificate did not hold or the solver failed
inline constexpr int kExitConfig = 2;  // unreadable or invalid configuration

struct CommandOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::uint64_t seed = 0;
};

int cmd_solve(const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const CommandOptions& opts, std::ostream& out);
int cmd_axioms(const CommandOptions& opts, std::ostream& out);
int cmd_compare(const CommandOptions& opts, std::ostream& out);
int cmd_oracle(const CommandOptions& opts, std::ostream& out);

// Header t,k,x,beta,beta_hat,mu,mu_hat,euler_resid,share_1..share_n,theta_1..theta_n;
// numbers in %.16e.
std::string trajectory_csv(const TrajectoryRecord& traj);

}  // namespace hetdisc::cli
