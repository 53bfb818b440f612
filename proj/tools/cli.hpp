#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace nlab::cli {

inline constexpr const char *kToolName = "nonlocality-lab";
inline constexpr const char *kVersion = "1.0.0";

enum class Command { Hardy, HardyOptimize, Sensitivity, ChainVerify, Prop2Check, Ghsz, LhvClosure };
enum class Format { Json, Csv };

struct RunConfig {
    Command command = Command::Hardy;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::optional<std::string> input_path;
    std::optional<std::string> output_path;
    Format format = Format::Json;

    // command-specific knobs
    std::size_t k = 1;
    std::size_t trials = 200;
    int starts = 32;
    double lambda = 0.8;
    double theta = 1.0;
    double phi = 0.0;
    double eps_min = 1e-4;
    double eps_max = 1e-2;
    std::size_t points = 9;
    std::size_t target = 0;
};

const char *command_name(Command c);
std::optional<Command> parse_command(const std::string &name);

/// Executes one command. Results go to config.output_path when set, else
/// to `out`; diagnostics go to `err`. Returns 0 on success, 2 on invalid
/// input or configuration, 1 on internal failure.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Parses argv into a config and runs it. Exit codes as for run().
int main_entry(int argc, char **argv);

} // namespace nlab::cli
