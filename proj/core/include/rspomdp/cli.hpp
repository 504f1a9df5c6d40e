#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rspomdp {

/// Parsed command line, ready to execute. The front end (or a test) fills
/// this in; run() performs loading, validation, solving and output.
struct RunConfig {
    std::string command;     // validate | solve | solve-inf | filter | house | simulate
    std::string model_path;
    int horizon = -1;        // --horizon (--n for simulate)
    double eps = 1e-4;       // --eps, solve-inf bracket tolerance
    bool fast_exp = false;   // --fast-exp, exponential-utility reduction
    bool fast_power = false; // --fast-power, power-utility reduction
    bool total_cost = false; // --total-cost, undiscounted total-cost semantics
    std::string x0;          // state label or index; offer value for `house`
    std::uint64_t seed = 1;
    long long samples = 10000;
    std::string obs;         // filter history, "action,x;action,x;..."
    std::string policy_path; // simulate input
    std::string output = "-"; // destination path, '-' for stdout
    std::string format;      // json | csv (house defaults to csv, others json)
};

/// Executes the configured command. Results go to `out` (or the --output
/// file), structured errors as one JSON line {"error", "message"} to `err`.
/// Returns 0 on success, 2 when the input, its validation, or the flag
/// combination is bad, 3 when the solver itself fails.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace rspomdp
