#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

/// SplitMix64 mixing step, the documented stream-splitting rule of the
/// simulator: trajectory i uses an mt19937_64 engine seeded with
/// splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15).
std::uint64_t splitmix64(std::uint64_t z);

struct EnumerateResult {
    double value;
    double probability_mass; // total path probability walked, 1 up to rounding
};

/// Exact policy value by exhaustive summation over all hidden and observed
/// paths: sum of path probability times U(total discounted cost). The cost
/// of the final transition's target state is not incurred (N steps pay N
/// stage costs). Branches whose path probability cannot reach 1e-12 are
/// allowed to be absent from the policy; any heavier reachable branch
/// without an action raises PolicyIncomplete.
EnumerateResult enumerate_value_detail(const ModelSpec& m, const PolicyTree& policy, int N,
                                       int x0);

double enumerate_value(const ModelSpec& m, const PolicyTree& policy, int N, int x0);

struct EnumerateOptimalResult {
    double value;
    /// Best achievable value when the root is pinned to each admissible
    /// action, in admissibility order.
    std::vector<std::pair<int, double>> by_root_action;
};

/// Brute-force optimum over every deterministic policy on the observation
/// tree (one action per reachable observed history). Independent of the
/// solver recursions by construction; refuses via TooLarge when more than
/// 10^7 policies would have to be swept.
EnumerateOptimalResult enumerate_optimal_detail(const ModelSpec& m, int N, int x0);

double enumerate_optimal(const ModelSpec& m, int N, int x0);

struct MonteCarloResult {
    double mean;
    double ci_halfwidth; // 95% normal interval, 0 when samples < 2
    long long samples;
    std::uint64_t seed;
};

/// Seeded Monte-Carlo estimate of the policy value: samples hidden paths,
/// follows the policy along the observed component, averages U(total
/// discounted cost). Bit-reproducible for a fixed (seed, samples) pair;
/// trajectories draw from independent per-index streams, so the estimate
/// does not depend on evaluation order.
MonteCarloResult monte_carlo(const ModelSpec& m, const PolicyTree& policy, int N, int x0,
                             long long samples, std::uint64_t seed);

} // namespace rspomdp
