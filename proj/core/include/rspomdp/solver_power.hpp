#pragma once

#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

struct PowerValueResult {
    double value;
    int action; // -1 when n == 0
};

/// n-step value of the power-utility fast path. The discount weight is
/// eliminated from the state: the measure carries costs rescaled to the
/// current stage, psi_p_update renormalizes them each step, and the factor
/// beta^gamma reinstates the discounting. Terminal: E[s^gamma] / gamma.
/// d satisfies value(m, n, {x, mu, z}) = z^gamma * d_value(m, n, x,
/// rescale_s(mu, 1/z)).
PowerValueResult d_value(const ModelSpec& m, int n, int x, const JointMeasure& mu);

/// Optimal N-step value from x0 via the reduced recursion; requires a power
/// utility. The initial measure puts all cost mass at `initial_cost`; with
/// gamma < 0 the terminal s^gamma is undefined at 0, so a strictly positive
/// offset must be supplied in that case.
SolveResult solve_finite_power(const ModelSpec& m, int N, int x0, double initial_cost = 0.0);

} // namespace rspomdp
