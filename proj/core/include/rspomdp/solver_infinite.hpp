#pragma once

#include "rspomdp/solver_exp.hpp"
#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

enum class BoundSide { Lower, Upper };

/// Certified bracket of the infinite-horizon value at the root, obtained by
/// running the finite recursion to depth `horizon` with pessimistic and
/// optimistic terminal functions.
struct InfiniteResult {
    double lower;
    double upper;
    double gap; // upper - lower
    int horizon;
    int root_action;
    PolicyTree policy; // argmin tree of the upper-bound recursion
};

/// Terminal bound on the remaining value: E[U(s + z * c / (1 - beta))] under
/// mu, with c the minimum (Lower) or maximum (Upper) stage cost. Sandwiches
/// the true tail because every continuation accrues between z * cmin / (1 -
/// beta) and z * cmax / (1 - beta) of further discounted cost.
double bound_b(const ModelSpec& m, const JointMeasure& mu, double z, BoundSide side);

/// Width guarantee for the depth-n bracket started from mu at discount
/// weight z. Concave utilities admit the measure-free bound
///   beta^n * z * cmax / (1 - beta) * U'_-(z * cmin),
/// convex ones the measure-dependent
///   beta^n * z * cmax / (1 - beta) * E[U'_+(s + z * cmax / (1 - beta))].
/// The concave branch is used whenever it applies.
double gap_bound(const ModelSpec& m, int n, double z, const JointMeasure& mu);

/// Smallest depth n whose guaranteed bracket width at the prior measure is
/// at most eps. Throws TooLarge past 1000000 steps (beta too close to 1 for
/// the requested tolerance).
int horizon_for_gap(const ModelSpec& m, double eps, double z = 1.0);

/// Infinite-horizon solve: picks the certified depth, evaluates both bounds
/// by the general recursion, and reports the argmin tree of the upper bound
/// as an eps-optimal decision rule. Requires beta < 1 and strictly positive
/// stage costs. At depth 0 no action is compared; the first admissible
/// action at x0 is reported.
InfiniteResult solve_infinite(const ModelSpec& m, int x0, double eps);

/// Same bracket computed through the exponential fast path, with constant
/// terminal bounds U(z * c / (1 - beta)) expressed in the reduced variables.
InfiniteResult solve_infinite_exp(const ModelSpec& m, int x0, double eps);

} // namespace rspomdp
