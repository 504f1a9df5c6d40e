#pragma once

#include <vector>

#include "rspomdp/measure.hpp"
#include "rspomdp/model.hpp"

namespace rspomdp {

/// Predictive masses at or below this are treated as unreachable
/// observations; the update operators refuse to condition on them.
inline constexpr double kDenominatorFloor = 1e-300;

/// Joint filter update. Given the measure mu over (hidden state, accumulated
/// cost) before the transition, the action a taken in observable state x, the
/// observed successor xp, and the discount weight z applied to this step's
/// cost, returns the posterior measure: every atom (y, s, w) spawns atoms
///   (y', s + z * c(x, y, a), w * q(xp, y' | x, y, a) / denom)
/// where denom is the predictive probability of observing xp. Throws
/// UnreachableObservation when that probability vanishes.
JointMeasure psi_update(const ModelSpec& m, int x, int a, int xp, const JointMeasure& mu, double z);

/// Classical Bayes update of the hidden-state belief alone (no cost
/// bookkeeping). Coincides with the y-marginal of psi_update whenever the
/// cost does not depend on the hidden state.
BeliefY phi_update(const ModelSpec& m, int x, int a, int xp, const BeliefY& nu);

/// Cost-reweighted Bayes update used by the exponential-utility fast path.
/// zeta plays the role of gamma * z:
///   nu'(y') proportional to sum_y exp(zeta * c(x, y, a)) q(xp, y' | x, y, a) nu(y).
BeliefY psi_e_update(const ModelSpec& m, int x, int a, int xp, const BeliefY& nu, double zeta);

/// Unnormalized successor weights of the exponential-utility recursion:
///   out[x'] = sum_y exp(zeta * c(x, y, a)) qx(x' | x, y, a) nu(y).
/// These are not probabilities; their total exceeds 1 for zeta > 0.
std::vector<double> qhat_x(const ModelSpec& m, int x, const BeliefY& nu, int a, double zeta);

/// Update of the power-utility fast path: Bayes reweighting as in psi_update
/// with unit cost weight, but with the cost coordinate renormalized for the
/// next stage, s -> (s + c(x, y, a)) / beta.
JointMeasure psi_p_update(const ModelSpec& m, int x, int a, int xp, const JointMeasure& mu);

struct ObservationStep {
    int action;
    int next_x;
};

/// A realized observable history together with the filter measures along it.
/// xs has one more entry than actions; measures[n] conditions on the first n
/// steps.
struct FilterTrace {
    std::vector<int> xs;
    std::vector<int> actions;
    std::vector<JointMeasure> measures;
};

/// Runs the joint filter along an observed history starting from the prior
/// at x0. Step n uses cost weight beta^n. An unreachable observation is
/// reported with the step index at which it occurred.
FilterTrace filter_trace(const ModelSpec& m, int x0, const std::vector<ObservationStep>& obs);

} // namespace rspomdp
