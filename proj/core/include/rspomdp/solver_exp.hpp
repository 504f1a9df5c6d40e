#pragma once

#include <functional>

#include "rspomdp/solver_finite.hpp"

namespace rspomdp {

/// State of the exponential-utility fast path. Only the cost-reweighted
/// hidden-state belief and the scalar zeta = gamma * z are needed; the
/// accumulated-cost coordinate factors out of the recursion entirely.
struct ExpState {
    int x;
    BeliefY nu;
    double zeta;
};

using ExpTerminalFn = std::function<double(const ExpState&)>;

struct ExpValueResult {
    double value;
    int action; // -1 when n == 0
};

/// n-step value of the reduced recursion: terminal 1/gamma, transition
/// weights qhat_x (unnormalized), beliefs advanced by psi_e_update and zeta
/// shrunk by beta each step. With memoize set, nodes are cached keyed by
/// (n, x, belief quantized at 1e-10 per entry, zeta); memoized and plain
/// evaluation agree because cache hits replay identical subcomputations.
ExpValueResult e_value(const ModelSpec& m, int n, const ExpState& state, bool memoize = true);

ExpValueResult e_value_with_terminal(const ModelSpec& m, int n, const ExpState& state,
                                     const ExpTerminalFn& terminal);

/// Value plus decision tree over reachable successors of the reduced
/// recursion.
std::pair<double, PolicyTree> solve_exp_tree(const ModelSpec& m, int n, const ExpState& state,
                                             const ExpTerminalFn& terminal);

/// Optimal N-step value from x0 via the reduced recursion. Requires an
/// exponential utility; the result matches the general solver exactly, at a
/// cost per node that does not grow with the support of the cost
/// distribution. Refuses upfront (OverflowError) when exp(|gamma| * max
/// accumulated cost) cannot be represented.
SolveResult solve_finite_exp(const ModelSpec& m, int N, int x0);

} // namespace rspomdp
