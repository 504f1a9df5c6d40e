#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "rspomdp/filter.hpp"
#include "rspomdp/measure.hpp"
#include "rspomdp/model.hpp"

namespace rspomdp {

/// Successor branches with predictive probability below this are pruned from
/// the backward recursion.
inline constexpr double kMassPrune = 1e-14;

/// State of the embedded fully observable problem: observable component x,
/// joint measure over (hidden state, accumulated cost), and the discount
/// weight z that applies to the next cost increment.
struct AugmentedState {
    int x;
    JointMeasure mu;
    double z = 1.0;
};

/// Decision tree over observable successors. A node fixes the action taken
/// now; children are keyed by the next observable state and cover every
/// successor the solver did not prune. Leaves (horizon exhausted) carry
/// action -1 and no children.
struct PolicyNode {
    int action = -1;
    std::map<int, std::unique_ptr<PolicyNode>> children;

    std::unique_ptr<PolicyNode> clone() const;
};

struct PolicyTree {
    int x0 = 0;
    int horizon = 0;
    std::unique_ptr<PolicyNode> root;

    PolicyTree clone() const;
};

struct ValueResult {
    double value;
    int action; // argmin at the queried state; -1 when n == 0
};

/// Terminal payoff of the backward recursion, evaluated at horizon 0.
using TerminalFn = std::function<double(const AugmentedState&)>;

/// n-step value at an arbitrary state with the standard terminal E[U(s)].
/// Actions are minimized in declaration order (ties keep the lowest index),
/// successors are summed in declaration order of x'.
ValueResult value(const ModelSpec& m, int n, const AugmentedState& state);

/// Same recursion with a caller-supplied terminal; this is how the
/// infinite-horizon bounds reuse the finite-horizon machinery.
ValueResult value_with_terminal(const ModelSpec& m, int n, const AugmentedState& state,
                                const TerminalFn& terminal);

/// Value plus the full decision tree over reachable successors.
std::pair<double, PolicyTree> solve_with_terminal(const ModelSpec& m, int n,
                                                  const AugmentedState& state,
                                                  const TerminalFn& terminal);

struct RootSolution {
    int x0;
    double value;
    double certainty_equivalent;
    PolicyTree policy;
};

struct SolveResult {
    int horizon = 0;
    std::vector<RootSolution> roots;
};

/// Optimal N-step value from initial observable state x0 with the hidden
/// prior q0 and zero accumulated cost.
SolveResult solve_finite(const ModelSpec& m, int N, int x0);

/// solve_finite for every initial observable state.
SolveResult solve_finite_all(const ModelSpec& m, int N);

/// Value of a fixed decision tree, by the same recursion with the minimum
/// replaced by the tree's action choices. The tree must cover every
/// reachable successor to depth n.
double cost_iteration(const ModelSpec& m, const PolicyTree& policy, int n,
                      const AugmentedState& state);

} // namespace rspomdp
