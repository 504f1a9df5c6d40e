#include "rspomdp/solver_finite.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace rspomdp {

std::unique_ptr<PolicyNode> PolicyNode::clone() const {
    auto out = std::make_unique<PolicyNode>();
    out->action = action;
    for (const auto& [xp, child] : children) {
        out->children.emplace(xp, child ? child->clone() : nullptr);
    }
    return out;
}

PolicyTree PolicyTree::clone() const {
    PolicyTree out;
    out.x0 = x0;
    out.horizon = horizon;
    out.root = root ? root->clone() : nullptr;
    return out;
}

namespace {

struct NodeEval {
    double value;
    int action;
    std::unique_ptr<PolicyNode> node;
};

/// One backward-recursion step: minimize over admissible actions the
/// predictive-probability-weighted value of the filtered successors.
NodeEval eval_node(const ModelSpec& m, int n, const AugmentedState& st, const TerminalFn& terminal,
                   bool build_tree) {
    if (n <= 0) {
        return {terminal(st), -1, build_tree ? std::make_unique<PolicyNode>() : nullptr};
    }

    const int nx = m.num_x();
    const int ny = m.num_y();
    BeliefY nu = marginal_y(st.mu, ny);

    double best = std::numeric_limits<double>::infinity();
    int best_action = -1;
    std::map<int, std::unique_ptr<PolicyNode>> best_children;

    for (int a : m.admissible[static_cast<std::size_t>(st.x)]) {
        double va = 0.0;
        std::map<int, std::unique_ptr<PolicyNode>> children;
        for (int xp = 0; xp < nx; ++xp) {
            double mass = 0.0;
            for (int y = 0; y < ny; ++y) {
                if (nu[y] > 0.0) mass += nu[y] * m.qx(st.x, y, a, xp);
            }
            if (mass < kMassPrune) continue;
            AugmentedState next{xp, psi_update(m, st.x, a, xp, st.mu, st.z), m.beta * st.z};
            NodeEval sub = eval_node(m, n - 1, next, terminal, build_tree);
            va += mass * sub.value;
            if (build_tree) children.emplace(xp, std::move(sub.node));
        }
        if (va < best) {
            best = va;
            best_action = a;
            best_children = std::move(children);
        }
    }

    std::unique_ptr<PolicyNode> node;
    if (build_tree) {
        node = std::make_unique<PolicyNode>();
        node->action = best_action;
        node->children = std::move(best_children);
    }
    return {best, best_action, std::move(node)};
}

TerminalFn expected_utility_terminal(const ModelSpec& m) {
    return [&m](const AugmentedState& st) { return expected_utility(st.mu, m.utility); };
}

double run_policy(const ModelSpec& m, const PolicyNode* node, int n, const AugmentedState& st) {
    if (n <= 0) return expected_utility(st.mu, m.utility);
    if (node == nullptr || node->action < 0) {
        std::ostringstream os;
        os << "policy has no action for a reachable node " << n << " steps before the horizon";
        throw PolicyIncomplete(os.str());
    }
    const int a = node->action;
    m.require_admissible(st.x, a);

    const int nx = m.num_x();
    const int ny = m.num_y();
    BeliefY nu = marginal_y(st.mu, ny);

    double v = 0.0;
    for (int xp = 0; xp < nx; ++xp) {
        double mass = 0.0;
        for (int y = 0; y < ny; ++y) {
            if (nu[y] > 0.0) mass += nu[y] * m.qx(st.x, y, a, xp);
        }
        if (mass < kMassPrune) continue;
        auto it = node->children.find(xp);
        if (it == node->children.end()) {
            std::ostringstream os;
            os << "policy is missing the successor branch x'=" << xp << " reached with probability "
               << mass;
            throw PolicyIncomplete(os.str());
        }
        AugmentedState next{xp, psi_update(m, st.x, a, xp, st.mu, st.z), m.beta * st.z};
        v += mass * run_policy(m, it->second.get(), n - 1, next);
    }
    return v;
}

} // namespace

ValueResult value(const ModelSpec& m, int n, const AugmentedState& state) {
    return value_with_terminal(m, n, state, expected_utility_terminal(m));
}

ValueResult value_with_terminal(const ModelSpec& m, int n, const AugmentedState& state,
                                const TerminalFn& terminal) {
    if (n < 0) throw DomainError("horizon must be nonnegative");
    NodeEval r = eval_node(m, n, state, terminal, false);
    return {r.value, r.action};
}

std::pair<double, PolicyTree> solve_with_terminal(const ModelSpec& m, int n,
                                                  const AugmentedState& state,
                                                  const TerminalFn& terminal) {
    if (n < 0) throw DomainError("horizon must be nonnegative");
    NodeEval r = eval_node(m, n, state, terminal, true);
    PolicyTree tree;
    tree.x0 = state.x;
    tree.horizon = n;
    tree.root = std::move(r.node);
    return {r.value, std::move(tree)};
}

SolveResult solve_finite(const ModelSpec& m, int N, int x0) {
    if (N < 1) throw DomainError("horizon must be >= 1");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");

    AugmentedState root{x0, JointMeasure::product_prior(m.q0), 1.0};
    auto [v, tree] = solve_with_terminal(m, N, root, expected_utility_terminal(m));

    SolveResult result;
    result.horizon = N;
    result.roots.push_back({x0, v, m.utility.inverse(v), std::move(tree)});
    return result;
}

SolveResult solve_finite_all(const ModelSpec& m, int N) {
    SolveResult result;
    result.horizon = N;
    for (int x0 = 0; x0 < m.num_x(); ++x0) {
        SolveResult one = solve_finite(m, N, x0);
        result.roots.push_back(std::move(one.roots.front()));
    }
    return result;
}

double cost_iteration(const ModelSpec& m, const PolicyTree& policy, int n,
                      const AugmentedState& state) {
    if (n < 0) throw DomainError("horizon must be nonnegative");
    return run_policy(m, policy.root.get(), n, state);
}

} // namespace rspomdp
