#include "rspomdp/solver_power.hpp"

#include <cmath>
#include <limits>

#include "rspomdp/filter.hpp"

namespace rspomdp {

namespace {

void require_power(const ModelSpec& m) {
    if (m.utility.kind() != UtilityKind::Power) {
        throw WrongUtility("power fast path requires a power utility, got " + m.utility.describe());
    }
}

struct PowerEval {
    double value;
    int action;
    std::unique_ptr<PolicyNode> node;
};

/// Reduced backward recursion. The discount enters only through the constant
/// factor beta^gamma per stage; the successor measure is renormalized by
/// psi_p_update so the stage weight stays 1.
PowerEval eval_power_node(const ModelSpec& m, int n, int x, const JointMeasure& mu,
                          double beta_pow_gamma, bool build_tree) {
    if (n <= 0) {
        return {expected_utility(mu, m.utility), -1,
                build_tree ? std::make_unique<PolicyNode>() : nullptr};
    }

    const int nx = m.num_x();
    const int ny = m.num_y();
    BeliefY nu = marginal_y(mu, ny);

    double best = std::numeric_limits<double>::infinity();
    int best_action = -1;
    std::map<int, std::unique_ptr<PolicyNode>> best_children;

    for (int a : m.admissible[static_cast<std::size_t>(x)]) {
        double va = 0.0;
        std::map<int, std::unique_ptr<PolicyNode>> children;
        for (int xp = 0; xp < nx; ++xp) {
            double mass = 0.0;
            for (int y = 0; y < ny; ++y) {
                if (nu[y] > 0.0) mass += nu[y] * m.qx(x, y, a, xp);
            }
            if (mass < kMassPrune) continue;
            JointMeasure next = psi_p_update(m, x, a, xp, mu);
            PowerEval sub = eval_power_node(m, n - 1, xp, next, beta_pow_gamma, build_tree);
            va += mass * sub.value;
            if (build_tree) children.emplace(xp, std::move(sub.node));
        }
        va *= beta_pow_gamma;
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

} // namespace

PowerValueResult d_value(const ModelSpec& m, int n, int x, const JointMeasure& mu) {
    require_power(m);
    if (n < 0) throw DomainError("horizon must be nonnegative");
    const double beta_pow_gamma = std::pow(m.beta, m.utility.gamma());
    PowerEval r = eval_power_node(m, n, x, mu, beta_pow_gamma, false);
    return {r.value, r.action};
}

SolveResult solve_finite_power(const ModelSpec& m, int N, int x0, double initial_cost) {
    require_power(m);
    if (N < 1) throw DomainError("horizon must be >= 1");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");
    if (m.utility.gamma() < 0.0 && initial_cost <= 0.0) {
        throw DomainError("power utility with gamma < 0 needs a positive initial cost offset");
    }
    if (initial_cost < 0.0) throw DomainError("initial cost offset must be nonnegative");

    const double beta_pow_gamma = std::pow(m.beta, m.utility.gamma());
    JointMeasure mu0 = JointMeasure::product_prior(m.q0, initial_cost);
    PowerEval r = eval_power_node(m, N, x0, mu0, beta_pow_gamma, true);

    PolicyTree tree;
    tree.x0 = x0;
    tree.horizon = N;
    tree.root = std::move(r.node);

    SolveResult result;
    result.horizon = N;
    result.roots.push_back({x0, r.value, m.utility.inverse(r.value), std::move(tree)});
    return result;
}

} // namespace rspomdp
