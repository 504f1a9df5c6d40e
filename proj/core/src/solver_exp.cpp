#include "rspomdp/solver_exp.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

namespace rspomdp {

namespace {

void require_exponential(const ModelSpec& m) {
    if (m.utility.kind() != UtilityKind::Exponential) {
        throw WrongUtility("this solver requires an exponential utility, got " + m.utility.describe());
    }
}

/// Refuses models whose certainty-equivalent arithmetic would overflow:
/// every exponent met by the recursion is bounded by |gamma| * cmax * H with
/// H the sum of the discount weights over the horizon.
void check_representable(const ModelSpec& m, double horizon_weight_sum) {
    const double gamma = m.utility.gamma();
    const double exponent = std::abs(gamma) * m.max_cost() * horizon_weight_sum;
    static const double kMaxExponent = std::log(std::numeric_limits<double>::max()) - 5.0;
    if (exponent > kMaxExponent) {
        std::ostringstream os;
        os << "exp(" << exponent << ") overflows double precision; rescale gamma toward "
           << gamma * kMaxExponent / exponent << " or shrink the costs";
        throw OverflowError(os.str());
    }
}

struct MemoKey {
    int n;
    int x;
    std::int64_t zeta_bits;
    std::vector<std::int64_t> nu_quantized;

    auto operator<=>(const MemoKey&) const = default;
};

MemoKey make_key(int n, const ExpState& st) {
    MemoKey key;
    key.n = n;
    key.x = st.x;
    key.zeta_bits = std::bit_cast<std::int64_t>(st.zeta);
    key.nu_quantized.reserve(st.nu.p.size());
    for (double v : st.nu.p) key.nu_quantized.push_back(std::llround(v / 1e-10));
    return key;
}

struct ExpEvalContext {
    const ModelSpec& m;
    const ExpTerminalFn& terminal;
    std::map<MemoKey, ExpValueResult>* memo; // nullptr disables caching
    std::mutex* memo_mutex;
};

struct ExpNodeEval {
    double value;
    int action;
    std::unique_ptr<PolicyNode> node;
};

ExpNodeEval eval_exp_node(const ExpEvalContext& ctx, int n, const ExpState& st, bool build_tree) {
    const ModelSpec& m = ctx.m;
    if (n <= 0) {
        return {ctx.terminal(st), -1, build_tree ? std::make_unique<PolicyNode>() : nullptr};
    }

    MemoKey key{};
    if (ctx.memo != nullptr && !build_tree) {
        key = make_key(n, st);
        std::lock_guard<std::mutex> lock(*ctx.memo_mutex);
        auto it = ctx.memo->find(key);
        if (it != ctx.memo->end()) return {it->second.value, it->second.action, nullptr};
    }

    const int nx = m.num_x();
    double best = std::numeric_limits<double>::infinity();
    int best_action = -1;
    std::map<int, std::unique_ptr<PolicyNode>> best_children;

    for (int a : m.admissible[static_cast<std::size_t>(st.x)]) {
        std::vector<double> weights = qhat_x(m, st.x, st.nu, a, st.zeta);
        double va = 0.0;
        std::map<int, std::unique_ptr<PolicyNode>> children;
        for (int xp = 0; xp < nx; ++xp) {
            double w = weights[static_cast<std::size_t>(xp)];
            if (!(w > kDenominatorFloor)) continue;
            ExpState next{xp, psi_e_update(m, st.x, a, xp, st.nu, st.zeta), m.beta * st.zeta};
            ExpNodeEval sub = eval_exp_node(ctx, n - 1, next, build_tree);
            va += w * sub.value;
            if (build_tree) children.emplace(xp, std::move(sub.node));
        }
        if (va < best) {
            best = va;
            best_action = a;
            best_children = std::move(children);
        }
    }

    if (ctx.memo != nullptr && !build_tree) {
        std::lock_guard<std::mutex> lock(*ctx.memo_mutex);
        (*ctx.memo)[key] = {best, best_action};
    }

    std::unique_ptr<PolicyNode> node;
    if (build_tree) {
        node = std::make_unique<PolicyNode>();
        node->action = best_action;
        node->children = std::move(best_children);
    }
    return {best, best_action, std::move(node)};
}

double horizon_weight_sum(const ModelSpec& m, int N) {
    if (m.beta >= 1.0) return static_cast<double>(N);
    double geometric = 1.0 / (1.0 - m.beta);
    return std::min(static_cast<double>(N), geometric);
}

} // namespace

ExpValueResult e_value(const ModelSpec& m, int n, const ExpState& state, bool memoize) {
    require_exponential(m);
    if (n < 0) throw DomainError("horizon must be nonnegative");
    const double gamma = m.utility.gamma();
    ExpTerminalFn terminal = [gamma](const ExpState&) { return 1.0 / gamma; };
    std::map<MemoKey, ExpValueResult> memo;
    std::mutex mutex;
    ExpEvalContext ctx{m, terminal, memoize ? &memo : nullptr, &mutex};
    ExpNodeEval r = eval_exp_node(ctx, n, state, false);
    return {r.value, r.action};
}

ExpValueResult e_value_with_terminal(const ModelSpec& m, int n, const ExpState& state,
                                     const ExpTerminalFn& terminal) {
    require_exponential(m);
    if (n < 0) throw DomainError("horizon must be nonnegative");
    std::map<MemoKey, ExpValueResult> memo;
    std::mutex mutex;
    ExpEvalContext ctx{m, terminal, &memo, &mutex};
    ExpNodeEval r = eval_exp_node(ctx, n, state, false);
    return {r.value, r.action};
}

std::pair<double, PolicyTree> solve_exp_tree(const ModelSpec& m, int n, const ExpState& state,
                                             const ExpTerminalFn& terminal) {
    require_exponential(m);
    if (n < 0) throw DomainError("horizon must be nonnegative");
    ExpEvalContext ctx{m, terminal, nullptr, nullptr};
    ExpNodeEval r = eval_exp_node(ctx, n, state, true);
    PolicyTree tree;
    tree.x0 = state.x;
    tree.horizon = n;
    tree.root = std::move(r.node);
    return {r.value, std::move(tree)};
}

SolveResult solve_finite_exp(const ModelSpec& m, int N, int x0) {
    require_exponential(m);
    if (N < 1) throw DomainError("horizon must be >= 1");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");
    check_representable(m, horizon_weight_sum(m, N));

    const double gamma = m.utility.gamma();
    ExpState root{x0, BeliefY(m.q0), gamma};
    ExpTerminalFn terminal = [gamma](const ExpState&) { return 1.0 / gamma; };
    auto [v, tree] = solve_exp_tree(m, N, root, terminal);

    SolveResult result;
    result.horizon = N;
    result.roots.push_back({x0, v, m.utility.inverse(v), std::move(tree)});
    return result;
}

} // namespace rspomdp
