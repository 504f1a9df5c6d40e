#include "rspomdp/solver_infinite.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rspomdp {

namespace {

constexpr int kMaxCertifiedHorizon = 1000000;

void require_discounted(const ModelSpec& m) {
    if (!(m.beta < 1.0)) {
        throw BetaOne("infinite-horizon bounds need beta < 1");
    }
}

void require_positive_costs(const ModelSpec& m) {
    if (!(m.min_cost() > 0.0)) {
        std::ostringstream os;
        os << "infinite-horizon bounds need strictly positive stage costs, minimum is "
           << m.min_cost();
        throw CostNotPositive(os.str());
    }
}

TerminalFn bound_terminal(const ModelSpec& m, BoundSide side) {
    return [&m, side](const AugmentedState& st) { return bound_b(m, st.mu, st.z, side); };
}

/// Magnitudes met by the exponential recursion stay below
/// exp(|gamma| cmax / (1 - beta)); refuse when that is not representable.
void check_exp_representable(const ModelSpec& m) {
    const double exponent = std::abs(m.utility.gamma()) * m.max_cost() / (1.0 - m.beta);
    static const double kMaxExponent = std::log(std::numeric_limits<double>::max()) - 5.0;
    if (exponent > kMaxExponent) {
        std::ostringstream os;
        os << "exp(" << exponent << ") overflows double precision; rescale gamma or the costs";
        throw OverflowError(os.str());
    }
}

ExpTerminalFn exp_bound_terminal(const ModelSpec& m, BoundSide side) {
    const double c = side == BoundSide::Lower ? m.min_cost() : m.max_cost();
    const double gamma = m.utility.gamma();
    const double horizon_weight = 1.0 / (1.0 - m.beta);
    return [c, gamma, horizon_weight](const ExpState& st) {
        return std::exp(st.zeta * c * horizon_weight) / gamma;
    };
}

} // namespace

double bound_b(const ModelSpec& m, const JointMeasure& mu, double z, BoundSide side) {
    require_discounted(m);
    const double c = side == BoundSide::Lower ? m.min_cost() : m.max_cost();
    const double tail = z * c / (1.0 - m.beta);
    double v = 0.0;
    for (const Atom& at : mu.atoms()) {
        v += at.w * m.utility(at.s + tail);
    }
    return v;
}

double gap_bound(const ModelSpec& m, int n, double z, const JointMeasure& mu) {
    require_discounted(m);
    if (n < 0) throw DomainError("depth must be nonnegative");
    const Utility& u = m.utility;
    const double head = std::pow(m.beta, n) * z * m.max_cost() / (1.0 - m.beta);
    if (u.is_concave()) {
        if (!(m.min_cost() > 0.0)) {
            throw CostNotPositive("concave gap bound evaluates U'_- at z * cmin and needs cmin > 0");
        }
        return head * u.deriv_left(z * m.min_cost());
    }
    if (u.is_convex()) {
        const double tail = z * m.max_cost() / (1.0 - m.beta);
        double acc = 0.0;
        for (const Atom& at : mu.atoms()) {
            acc += at.w * u.deriv_right(at.s + tail);
        }
        return head * acc;
    }
    throw NonMonotoneUtility("gap bound needs a concave or convex utility, got " + u.describe());
}

int horizon_for_gap(const ModelSpec& m, double eps, double z) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("gap tolerance must be positive");
    require_discounted(m);
    JointMeasure mu0 = JointMeasure::product_prior(m.q0);
    for (int n = 0; n <= kMaxCertifiedHorizon; ++n) {
        if (gap_bound(m, n, z, mu0) <= eps) return n;
    }
    std::ostringstream os;
    os << "certified depth exceeds " << kMaxCertifiedHorizon << " for tolerance " << eps
       << " at beta " << m.beta;
    throw TooLarge(os.str());
}

InfiniteResult solve_infinite(const ModelSpec& m, int x0, double eps) {
    require_discounted(m);
    require_positive_costs(m);
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");

    const int n = horizon_for_gap(m, eps, 1.0);
    AugmentedState root{x0, JointMeasure::product_prior(m.q0), 1.0};
    double lower = value_with_terminal(m, n, root, bound_terminal(m, BoundSide::Lower)).value;
    auto [upper, tree] = solve_with_terminal(m, n, root, bound_terminal(m, BoundSide::Upper));

    InfiniteResult r;
    r.lower = lower;
    r.upper = upper;
    r.gap = upper - lower;
    r.horizon = n;
    r.root_action = n > 0 ? tree.root->action : m.admissible[static_cast<std::size_t>(x0)].front();
    r.policy = std::move(tree);
    return r;
}

InfiniteResult solve_infinite_exp(const ModelSpec& m, int x0, double eps) {
    if (m.utility.kind() != UtilityKind::Exponential) {
        throw WrongUtility("this solver requires an exponential utility, got " + m.utility.describe());
    }
    require_discounted(m);
    require_positive_costs(m);
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");
    check_exp_representable(m);

    const int n = horizon_for_gap(m, eps, 1.0);
    ExpState root{x0, BeliefY(m.q0), m.utility.gamma()};
    double lower = e_value_with_terminal(m, n, root, exp_bound_terminal(m, BoundSide::Lower)).value;
    auto [upper, tree] = solve_exp_tree(m, n, root, exp_bound_terminal(m, BoundSide::Upper));

    InfiniteResult r;
    r.lower = lower;
    r.upper = upper;
    r.gap = upper - lower;
    r.horizon = n;
    r.root_action = n > 0 ? tree.root->action : m.admissible[static_cast<std::size_t>(x0)].front();
    r.policy = std::move(tree);
    return r;
}

} // namespace rspomdp
