#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rspomdp/utility.hpp"

namespace rspomdp {

/// One support point of a joint measure: hidden-state index y, accumulated
/// (discounted) cost s, and probability weight w.
struct Atom {
    int y;
    double s;
    double w;
};

/// Finite-support probability measure over (hidden state, accumulated cost)
/// pairs. This is the sufficient statistic the solvers recurse on: the
/// conditional law of the hidden state together with the cost run up so far.
///
/// Instances are kept in canonical form: atoms sorted by (y, s), atoms of the
/// same y whose costs differ by at most kMergeTol merged (weights added, the
/// first cost kept), zero-weight atoms dropped. Weights are expected to sum
/// to 1 up to kWeightSumTol; the filter operators keep that invariant and
/// is_normalized() checks it.
class JointMeasure {
public:
    static constexpr double kMergeTol = 1e-9;
    static constexpr double kWeightSumTol = 1e-10;

    JointMeasure() = default;
    explicit JointMeasure(std::vector<Atom> atoms);

    static JointMeasure dirac(int y, double s);
    /// Prior ⊗ point mass: one atom (y, s0, q0[y]) per positive prior weight.
    static JointMeasure product_prior(const std::vector<double>& q0, double s0 = 0.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }

    double total_weight() const;
    bool is_normalized(double tol = kWeightSumTol) const;

    double min_s() const;
    double max_s() const;
    /// Largest |s| carried by any atom; every measure here has bounded
    /// support by construction.
    double support_bound() const;

private:
    std::vector<Atom> atoms_;
};

/// Probability vector over hidden states (the classical belief).
struct BeliefY {
    std::vector<double> p;

    BeliefY() = default;
    explicit BeliefY(std::vector<double> probs) : p(std::move(probs)) {}

    int size() const { return static_cast<int>(p.size()); }
    double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
    bool is_normalized(double tol = 1e-10) const;
};

/// Hidden-state marginal of mu as a belief vector of length num_y.
BeliefY marginal_y(const JointMeasure& mu, int num_y);

/// Cost marginal: (s, weight) pairs with costs within JointMeasure::kMergeTol
/// merged across hidden states, ascending in s.
std::vector<std::pair<double, double>> marginal_s(const JointMeasure& mu);

/// E[U(s)] under mu. This is the terminal value of the finite-horizon
/// recursion.
double expected_utility(const JointMeasure& mu, const Utility& u);

struct ExpTransformResult {
    double m;   // normalizer: E[exp(gamma * s)]
    BeliefY nu; // cost-reweighted hidden-state marginal
};

/// Splits mu into the normalizer E[e^{gamma s}] and the hidden-state marginal
/// reweighted by e^{gamma s}. Under exponential utility this pair carries all
/// the information the solver needs, which is what makes the fast path
/// possible.
ExpTransformResult exp_transform(const JointMeasure& mu, double gamma, int num_y);

/// Pushforward under s -> factor * s (factor > 0). Weights are untouched.
JointMeasure rescale_s(const JointMeasure& mu, double factor);

/// Largest weight discrepancy between the two canonical forms. Atoms are
/// matched by equal y and |s - s'| <= s_match_tol; an unmatched atom
/// contributes its own weight.
double linf_distance(const JointMeasure& a, const JointMeasure& b, double s_match_tol = 1e-9);

double linf_distance(const BeliefY& a, const BeliefY& b);

} // namespace rspomdp
