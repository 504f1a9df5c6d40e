#include "rspomdp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rspomdp {

JointMeasure::JointMeasure(std::vector<Atom> atoms) {
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.s) || !std::isfinite(a.w)) {
            throw DomainError("measure atoms must be finite");
        }
        if (a.w < 0.0) throw DomainError("measure atom weights must be nonnegative");
        if (a.y < 0) throw DomainError("measure atom hidden-state index must be nonnegative");
    }
    std::erase_if(atoms, [](const Atom& a) { return a.w == 0.0; });
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.s < b.s;
    });
    atoms_.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!atoms_.empty() && atoms_.back().y == a.y && a.s - atoms_.back().s <= kMergeTol) {
            atoms_.back().w += a.w;
        } else {
            atoms_.push_back(a);
        }
    }
}

JointMeasure JointMeasure::dirac(int y, double s) { return JointMeasure({{y, s, 1.0}}); }

JointMeasure JointMeasure::product_prior(const std::vector<double>& q0, double s0) {
    std::vector<Atom> atoms;
    atoms.reserve(q0.size());
    for (std::size_t y = 0; y < q0.size(); ++y) {
        if (q0[y] > 0.0) atoms.push_back({static_cast<int>(y), s0, q0[y]});
    }
    return JointMeasure(std::move(atoms));
}

double JointMeasure::total_weight() const {
    double sum = 0.0;
    for (const Atom& a : atoms_) sum += a.w;
    return sum;
}

bool JointMeasure::is_normalized(double tol) const {
    return std::abs(total_weight() - 1.0) <= tol;
}

double JointMeasure::min_s() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms_) lo = std::min(lo, a.s);
    return lo;
}

double JointMeasure::max_s() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const Atom& a : atoms_) hi = std::max(hi, a.s);
    return hi;
}

double JointMeasure::support_bound() const {
    double b = 0.0;
    for (const Atom& a : atoms_) b = std::max(b, std::abs(a.s));
    return b;
}

bool BeliefY::is_normalized(double tol) const {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0 || !std::isfinite(v)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

BeliefY marginal_y(const JointMeasure& mu, int num_y) {
    std::vector<double> out(static_cast<std::size_t>(num_y), 0.0);
    for (const Atom& a : mu.atoms()) {
        if (a.y >= num_y) throw DomainError("measure atom hidden-state index out of range");
        out[static_cast<std::size_t>(a.y)] += a.w;
    }
    return BeliefY(std::move(out));
}

std::vector<std::pair<double, double>> marginal_s(const JointMeasure& mu) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(mu.size());
    for (const Atom& a : mu.atoms()) pairs.emplace_back(a.s, a.w);
    std::sort(pairs.begin(), pairs.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [s, w] : pairs) {
        if (!out.empty() && s - out.back().first <= JointMeasure::kMergeTol) {
            out.back().second += w;
        } else {
            out.emplace_back(s, w);
        }
    }
    return out;
}

double expected_utility(const JointMeasure& mu, const Utility& u) {
    double sum = 0.0;
    for (const Atom& a : mu.atoms()) sum += a.w * u(a.s);
    return sum;
}

ExpTransformResult exp_transform(const JointMeasure& mu, double gamma, int num_y) {
    double m = 0.0;
    std::vector<double> acc(static_cast<std::size_t>(num_y), 0.0);
    for (const Atom& a : mu.atoms()) {
        if (a.y >= num_y) throw DomainError("measure atom hidden-state index out of range");
        double f = std::exp(gamma * a.s);
        if (!std::isfinite(f)) {
            std::ostringstream os;
            os << "exp(" << gamma << " * " << a.s << ") overflows; rescale gamma or the costs";
            throw OverflowError(os.str());
        }
        m += a.w * f;
        acc[static_cast<std::size_t>(a.y)] += a.w * f;
    }
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw OverflowError("exponential reweighting normalizer left the representable range");
    }
    for (double& v : acc) v /= m;
    return {m, BeliefY(std::move(acc))};
}

JointMeasure rescale_s(const JointMeasure& mu, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw DomainError("rescale factor must be positive and finite");
    }
    std::vector<Atom> atoms = mu.atoms();
    for (Atom& a : atoms) a.s *= factor;
    return JointMeasure(std::move(atoms));
}

double linf_distance(const JointMeasure& a, const JointMeasure& b, double s_match_tol) {
    const auto& xs = a.atoms();
    const auto& ys = b.atoms();
    double dist = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        const Atom& p = xs[i];
        const Atom& q = ys[j];
        if (p.y == q.y && std::abs(p.s - q.s) <= s_match_tol) {
            dist = std::max(dist, std::abs(p.w - q.w));
            ++i;
            ++j;
        } else if (p.y < q.y || (p.y == q.y && p.s < q.s)) {
            dist = std::max(dist, p.w);
            ++i;
        } else {
            dist = std::max(dist, q.w);
            ++j;
        }
    }
    for (; i < xs.size(); ++i) dist = std::max(dist, xs[i].w);
    for (; j < ys.size(); ++j) dist = std::max(dist, ys[j].w);
    return dist;
}

double linf_distance(const BeliefY& a, const BeliefY& b) {
    if (a.size() != b.size()) throw DomainError("belief dimensions differ");
    double dist = 0.0;
    for (int i = 0; i < a.size(); ++i) dist = std::max(dist, std::abs(a[i] - b[i]));
    return dist;
}

} // namespace rspomdp
