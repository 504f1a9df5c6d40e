#include "rspomdp/simulate.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace rspomdp {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kStreamStride = 0x9E3779B97F4A7C15ULL;
/// Path probability below which a missing policy branch is tolerated; the
/// solvers prune successor branches of predictive mass under kMassPrune, and
/// every path through such a branch weighs less than this.
constexpr double kNegligiblePath = 1e-12;

const PolicyNode* child_of(const PolicyNode* node, int xp) {
    auto it = node->children.find(xp);
    return it == node->children.end() ? nullptr : it->second.get();
}

struct PathWalk {
    const ModelSpec& m;
    double value = 0.0;
    double mass = 0.0;

    void step(const PolicyNode* node, int remaining, int x, int y, double cost, double z,
              double prob) {
        if (remaining == 0) {
            value += prob * m.utility(cost);
            mass += prob;
            return;
        }
        if (node == nullptr || node->action < 0) {
            std::ostringstream os;
            os << "policy assigns no action to a history of probability " << prob;
            throw PolicyIncomplete(os.str());
        }
        const int a = node->action;
        m.require_admissible(x, a);
        const double next_cost = cost + z * m.cost(x, y, a);
        for (int xp = 0; xp < m.num_x(); ++xp) {
            const PolicyNode* child = child_of(node, xp);
            for (int yp = 0; yp < m.num_y(); ++yp) {
                const double q = m.trans(x, y, a, xp, yp);
                if (q <= 0.0) continue;
                const double next_prob = prob * q;
                if (child == nullptr && remaining > 1) {
                    if (next_prob < kNegligiblePath) continue;
                    std::ostringstream os;
                    os << "policy is missing the branch x'=" << xp
                       << " reached with probability " << next_prob;
                    throw PolicyIncomplete(os.str());
                }
                step(child, remaining - 1, xp, yp, next_cost, z * m.beta, next_prob);
            }
        }
    }
};

struct ObsNode {
    int x;
    std::vector<int> actions;    // admissible actions, the per-node choices
    std::map<int, int> children; // observed successor -> node index
};

/// True when x' can follow x with positive probability under some admissible
/// action and some hidden state. Over-approximates reachability; the extra
/// policy assignments this admits cannot change the minimum.
bool branch_possible(const ModelSpec& m, int x, int xp) {
    for (int a : m.admissible[static_cast<std::size_t>(x)]) {
        for (int y = 0; y < m.num_y(); ++y) {
            if (m.qx(x, y, a, xp) > 0.0) return true;
        }
    }
    return false;
}

int build_obs_tree(const ModelSpec& m, int x, int depth, int horizon, std::vector<ObsNode>& nodes) {
    const int index = static_cast<int>(nodes.size());
    nodes.push_back({x, m.admissible[static_cast<std::size_t>(x)], {}});
    if (depth + 1 >= horizon) return index;
    for (int xp = 0; xp < m.num_x(); ++xp) {
        if (!branch_possible(m, x, xp)) continue;
        const int child = build_obs_tree(m, xp, depth + 1, horizon, nodes);
        nodes[static_cast<std::size_t>(index)].children.emplace(xp, child);
    }
    return index;
}

std::unique_ptr<PolicyNode> assemble_policy(const std::vector<ObsNode>& nodes,
                                            const std::vector<int>& digits, int index) {
    const ObsNode& on = nodes[static_cast<std::size_t>(index)];
    auto out = std::make_unique<PolicyNode>();
    out->action = on.actions[static_cast<std::size_t>(digits[static_cast<std::size_t>(index)])];
    for (const auto& [xp, child] : on.children) {
        out->children.emplace(xp, assemble_policy(nodes, digits, child));
    }
    return out;
}

} // namespace

EnumerateResult enumerate_value_detail(const ModelSpec& m, const PolicyTree& policy, int N,
                                       int x0) {
    if (N < 0) throw DomainError("horizon must be nonnegative");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");
    PathWalk walk{m};
    for (int y0 = 0; y0 < m.num_y(); ++y0) {
        const double p0 = m.q0[static_cast<std::size_t>(y0)];
        if (p0 <= 0.0) continue;
        walk.step(policy.root.get(), N, x0, y0, 0.0, 1.0, p0);
    }
    return {walk.value, walk.mass};
}

double enumerate_value(const ModelSpec& m, const PolicyTree& policy, int N, int x0) {
    return enumerate_value_detail(m, policy, N, x0).value;
}

EnumerateOptimalResult enumerate_optimal_detail(const ModelSpec& m, int N, int x0) {
    if (N < 1) throw DomainError("horizon must be >= 1");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");

    std::vector<ObsNode> nodes;
    build_obs_tree(m, x0, 0, N, nodes);

    double combos = 1.0;
    for (const ObsNode& on : nodes) combos *= static_cast<double>(on.actions.size());
    if (combos > 1e7) {
        std::ostringstream os;
        os << combos << " candidate policies exceed the enumeration budget of 1e7";
        throw TooLarge(os.str());
    }

    EnumerateOptimalResult result;
    result.value = std::numeric_limits<double>::infinity();
    for (int a : m.admissible[static_cast<std::size_t>(x0)]) {
        result.by_root_action.emplace_back(a, std::numeric_limits<double>::infinity());
    }

    std::vector<int> digits(nodes.size(), 0);
    for (;;) {
        PolicyTree tree;
        tree.x0 = x0;
        tree.horizon = N;
        tree.root = assemble_policy(nodes, digits, 0);
        const double v = enumerate_value(m, tree, N, x0);
        result.value = std::min(result.value, v);
        auto& slot = result.by_root_action[static_cast<std::size_t>(digits[0])];
        slot.second = std::min(slot.second, v);

        std::size_t pos = 0;
        while (pos < digits.size()) {
            if (++digits[pos] < static_cast<int>(nodes[pos].actions.size())) break;
            digits[pos] = 0;
            ++pos;
        }
        if (pos == digits.size()) break;
    }
    return result;
}

double enumerate_optimal(const ModelSpec& m, int N, int x0) {
    return enumerate_optimal_detail(m, N, x0).value;
}

MonteCarloResult monte_carlo(const ModelSpec& m, const PolicyTree& policy, int N, int x0,
                             long long samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("need at least one sample");
    if (N < 0) throw DomainError("horizon must be nonnegative");
    if (x0 < 0 || x0 >= m.num_x()) throw DomainError("initial state index out of range");

    const int nx = m.num_x();
    const int ny = m.num_y();
    std::vector<double> utilities(static_cast<std::size_t>(samples));

    for (long long i = 0; i < samples; ++i) {
        std::mt19937_64 eng(splitmix64(seed + static_cast<std::uint64_t>(i + 1) * kStreamStride));
        auto uniform = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };

        int y = ny - 1;
        {
            const double u = uniform();
            double acc = 0.0;
            for (int cand = 0; cand < ny; ++cand) {
                acc += m.q0[static_cast<std::size_t>(cand)];
                if (u < acc) {
                    y = cand;
                    break;
                }
            }
        }

        int x = x0;
        const PolicyNode* node = policy.root.get();
        double cost = 0.0;
        double z = 1.0;
        for (int k = 0; k < N; ++k) {
            if (node == nullptr || node->action < 0) {
                throw PolicyIncomplete("policy assigns no action to a sampled history");
            }
            const int a = node->action;
            m.require_admissible(x, a);
            cost += z * m.cost(x, y, a);

            const double u = uniform();
            double acc = 0.0;
            int nxp = -1;
            int nyp = -1;
            for (int xp = 0; xp < nx && nxp < 0; ++xp) {
                for (int yp = 0; yp < ny; ++yp) {
                    const double q = m.trans(x, y, a, xp, yp);
                    if (q <= 0.0) continue;
                    acc += q;
                    if (u < acc) {
                        nxp = xp;
                        nyp = yp;
                        break;
                    }
                }
            }
            if (nxp < 0) {
                // u landed in the rounding slack past the last positive entry
                for (int xp = nx - 1; xp >= 0 && nxp < 0; --xp) {
                    for (int yp = ny - 1; yp >= 0; --yp) {
                        if (m.trans(x, y, a, xp, yp) > 0.0) {
                            nxp = xp;
                            nyp = yp;
                            break;
                        }
                    }
                }
            }

            if (k + 1 < N) {
                node = child_of(node, nxp);
            }
            x = nxp;
            y = nyp;
            z *= m.beta;
        }
        utilities[static_cast<std::size_t>(i)] = m.utility(cost);
    }

    double mean = 0.0;
    for (double u : utilities) mean += u;
    mean /= static_cast<double>(samples);

    double ci = 0.0;
    if (samples > 1) {
        double ss = 0.0;
        for (double u : utilities) ss += (u - mean) * (u - mean);
        const double sd = std::sqrt(ss / static_cast<double>(samples - 1));
        ci = 1.96 * sd / std::sqrt(static_cast<double>(samples));
    }
    return {mean, ci, samples, seed};
}

} // namespace rspomdp
