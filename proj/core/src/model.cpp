#include "rspomdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace rspomdp {

bool ModelSpec::is_admissible(int x, int a) const {
    if (x < 0 || x >= num_x()) return false;
    const auto& d = admissible[static_cast<std::size_t>(x)];
    return std::find(d.begin(), d.end(), a) != d.end();
}

void ModelSpec::require_admissible(int x, int a) const {
    if (!is_admissible(x, a)) {
        std::ostringstream os;
        os << "action " << a << " is not admissible in state " << x;
        throw InadmissibleAction(os.str());
    }
}

bool ModelSpec::shape_ok() const {
    const std::size_t nx = x_states.size();
    const std::size_t ny = y_states.size();
    const std::size_t na = actions.size();
    if (nx == 0 || ny == 0 || na == 0) return false;
    return admissible.size() == nx && q.size() == nx * ny * na * nx * ny &&
           c.size() == nx * ny * na && q0.size() == ny;
}

double ModelSpec::min_cost() const {
    double lo = std::numeric_limits<double>::infinity();
    for (int x = 0; x < num_x(); ++x)
        for (int a : admissible[static_cast<std::size_t>(x)])
            for (int y = 0; y < num_y(); ++y) lo = std::min(lo, cost(x, y, a));
    return lo;
}

double ModelSpec::max_cost() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < num_x(); ++x)
        for (int a : admissible[static_cast<std::size_t>(x)])
            for (int y = 0; y < num_y(); ++y) hi = std::max(hi, cost(x, y, a));
    return hi;
}

namespace {

bool has_duplicates(const std::vector<std::string>& labels) {
    std::set<std::string> seen(labels.begin(), labels.end());
    return seen.size() != labels.size();
}

} // namespace

ValidationReport validate(const ModelSpec& m, bool for_infinite_horizon) {
    ValidationReport report;
    auto add = [&report](const std::string& msg) { report.violations.push_back(msg); };

    if (m.x_states.empty()) add("x_states must be nonempty");
    if (m.y_states.empty()) add("y_states must be nonempty");
    if (m.actions.empty()) add("actions must be nonempty");
    if (has_duplicates(m.x_states)) add("x_states labels must be unique");
    if (has_duplicates(m.y_states)) add("y_states labels must be unique");
    if (has_duplicates(m.actions)) add("action labels must be unique");
    if (!m.shape_ok()) {
        add("array sizes are inconsistent with the declared state and action counts");
        return report;
    }

    for (double v : m.q)
        if (!std::isfinite(v)) { add("q contains a non-finite entry"); break; }
    for (double v : m.c)
        if (!std::isfinite(v)) { add("c contains a non-finite entry"); break; }
    for (double v : m.q0)
        if (!std::isfinite(v)) { add("q0 contains a non-finite entry"); break; }
    if (!std::isfinite(m.beta)) add("beta must be finite");
    if (!report.ok()) return report;

    for (int x = 0; x < m.num_x(); ++x) {
        const auto& d = m.admissible[static_cast<std::size_t>(x)];
        if (d.empty()) {
            std::ostringstream os;
            os << "admissible action set for state " << m.x_states[static_cast<std::size_t>(x)]
               << " must be nonempty";
            add(os.str());
        }
        std::set<int> seen;
        for (int a : d) {
            if (a < 0 || a >= m.num_a()) {
                std::ostringstream os;
                os << "admissible action index " << a << " out of range for state "
                   << m.x_states[static_cast<std::size_t>(x)];
                add(os.str());
            } else if (!seen.insert(a).second) {
                std::ostringstream os;
                os << "duplicate admissible action for state " << m.x_states[static_cast<std::size_t>(x)];
                add(os.str());
            }
        }
    }

    double cost_lo = std::numeric_limits<double>::infinity();
    double cost_hi = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < m.num_x(); ++x) {
        for (int a : m.admissible[static_cast<std::size_t>(x)]) {
            if (a < 0 || a >= m.num_a()) continue;
            for (int y = 0; y < m.num_y(); ++y) {
                double row = 0.0;
                for (int xp = 0; xp < m.num_x(); ++xp) {
                    for (int yp = 0; yp < m.num_y(); ++yp) {
                        double p = m.trans(x, y, a, xp, yp);
                        if (p < 0.0) {
                            std::ostringstream os;
                            os << "negative transition probability at (x=" << x << ", y=" << y
                               << ", a=" << a << ", x'=" << xp << ", y'=" << yp << ")";
                            add(os.str());
                        }
                        row += p;
                    }
                }
                if (std::abs(row - 1.0) > kStochasticTol) {
                    std::ostringstream os;
                    os << "row sum " << row << " != 1 at (x=" << x << ", y=" << y << ", a=" << a << ")";
                    add(os.str());
                }
                double cv = m.cost(x, y, a);
                if (cv < 0.0) {
                    std::ostringstream os;
                    os << "negative cost at (x=" << x << ", y=" << y << ", a=" << a << ")";
                    add(os.str());
                }
                cost_lo = std::min(cost_lo, cv);
                cost_hi = std::max(cost_hi, cv);
            }
        }
    }
    report.cost_lower = cost_lo;
    report.cost_upper = cost_hi;

    double prior = 0.0;
    for (double v : m.q0) {
        if (v < 0.0) add("q0 entries must be nonnegative");
        prior += v;
    }
    if (std::abs(prior - 1.0) > kStochasticTol) {
        std::ostringstream os;
        os << "q0 sums to " << prior << " instead of 1";
        add(os.str());
    }

    if (!(m.beta > 0.0) || m.beta > 1.0) add("beta must lie in (0, 1]");

    if (for_infinite_horizon) {
        if (m.beta >= 1.0) add("beta must be < 1 for infinite-horizon solving");
        if (!(cost_lo > 0.0)) add("minimum cost must be > 0 for infinite-horizon bounds");
    }

    if (m.utility.kind() == UtilityKind::Log && !(cost_lo > 0.0)) {
        add("log utility requires a strictly positive minimum cost");
    }
    if (m.utility.kind() == UtilityKind::Power && m.utility.gamma() < 0.0 && !(cost_lo > 0.0)) {
        add("power utility with gamma < 0 requires a strictly positive minimum cost");
    }

    return report;
}

std::vector<double> marginal_qx(const ModelSpec& m, int x, int y, int a) {
    m.require_admissible(x, a);
    std::vector<double> out(static_cast<std::size_t>(m.num_x()), 0.0);
    for (int xp = 0; xp < m.num_x(); ++xp) out[static_cast<std::size_t>(xp)] = m.qx(x, y, a, xp);
    return out;
}

namespace {

constexpr double kGridSnapTol = 1e-9;

std::size_t nearest_grid_index(const std::vector<double>& grid, double v) {
    std::size_t best = 0;
    double best_d = std::abs(grid[0] - v);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double d = std::abs(grid[i] - v);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

/// Index of the grid point equal to `target` up to the snap tolerance, or
/// npos when the value falls between or beyond grid points.
std::size_t exact_grid_index(const std::vector<double>& grid, double target) {
    std::size_t i = nearest_grid_index(grid, target);
    if (std::abs(grid[i] - target) <= kGridSnapTol) return i;
    return static_cast<std::size_t>(-1);
}

std::string format_grid_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_pmf(const DiscretePmf& pmf, const char* what) {
    if (pmf.values.size() != pmf.probs.size() || pmf.values.empty()) {
        throw DomainError(std::string(what) + " pmf must pair each value with a probability");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        if (!std::isfinite(pmf.values[i]) || !std::isfinite(pmf.probs[i]) || pmf.probs[i] < 0.0) {
            throw DomainError(std::string(what) + " pmf entries must be finite and nonnegative");
        }
        total += pmf.probs[i];
    }
    if (std::abs(total - 1.0) > kStochasticTol) {
        throw DomainError(std::string(what) + " pmf must sum to 1");
    }
}

} // namespace

ModelSpec build_additive_noise_model(const AdditiveNoiseSpec& spec) {
    if (spec.x_grid.empty() || spec.y_grid.empty() || spec.actions.empty()) {
        throw DomainError("additive-noise builder needs nonempty grids and actions");
    }
    check_pmf(spec.eta, "observation noise");
    check_pmf(spec.eps, "hidden-state noise");

    const std::size_t nx = spec.x_grid.size();
    const std::size_t ny = spec.y_grid.size();
    const std::size_t na = spec.actions.size();
    if (spec.h.size() != ny) throw DomainError("h must assign a value to every hidden grid point");
    if (spec.b.size() != ny) throw DomainError("b must assign a row to every hidden grid point");
    for (const auto& row : spec.b) {
        if (row.size() != na) throw DomainError("b rows must cover every action");
    }
    if (spec.cost.size() != nx * ny * na) {
        throw DomainError("cost table must have one entry per (x, y, a)");
    }

    ModelSpec m;
    for (double v : spec.x_grid) m.x_states.push_back(format_grid_label(v));
    for (double v : spec.y_grid) m.y_states.push_back(format_grid_label(v));
    m.actions = spec.actions;
    m.admissible.assign(nx, {});
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t a = 0; a < na; ++a) m.admissible[x].push_back(static_cast<int>(a));
    }
    m.c = spec.cost;
    m.beta = spec.beta;
    m.utility = spec.utility;
    if (spec.q0.empty()) {
        m.q0.assign(ny, 1.0 / static_cast<double>(ny));
    } else {
        if (spec.q0.size() != ny) throw DomainError("q0 must have one entry per hidden grid point");
        m.q0 = spec.q0;
    }

    // Transition row over (x', y') for a given (y, a); it does not depend on
    // the current observable state.
    std::vector<double> row(nx * ny, 0.0);
    m.q.assign(nx * ny * na * nx * ny, 0.0);
    for (std::size_t y = 0; y < ny; ++y) {
        double hs = spec.x_grid[nearest_grid_index(spec.x_grid, spec.h[y])];
        for (std::size_t a = 0; a < na; ++a) {
            double bs = spec.y_grid[nearest_grid_index(spec.y_grid, spec.b[y][a])];
            std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < spec.eta.values.size(); ++i) {
                if (spec.eta.probs[i] == 0.0) continue;
                std::size_t xp = exact_grid_index(spec.x_grid, hs + spec.eta.values[i]);
                if (xp == static_cast<std::size_t>(-1)) {
                    std::ostringstream os;
                    os << "observation noise value " << spec.eta.values[i]
                       << " moves " << hs << " off the observable grid";
                    throw GridOverflow(os.str());
                }
                for (std::size_t j = 0; j < spec.eps.values.size(); ++j) {
                    if (spec.eps.probs[j] == 0.0) continue;
                    std::size_t yp = exact_grid_index(spec.y_grid, bs + spec.eps.values[j]);
                    if (yp == static_cast<std::size_t>(-1)) {
                        std::ostringstream os;
                        os << "hidden-state noise value " << spec.eps.values[j]
                           << " moves " << bs << " off the hidden grid";
                        throw GridOverflow(os.str());
                    }
                    row[xp * ny + yp] += spec.eta.probs[i] * spec.eps.probs[j];
                }
            }
            for (std::size_t x = 0; x < nx; ++x) {
                std::size_t base = (((x * ny + y) * na + a) * nx) * ny;
                std::copy(row.begin(), row.end(), m.q.begin() + static_cast<std::ptrdiff_t>(base));
            }
        }
    }
    return m;
}

} // namespace rspomdp
