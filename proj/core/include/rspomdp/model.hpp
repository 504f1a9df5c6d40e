#pragma once

#include <string>
#include <vector>

#include "rspomdp/utility.hpp"

namespace rspomdp {

/// Row sums of transition kernels and of the prior must equal 1 within this.
inline constexpr double kStochasticTol = 1e-12;

/// Controlled model with an observable component x, a hidden component y, a
/// per-step cost c(x, y, a) and a one-step discount factor beta. The joint
/// kernel q gives the probability of moving to (x', y') from (x, y) under
/// action a. Tensors are stored flat and row-major in declaration order:
///   q[x][y][a][x'][y']   and   c[x][y][a].
/// Treat instances as immutable once validated; every operation takes a
/// const reference.
struct ModelSpec {
    std::vector<std::string> x_states;
    std::vector<std::string> y_states;
    std::vector<std::string> actions;
    std::vector<std::vector<int>> admissible; // per x: nonempty sorted action indices
    std::vector<double> q;
    std::vector<double> c;
    double beta = 1.0;
    std::vector<double> q0; // prior over the hidden component
    Utility utility;

    int num_x() const { return static_cast<int>(x_states.size()); }
    int num_y() const { return static_cast<int>(y_states.size()); }
    int num_a() const { return static_cast<int>(actions.size()); }

    double trans(int x, int y, int a, int xp, int yp) const {
        return q[static_cast<std::size_t>(
            (((x * num_y() + y) * num_a() + a) * num_x() + xp) * num_y() + yp)];
    }

    double cost(int x, int y, int a) const {
        return c[static_cast<std::size_t>((x * num_y() + y) * num_a() + a)];
    }

    /// Probability of observing x' next from (x, y) under a, with the hidden
    /// successor marginalized out.
    double qx(int x, int y, int a, int xp) const {
        double sum = 0.0;
        for (int yp = 0; yp < num_y(); ++yp) sum += trans(x, y, a, xp, yp);
        return sum;
    }

    bool is_admissible(int x, int a) const;
    void require_admissible(int x, int a) const; // throws InadmissibleAction

    /// True when all array sizes are mutually consistent. Operations assume
    /// this; validate() reports the details.
    bool shape_ok() const;

    double min_cost() const; // over admissible (x, y, a)
    double max_cost() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    double cost_lower = 0.0;
    double cost_upper = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Report-style validation: collects every violation instead of throwing.
/// Cost positivity is only demanded when `for_infinite_horizon` is set,
/// because only the infinite-horizon bounds rely on a strictly positive
/// per-step cost.
ValidationReport validate(const ModelSpec& spec, bool for_infinite_horizon = false);

/// Distribution of the next observable state from (x, y) under a.
std::vector<double> marginal_qx(const ModelSpec& spec, int x, int y, int a);

struct DiscretePmf {
    std::vector<double> values;
    std::vector<double> probs;
};

/// Builder input for models where the next observable state is h(y) plus an
/// observation noise and the next hidden state is b(y, a) plus a state noise,
/// both noises discrete and independent. Function values are snapped to the
/// nearest grid point; noise mass that would land off the grid raises
/// GridOverflow.
struct AdditiveNoiseSpec {
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    std::vector<std::string> actions;
    std::vector<double> h;              // per y-grid index
    std::vector<std::vector<double>> b; // [y][a]
    DiscretePmf eta;                    // noise on the observable component
    DiscretePmf eps;                    // noise on the hidden component
    std::vector<double> cost;           // [x][y][a] flat
    double beta = 1.0;
    std::vector<double> q0;             // empty means uniform
    Utility utility;
};

ModelSpec build_additive_noise_model(const AdditiveNoiseSpec& spec);

} // namespace rspomdp
