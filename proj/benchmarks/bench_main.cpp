#include <benchmark/benchmark.h>

#include "rspomdp/filter.hpp"
#include "rspomdp/house_selling.hpp"
#include "rspomdp/solver_exp.hpp"
#include "rspomdp/solver_finite.hpp"

namespace {

using namespace rspomdp;

/// Machine with a hidden wear state: running is cheap while the machine is
/// good, repairing resets the wear. Small enough that the exact solvers stay
/// fast at moderate horizons.
ModelSpec machine_model(const Utility& u) {
    ModelSpec m;
    m.x_states = {"ok", "alarm"};
    m.y_states = {"good", "bad"};
    m.actions = {"run", "repair"};
    m.admissible = {{0, 1}, {0, 1}};
    m.beta = 0.9;
    m.q0 = {0.7, 0.3};
    m.utility = u;

    const int nx = 2, ny = 2, na = 2;
    m.q.assign(static_cast<std::size_t>(nx * ny * na * nx * ny), 0.0);
    m.c.assign(static_cast<std::size_t>(nx * ny * na), 0.0);
    auto q = [&m](int x, int y, int a, int xp, int yp) -> double& {
        return m.q[static_cast<std::size_t>((((x * 2 + y) * 2 + a) * 2 + xp) * 2 + yp)];
    };
    auto c = [&m](int x, int y, int a) -> double& {
        return m.c[static_cast<std::size_t>((x * 2 + y) * 2 + a)];
    };
    for (int x = 0; x < nx; ++x) {
        // run: wear accumulates, alarms correlate with wear
        q(x, 0, 0, 0, 0) = 0.6;
        q(x, 0, 0, 0, 1) = 0.1;
        q(x, 0, 0, 1, 0) = 0.2;
        q(x, 0, 0, 1, 1) = 0.1;
        q(x, 1, 0, 0, 0) = 0.05;
        q(x, 1, 0, 0, 1) = 0.25;
        q(x, 1, 0, 1, 0) = 0.1;
        q(x, 1, 0, 1, 1) = 0.6;
        // repair: mostly restores the good state
        for (int y = 0; y < ny; ++y) {
            q(x, y, 1, 0, 0) = 0.8;
            q(x, y, 1, 0, 1) = 0.05;
            q(x, y, 1, 1, 0) = 0.1;
            q(x, y, 1, 1, 1) = 0.05;
        }
        c(x, 0, 0) = 1.0;
        c(x, 1, 0) = 3.0;
        c(x, 0, 1) = 2.0;
        c(x, 1, 1) = 2.5;
    }
    return m;
}

HouseModel demo_house() {
    HouseModel h;
    h.thetas = {"soft", "hot"};
    h.offer_grid = {1.0, 2.0, 3.0, 4.0};
    h.q_offer = {{0.4, 0.3, 0.2, 0.1}, {0.1, 0.2, 0.3, 0.4}};
    h.c_theta = {0.2, 0.4};
    h.q0 = {0.5, 0.5};
    h.horizon = 6;
    h.utility = Utility::piecewise_linear_concave({{0.0, 0.0}, {2.0, 2.0}, {5.0, 3.5}});
    return h;
}

void BM_PsiUpdate(benchmark::State& state) {
    const ModelSpec m = machine_model(Utility::exponential(0.5));
    JointMeasure mu = JointMeasure::product_prior(m.q0);
    // a few steps in, so the measure carries several cost atoms
    mu = psi_update(m, 0, 0, 1, mu, 1.0);
    mu = psi_update(m, 1, 1, 0, mu, 0.9);
    mu = psi_update(m, 0, 0, 0, mu, 0.81);
    for (auto _ : state) {
        benchmark::DoNotOptimize(psi_update(m, 0, 0, 1, mu, 0.729));
    }
}
BENCHMARK(BM_PsiUpdate);

void BM_FilterTrace(benchmark::State& state) {
    const ModelSpec m = machine_model(Utility::exponential(0.5));
    std::vector<ObservationStep> obs;
    for (int k = 0; k < static_cast<int>(state.range(0)); ++k) {
        obs.push_back({k % 2, (k / 2) % 2});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(filter_trace(m, 0, obs));
    }
}
BENCHMARK(BM_FilterTrace)->Arg(4)->Arg(8)->Arg(12);

void BM_SolveFinite(benchmark::State& state) {
    const ModelSpec m = machine_model(Utility::exponential(0.5));
    const int horizon = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_finite(m, horizon, 0));
    }
}
BENCHMARK(BM_SolveFinite)->Arg(3)->Arg(5);

void BM_SolveFiniteExp(benchmark::State& state) {
    const ModelSpec m = machine_model(Utility::exponential(0.5));
    const int horizon = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_finite_exp(m, horizon, 0));
    }
}
BENCHMARK(BM_SolveFiniteExp)->Arg(3)->Arg(5)->Arg(7);

void BM_ReservationLevels(benchmark::State& state) {
    HouseModel h = demo_house();
    h.horizon = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reservation_levels(h));
    }
}
BENCHMARK(BM_ReservationLevels)->Arg(4)->Arg(6);

} // namespace

BENCHMARK_MAIN();
