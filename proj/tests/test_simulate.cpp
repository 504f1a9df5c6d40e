#include <cmath>
#include <random>

#include "doctest.h"
#include "rspomdp/simulate.hpp"
#include "test_support.hpp"

using namespace rspomdp;
using namespace testsupport;

TEST_SUITE("simulate") {

TEST_CASE("splitmix64 matches the reference stream") {
    CHECK(splitmix64(0) == 16294208416658607535ULL);
    CHECK(splitmix64(1234567) == 6457827717110365317ULL);
    CHECK(splitmix64(1234567 + 0x9E3779B97F4A7C15ULL) == 3203168211198807973ULL);
    CHECK(splitmix64(42) == 13679457532755275413ULL);
}

TEST_CASE("exhaustive policy value walks the full probability mass") {
    std::mt19937_64 rng(1401);
    for (int trial = 0; trial < 10; ++trial) {
        RandomModelOptions opt;
        opt.nx = uniform_int(rng, 2, 3);
        opt.ny = uniform_int(rng, 1, 3);
        opt.na = uniform_int(rng, 1, 3);
        if (trial % 3 == 0) opt.utility = Utility::exponential(0.5);
        const ModelSpec m = random_model(rng, opt);
        const int N = uniform_int(rng, 1, 3);
        const int x0 = uniform_int(rng, 0, m.num_x() - 1);
        const PolicyTree pol = random_policy(rng, m, N, x0);

        const EnumerateResult r = enumerate_value_detail(m, pol, N, x0);
        CHECK(r.probability_mass == doctest::Approx(1.0).epsilon(1e-12));

        const AugmentedState root{x0, JointMeasure::product_prior(m.q0), 1.0};
        const double via_recursion = cost_iteration(m, pol, N, root);
        CHECK(std::abs(r.value - via_recursion) <= 1e-10 * std::max(1.0, std::abs(via_recursion)));
    }
}

TEST_CASE("missing branches are tolerated only when unreachable") {
    std::mt19937_64 rng(1407);
    const ModelSpec m = machine_model(Utility::linear());
    PolicyTree pol = random_policy(rng, m, 2, 0);
    pol.root->action = 0;

    SUBCASE("pruning a heavy branch is an error") {
        pol.root->children.erase(1);
        CHECK_THROWS_AS(enumerate_value(m, pol, 2, 0), PolicyIncomplete);
    }
    SUBCASE("structurally unreachable branches may be absent") {
        ModelSpec blocked = m;
        // Reroute action 0 from x=0 so that x'=1 is never reached.
        auto q_at = [&blocked](int x, int y, int a, int xp, int yp) -> double& {
            const int ny = blocked.num_y();
            const int na = blocked.num_a();
            const int nx = blocked.num_x();
            return blocked.q[static_cast<std::size_t>(
                (((x * ny + y) * na + a) * nx + xp) * ny + yp)];
        };
        for (int y = 0; y < 2; ++y) {
            for (int yp = 0; yp < 2; ++yp) {
                q_at(0, y, 0, 0, yp) += q_at(0, y, 0, 1, yp);
                q_at(0, y, 0, 1, yp) = 0.0;
            }
        }
        REQUIRE(validate(blocked).ok());
        pol.root->children.erase(1);
        CHECK_NOTHROW(enumerate_value(blocked, pol, 2, 0));
    }
}

TEST_CASE("brute force optimum agrees with per-root-action sweeps") {
    std::mt19937_64 rng(1409);
    for (int trial = 0; trial < 6; ++trial) {
        const ModelSpec m = random_model(rng, RandomModelOptions{});
        const int N = 2;
        const EnumerateOptimalResult r = enumerate_optimal_detail(m, N, 0);

        REQUIRE(r.by_root_action.size() == m.admissible[0].size());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.by_root_action.size(); ++i) {
            CHECK(r.by_root_action[i].first == m.admissible[0][i]);
            best = std::min(best, r.by_root_action[i].second);
        }
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("monte carlo is reproducible and concentrates on the exact value") {
    std::mt19937_64 rng(1411);
    const ModelSpec m = machine_model(Utility::linear());
    const PolicyTree pol = random_policy(rng, m, 3, 0);
    const double exact = enumerate_value(m, pol, 3, 0);

    const MonteCarloResult a = monte_carlo(m, pol, 3, 0, 20000, 99);
    const MonteCarloResult b = monte_carlo(m, pol, 3, 0, 20000, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.ci_halfwidth == b.ci_halfwidth);
    CHECK(a.samples == 20000);
    CHECK(a.seed == 99);

    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const MonteCarloResult r = monte_carlo(m, pol, 3, 0, 20000, seed);
        CHECK(r.ci_halfwidth > 0.0);
        CHECK(std::abs(r.mean - exact) <= 5.0 * r.ci_halfwidth);
    }
}

TEST_CASE("zero steps cost nothing") {
    const ModelSpec m = machine_model(Utility::exponential(1.0));
    PolicyTree pol;
    pol.x0 = 0;
    pol.horizon = 0;
    pol.root = std::make_unique<PolicyNode>();
    CHECK(enumerate_value(m, pol, 0, 0) == m.utility(0.0));
    const MonteCarloResult r = monte_carlo(m, pol, 0, 0, 5, 1);
    CHECK(r.mean == m.utility(0.0));
}

TEST_CASE("sweep size guard") {
    std::mt19937_64 rng(1423);
    RandomModelOptions opt;
    opt.nx = 3;
    opt.na = 4;
    const ModelSpec m = random_model(rng, opt);
    // 4 choices at each of 1 + 3 + 9 + 27 observed histories overflows 1e7.
    CHECK_THROWS_AS(enumerate_optimal(m, 4, 0), TooLarge);
}

TEST_CASE("input validation") {
    std::mt19937_64 rng(1427);
    const ModelSpec m = machine_model(Utility::linear());
    const PolicyTree pol = random_policy(rng, m, 2, 0);
    CHECK_THROWS_AS(enumerate_value(m, pol, -1, 0), DomainError);
    CHECK_THROWS_AS(enumerate_value(m, pol, 2, 5), DomainError);
    CHECK_THROWS_AS(enumerate_optimal(m, 0, 0), DomainError);
    CHECK_THROWS_AS(monte_carlo(m, pol, 2, 0, 0, 1), DomainError);
}

} // TEST_SUITE
