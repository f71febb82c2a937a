#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmab/instances.hpp"
#include "rmab/prob.hpp"

using namespace rmab;

namespace {

SelectionContext two_coins(double R) {
    SelectionContext ctx;
    ctx.threshold = R;
    ctx.dists.push_back(bernoulli_reward(1.0, 0.5));
    ctx.dists.push_back(bernoulli_reward(1.0, 0.5));
    return ctx;
}

}  // namespace

TEST_CASE("exact satisfaction probability") {
    CHECK(exact_satisfaction_prob(two_coins(1.0)) == doctest::Approx(0.75));

    SelectionContext nth;  // deterministic arm achieving R
    nth.threshold = 1.0;
    nth.dists.push_back(bernoulli_reward(1.0, 1.0));
    CHECK(exact_satisfaction_prob(nth) == doctest::Approx(1.0));

    SelectionContext empty;
    empty.threshold = 0.5;
    CHECK(exact_satisfaction_prob(empty) == doctest::Approx(0.0));
    empty.threshold = 0.0;
    CHECK(exact_satisfaction_prob(empty) == doctest::Approx(1.0));
}

TEST_CASE("claim instance failure probability") {
    const int n = 51;
    const double rho = 0.9;
    double p = claim1_p(n, rho);
    SelectionContext ctx;
    ctx.threshold = 1.0;
    for (int i = 0; i < n - 1; ++i) ctx.dists.push_back(bernoulli_reward(10.0 / p, p));
    // the enumeration prunes every branch that already clears the threshold,
    // so a raised cap costs nothing here
    double fail = 1.0 - exact_satisfaction_prob(ctx, std::size_t{1} << 62);
    CHECK(fail == doctest::Approx(std::pow(1.0 - p, n - 1)).epsilon(1e-9));
    CHECK(fail > 1.0 - rho);  // strict: the 50 unreliable arms are not enough
    CHECK(p == doctest::Approx(1.3600 / 50.0).epsilon(1e-4));
    CHECK(fail == doctest::Approx(0.2524).epsilon(1e-3));
}

TEST_CASE("capacity cap raises and the fallback estimator survives it") {
    SelectionContext big;
    big.threshold = 3.0;
    for (int i = 0; i < 25; ++i) big.dists.push_back(bernoulli_reward(1.0, 0.5));
    CHECK_THROWS_AS(exact_satisfaction_prob(big, 1000000), CapacityError);

    SatisfactionFn fn = make_satisfaction_fn(ProbEstimator::Exact, 20000);
    Rng rng(5);
    double est = fn(big, rng);  // falls back to Monte Carlo
    // Binomial(25, .5) >= 3 is nearly certain
    CHECK(est > 0.99);
}

TEST_CASE("monte carlo estimator") {
    Rng rng(9);
    CHECK(mc_satisfaction_prob(two_coins(1.0), 100000, rng) == doctest::Approx(0.75).epsilon(0.015));

    SelectionContext sure;
    sure.threshold = 2.0;
    sure.dists.push_back(point_reward(2.0));
    Rng rng2(1);
    CHECK(mc_satisfaction_prob(sure, 10, rng2) == doctest::Approx(1.0));
}

TEST_CASE("hoeffding bound") {
    SelectionContext low = two_coins(2.0);  // mu = 1 <= R
    CHECK(hoeffding_lower_bound(low) == doctest::Approx(0.0));

    SelectionContext ctx;
    ctx.threshold = 2.0;
    for (int i = 0; i < 4; ++i) ctx.dists.push_back(bernoulli_reward(1.0, 0.9));
    CHECK(hoeffding_lower_bound(ctx) ==
          doctest::Approx(1.0 - std::exp(-2.0 * 1.6 * 1.6 / 4.0)).epsilon(1e-9));
    CHECK(hoeffding_lower_bound(ctx) == doctest::Approx(0.7217).epsilon(1e-3));
}

TEST_CASE("hoeffding never exceeds the exact probability") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        SelectionContext ctx;
        int k = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < k; ++i)
            ctx.dists.push_back(bernoulli_reward(0.5 + rng.uniform(), rng.uniform()));
        ctx.threshold = rng.uniform() * k;
        CHECK(hoeffding_lower_bound(ctx) <= exact_satisfaction_prob(ctx) + 1e-12);
    }
}
