#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmab/belief.hpp"
#include "rmab/index.hpp"

using namespace rmab;

namespace {

ArmSpec random_arm(int num_states, Rng& rng, double max_r = 3.0) {
    ArmSpec arm;
    arm.num_states = num_states;
    arm.transition.resize(num_states);
    arm.reward.resize(num_states);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < 2; ++a) {
            std::vector<double> row(num_states);
            double sum = 0.0;
            for (double& v : row) sum += v = 0.05 + rng.uniform();
            for (double& v : row) v /= sum;
            arm.transition[s][a] = row;
            arm.reward[s][a] = bernoulli_reward(max_r * rng.uniform(),
                                                a == 1 ? 0.2 + 0.8 * rng.uniform() : 0.0);
        }
    }
    arm.cost1 = 0.2 + rng.uniform();
    arm.validate();
    return arm;
}

// Exact value of a fixed stationary deterministic policy by Gaussian
// elimination on (I - beta*P_pi) V = payoff_pi.
std::vector<double> policy_value(const ArmSpec& arm, const std::vector<int>& pi, double lambda,
                                 double beta, Direction dir) {
    const int S = arm.num_states;
    std::vector<std::vector<double>> A(S, std::vector<double>(S + 1, 0.0));
    for (int s = 0; s < S; ++s) {
        int a = pi[s];
        double payoff = dir == Direction::Max
                            ? arm.expected_reward(s, a) - lambda * arm.cost(s, a)
                            : lambda * arm.expected_reward(s, a) - arm.cost(s, a);
        for (int t = 0; t < S; ++t) A[s][t] = (s == t ? 1.0 : 0.0) - beta * arm.transition[s][a][t];
        A[s][S] = payoff;
    }
    for (int c = 0; c < S; ++c) {
        int piv = c;
        for (int r = c + 1; r < S; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < S; ++r) {
            if (r == c) continue;
            double f = A[r][c] / A[c][c];
            for (int t = c; t <= S; ++t) A[r][t] -= f * A[c][t];
        }
    }
    std::vector<double> v(S);
    for (int s = 0; s < S; ++s) v[s] = A[s][S] / A[s][s];
    return v;
}

std::vector<double> best_stationary_value(const ArmSpec& arm, double lambda, double beta,
                                          Direction dir) {
    const int S = arm.num_states;
    std::vector<double> best(S, -1e300);
    for (int mask = 0; mask < (1 << S); ++mask) {
        std::vector<int> pi(S);
        for (int s = 0; s < S; ++s) pi[s] = (mask >> s) & 1;
        std::vector<double> v = policy_value(arm, pi, lambda, beta, dir);
        for (int s = 0; s < S; ++s) best[s] = std::max(best[s], v[s]);
    }
    return best;
}

}  // namespace

TEST_CASE("decoupled value closed forms on the single-state chain") {
    ArmSpec arm = make_bernoulli_arm(0, 0.5, 2.0);
    ValueFunction vf = solve_decoupled(arm, 0.5, 0.9, Direction::Max);
    // max(0, p*r - lambda)/(1-beta) with p*r = 1
    CHECK(vf.q[0][1] == doctest::Approx(5.0).epsilon(1e-5));

    ValueFunction at_index = solve_decoupled(arm, 1.0, 0.9, Direction::Max);
    CHECK(at_index.q[0][0] == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(at_index.q[0][1] == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(at_index.passive_optimal(0));
}

TEST_CASE("zero-reward arm: passive dominates in the min direction") {
    ArmSpec arm = make_bernoulli_arm(0, 0.5, 0.0);
    ValueFunction vf = solve_decoupled(arm, 2.0, 0.9, Direction::Min);
    CHECK(vf.q[0][0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(vf.q[0][1] <= vf.q[0][0]);
}

TEST_CASE("whittle_max closed form p*r") {
    CHECK(whittle_max(make_bernoulli_arm(0, 0.5, 2.0), 0, 0.9) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(whittle_max(make_bernoulli_arm(0, 1.0, 4.0), 0, 0.9) == doctest::Approx(4.0).epsilon(1e-5));
    CHECK(whittle_max(make_bernoulli_arm(0, 0.5, 0.0), 0, 0.9) == doctest::Approx(0.0));
}

TEST_CASE("duality lambda- = 1/lambda+") {
    CHECK(whittle_min_from_max(1.0) == doctest::Approx(1.0));
    CHECK(whittle_min_from_max(10.0) == doctest::Approx(0.1));
    CHECK(whittle_min_from_max(0.0) == kInf);

    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        ArmSpec arm = random_arm(2 + static_cast<int>(rng.below(2)), rng);
        for (int s = 0; s < arm.num_states; ++s) {
            double lp = whittle_max(arm, s, 0.9);
            if (lp <= 1e-6 || std::isinf(lp)) continue;
            double lm = whittle_min(arm, s, 0.9);
            CHECK(lp * lm == doctest::Approx(1.0).epsilon(2e-5));
        }
    }
}

TEST_CASE("scaling identity V_max(lambda) = lambda * V_min(1/lambda)") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        ArmSpec arm = random_arm(3, rng);
        const double tol = 1e-6;
        for (double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            ValueFunction vmax = solve_decoupled(arm, lambda, 0.9, Direction::Max, tol);
            ValueFunction vmin = solve_decoupled(arm, 1.0 / lambda, 0.9, Direction::Min, tol / lambda);
            for (int s = 0; s < arm.num_states; ++s)
                for (int a = 0; a < 2; ++a)
                    CHECK(std::abs(vmax.q[s][a] - lambda * vmin.q[s][a]) <= 2.0 * tol);
        }
    }
}

TEST_CASE("value iteration matches exhaustive stationary-policy enumeration") {
    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        ArmSpec arm = random_arm(2 + static_cast<int>(rng.below(2)), rng);
        double lambda = 0.3 + rng.uniform();
        for (Direction dir : {Direction::Max, Direction::Min}) {
            ValueFunction vf = solve_decoupled(arm, lambda, 0.5, dir, 1e-7);
            std::vector<double> oracle = best_stationary_value(arm, lambda, 0.5, dir);
            for (int s = 0; s < arm.num_states; ++s)
                CHECK(vf.value(s) == doctest::Approx(oracle[s]).epsilon(1e-5));
        }
    }
}

TEST_CASE("indexability certification on a grid") {
    ArmSpec bern = make_bernoulli_arm(0, 0.5, 2.0);
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(2.0 * 1.0 * i / 49.0);
    CHECK(check_indexability(bern, 0.9, grid, true).indexable_on_grid);

    BeliefArm hidden{0.1, 0.9, 1.0, 1.0};
    ArmSpec surrogate = tabularize(hidden, 10);
    CHECK(check_indexability(surrogate, 0.9, grid).indexable_on_grid);

    // identical actions, zero cost: predicate constant in lambda
    ArmSpec flat = make_bernoulli_arm(0, 0.5, 1.0, 0.0);
    flat.reward[0][0] = flat.reward[0][1];
    CHECK(check_indexability(flat, 0.9, grid).indexable_on_grid);
}

TEST_CASE("index table csv shape") {
    RmabInstance inst;
    inst.arms.push_back(make_bernoulli_arm(0, 0.5, 2.0));
    inst.arms.push_back(make_bernoulli_arm(1, 1.0, 1.0));
    IndexTable table = build_index_table(inst);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].lambda_plus == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(table.rows[1].lambda_minus == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(table.to_csv().rfind("arm_id,state,lambda_plus,lambda_minus", 0) == 0);
}

TEST_CASE("qwi approaches the exact minimization index") {
    QwiSchedule sched;
    {
        ArmSpec arm = make_bernoulli_arm(0, 0.5, 2.0);  // lambda- = 1
        Rng rng(23);
        QwiResult res = qwi_tabular(arm, 0.9, 50000, rng, sched);
        CHECK(res.lambda[0] == doctest::Approx(1.0).epsilon(0.1));
        CHECK_FALSE(res.capped[0]);
    }
    {
        ArmSpec arm = make_bernoulli_arm(0, 1.0, 3.0);  // lambda- = 1/3
        Rng rng(29);
        QwiResult res = qwi_tabular(arm, 0.9, 50000, rng, sched);
        CHECK(res.lambda[0] == doctest::Approx(1.0 / 3.0).epsilon(0.1));
    }
    {
        // Zero reward makes lambda- infinite; a steep cost drives the slow
        // iterate past the cap within the update budget.
        ArmSpec arm = make_bernoulli_arm(0, 0.5, 0.0, 5.0);
        Rng rng(31);
        QwiResult res = qwi_tabular(arm, 0.9, 50000, rng, sched);
        CHECK(res.capped[0]);
    }
}
