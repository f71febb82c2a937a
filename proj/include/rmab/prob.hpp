#pragma once

#include <cstddef>
#include <functional>

#include "rmab/core.hpp"

namespace rmab {

// Active-action reward distributions of the currently selected arms plus the
// threshold. The probability is with respect to reward randomness only.
struct SelectionContext {
    std::vector<RewardDist> dists;
    double threshold = 0.0;

    void add(const ArmSpec& arm, int state) { dists.push_back(arm.reward[state][1]); }
};

// Exact probability that the selected rewards sum to at least the threshold,
// by enumerating the joint outcome space. Throws CapacityError when the
// product of support sizes exceeds the cap.
double exact_satisfaction_prob(const SelectionContext& ctx, std::size_t cap = 1000000);

// Empirical frequency over independent joint draws.
double mc_satisfaction_prob(const SelectionContext& ctx, long samples, Rng& rng);

// Hoeffding lower bound on the satisfaction probability; valid but possibly
// loose. Requires bounded supports (always true for finite distributions).
double hoeffding_lower_bound(const SelectionContext& ctx);

enum class ProbEstimator { Exact, Mc, Hoeffding };

// Estimator used by the heuristics: exact when under cap, Monte Carlo
// otherwise; or one of the two forced choices.
using SatisfactionFn = std::function<double(const SelectionContext&, Rng&)>;

SatisfactionFn make_satisfaction_fn(ProbEstimator est, long mc_samples = 1000);

}  // namespace rmab
