#pragma once

#include <string>

#include "rmab/core.hpp"
#include "rmab/heuristics.hpp"

namespace rmab {

struct StepRecord {
    ActionVector actions;
    double reward_sum = 0.0;  // realized reward under the taken actions
    double cost = 0.0;
    bool constraint_met = false;
};

struct SimResult {
    std::vector<StepRecord> steps;
    double discounted_cost = 0.0;
    int violations = 0;
    // beta^T * max_step_cost / (1-beta): bound on the truncated tail.
    double tail_bound = 0.0;
};

struct Aggregate {
    std::string policy;
    double mean_cost = 0.0;
    double std_cost = 0.0;
    double violation_rate = 0.0;  // violating (rep, step) pairs / (reps * T)
    double tail_bound = 0.0;
    int reps = 0;
};

// One episode: the policy selects from visible states, arms evolve; hidden
// two-state arms run their true chain while the policy sees only the belief
// surrogate state (initial belief is the chain's stationary probability).
SimResult run_episode(const RmabInstance& inst, Policy& policy, int horizon, Rng rng);

struct ExperimentResult {
    std::vector<Aggregate> aggregates;
    // per_run rows: policy, rep, step, cost, reward_sum, constraint_met
    std::string per_run_csv;
    std::string aggregate_csv;
};

// Repetition k of each policy uses an rng stream derived from
// (base_seed, policy index, k); trajectories are not shared across policies.
ExperimentResult run_experiment(const RmabInstance& inst,
                                const std::vector<PolicyKind>& policies,
                                const SelectorConfig& cfg, int reps, int horizon,
                                std::uint64_t base_seed, double greedy_max_budget = 1.0);

}  // namespace rmab
