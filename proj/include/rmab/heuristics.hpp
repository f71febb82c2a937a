#pragma once

#include <map>
#include <memory>
#include <string>

#include "rmab/core.hpp"
#include "rmab/prob.hpp"

namespace rmab {

// Memoized maximization Whittle indices for an instance, keyed by
// (arm, state, truncation scale). Scale -1 means the untruncated reward;
// scale tau >= 0 means the single-step truncated reward min(r/2^tau, 1)
// applied to every state of the arm, transitions held fixed.
class IndexCache {
public:
    explicit IndexCache(const RmabInstance& inst, double tol = 1e-4);

    double lambda_plus(int arm, int state, int trunc_scale = -1);
    double lambda_minus(int arm, int state);

private:
    const RmabInstance* inst_;
    double tol_;
    std::map<std::tuple<int, int, int>, double> cache_;
    std::map<std::pair<int, int>, ArmSpec> truncated_;

    const ArmSpec& truncated_arm(int arm, int trunc_scale);
};

struct SelectorConfig {
    double rho = 0.95;
    double threshold = 0.0;
    double m = 2.0;  // budget multiplier, > 1
    SatisfactionFn prob = make_satisfaction_fn(ProbEstimator::Exact);
    bool persist_budget = false;  // carry Algorithm 3/4 budgets across steps

    static SelectorConfig from_instance(const RmabInstance& inst);
    void validate() const;
};

// Algorithm 1: repeatedly take the unselected arm with the largest index that
// fits the remaining budget. Ties break toward the lower arm id.
ActionVector greedy_max(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                        double budget);

// Algorithm 2: smallest lambda- (largest lambda+) first until the selected
// set satisfies the threshold with probability rho, or all arms are active.
ActionVector greedy_min(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                        const SelectorConfig& cfg, Rng& rng);

// Algorithm 3: exponentially growing budget phases of greedy selection.
// budget_io, when non-null, carries the budget across time steps.
ActionVector increasing_budget(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                               const SelectorConfig& cfg, Rng& rng, double* budget_io = nullptr);

// Algorithm 4: per budget phase, pick the smallest truncation scale whose
// greedy run is "poor" (all remaining arms have truncated index <= 1/b).
ActionVector truncated_reward(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                              const SelectorConfig& cfg, Rng& rng, double* budget_io = nullptr);

// Baselines: uniformly random additions until satisfied, and all-active.
ActionVector baseline_random(const RmabInstance& inst, const JointState& s,
                             const SelectorConfig& cfg, Rng& rng);
ActionVector baseline_all_active(const RmabInstance& inst);

enum class PolicyKind { GreedyMin, IncreasingBudget, TruncatedReward, Random, AllActive, GreedyMax };

PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind kind);

// Per-episode action selector. Implementations may keep state across time
// steps (index memoization, persisted budgets).
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual ActionVector select(const RmabInstance& inst, const JointState& s, Rng& rng) = 0;
};

/// greedy_max_budget is only used by PolicyKind::GreedyMax.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const SelectorConfig& cfg,
                                    std::shared_ptr<IndexCache> cache,
                                    double greedy_max_budget = 1.0);

}  // namespace rmab
