#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmab/rng.hpp"

namespace rmab {

// Thrown when an exact computation would exceed its enumeration cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RewardOutcome {
    double value = 0.0;
    double prob = 0.0;
};

// Finite discrete distribution over real rewards.
using RewardDist = std::vector<RewardOutcome>;

double dist_mean(const RewardDist& d);
double dist_max(const RewardDist& d);
double dist_min(const RewardDist& d);
double sample_dist(const RewardDist& d, Rng& rng);

inline RewardDist point_reward(double v) { return {{v, 1.0}}; }
inline RewardDist bernoulli_reward(double r, double p) {
    if (p >= 1.0) return {{r, 1.0}};
    if (p <= 0.0) return {{0.0, 1.0}};
    return {{0.0, 1.0 - p}, {r, p}};
}

// One finite MDP arm with a binary action space. Action 1 (active) costs
// cost1, action 0 (passive) is free; state_costs, when non-empty, overrides
// the cost of each (state, action) pair for arms whose charging is state
// dependent (the reduction's trapping states need this).
struct ArmSpec {
    int id = 0;
    int num_states = 0;
    // transition[s][a] is a probability row over next states.
    std::vector<std::array<std::vector<double>, 2>> transition;
    // reward[s][a] is a finite discrete reward distribution.
    std::vector<std::array<RewardDist, 2>> reward;
    double cost1 = 1.0;
    std::vector<std::array<double, 2>> state_costs;  // empty: {0, cost1} everywhere

    double cost(int state, int action) const {
        if (!state_costs.empty()) return state_costs[state][action];
        return action == 1 ? cost1 : 0.0;
    }
    double expected_reward(int s, int a) const { return dist_mean(reward[s][a]); }
    double max_reward() const;
    void validate() const;
};

// Hidden two-state arm parameters (see belief module for the dynamics).
struct BeliefArm {
    double p01 = 0.5;  // P(state 0 -> 1)
    double p11 = 0.5;  // P(state 1 -> 1)
    double r = 1.0;    // reward when active and in state 1
    double cost1 = 1.0;

    double stationary() const { return p01 / (1.0 - p11 + p01); }
    void validate() const;
};

using JointState = std::vector<int>;
using ActionVector = std::vector<std::uint8_t>;

struct RmabInstance {
    std::vector<ArmSpec> arms;
    double beta = 0.9;
    double threshold = 0.0;  // R
    double rho = 0.95;
    // When arm i is a tabularized hidden two-state arm, hidden[i] carries the
    // true chain so the simulator can run it while policies see beliefs only.
    std::vector<std::optional<BeliefArm>> hidden;

    std::size_t size() const { return arms.size(); }
    bool is_hidden(std::size_t i) const { return i < hidden.size() && hidden[i].has_value(); }
    void validate() const;
};

ArmSpec make_bernoulli_arm(int id, double p, double r, double cost1 = 1.0);

// Draw a reward for (state, action); deterministic given the rng state.
double sample_reward(const ArmSpec& arm, int state, int action, Rng& rng);

struct StepResult {
    JointState next;
    std::vector<double> rewards;
    double total_cost = 0.0;
};

/// One environment step: every arm transitions independently, rewards are
// drawn independently, total cost is the sum of the arms' action costs.
StepResult step(const RmabInstance& inst, const JointState& s, const ActionVector& a, Rng& rng);

// sum_{t>=1} beta^{t-1} v_t over a finite sequence.
double discounted_sum(const std::vector<double>& values, double beta);

}  // namespace rmab
