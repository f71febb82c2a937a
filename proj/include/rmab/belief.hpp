#pragma once

#include <optional>

#include "rmab/core.hpp"

namespace rmab {

// Belief bookkeeping for a hidden two-state arm: probability the hidden state
// is 1, plus the last observation and the number of passive steps since it.
struct BeliefState {
    double omega = 0.5;
    std::optional<int> last_observation;
    int steps_since_observation = 0;
};

// Active with an observed state y resets the belief to the chain row p_{y1};
// passive applies one blind chain step.
double belief_update(double omega, double p01, double p11, int action,
                     std::optional<int> observation);

// Finite surrogate arm over states (last observation y, passive steps k),
// k in 1..K. Beliefs at k = K use the chain's stationary probability.
// State index = y*K + (k-1).
ArmSpec tabularize(const BeliefArm& arm, int horizon_k);

inline int belief_state_index(int y, int k, int horizon_k) {
    return y * horizon_k + (k - 1);
}

// Belief of surrogate state (y, k).
double surrogate_belief(const BeliefArm& arm, int y, int k, int horizon_k);

// Whittle index of the surrogate state closest to the given belief state.
double whittle_belief(const BeliefArm& arm, const BeliefState& bs, double beta,
                      int horizon_k = 30, double tol = 1e-6);

}  // namespace rmab
