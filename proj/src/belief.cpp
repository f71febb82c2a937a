#include "rmab/belief.hpp"

#include <cmath>
#include <stdexcept>

#include "rmab/index.hpp"

namespace rmab {

double belief_update(double omega, double p01, double p11, int action,
                     std::optional<int> observation) {
    if (omega < 0.0 || omega > 1.0) throw std::invalid_argument("belief_update: omega out of [0,1]");
    if (action == 1) {
        if (!observation) throw std::invalid_argument("belief_update: active action needs an observation");
        return *observation == 1 ? p11 : p01;
    }
    if (observation) throw std::invalid_argument("belief_update: observation supplied with passive action");
    return omega * p11 + (1.0 - omega) * p01;
}

double surrogate_belief(const BeliefArm& arm, int y, int k, int horizon_k) {
    if (k >= horizon_k) return arm.stationary();
    double omega = y == 1 ? arm.p11 : arm.p01;
    for (int i = 1; i < k; ++i) omega = belief_update(omega, arm.p01, arm.p11, 0, std::nullopt);
    return omega;
}

ArmSpec tabularize(const BeliefArm& arm, int horizon_k) {
    if (horizon_k < 1) throw std::invalid_argument("tabularize: horizon must be >= 1");
    arm.validate();
    const int K = horizon_k;
    const int S = 2 * K;
    ArmSpec spec;
    spec.num_states = S;
    spec.cost1 = arm.cost1;
    spec.transition.resize(S);
    spec.reward.resize(S);
    for (int y = 0; y < 2; ++y) {
        for (int k = 1; k <= K; ++k) {
            int s = belief_state_index(y, k, K);
            double omega = surrogate_belief(arm, y, k, K);
            std::vector<double> passive(S, 0.0), active(S, 0.0);
            passive[belief_state_index(y, std::min(k + 1, K), K)] = 1.0;
            active[belief_state_index(1, 1, K)] = omega;
            active[belief_state_index(0, 1, K)] = 1.0 - omega;
            spec.transition[s] = {std::move(passive), std::move(active)};
            spec.reward[s] = {point_reward(0.0), bernoulli_reward(arm.r, omega)};
        }
    }
    return spec;
}

double whittle_belief(const BeliefArm& arm, const BeliefState& bs, double beta,
                      int horizon_k, double tol) {
    ArmSpec surrogate = tabularize(arm, horizon_k);
    int state;
    if (bs.last_observation) {
        int k = std::max(1, std::min(bs.steps_since_observation + 1, horizon_k));
        state = belief_state_index(*bs.last_observation, k, horizon_k);
    } else {
        // No observation yet: pick the surrogate state with the closest belief.
        state = 0;
        double best = 2.0;
        for (int y = 0; y < 2; ++y) {
            for (int k = 1; k <= horizon_k; ++k) {
                double d = std::abs(surrogate_belief(arm, y, k, horizon_k) - bs.omega);
                if (d < best) {
                    best = d;
                    state = belief_state_index(y, k, horizon_k);
                }
            }
        }
    }
    return whittle_max(surrogate, state, beta, tol);
}

}  // namespace rmab
