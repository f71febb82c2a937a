#include "rmab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmab {

namespace {
constexpr double kProbTol = 1e-9;

void check_prob_row(const std::vector<double>& row, std::size_t n, const std::string& what, int arm_id) {
    if (row.size() != n)
        throw std::invalid_argument("arm " + std::to_string(arm_id) + ": " + what + " has wrong length");
    double sum = 0.0;
    for (double p : row) {
        if (p < -kProbTol || p > 1.0 + kProbTol)
            throw std::invalid_argument("arm " + std::to_string(arm_id) + ": " + what + " entry out of [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument("arm " + std::to_string(arm_id) + ": " + what + " does not sum to 1");
}
}  // namespace

double dist_mean(const RewardDist& d) {
    double m = 0.0;
    for (const auto& o : d) m += o.value * o.prob;
    return m;
}

double dist_max(const RewardDist& d) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& o : d) m = std::max(m, o.value);
    return m;
}

double dist_min(const RewardDist& d) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& o : d) m = std::min(m, o.value);
    return m;
}

double sample_dist(const RewardDist& d, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    for (const auto& o : d) {
        acc += o.prob;
        if (u < acc) return o.value;
    }
    return d.back().value;
}

double ArmSpec::max_reward() const {
    double m = 0.0;
    for (const auto& sa : reward)
        for (const auto& dist : sa) m = std::max(m, dist_max(dist));
    return m;
}

void ArmSpec::validate() const {
    if (num_states <= 0) throw std::invalid_argument("arm " + std::to_string(id) + ": no states");
    if (cost1 < 0.0) throw std::invalid_argument("arm " + std::to_string(id) + ": negative cost1");
    if (transition.size() != static_cast<std::size_t>(num_states) ||
        reward.size() != static_cast<std::size_t>(num_states))
        throw std::invalid_argument("arm " + std::to_string(id) + ": table size mismatch");
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < 2; ++a) {
            check_prob_row(transition[s][a], num_states, "transition row", id);
            const RewardDist& d = reward[s][a];
            if (d.empty())
                throw std::invalid_argument("arm " + std::to_string(id) + ": empty reward distribution");
            double sum = 0.0;
            for (const auto& o : d) {
                if (o.prob < -kProbTol) throw std::invalid_argument("arm " + std::to_string(id) + ": negative reward prob");
                sum += o.prob;
            }
            if (std::abs(sum - 1.0) > kProbTol)
                throw std::invalid_argument("arm " + std::to_string(id) + ": reward probs do not sum to 1");
        }
    }
    if (!state_costs.empty()) {
        if (state_costs.size() != static_cast<std::size_t>(num_states))
            throw std::invalid_argument("arm " + std::to_string(id) + ": state_costs size mismatch");
        for (const auto& c : state_costs)
            if (c[0] < 0.0 || c[1] < 0.0)
                throw std::invalid_argument("arm " + std::to_string(id) + ": negative state cost");
    }
}

void BeliefArm::validate() const {
    if (!(p01 > 0.0 && p01 < 1.0 && p11 > 0.0 && p11 < 1.0))
        throw std::invalid_argument("belief arm: transition probabilities must be in (0,1)");
    if (!(r > 0.0)) throw std::invalid_argument("belief arm: reward must be positive");
    if (cost1 < 0.0) throw std::invalid_argument("belief arm: negative cost1");
}

void RmabInstance::validate() const {
    if (arms.empty()) throw std::invalid_argument("instance: no arms");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("instance: beta must be in (0,1)");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("instance: rho must be in (0,1]");
    for (const auto& arm : arms) arm.validate();
    if (!hidden.empty() && hidden.size() != arms.size())
        throw std::invalid_argument("instance: hidden markers misaligned");
}

ArmSpec make_bernoulli_arm(int id, double p, double r, double cost1) {
    ArmSpec arm;
    arm.id = id;
    arm.num_states = 1;
    arm.transition = {{std::vector<double>{1.0}, std::vector<double>{1.0}}};
    arm.reward = {{point_reward(0.0), bernoulli_reward(r, p)}};
    arm.cost1 = cost1;
    return arm;
}

double sample_reward(const ArmSpec& arm, int state, int action, Rng& rng) {
    if (state < 0 || state >= arm.num_states)
        throw std::invalid_argument("sample_reward: invalid state");
    if (action < 0 || action > 1)
        throw std::invalid_argument("sample_reward: invalid action");
    return sample_dist(arm.reward[state][action], rng);
}

StepResult step(const RmabInstance& inst, const JointState& s, const ActionVector& a, Rng& rng) {
    if (s.size() != inst.arms.size() || a.size() != inst.arms.size())
        throw std::invalid_argument("step: shape mismatch");
    StepResult out;
    out.next.resize(inst.arms.size());
    out.rewards.resize(inst.arms.size());
    for (std::size_t i = 0; i < inst.arms.size(); ++i) {
        const ArmSpec& arm = inst.arms[i];
        int si = s[i];
        int ai = a[i] ? 1 : 0;
        if (si < 0 || si >= arm.num_states) throw std::invalid_argument("step: invalid state");
        out.total_cost += arm.cost(si, ai);
        out.rewards[i] = sample_dist(arm.reward[si][ai], rng);
        const std::vector<double>& row = arm.transition[si][ai];
        double u = rng.uniform();
        double acc = 0.0;
        int nxt = arm.num_states - 1;
        for (int s2 = 0; s2 < arm.num_states; ++s2) {
            acc += row[s2];
            if (u < acc) {
                nxt = s2;
                break;
            }
        }
        out.next[i] = nxt;
    }
    return out;
}

double discounted_sum(const std::vector<double>& values, double beta) {
    double total = 0.0;
    double w = 1.0;
    for (double v : values) {
        total += w * v;
        w *= beta;
    }
    return total;
}

}  // namespace rmab
