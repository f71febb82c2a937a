#include "rmab/sim.hpp"

#include <cmath>
#include <sstream>

#include "rmab/belief.hpp"

namespace rmab {

namespace {

// Environment over the instance: tabular arms evolve by their tables; hidden
// arms run the true two-state chain and expose the surrogate (y, k) state.
class Environment {
public:
    Environment(const RmabInstance& inst, Rng& rng) : inst_(&inst) {
        visible_.resize(inst.arms.size(), 0);
        latent_.resize(inst.arms.size(), 0);
        for (std::size_t i = 0; i < inst.arms.size(); ++i) {
            if (inst.is_hidden(i)) {
                const BeliefArm& b = *inst.hidden[i];
                int K = inst.arms[i].num_states / 2;
                latent_[i] = rng.uniform() < b.stationary() ? 1 : 0;
                visible_[i] = belief_state_index(0, K, K);  // stationary belief
            }
        }
    }

    const JointState& visible() const { return visible_; }

    StepRecord step(const ActionVector& a, Rng& rng) {
        StepRecord rec;
        rec.actions = a;
        for (std::size_t i = 0; i < inst_->arms.size(); ++i) {
            const ArmSpec& arm = inst_->arms[i];
            int ai = a[i] ? 1 : 0;
            rec.cost += arm.cost(visible_[i], ai);
            if (!inst_->is_hidden(i)) {
                rec.reward_sum += sample_dist(arm.reward[visible_[i]][ai], rng);
                const auto& row = arm.transition[visible_[i]][ai];
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
                visible_[i] = nxt;
            } else {
                const BeliefArm& b = *inst_->hidden[i];
                int K = arm.num_states / 2;
                if (ai == 1) {
                    // Selection observes the hidden state and pays the reward
                    // if the chain is in state 1; the belief resets.
                    if (latent_[i] == 1) rec.reward_sum += b.r;
                    visible_[i] = belief_state_index(latent_[i], 1, K);
                } else {
                    int y = visible_[i] / K;
                    int k = visible_[i] % K + 1;
                    visible_[i] = belief_state_index(y, std::min(k + 1, K), K);
                }
                double p1 = latent_[i] == 1 ? b.p11 : b.p01;
                latent_[i] = rng.uniform() < p1 ? 1 : 0;
            }
        }
        rec.constraint_met = rec.reward_sum >= inst_->threshold - 1e-12;
        return rec;
    }

private:
    const RmabInstance* inst_;
    JointState visible_;
    std::vector<int> latent_;
};

}  // namespace

SimResult run_episode(const RmabInstance& inst, Policy& policy, int horizon, Rng rng) {
    if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
    Rng env_rng = rng.stream(1);
    Rng policy_rng = rng.stream(2);
    Environment env(inst, env_rng);
    SimResult result;
    std::vector<double> costs;
    double max_step_cost = 0.0;
    for (int t = 0; t < horizon; ++t) {
        ActionVector a = policy.select(inst, env.visible(), policy_rng);
        if (a.size() != inst.arms.size()) throw std::invalid_argument("policy returned wrong shape");
        StepRecord rec = env.step(a, env_rng);
        if (!rec.constraint_met) ++result.violations;
        max_step_cost = std::max(max_step_cost, rec.cost);
        costs.push_back(rec.cost);
        result.steps.push_back(std::move(rec));
    }
    result.discounted_cost = discounted_sum(costs, inst.beta);
    result.tail_bound = std::pow(inst.beta, horizon) * max_step_cost / (1.0 - inst.beta);
    return result;
}

ExperimentResult run_experiment(const RmabInstance& inst,
                                const std::vector<PolicyKind>& policies,
                                const SelectorConfig& cfg, int reps, int horizon,
                                std::uint64_t base_seed, double greedy_max_budget) {
    if (reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
    ExperimentResult out;
    std::ostringstream runs, aggs;
    runs << "policy,rep,step,cost,reward_sum,constraint_met\n";
    aggs << "policy,mean_cost,std_cost,violation_rate,tail_bound\n";
    Rng base(base_seed);
    // The index cache is pure given the instance, so policies share one.
    auto cache = std::make_shared<IndexCache>(inst);
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        Aggregate agg;
        agg.policy = policy_name(policies[pi]);
        agg.reps = reps;
        std::vector<double> costs;
        long violating_steps = 0;
        for (int rep = 0; rep < reps; ++rep) {
            auto policy = make_policy(policies[pi], cfg, cache, greedy_max_budget);
            SimResult res = run_episode(inst, *policy, horizon, base.stream(pi, rep));
            costs.push_back(res.discounted_cost);
            violating_steps += res.violations;
            agg.tail_bound = std::max(agg.tail_bound, res.tail_bound);
            for (std::size_t t = 0; t < res.steps.size(); ++t) {
                const StepRecord& rec = res.steps[t];
                runs << agg.policy << ',' << rep << ',' << t << ',' << rec.cost << ','
                     << rec.reward_sum << ',' << (rec.constraint_met ? 1 : 0) << '\n';
            }
        }
        double mean = 0.0;
        for (double c : costs) mean += c;
        mean /= costs.size();
        double var = 0.0;
        for (double c : costs) var += (c - mean) * (c - mean);
        var /= costs.size();
        agg.mean_cost = mean;
        agg.std_cost = std::sqrt(var);
        agg.violation_rate = static_cast<double>(violating_steps) / (static_cast<double>(reps) * horizon);
        aggs << agg.policy << ',' << agg.mean_cost << ',' << agg.std_cost << ','
             << agg.violation_rate << ',' << agg.tail_bound << '\n';
        out.aggregates.push_back(agg);
    }
    out.per_run_csv = runs.str();
    out.aggregate_csv = aggs.str();
    return out;
}

}  // namespace rmab
