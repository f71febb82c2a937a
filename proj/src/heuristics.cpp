#include "rmab/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "rmab/index.hpp"

namespace rmab {

IndexCache::IndexCache(const RmabInstance& inst, double tol) : inst_(&inst), tol_(tol) {}

const ArmSpec& IndexCache::truncated_arm(int arm, int trunc_scale) {
    auto key = std::make_pair(arm, trunc_scale);
    auto it = truncated_.find(key);
    if (it != truncated_.end()) return it->second;
    ArmSpec spec = inst_->arms[arm];
    double scale = std::pow(2.0, trunc_scale);
    for (auto& sa : spec.reward)
        for (auto& dist : sa)
            for (auto& o : dist) o.value = std::min(o.value / scale, 1.0);
    return truncated_.emplace(key, std::move(spec)).first->second;
}

double IndexCache::lambda_plus(int arm, int state, int trunc_scale) {
    auto key = std::make_tuple(arm, state, trunc_scale);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const ArmSpec& spec = trunc_scale < 0 ? inst_->arms[arm] : truncated_arm(arm, trunc_scale);
    double idx = whittle_max(spec, state, inst_->beta, tol_);
    cache_.emplace(key, idx);
    return idx;
}

double IndexCache::lambda_minus(int arm, int state) {
    return whittle_min_from_max(lambda_plus(arm, state));
}

SelectorConfig SelectorConfig::from_instance(const RmabInstance& inst) {
    SelectorConfig cfg;
    cfg.rho = inst.rho;
    cfg.threshold = inst.threshold;
    return cfg;
}

void SelectorConfig::validate() const {
    if (!(m > 1.0)) throw std::invalid_argument("selector config: budget multiplier must exceed 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("selector config: rho must be in (0,1]");
}

namespace {

double selection_prob(const RmabInstance& inst, const JointState& s, const ActionVector& a,
                      const SelectorConfig& cfg, Rng& rng) {
    SelectionContext ctx;
    ctx.threshold = cfg.threshold;
    for (std::size_t i = 0; i < inst.arms.size(); ++i)
        if (a[i]) ctx.add(inst.arms[i], s[i]);
    return cfg.prob(ctx, rng);
}

bool all_selected(const ActionVector& a) {
    return std::all_of(a.begin(), a.end(), [](std::uint8_t b) { return b != 0; });
}

// Arms in descending index order (ascending lambda-), lower id first on ties.
std::vector<int> index_order(const RmabInstance& inst, const JointState& s, IndexCache& cache) {
    std::vector<int> order(inst.arms.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> idx(inst.arms.size());
    for (std::size_t i = 0; i < inst.arms.size(); ++i)
        idx[i] = cache.lambda_plus(static_cast<int>(i), s[i]);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return idx[a] > idx[b]; });
    return order;
}

// Greedy budgeted pass over candidates already in index order. Appends the
// chosen arms to `a`, spending from `spent` up to `budget`.
void greedy_fill(const RmabInstance& inst, const std::vector<int>& order, ActionVector& a,
                 double& spent, double budget) {
    for (int i : order) {
        if (a[i]) continue;
        double c = inst.arms[i].cost1;
        if (spent + c <= budget + 1e-12) {
            a[i] = 1;
            spent += c;
        }
    }
}

double min_cost(const RmabInstance& inst) {
    double b = kInf;
    for (const auto& arm : inst.arms) b = std::min(b, arm.cost1);
    return b;
}

double min_positive_cost(const RmabInstance& inst) {
    double b = kInf;
    for (const auto& arm : inst.arms)
        if (arm.cost1 > 0.0) b = std::min(b, arm.cost1);
    return std::isinf(b) ? 1.0 : b;
}

}  // namespace

ActionVector greedy_max(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                        double budget) {
    if (budget < 0.0) throw std::invalid_argument("greedy_max: negative budget");
    ActionVector a(inst.arms.size(), 0);
    double spent = 0.0;
    greedy_fill(inst, index_order(inst, s, cache), a, spent, budget);
    return a;
}

ActionVector greedy_min(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                        const SelectorConfig& cfg, Rng& rng) {
    ActionVector a(inst.arms.size(), 0);
    std::vector<int> order = index_order(inst, s, cache);
    std::size_t next = 0;
    while (selection_prob(inst, s, a, cfg, rng) < cfg.rho && !all_selected(a)) {
        a[order[next++]] = 1;
    }
    return a;
}

ActionVector increasing_budget(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                               const SelectorConfig& cfg, Rng& rng, double* budget_io) {
    cfg.validate();
    ActionVector a(inst.arms.size(), 0);
    std::vector<int> order = index_order(inst, s, cache);
    double b = budget_io && *budget_io > 0.0 ? *budget_io : min_cost(inst);
    if (b <= 0.0) b = 0.0;  // zero-cost arms go first, then fall back below
    bool satisfied = selection_prob(inst, s, a, cfg, rng) >= cfg.rho;
    while (!satisfied && !all_selected(a)) {
        // One budget phase; the guard is re-checked after every single
        // selection so the heuristic never overshoots within a phase.
        double spent = 0.0;
        for (int i : order) {
            if (a[i]) continue;
            double c = inst.arms[i].cost1;
            if (spent + c > b + 1e-12) continue;
            a[i] = 1;
            spent += c;
            satisfied = selection_prob(inst, s, a, cfg, rng) >= cfg.rho;
            if (satisfied) break;
        }
        if (b <= 0.0)
            b = min_positive_cost(inst);
        else
            b *= cfg.m;
    }
    if (budget_io && cfg.persist_budget) *budget_io = b;
    return a;
}

ActionVector truncated_reward(const RmabInstance& inst, const JointState& s, IndexCache& cache,
                              const SelectorConfig& cfg, Rng& rng, double* budget_io) {
    cfg.validate();
    const int n = static_cast<int>(inst.arms.size());
    ActionVector a(n, 0);

    // Maximum possible active reward at the current states.
    double r_max = 0.0;
    for (int i = 0; i < n; ++i) r_max = std::max(r_max, dist_max(inst.arms[i].reward[s[i]][1]));
    int tau_max = r_max > 1.0 ? static_cast<int>(std::ceil(std::log2(r_max))) : 0;

    double b = budget_io && *budget_io > 0.0 ? *budget_io : min_cost(inst);
    if (b <= 0.0) b = min_positive_cost(inst);

    while (selection_prob(inst, s, a, cfg, rng) < cfg.rho && !all_selected(a)) {
        int tau_star = tau_max;  // fall back to the least aggressive truncation
        ActionVector pick_star;
        for (int tau = 0; tau <= tau_max; ++tau) {
            // Greedy run over not-yet-selected arms under the truncated index.
            std::vector<int> order;
            for (int i = 0; i < n; ++i)
                if (!a[i]) order.push_back(i);
            std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
                return cache.lambda_plus(x, s[x], tau) > cache.lambda_plus(y, s[y], tau);
            });
            ActionVector pick(n, 0);
            double spent = 0.0;
            greedy_fill(inst, order, pick, spent, b);
            // "Poor": every remaining unselected arm has truncated index <= 1/b.
            bool poor = true;
            for (int i = 0; i < n; ++i) {
                if (a[i] || pick[i]) continue;
                if (cache.lambda_plus(i, s[i], tau) > 1.0 / b) {
                    poor = false;
                    break;
                }
            }
            if (tau == tau_max && pick_star.empty()) pick_star = pick;
            if (poor) {
                tau_star = tau;
                pick_star = pick;
                break;
            }
        }
        (void)tau_star;
        bool added = false;
        for (int i = 0; i < n; ++i) {
            if (!pick_star.empty() && pick_star[i] && !a[i]) {
                a[i] = 1;
                added = true;
            }
        }
        b *= cfg.m;
        // With every remaining arm over budget the phase adds nothing; the
        // growing budget eventually admits one, but guard against stalls.
        if (!added && b > 1e18) break;
    }
    if (budget_io && cfg.persist_budget) *budget_io = b;
    return a;
}

ActionVector baseline_random(const RmabInstance& inst, const JointState& s,
                             const SelectorConfig& cfg, Rng& rng) {
    ActionVector a(inst.arms.size(), 0);
    std::vector<int> remaining(inst.arms.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    while (selection_prob(inst, s, a, cfg, rng) < cfg.rho && !remaining.empty()) {
        std::size_t pick = static_cast<std::size_t>(rng.below(remaining.size()));
        a[remaining[pick]] = 1;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return a;
}

ActionVector baseline_all_active(const RmabInstance& inst) {
    return ActionVector(inst.arms.size(), 1);
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "greedy_min") return PolicyKind::GreedyMin;
    if (name == "increasing_budget") return PolicyKind::IncreasingBudget;
    if (name == "truncated_reward") return PolicyKind::TruncatedReward;
    if (name == "random") return PolicyKind::Random;
    if (name == "all_active") return PolicyKind::AllActive;
    if (name == "greedy_max") return PolicyKind::GreedyMax;
    throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::GreedyMin: return "greedy_min";
        case PolicyKind::IncreasingBudget: return "increasing_budget";
        case PolicyKind::TruncatedReward: return "truncated_reward";
        case PolicyKind::Random: return "random";
        case PolicyKind::AllActive: return "all_active";
        case PolicyKind::GreedyMax: return "greedy_max";
    }
    return "?";
}

namespace {

class HeuristicPolicy : public Policy {
public:
    HeuristicPolicy(PolicyKind kind, SelectorConfig cfg, std::shared_ptr<IndexCache> cache,
                    double budget)
        : kind_(kind), cfg_(std::move(cfg)), cache_(std::move(cache)), greedy_budget_(budget) {}

    std::string name() const override { return policy_name(kind_); }

    ActionVector select(const RmabInstance& inst, const JointState& s, Rng& rng) override {
        switch (kind_) {
            case PolicyKind::GreedyMin:
                return greedy_min(inst, s, *cache_, cfg_, rng);
            case PolicyKind::IncreasingBudget:
                return increasing_budget(inst, s, *cache_, cfg_, rng,
                                         cfg_.persist_budget ? &budget_state_ : nullptr);
            case PolicyKind::TruncatedReward:
                return truncated_reward(inst, s, *cache_, cfg_, rng,
                                        cfg_.persist_budget ? &budget_state_ : nullptr);
            case PolicyKind::Random:
                return baseline_random(inst, s, cfg_, rng);
            case PolicyKind::AllActive:
                return baseline_all_active(inst);
            case PolicyKind::GreedyMax:
                return greedy_max(inst, s, *cache_, greedy_budget_);
        }
        throw std::logic_error("unreachable");
    }

private:
    PolicyKind kind_;
    SelectorConfig cfg_;
    std::shared_ptr<IndexCache> cache_;
    double greedy_budget_;
    double budget_state_ = 0.0;
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const SelectorConfig& cfg,
                                    std::shared_ptr<IndexCache> cache, double greedy_max_budget) {
    return std::make_unique<HeuristicPolicy>(kind, cfg, std::move(cache), greedy_max_budget);
}

}  // namespace rmab
