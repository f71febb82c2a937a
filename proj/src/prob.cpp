#include "rmab/prob.hpp"

#include <cmath>
#include <stdexcept>

namespace rmab {

namespace {

double enumerate(const std::vector<RewardDist>& dists, std::size_t i, double sum,
                 double max_rest, double threshold) {
    if (sum >= threshold) return 1.0;           // already satisfied
    if (sum + max_rest < threshold) return 0.0;  // unreachable
    if (i == dists.size()) return 0.0;
    double rest = max_rest - dist_max(dists[i]);
    double p = 0.0;
    for (const auto& o : dists[i])
        if (o.prob > 0.0) p += o.prob * enumerate(dists, i + 1, sum + o.value, rest, threshold);
    return p;
}

}  // namespace

double exact_satisfaction_prob(const SelectionContext& ctx, std::size_t cap) {
    double combos = 1.0;
    for (const auto& d : ctx.dists) {
        combos *= static_cast<double>(d.size());
        if (combos > static_cast<double>(cap))
            throw CapacityError("exact_satisfaction_prob: outcome space exceeds cap; use Monte Carlo");
    }
    if (ctx.dists.empty()) return ctx.threshold <= 0.0 ? 1.0 : 0.0;
    double max_total = 0.0;
    for (const auto& d : ctx.dists) max_total += dist_max(d);
    return enumerate(ctx.dists, 0, 0.0, max_total, ctx.threshold);
}

double mc_satisfaction_prob(const SelectionContext& ctx, long samples, Rng& rng) {
    if (samples < 1) throw std::invalid_argument("mc_satisfaction_prob: need at least one sample");
    long hits = 0;
    for (long k = 0; k < samples; ++k) {
        double sum = 0.0;
        for (const auto& d : ctx.dists) sum += sample_dist(d, rng);
        if (sum >= ctx.threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

double hoeffding_lower_bound(const SelectionContext& ctx) {
    double mu = 0.0, range_sq = 0.0;
    for (const auto& d : ctx.dists) {
        double lo = dist_min(d), hi = dist_max(d);
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("hoeffding_lower_bound: unbounded support");
        mu += dist_mean(d);
        range_sq += (hi - lo) * (hi - lo);
    }
    if (ctx.dists.empty()) return ctx.threshold <= 0.0 ? 1.0 : 0.0;
    if (mu <= ctx.threshold) return 0.0;
    if (range_sq == 0.0) return 1.0;  // deterministic sum above threshold
    double gap = mu - ctx.threshold;
    return std::max(0.0, 1.0 - std::exp(-2.0 * gap * gap / range_sq));
}

SatisfactionFn make_satisfaction_fn(ProbEstimator est, long mc_samples) {
    switch (est) {
        case ProbEstimator::Mc:
            return [mc_samples](const SelectionContext& ctx, Rng& rng) {
                return mc_satisfaction_prob(ctx, mc_samples, rng);
            };
        case ProbEstimator::Hoeffding:
            return [](const SelectionContext& ctx, Rng&) { return hoeffding_lower_bound(ctx); };
        case ProbEstimator::Exact:
        default:
            return [mc_samples](const SelectionContext& ctx, Rng& rng) {
                try {
                    return exact_satisfaction_prob(ctx);
                } catch (const CapacityError&) {
                    return mc_satisfaction_prob(ctx, mc_samples, rng);
                }
            };
    }
}

}  // namespace rmab
