#include "rmab/index.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rmab {

namespace {

// Sparse view of an arm's transition tables; VI sweeps on the experiment
// instances touch rows with very few nonzeros.
struct SparseArm {
    int num_states;
    std::vector<std::array<std::vector<std::pair<int, double>>, 2>> rows;
    std::vector<std::array<double, 2>> payoff;  // immediate payoff per (s,a)

    SparseArm(const ArmSpec& arm, double lambda, Direction dir) {
        num_states = arm.num_states;
        rows.resize(num_states);
        payoff.resize(num_states);
        for (int s = 0; s < num_states; ++s) {
            for (int a = 0; a < 2; ++a) {
                for (int s2 = 0; s2 < num_states; ++s2) {
                    double p = arm.transition[s][a][s2];
                    if (p > 0.0) rows[s][a].emplace_back(s2, p);
                }
                double er = arm.expected_reward(s, a);
                double c = arm.cost(s, a);
                payoff[s][a] = dir == Direction::Max ? er - lambda * c : lambda * er - c;
            }
        }
    }
};

}  // namespace

ValueFunction solve_decoupled(const ArmSpec& arm, double lambda, double beta,
                              Direction direction, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("solve_decoupled: tol must be positive");
    if (direction == Direction::Min && lambda < 0.0)
        throw std::invalid_argument("solve_decoupled: negative multiplier in min direction");
    SparseArm sp(arm, lambda, direction);

    std::vector<double> v(arm.num_states, 0.0), v_next(arm.num_states, 0.0);
    ValueFunction vf;
    vf.lambda = lambda;
    vf.direction = direction;
    vf.q.assign(arm.num_states, {0.0, 0.0});

    // Stopping at tol*(1-beta)/(2*beta) in sup norm guarantees the returned
    // table is within tol of the true fixed point.
    const double stop = tol * (1.0 - beta) / (2.0 * beta);
    for (int iter = 0; iter < 1000000; ++iter) {
        double diff = 0.0;
        for (int s = 0; s < arm.num_states; ++s) {
            for (int a = 0; a < 2; ++a) {
                double ev = 0.0;
                for (const auto& [s2, p] : sp.rows[s][a]) ev += p * v[s2];
                vf.q[s][a] = sp.payoff[s][a] + beta * ev;
            }
            v_next[s] = std::max(vf.q[s][0], vf.q[s][1]);
            diff = std::max(diff, std::abs(v_next[s] - v[s]));
        }
        v.swap(v_next);
        if (diff < stop) break;
    }
    return vf;
}

double whittle_max(const ArmSpec& arm, int state, double beta, double tol) {
    if (state < 0 || state >= arm.num_states) throw std::invalid_argument("whittle_max: invalid state");
    if (tol <= 0.0) throw std::invalid_argument("whittle_max: tol must be positive");
    auto passive = [&](double lam) {
        return solve_decoupled(arm, lam, beta, Direction::Max, tol).passive_optimal(state);
    };
    if (passive(0.0)) return 0.0;
    if (arm.cost1 <= 0.0) return kInf;  // the multiplier never bites
    double hi = arm.max_reward() / std::min(arm.cost1, 1.0) + 1.0;
    hi = std::max(hi, 1.0);
    if (!passive(hi)) return kInf;
    double lo = 0.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (passive(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double whittle_min(const ArmSpec& arm, int state, double beta, double tol) {
    if (state < 0 || state >= arm.num_states) throw std::invalid_argument("whittle_min: invalid state");
    if (tol <= 0.0) throw std::invalid_argument("whittle_min: tol must be positive");
    auto passive = [&](double lam) {
        return solve_decoupled(arm, lam, beta, Direction::Min, tol).passive_optimal(state);
    };
    // Passive is free, so the predicate holds at 0; grow the bracket until the
    // active action wins or the index is effectively infinite.
    constexpr double kCap = 1e12;
    double lo = 0.0, hi = 1.0;
    while (passive(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kCap) return kInf;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (passive(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double whittle_min_from_max(double lambda_plus) {
    if (lambda_plus < 0.0) throw std::invalid_argument("whittle_min_from_max: negative index");
    if (lambda_plus == 0.0) return kInf;
    return 1.0 / lambda_plus;
}

IndexabilityReport check_indexability(const ArmSpec& arm, double beta,
                                      const std::vector<double>& lambda_grid,
                                      bool check_min, double tol) {
    if (lambda_grid.empty()) throw std::invalid_argument("check_indexability: empty grid");
    IndexabilityReport report;
    std::vector<char> seen_passive(arm.num_states, 0);
    std::vector<double> first_lambda(arm.num_states, 0.0);
    for (double lam : lambda_grid) {
        ValueFunction vf = solve_decoupled(arm, lam, beta, Direction::Max, tol);
        for (int s = 0; s < arm.num_states; ++s) {
            bool p = vf.passive_optimal(s);
            if (p && !seen_passive[s]) {
                seen_passive[s] = 1;
                first_lambda[s] = lam;
            } else if (!p && seen_passive[s]) {
                report.indexable_on_grid = false;
                report.violations.push_back({s, first_lambda[s], lam});
            }
        }
    }
    if (check_min) {
        // Min direction scans the grid of reciprocals; the verdict must match.
        std::vector<char> seen_active(arm.num_states, 0);
        std::vector<double> first(arm.num_states, 0.0);
        for (double lam : lambda_grid) {
            if (lam <= 0.0) continue;
            ValueFunction vf = solve_decoupled(arm, lam, beta, Direction::Min, tol);
            for (int s = 0; s < arm.num_states; ++s) {
                bool active = !vf.passive_optimal(s);
                if (active && !seen_active[s]) {
                    seen_active[s] = 1;
                    first[s] = lam;
                } else if (!active && seen_active[s]) {
                    report.indexable_on_grid = false;
                    report.violations.push_back({s, first[s], lam});
                }
            }
        }
    }
    return report;
}

std::string IndexTable::to_csv() const {
    std::ostringstream out;
    out << "arm_id,state,lambda_plus,lambda_minus\n";
    for (const auto& row : rows) {
        out << row.arm_id << ',' << row.state << ',';
        if (std::isinf(row.lambda_plus))
            out << "inf";
        else
            out << row.lambda_plus;
        out << ',';
        if (std::isinf(row.lambda_minus))
            out << "inf";
        else
            out << row.lambda_minus;
        out << '\n';
    }
    return out.str();
}

IndexTable build_index_table(const RmabInstance& inst, double tol) {
    IndexTable table;
    for (const auto& arm : inst.arms) {
        for (int s = 0; s < arm.num_states; ++s) {
            IndexEntry e;
            e.arm_id = arm.id;
            e.state = s;
            e.lambda_plus = whittle_max(arm, s, inst.beta, tol);
            e.lambda_minus = std::isinf(e.lambda_plus) ? 0.0 : whittle_min_from_max(e.lambda_plus);
            table.rows.push_back(e);
        }
    }
    return table;
}

QwiResult qwi_tabular(const ArmSpec& arm, double beta, long updates, Rng& rng,
                      const QwiSchedule& sched) {
    if (updates < 1) throw std::invalid_argument("qwi_tabular: need at least one update");
    const int S = arm.num_states;
    QwiResult out;
    out.lambda.assign(S, 0.0);
    out.capped.assign(S, false);

    // One Q table and one trajectory per reference state; each table is
    // learned under that state's current multiplier.
    std::vector<std::vector<std::array<double, 2>>> q(S);
    std::vector<int> cur(S);
    for (int ref = 0; ref < S; ++ref) {
        q[ref].assign(S, {0.0, 0.0});
        cur[ref] = ref;
    }

    for (long k = 1; k <= updates; ++k) {
        double ak = sched.fast(k);
        double bk = sched.slow(k);
        for (int ref = 0; ref < S; ++ref) {
            int s = cur[ref];
            int a = rng.uniform() < 0.5 ? 0 : 1;
            double r = sample_dist(arm.reward[s][a], rng);
            // sample next state
            const auto& row = arm.transition[s][a];
            double u = rng.uniform();
            double acc = 0.0;
            int s2 = S - 1;
            for (int c = 0; c < S; ++c) {
                acc += row[c];
                if (u < acc) {
                    s2 = c;
                    break;
                }
            }
            double payoff = out.lambda[ref] * r - arm.cost(s, a);
            double target = payoff + beta * std::max(q[ref][s2][0], q[ref][s2][1]);
            q[ref][s][a] += ak * (target - q[ref][s][a]);
            out.lambda[ref] += bk * (q[ref][ref][0] - q[ref][ref][1]);
            if (out.lambda[ref] < 0.0) out.lambda[ref] = 0.0;
            if (out.lambda[ref] > sched.lambda_cap) out.capped[ref] = true;
            cur[ref] = s2;
        }
    }
    return out;
}

}  // namespace rmab
