#include "rmab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rmab {

using nlohmann::json;

namespace {

// Internal integer form: states 1..Q, symbols 0..|Gamma|-1, cells 0..n-1.
struct TmCompiled {
    int Q = 0;
    int nsym = 0;
    int n = 0;
    int q0 = 0, qacc = 0, qrej = 0;
    std::vector<int> input;  // length n
    struct Move {
        bool defined = false;
        int q2 = 0, g2 = 0, dir = 1;
    };
    std::vector<Move> delta;  // (q-1)*nsym + g

    bool halting(int q) const { return q == qacc || q == qrej; }
    const Move& rule(int q, int g) const { return delta[(q - 1) * nsym + g]; }
};

TmCompiled lower_tm(const TmSpec& tm) {
    tm.validate();
    TmCompiled m;
    m.Q = static_cast<int>(tm.states.size());
    m.nsym = static_cast<int>(tm.gamma.size());
    m.n = tm.tape_len;

    std::map<std::string, int> qid;
    for (int i = 0; i < m.Q; ++i) qid[tm.states[i]] = i + 1;
    std::map<std::string, int> gid;
    for (int i = 0; i < m.nsym; ++i) gid[tm.gamma[i]] = i;

    m.q0 = qid.at(tm.q0);
    m.qacc = qid.at(tm.q_accept);
    m.qrej = qid.at(tm.q_reject);

    m.input.assign(m.n, gid.at(tm.gamma[0]));  // pad with the first symbol (blank)
    for (std::size_t i = 0; i < tm.input.size(); ++i)
        m.input[i] = gid.at(std::string(1, tm.input[i]));

    m.delta.assign(static_cast<std::size_t>(m.Q) * m.nsym, {});
    for (const auto& r : tm.delta) {
        int q = qid.at(r.q), g = gid.at(r.g), q2 = qid.at(r.q2), g2 = gid.at(r.g2);
        auto& slot = m.delta[(q - 1) * m.nsym + g];
        if (slot.defined) throw std::invalid_argument("tm: duplicate rule for (" + r.q + "," + r.g + ")");
        slot = {true, q2, g2, r.dir == 'L' ? -1 : 1};
    }
    return m;
}

// Builds one cell MDP by closing the reachable state set under both actions.
struct CellBuilder {
    const TmCompiled& tm;
    int cell;        // 0-based
    int W;           // warm-up steps
    int L;           // round length n(2|Q|+1)
    double R;
    int state_cap;

    std::vector<CellState> states;
    std::map<std::tuple<int, int, int, int, int, int, int>, int> index;

    static std::tuple<int, int, int, int, int, int, int> key(const CellState& c) {
        return {static_cast<int>(c.phase), c.w, c.tmst, c.symbol, c.current ? 1 : 0, c.next, c.u};
    }

    static CellState normalize(CellState c) {
        switch (c.phase) {
            case CellState::Phase::Warmup:
                c.tmst = 0; c.symbol = 0; c.current = false; c.next = 0; c.u = 0;
                break;
            case CellState::Phase::Trap:
                c.w = 0; c.tmst = 0; c.current = false; c.next = 0; c.u = 0;
                break;
            case CellState::Phase::Dead:
                c = CellState{};
                c.phase = CellState::Phase::Dead;
                break;
            case CellState::Phase::Sim:
                c.w = 0;
                if (!c.current) c.next = 0;
                break;
        }
        return c;
    }

    int intern(const CellState& raw) {
        CellState c = normalize(raw);
        auto k = key(c);
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        if (static_cast<int>(states.size()) >= state_cap)
            throw CapacityError("reduction: cell MDP exceeds " + std::to_string(state_cap) + " states");
        int id = static_cast<int>(states.size());
        states.push_back(c);
        index.emplace(k, id);
        return id;
    }

    CellState step(const CellState& c, int action) const {
        const int n = tm.n, Q = tm.Q;
        if (c.phase == CellState::Phase::Warmup) {
            CellState ns = c;
            if (c.w + 1 < W) {
                ns.w = c.w + 1;
                return ns;
            }
            ns = CellState{};
            ns.phase = CellState::Phase::Sim;
            ns.u = 0;
            ns.symbol = tm.input[cell];
            ns.tmst = (cell == 0) ? tm.q0 : 0;
            return ns;
        }
        if (c.phase != CellState::Phase::Sim) return c;  // traps and dead are absorbing

        CellState ns = c;
        ns.u = (c.u + 1) % L;
        const int j = c.u % n, k = c.u / n;
        if (k == 0 && j == 0) {
            if (c.current) {
                ns.current = false;
                ns.tmst = 0;
                ns.next = 0;
            } else if (c.tmst != 0) {
                // garbage-copied halting states have no rule and trap benignly
                const auto& mv = tm.rule(c.tmst, c.symbol);
                if (!mv.defined || tm.halting(mv.q2)) {
                    CellState trap{};
                    trap.phase = CellState::Phase::Trap;
                    trap.symbol = mv.defined ? mv.g2 : c.symbol;
                    return trap;
                }
                ns.current = true;
                ns.tmst = mv.q2;
                ns.symbol = mv.g2;
                int nx = cell + mv.dir;
                if (nx < 0 || nx >= n) {
                    CellState dead{};
                    dead.phase = CellState::Phase::Dead;
                    return dead;
                }
                ns.next = nx;
            }
        } else if (k >= 1 && k <= Q) {
            if (!c.current && action == 1 && cell == j) ns.tmst = k;
        }
        return ns;
    }

    double reward(const CellState& c, int action) const {
        const int n = tm.n, Q = tm.Q;
        switch (c.phase) {
            case CellState::Phase::Warmup:
            case CellState::Phase::Dead:
                return 0.0;
            case CellState::Phase::Trap:
                return R;
            case CellState::Phase::Sim:
                break;
        }
        const int j = c.u % n, k = c.u / n;
        if (k == 0) return (j == 0 || c.current) ? R : 0.0;
        if (k <= Q) {  // copy phase
            if (c.current) return (k == c.tmst && c.next == j) ? 0.0 : R;
            return (action == 1 && cell == j) ? R : 0.0;
        }
        // validation phase, k in Q+1..2Q
        if (c.current) return (k == Q + c.tmst && c.next == j) ? 2.0 * R : R;
        if (c.tmst != 0 && cell == j && k == Q + c.tmst) return -R;
        return 0.0;
    }

    ArmSpec build() {
        CellState start{};
        start.phase = CellState::Phase::Warmup;
        intern(start);
        for (std::size_t i = 0; i < states.size(); ++i) {
            CellState c = states[i];
            for (int a = 0; a < 2; ++a) intern(step(c, a));
        }
        const int S = static_cast<int>(states.size());
        ArmSpec arm;
        arm.id = cell + 1;
        arm.num_states = S;
        arm.cost1 = 0.0;
        arm.transition.resize(S);
        arm.reward.resize(S);
        arm.state_costs.assign(S, {0.0, 0.0});
        for (int s = 0; s < S; ++s) {
            const CellState& c = states[s];
            for (int a = 0; a < 2; ++a) {
                std::vector<double> row(S, 0.0);
                row[index.at(key(normalize(step(c, a))))] = 1.0;
                arm.transition[s][a] = std::move(row);
                arm.reward[s][a] = point_reward(reward(c, a));
            }
            if (c.phase == CellState::Phase::Trap) arm.state_costs[s] = {1.0, 1.0};
        }
        return arm;
    }
};

// Special arm layout: 0 = decision step, 1..W-1 = played branch, W = played
// trap (free reward R forever), W+1..2W-1 = declined branch (free reward R),
// 2W = declined trap (nothing). Playing costs 1 anywhere.
ArmSpec build_special_arm(int W, double R) {
    const int S = 2 * W + 1;
    const int trap_played = W, trap_declined = 2 * W;
    ArmSpec arm;
    arm.id = 0;
    arm.num_states = S;
    arm.cost1 = 1.0;
    arm.transition.resize(S);
    arm.reward.resize(S);
    auto one_hot = [S](int t) {
        std::vector<double> row(S, 0.0);
        row[t] = 1.0;
        return row;
    };
    // decision step: playing enters the played branch, declining the free one
    arm.transition[0][1] = one_hot(W > 1 ? 1 : trap_played);
    arm.transition[0][0] = one_hot(W > 1 ? W + 1 : trap_declined);
    arm.reward[0][1] = point_reward(R);
    arm.reward[0][0] = point_reward(R);
    for (int t = 1; t < W; ++t) {
        int nxt = (t + 1 < W) ? t + 1 : trap_played;
        arm.transition[t][0] = one_hot(nxt);
        arm.transition[t][1] = one_hot(nxt);
        arm.reward[t][1] = point_reward(R);  // reward only while played
        arm.reward[t][0] = point_reward(0.0);
    }
    for (int t = W + 1; t < 2 * W; ++t) {
        int nxt = (t + 1 < 2 * W) ? t + 1 : trap_declined;
        arm.transition[t][0] = one_hot(nxt);
        arm.transition[t][1] = one_hot(nxt);
        arm.reward[t][0] = point_reward(R);
        arm.reward[t][1] = point_reward(R);
    }
    for (int t : {trap_played, trap_declined}) {
        arm.transition[t][0] = one_hot(t);
        arm.transition[t][1] = one_hot(t);
        double r = (t == trap_played) ? R : 0.0;
        arm.reward[t][0] = point_reward(r);
        arm.reward[t][1] = point_reward(r);
    }
    return arm;
}

int argmax_row(const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] > 0.5) return static_cast<int>(i);
    throw std::logic_error("reduction: transition row is not deterministic");
}

struct RunTrace {
    std::vector<JointState> states;   // s_0..s_H
    std::vector<double> costs;        // per step, 1-based conceptually
    std::vector<double> rewards;      // reward sum per step
};

RunTrace run_deterministic(const CompiledReduction& red,
                           const std::function<ActionVector(const JointState&, long)>& act,
                           long horizon) {
    const auto& arms = red.instance.arms;
    JointState s(arms.size(), 0);
    RunTrace tr;
    tr.states.push_back(s);
    tr.costs.reserve(horizon);
    tr.rewards.reserve(horizon);
    for (long t = 1; t <= horizon; ++t) {
        ActionVector a = act(s, t);
        double cost = 0.0, rew = 0.0;
        JointState nx(arms.size());
        for (std::size_t i = 0; i < arms.size(); ++i) {
            cost += arms[i].cost(s[i], a[i]);
            rew += arms[i].reward[s[i]][a[i]].front().value;
            nx[i] = argmax_row(arms[i].transition[s[i]][a[i]]);
        }
        tr.costs.push_back(cost);
        tr.rewards.push_back(rew);
        s = std::move(nx);
        tr.states.push_back(s);
    }
    return tr;
}

// Discounted cost of a trace plus the exact absorbing tail: past the horizon
// only trapped cells keep charging (1 per step) and no policy plays.
double trace_cost(const CompiledReduction& red, const RunTrace& tr) {
    double total = discounted_sum(tr.costs, red.beta);
    const JointState& last = tr.states.back();
    double trap_charge = 0.0;
    for (std::size_t c = 1; c < last.size(); ++c)
        if (red.decode(static_cast<int>(c) - 1, last[c]).phase == CellState::Phase::Trap)
            trap_charge += 1.0;
    double bH = std::pow(red.beta, static_cast<double>(tr.costs.size()));
    return total + bH * trap_charge / (1.0 - red.beta);
}

// The copy play the faithful policy owes in the current step, if any:
// returns the arm index (1-based over cells) or -1.
int faithful_play(const CompiledReduction& red, const JointState& s) {
    const int n = red.n, Q = red.num_tm_states;
    for (int c = 0; c < n; ++c) {
        const CellState& cs = red.decode(c, s[c + 1]);
        if (cs.phase != CellState::Phase::Sim || !cs.current) continue;
        int j = cs.j(n), k = cs.k(n);
        if (k >= 1 && k <= Q && k == cs.tmst && cs.next == j) return j + 1;
    }
    return -1;
}

class FaithfulPolicy : public Policy {
public:
    explicit FaithfulPolicy(std::shared_ptr<const CompiledReduction> red) : red_(std::move(red)) {}
    std::string name() const override { return "faithful"; }
    ActionVector select(const RmabInstance& inst, const JointState& s, Rng&) override {
        ActionVector a(inst.arms.size(), 0);
        int play = faithful_play(*red_, s);
        if (play >= 0) a[play] = 1;
        return a;
    }

private:
    std::shared_ptr<const CompiledReduction> red_;
};

class SpecialPolicy : public Policy {
public:
    explicit SpecialPolicy(std::shared_ptr<const CompiledReduction> red) : red_(std::move(red)) {}
    std::string name() const override { return "special"; }
    ActionVector select(const RmabInstance& inst, const JointState& s, Rng&) override {
        ActionVector a(inst.arms.size(), 0);
        if (s[0] < red_->special_trap_played) a[0] = 1;  // decision step and played branch
        return a;
    }

private:
    std::shared_ptr<const CompiledReduction> red_;
};

}  // namespace

void TmSpec::validate() const {
    if (states.empty()) throw std::invalid_argument("tm: no states");
    std::set<std::string> qs(states.begin(), states.end());
    if (qs.size() != states.size()) throw std::invalid_argument("tm: duplicate state names");
    for (const std::string* q : {&q0, &q_accept, &q_reject})
        if (!qs.count(*q)) throw std::invalid_argument("tm: unknown distinguished state " + *q);
    if (gamma.empty()) throw std::invalid_argument("tm: empty tape alphabet");
    std::set<std::string> gs;
    for (const auto& g : gamma) {
        if (g.size() != 1) throw std::invalid_argument("tm: symbols must be single characters");
        if (!gs.insert(g).second) throw std::invalid_argument("tm: duplicate symbol " + g);
    }
    for (const auto& g : sigma)
        if (!gs.count(g)) throw std::invalid_argument("tm: input symbol " + g + " not in gamma");
    for (const auto& r : delta) {
        if (!qs.count(r.q) || !qs.count(r.q2))
            throw std::invalid_argument("tm: rule references unknown state");
        if (!gs.count(r.g) || !gs.count(r.g2))
            throw std::invalid_argument("tm: rule references unknown symbol");
        if (r.q == q_accept || r.q == q_reject)
            throw std::invalid_argument("tm: rule leaves a halting state");
        if (r.dir != 'L' && r.dir != 'R') throw std::invalid_argument("tm: direction must be L or R");
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : delta) seen.emplace(r.q, r.g);
    for (const auto& q : states) {
        if (q == q_accept || q == q_reject) continue;
        for (const auto& g : gamma)
            if (!seen.count({q, g}))
                throw std::invalid_argument("tm: delta not total, missing (" + q + "," + g + ")");
    }
    if (tape_len < 1) throw std::invalid_argument("tm: tape_len must be positive");
    if (static_cast<int>(input.size()) > tape_len)
        throw std::invalid_argument("tm: input longer than tape");
    for (char c : input)
        if (!gs.count(std::string(1, c)))
            throw std::invalid_argument("tm: input symbol outside gamma");
}

TmSpec parse_tm(const std::string& json_text) {
    json j = json::parse(json_text);
    TmSpec tm;
    tm.states = j.at("states").get<std::vector<std::string>>();
    tm.q0 = j.value("q0", tm.states.empty() ? std::string() : tm.states.front());
    tm.q_accept = j.at("q_accept").get<std::string>();
    tm.q_reject = j.at("q_reject").get<std::string>();
    tm.gamma = j.at("gamma").get<std::vector<std::string>>();
    tm.sigma = j.value("sigma", tm.gamma);
    for (const auto& row : j.at("delta")) {
        if (row.size() != 5) throw std::invalid_argument("tm: delta rows need 5 entries");
        TmSpec::Rule r;
        r.q = row[0].get<std::string>();
        r.g = row[1].get<std::string>();
        r.q2 = row[2].get<std::string>();
        r.g2 = row[3].get<std::string>();
        r.dir = row[4].get<std::string>().at(0);
        tm.delta.push_back(r);
    }
    tm.input = j.at("input").get<std::string>();
    tm.tape_len = j.at("tape_len").get<int>();
    tm.validate();
    return tm;
}

TmSpec load_tm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tm(ss.str());
}

TmTrace simulate_tm(const TmSpec& spec, int max_steps) {
    TmCompiled tm = lower_tm(spec);
    TmTrace tr;
    std::vector<int> tape = tm.input;
    int head = 0, q = tm.q0;
    tr.tape.push_back(tape);
    tr.head.push_back(head);
    tr.state.push_back(q);
    for (int t = 1; t <= max_steps; ++t) {
        if (tm.halting(q)) break;
        const auto& mv = tm.rule(q, tape[head]);
        tape[head] = mv.g2;
        q = mv.q2;
        head += mv.dir;
        if (head < 0 || head >= tm.n)
            throw std::runtime_error("tm: head left the tape at step " + std::to_string(t));
        tr.tape.push_back(tape);
        tr.head.push_back(head);
        tr.state.push_back(q);
        tr.steps = t;
    }
    tr.halted = tm.halting(q);
    return tr;
}

CompiledReduction compile_tm(const TmSpec& spec, const ReductionParams& params) {
    if (params.alpha < 1.0) throw std::invalid_argument("reduction: alpha must be >= 1");
    if (params.R <= 0.0) throw std::invalid_argument("reduction: R must be positive");
    TmCompiled tm = lower_tm(spec);

    CompiledReduction red;
    red.n = tm.n;
    red.num_tm_states = tm.Q;
    red.alpha = params.alpha;
    red.threshold = params.R;
    red.warmup_steps = static_cast<int>(std::ceil(2.0 * params.alpha));
    red.round_len = tm.n * (2 * tm.Q + 1);

    long double t_bound = tm.Q * std::pow(static_cast<long double>(tm.n), tm.nsym + 2);
    if (t_bound > static_cast<long double>(params.t_cap))
        throw CapacityError("reduction: step bound T exceeds cap (desk scale only)");
    red.step_bound = static_cast<long>(t_bound);
    red.beta = std::exp(std::log(0.5) / (static_cast<double>(red.step_bound) +
                                         5.0 * params.alpha * params.alpha));

    red.instance.beta = red.beta;
    red.instance.threshold = params.R;
    red.instance.rho = 1.0;
    red.instance.arms.push_back(build_special_arm(red.warmup_steps, params.R));
    red.special_trap_played = red.warmup_steps;
    red.special_trap_declined = 2 * red.warmup_steps;
    for (int c = 0; c < tm.n; ++c) {
        CellBuilder b{tm, c, red.warmup_steps, red.round_len, params.R, params.state_cap};
        red.instance.arms.push_back(b.build());
        red.cell_states.push_back(std::move(b.states));
    }
    red.instance.validate();
    return red;
}

std::unique_ptr<Policy> make_faithful_policy(std::shared_ptr<const CompiledReduction> red) {
    return std::make_unique<FaithfulPolicy>(std::move(red));
}

std::unique_ptr<Policy> make_special_policy(std::shared_ptr<const CompiledReduction> red) {
    return std::make_unique<SpecialPolicy>(std::move(red));
}

std::string ReductionReport::summary() const {
    std::ostringstream os;
    os << "tm_halts=" << (tm_halts ? "yes" : "no") << " (steps=" << tm_steps << ")"
       << " faithful_cost=" << faithful_cost << " special_cost=" << special_cost
       << " iff=" << (cost_iff_ok ? "ok" : "FAIL") << " tape=" << (tape_ok ? "ok" : "FAIL")
       << " violations=" << faithful_violations << "/" << special_violations
       << " perturbations=" << perturbations_detected << "/" << perturbations_total;
    return os.str();
}

ReductionReport verify_reduction(const TmSpec& spec, const ReductionParams& params,
                                 int horizon_tm_steps) {
    ReductionReport rep;
    TmTrace tm = simulate_tm(spec, horizon_tm_steps);
    rep.tm_halts = tm.halted;
    rep.tm_steps = tm.steps;

    auto red = std::make_shared<CompiledReduction>(compile_tm(spec, params));
    const int n = red->n, W = red->warmup_steps, L = red->round_len;
    const double R = red->threshold;
    const long H = W + static_cast<long>(horizon_tm_steps) * L;
    rep.horizon_steps = H;

    auto faithful_act = [&](const JointState& s, long) {
        ActionVector a(s.size(), 0);
        int play = faithful_play(*red, s);
        if (play >= 0) a[play] = 1;
        return a;
    };
    auto special_act = [&](const JointState& s, long) {
        ActionVector a(s.size(), 0);
        if (s[0] < red->special_trap_played) a[0] = 1;
        return a;
    };

    RunTrace ft = run_deterministic(*red, faithful_act, H);
    RunTrace st = run_deterministic(*red, special_act, H);
    rep.faithful_cost = trace_cost(*red, ft);
    rep.special_cost = trace_cost(*red, st);
    for (double r : ft.rewards)
        if (r < R - 1e-9) ++rep.faithful_violations;
    for (double r : st.rewards)
        if (r < R - 1e-9) ++rep.special_violations;
    rep.cost_iff_ok = rep.tm_halts ? (rep.special_cost < rep.faithful_cost)
                                   : (rep.faithful_cost < rep.special_cost);

    // Tape fidelity: after Turing step r the cell symbols (trap included), the
    // head cell, its machine state, and its move target must match the direct
    // simulator. The state at RMAB step W+(r-1)L+1 is the first to show step r.
    rep.tape_ok = true;
    int checked = std::min(horizon_tm_steps, tm.halted ? tm.steps : horizon_tm_steps);
    for (int r = 1; r <= checked && rep.tape_ok; ++r) {
        const JointState& s = ft.states[W + static_cast<long>(r - 1) * L + 1];
        for (int c = 0; c < n; ++c) {
            const CellState& cs = red->decode(c, s[c + 1]);
            if (cs.symbol != tm.tape[r][c]) rep.tape_ok = false;
        }
        bool last = (r == tm.steps && tm.halted);
        for (int c = 0; c < n; ++c) {
            const CellState& cs = red->decode(c, s[c + 1]);
            bool should_head = !last && c == tm.head[r - 1];
            if (cs.current != should_head) rep.tape_ok = false;
            if (should_head && (cs.tmst != tm.state[r] || cs.next != tm.head[r])) rep.tape_ok = false;
            if (last && c == tm.head[r - 1] && cs.phase != CellState::Phase::Trap) rep.tape_ok = false;
        }
    }

    // Perturbation audit: in round 1 replace the single correct copy play with
    // a play at every other (cell, state-slot) pair and demand a step paying
    // less than R. Needs a head in round 1 (the machine must not halt at once).
    if (!tm.halted || tm.steps >= 2) {
        const int correct_j = tm.head[1], correct_k = tm.state[1];
        for (int k = 1; k <= red->num_tm_states; ++k) {
            for (int j = 0; j < n; ++j) {
                if (j == correct_j && k == correct_k) continue;
                const long play_step = W + static_cast<long>(k) * n + j + 1;
                auto perturbed = [&](const JointState& s, long t) {
                    ActionVector a(s.size(), 0);
                    if (t == play_step) {
                        a[j + 1] = 1;
                        return a;
                    }
                    int play = faithful_play(*red, s);
                    if (play >= 0 && t != W + static_cast<long>(correct_k) * n + correct_j + 1)
                        a[play] = 1;
                    return a;
                };
                RunTrace pt = run_deterministic(*red, perturbed, W + L);
                ++rep.perturbations_total;
                bool detected = false;
                for (long t = W; t < W + L; ++t)
                    if (pt.rewards[t] < R - 1e-9) detected = true;
                if (detected) ++rep.perturbations_detected;
            }
        }
    }
    return rep;
}

}  // namespace rmab
