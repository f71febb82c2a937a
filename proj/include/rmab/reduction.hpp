#pragma once

#include <map>
#include <memory>
#include <string>

#include "rmab/core.hpp"
#include "rmab/heuristics.hpp"

namespace rmab {

// One-tape Turing machine over a fixed-length tape. The head must stay within
// cells 1..tape_len on the given input (checked during simulation).
struct TmSpec {
    struct Rule {
        std::string q, g, q2, g2;
        char dir = 'R';  // 'L' or 'R'
    };
    std::vector<std::string> states;
    std::string q0, q_accept, q_reject;
    std::vector<std::string> gamma;  // tape alphabet, single-character symbols
    std::vector<std::string> sigma;  // input alphabet, subset of gamma
    std::vector<Rule> delta;
    std::string input;
    int tape_len = 0;

    void validate() const;
};

TmSpec load_tm(const std::string& path);
TmSpec parse_tm(const std::string& json_text);

struct TmTrace {
    bool halted = false;
    int steps = 0;  // TM steps executed (up to max_steps)
    // tape[t] is the tape after t steps (tape[0] is the input); head[t] and
    // state[t] likewise, as 0-based cell index and 1-based state id.
    std::vector<std::vector<int>> tape;
    std::vector<int> head;
    std::vector<int> state;
};

TmTrace simulate_tm(const TmSpec& tm, int max_steps);

struct ReductionParams {
    double alpha = 2.0;  // approximation factor, >= 1
    double R = 1.0;      // reward threshold
    long t_cap = 1000000;      // cap on the step bound T (desk scale only)
    int state_cap = 4000;      // cap on per-cell MDP states
};

// Decoded cell-MDP state.
struct CellState {
    enum class Phase { Warmup, Sim, Trap, Dead };
    Phase phase = Phase::Warmup;
    int w = 0;        // warm-up counter
    int tmst = 0;     // 0 = none, else 1..|Q|
    int symbol = 0;
    bool current = false;
    int next = 0;     // 0-based target cell, meaningful while current
    int u = 0;        // clock position in 0..n(2|Q|+1)-1

    int j(int n) const { return u % n; }
    int k(int n) const { return u / n; }
};

struct CompiledReduction {
    RmabInstance instance;  // arm 0 = special, arms 1..n = cells
    int n = 0;              // tape cells
    int num_tm_states = 0;  // |Q|
    int warmup_steps = 0;   // 2*alpha
    int round_len = 0;      // n(2|Q|+1)
    long step_bound = 0;    // T = |Q| n^{|Gamma|+2}
    double beta = 0.5;
    double alpha = 1.0;
    double threshold = 1.0;
    // per-cell decode table: state index -> CellState
    std::vector<std::vector<CellState>> cell_states;
    int special_trap_played = 0;    // absorbing state of the played branch
    int special_trap_declined = 0;  // absorbing state of the declined branch

    const CellState& decode(int cell, int state_index) const {
        return cell_states[cell][state_index];
    }
};

// Compiles the machine into a deterministic RMAB minimization instance:
// one special arm plus one arm per tape cell, with the clocked transition,
// copy, and validation machinery. Throws CapacityError at non-desk scale.
CompiledReduction compile_tm(const TmSpec& tm, const ReductionParams& params);

// The policy that declines the special arm and plays exactly the cell the
// copy phase requires; satisfies the reward constraint at every step.
std::unique_ptr<Policy> make_faithful_policy(std::shared_ptr<const CompiledReduction> red);

// The policy that plays the special arm at step 1 and throughout warm-up,
// then nothing.
std::unique_ptr<Policy> make_special_policy(std::shared_ptr<const CompiledReduction> red);

struct ReductionReport {
    bool tm_halts = false;
    int tm_steps = 0;
    long horizon_steps = 0;
    double faithful_cost = 0.0;
    double special_cost = 0.0;
    bool cost_iff_ok = false;          // cheaper policy matches the halting verdict
    bool tape_ok = false;              // symbols/head/state agree with the direct simulator
    int faithful_violations = 0;       // constraint violations of the faithful run
    int special_violations = 0;
    int perturbations_total = 0;       // exhaustive single-copy perturbations
    int perturbations_detected = 0;    // those with a step paying < R
    std::string summary() const;
};

// Runs both canonical policies, audits tape fidelity against the direct
// simulator, and checks that every single wrong copy breaks the constraint.
ReductionReport verify_reduction(const TmSpec& tm, const ReductionParams& params,
                                 int horizon_tm_steps);

}  // namespace rmab
