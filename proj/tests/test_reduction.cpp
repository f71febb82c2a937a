#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "rmab/reduction.hpp"
#include "rmab/sim.hpp"

using namespace rmab;

namespace {

// Halts (accepts) in exactly 4 steps on input "1".
const char* kHaltJson = R"({
  "states": ["a", "b", "acc", "rej"],
  "q0": "a", "q_accept": "acc", "q_reject": "rej",
  "gamma": ["0", "1"], "sigma": ["0", "1"],
  "delta": [
    ["a", "1", "b", "0", "R"],
    ["b", "0", "a", "1", "R"],
    ["a", "0", "b", "1", "L"],
    ["b", "1", "acc", "0", "R"]
  ],
  "input": "1", "tape_len": 3
})";

// Bounces between cells 0 and 1 forever.
const char* kLoopJson = R"({
  "states": ["s", "acc", "rej"],
  "q0": "s", "q_accept": "acc", "q_reject": "rej",
  "gamma": ["0", "1"], "sigma": ["0", "1"],
  "delta": [
    ["s", "0", "s", "0", "R"],
    ["s", "1", "s", "1", "L"]
  ],
  "input": "01", "tape_len": 2
})";

// Two states total (the halting state doubles as accept and reject), used to
// pin the step-bound arithmetic: T = |Q| * n^(|Gamma|+2) = 2 * 3^4 = 162.
const char* kTwoStateJson = R"({
  "states": ["s", "h"],
  "q0": "s", "q_accept": "h", "q_reject": "h",
  "gamma": ["0", "1"], "sigma": ["0", "1"],
  "delta": [
    ["s", "0", "s", "0", "R"],
    ["s", "1", "s", "1", "L"]
  ],
  "input": "010", "tape_len": 3
})";

}  // namespace

TEST_CASE("direct simulator") {
    TmTrace halt = simulate_tm(parse_tm(kHaltJson), 50);
    CHECK(halt.halted);
    CHECK(halt.steps == 4);
    CHECK(halt.tape[0] == std::vector<int>{1, 0, 0});
    CHECK(halt.tape[4] == std::vector<int>{0, 0, 1});
    CHECK(halt.head[4] == 2);

    TmTrace loop = simulate_tm(parse_tm(kLoopJson), 20);
    CHECK(!loop.halted);
    CHECK(loop.steps == 20);
}

TEST_CASE("machine validation") {
    CHECK_THROWS_WITH(parse_tm(R"({"states":["s","acc","rej"],"q0":"s","q_accept":"acc",
        "q_reject":"rej","gamma":["0","1"],"delta":[["s","0","s","0","R"]],
        "input":"0","tape_len":1})"),
                      "tm: delta not total, missing (s,1)");
    CHECK_THROWS_AS(parse_tm("{"), std::exception);
    CHECK_THROWS_AS(parse_tm(R"({"states":[],"gamma":["0"],"delta":[],"input":"","tape_len":1})"),
                    std::exception);
}

TEST_CASE("compiled shape and constants") {
    ReductionParams params;
    params.alpha = 2.0;
    CompiledReduction red = compile_tm(parse_tm(kTwoStateJson), params);
    CHECK(red.n == 3);
    CHECK(red.num_tm_states == 2);
    CHECK(red.step_bound == 162);
    CHECK(red.round_len == 3 * (2 * 2 + 1));
    CHECK(red.warmup_steps == 4);
    CHECK(red.beta == doctest::Approx(std::exp(std::log(0.5) / (162 + 5 * 4.0))).epsilon(1e-12));
    CHECK(red.instance.arms.size() == 4);  // special + one per cell
    CHECK(red.instance.beta == red.beta);
    CHECK(red.instance.threshold == params.R);

    // every transition row is deterministic
    for (const auto& arm : red.instance.arms)
        for (const auto& sa : arm.transition)
            for (const auto& row : sa)
                for (double p : row) CHECK((p == 0.0 || p == 1.0));
}

TEST_CASE("clock and head invariants along the faithful run") {
    ReductionParams params;
    CompiledReduction red = compile_tm(parse_tm(kHaltJson), params);

    // replay the faithful run on bare dynamics and decode each cell
    auto shared = std::make_shared<CompiledReduction>(red);
    auto policy = make_faithful_policy(shared);
    JointState s(red.instance.arms.size(), 0);
    Rng rng(1);
    int horizon = red.warmup_steps + 4 * red.round_len;
    for (int t = 0; t < horizon; ++t) {
        ActionVector a = policy->select(red.instance, s, rng);
        int current = 0, inactive = 0;
        int u0 = -1;
        for (int cell = 1; cell <= red.n; ++cell) {
            const CellState& cs = red.decode(cell - 1, s[cell]);
            if (cs.phase == CellState::Phase::Warmup || cs.phase == CellState::Phase::Dead ||
                cs.phase == CellState::Phase::Trap) {
                ++inactive;
                continue;
            }
            if (cs.current) ++current;
            if (u0 < 0) u0 = cs.u;
            CHECK(cs.u == u0);  // cells stay clock synchronized
        }
        // exactly one head, except at the first simulation step where the
        // initial cell only assumes headship while the step executes
        if (inactive == 0 && t != red.warmup_steps) CHECK(current == 1);
        StepResult step_res = step(red.instance, s, a, rng);
        s = step_res.next;
    }
}

TEST_CASE("halting machine verified end to end") {
    ReductionParams params;
    ReductionReport rep = verify_reduction(parse_tm(kHaltJson), params, 6);
    CHECK(rep.tm_halts);
    CHECK(rep.tm_steps == 4);
    CHECK(rep.cost_iff_ok);
    CHECK(rep.tape_ok);
    CHECK(rep.faithful_violations == 0);
    CHECK(rep.special_violations == 0);
    CHECK(rep.perturbations_total > 0);
    CHECK(rep.perturbations_detected == rep.perturbations_total);
    CHECK(rep.special_cost >= params.alpha - 1e-9);
    CHECK(rep.special_cost <= 2.0 * params.alpha + 1e-9);
    // halting forces the faithful run into the charging traps
    CHECK(rep.faithful_cost >= 2.0 * params.alpha * params.alpha);
    CHECK(rep.special_cost < rep.faithful_cost);
}

TEST_CASE("looping machine verified end to end") {
    ReductionParams params;
    ReductionReport rep = verify_reduction(parse_tm(kLoopJson), params, 8);
    CHECK(!rep.tm_halts);
    CHECK(rep.cost_iff_ok);
    CHECK(rep.tape_ok);
    CHECK(rep.faithful_violations == 0);
    CHECK(rep.faithful_cost == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.special_cost >= params.alpha - 1e-9);
    CHECK(rep.perturbations_detected == rep.perturbations_total);
    CHECK(rep.faithful_cost < rep.special_cost);
}

TEST_CASE("alpha scales the special arm's cost band") {
    ReductionParams params;
    params.alpha = 3.0;
    ReductionReport rep = verify_reduction(parse_tm(kLoopJson), params, 4);
    CHECK(rep.special_cost >= 3.0 - 1e-9);
    CHECK(rep.special_cost <= 6.0 + 1e-9);
}

TEST_CASE("non-desk scale is rejected") {
    ReductionParams params;
    params.t_cap = 100;  // T = 162 for the two-state machine on tape 3
    CHECK_THROWS_AS(compile_tm(parse_tm(kTwoStateJson), params), CapacityError);
}
