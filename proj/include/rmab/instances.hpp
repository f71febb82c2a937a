#pragma once

#include <string>

#include "rmab/core.hpp"

namespace rmab {

inline constexpr int kDefaultBeliefHorizon = 30;

// Single-state Bernoulli instance on which the greedy minimization heuristic
// pays n times the optimum: n-1 unreliable high-reward arms plus one
// deterministic arm with reward exactly R. Unit costs.
RmabInstance claim1_instance(int n, double rho, double R, double beta = 0.9);

// Unreliable-arm success probability used by claim1_instance.
double claim1_p(int n, double rho);

// Hidden two-state families. Both use unit costs; rewards are tuned so the
// stationary expected active reward hits the family's target exactly
// (targets 1 for reliable/uniform arms, 2 for unreliable arms).
std::vector<BeliefArm> adversarial_instance(int n, std::uint64_t seed);
std::vector<BeliefArm> uniform_instance(int n, std::uint64_t seed);

// Wraps hidden arms into an instance of tabularized surrogates, keeping the
// true chains alongside for the simulator.
RmabInstance make_hidden_instance(const std::vector<BeliefArm>& arms, double beta,
                                  double R, double rho,
                                  int horizon_k = kDefaultBeliefHorizon);

// JSON round trip. Arms are either tabular ({"cost1","transition","reward"})
// or hidden two-state ({"p01","p11","r","cost1"}).
RmabInstance load_instance(const std::string& path, int horizon_k = kDefaultBeliefHorizon);
RmabInstance parse_instance(const std::string& json_text, int horizon_k = kDefaultBeliefHorizon);
std::string serialize_instance(const RmabInstance& inst);
void save_instance(const RmabInstance& inst, const std::string& path);

}  // namespace rmab
