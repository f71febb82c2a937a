#include "rmab/instances.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rmab/belief.hpp"

namespace rmab {

using nlohmann::json;

double claim1_p(int n, double rho) {
    if (n < 2) throw std::invalid_argument("claim1_instance: need n >= 2");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("claim1_instance: rho must be in (0,1)");
    // log_{1/(2e)}(1-rho) / (n-1)
    return std::log(1.0 - rho) / std::log(1.0 / (2.0 * std::exp(1.0))) / (n - 1);
}

RmabInstance claim1_instance(int n, double rho, double R, double beta) {
    double p = claim1_p(n, rho);
    if (p >= 1.0) {
        double L = std::log(1.0 - rho) / std::log(1.0 / (2.0 * std::exp(1.0)));
        int n_min = static_cast<int>(std::floor(L)) + 2;  // smallest n with L/(n-1) < 1
        throw std::invalid_argument("claim1_instance: p >= 1; smallest valid n is " +
                                    std::to_string(n_min));
    }
    RmabInstance inst;
    inst.beta = beta;
    inst.threshold = R;
    inst.rho = rho;
    for (int i = 0; i < n - 1; ++i)
        inst.arms.push_back(make_bernoulli_arm(i, p, 10.0 * R / p, 1.0));
    inst.arms.push_back(make_bernoulli_arm(n - 1, 1.0, R, 1.0));
    return inst;
}

namespace {

double jitter(Rng& rng, double center, double half_width) {
    return center + (2.0 * rng.uniform() - 1.0) * half_width;
}

// p01 giving stationary probability omega for a fixed p11.
double solve_p01(double omega, double p11) {
    return omega * (1.0 - p11) / (1.0 - omega);
}

}  // namespace

std::vector<BeliefArm> adversarial_instance(int n, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("adversarial_instance: n must be even and >= 2");
    Rng rng(derive_seed(seed, {0xadu}));
    std::vector<BeliefArm> arms;
    // Reliable group: near-deterministic chain, stationary belief close to 1,
    // reward tuned so the stationary expected active reward is exactly 1.
    for (int i = 0; i < n / 2; ++i) {
        BeliefArm a;
        a.p11 = jitter(rng, 0.99, 0.005);
        a.p01 = jitter(rng, 0.9, 0.05);
        a.r = 1.0 / a.stationary();
        a.cost1 = 1.0;
        arms.push_back(a);
    }
    // Unreliable group: reward 10n^2 exactly, stationary tuned so the
    // stationary expected active reward is exactly 2.
    double big_r = 10.0 * static_cast<double>(n) * static_cast<double>(n);
    for (int i = 0; i < n / 2; ++i) {
        BeliefArm a;
        a.r = big_r;
        a.p11 = jitter(rng, 0.9, 0.05);
        a.p01 = solve_p01(2.0 / big_r, a.p11);
        a.cost1 = 1.0;
        arms.push_back(a);
    }
    return arms;
}

std::vector<BeliefArm> uniform_instance(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("uniform_instance: need n >= 1");
    Rng rng(derive_seed(seed, {0x0fu}));
    std::vector<BeliefArm> arms;
    for (int i = 0; i < n; ++i) {
        BeliefArm a;
        a.p01 = 0.1 + 0.8 * rng.uniform();
        a.p11 = 0.1 + 0.8 * rng.uniform();
        double target = jitter(rng, 1.0, 0.1);
        a.r = target / a.stationary();
        a.cost1 = 1.0;
        arms.push_back(a);
    }
    return arms;
}

RmabInstance make_hidden_instance(const std::vector<BeliefArm>& arms, double beta,
                                  double R, double rho, int horizon_k) {
    RmabInstance inst;
    inst.beta = beta;
    inst.threshold = R;
    inst.rho = rho;
    int id = 0;
    for (const auto& b : arms) {
        ArmSpec spec = tabularize(b, horizon_k);
        spec.id = id++;
        inst.arms.push_back(std::move(spec));
        inst.hidden.push_back(b);
    }
    inst.validate();
    return inst;
}

namespace {

json reward_dist_to_json(const RewardDist& d) {
    json out = json::array();
    for (const auto& o : d) out.push_back({{"v", o.value}, {"p", o.prob}});
    return out;
}

RewardDist reward_dist_from_json(const json& j) {
    RewardDist d;
    for (const auto& o : j) d.push_back({o.at("v").get<double>(), o.at("p").get<double>()});
    return d;
}

}  // namespace

std::string serialize_instance(const RmabInstance& inst) {
    json j;
    j["beta"] = inst.beta;
    j["threshold"] = inst.threshold;
    j["rho"] = inst.rho;
    j["arms"] = json::array();
    for (std::size_t i = 0; i < inst.arms.size(); ++i) {
        if (inst.is_hidden(i)) {
            const BeliefArm& b = *inst.hidden[i];
            j["arms"].push_back({{"p01", b.p01}, {"p11", b.p11}, {"r", b.r}, {"cost1", b.cost1}});
            continue;
        }
        const ArmSpec& arm = inst.arms[i];
        json ja;
        ja["cost1"] = arm.cost1;
        ja["transition"] = arm.transition;
        json jr = json::array();
        for (const auto& sa : arm.reward) jr.push_back({reward_dist_to_json(sa[0]), reward_dist_to_json(sa[1])});
        ja["reward"] = jr;
        if (!arm.state_costs.empty()) ja["state_costs"] = arm.state_costs;
        j["arms"].push_back(ja);
    }
    return j.dump(2) + "\n";
}

RmabInstance parse_instance(const std::string& json_text, int horizon_k) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("instance parse error: ") + e.what());
    }
    RmabInstance inst;
    inst.beta = j.at("beta").get<double>();
    inst.threshold = j.at("threshold").get<double>();
    inst.rho = j.at("rho").get<double>();
    int id = 0;
    bool any_hidden = false;
    std::vector<std::optional<BeliefArm>> hidden;
    for (const auto& ja : j.at("arms")) {
        if (ja.contains("p01")) {
            BeliefArm b;
            b.p01 = ja.at("p01").get<double>();
            b.p11 = ja.at("p11").get<double>();
            b.r = ja.at("r").get<double>();
            b.cost1 = ja.value("cost1", 1.0);
            b.validate();
            ArmSpec spec = tabularize(b, horizon_k);
            spec.id = id;
            inst.arms.push_back(std::move(spec));
            hidden.push_back(b);
            any_hidden = true;
        } else {
            ArmSpec arm;
            arm.id = id;
            arm.cost1 = ja.at("cost1").get<double>();
            arm.transition = ja.at("transition").get<std::vector<std::array<std::vector<double>, 2>>>();
            arm.num_states = static_cast<int>(arm.transition.size());
            for (const auto& sa : ja.at("reward"))
                arm.reward.push_back({reward_dist_from_json(sa.at(0)), reward_dist_from_json(sa.at(1))});
            if (ja.contains("state_costs"))
                arm.state_costs = ja.at("state_costs").get<std::vector<std::array<double, 2>>>();
            arm.validate();
            inst.arms.push_back(std::move(arm));
            hidden.push_back(std::nullopt);
        }
        ++id;
    }
    if (any_hidden) inst.hidden = std::move(hidden);
    inst.validate();
    return inst;
}

RmabInstance load_instance(const std::string& path, int horizon_k) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_instance: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_instance(text, horizon_k);
}

void save_instance(const RmabInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_instance: cannot open " + path);
    out << serialize_instance(inst);
}

}  // namespace rmab
