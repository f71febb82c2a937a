// Command-line harness: generate instances, compute index tables, run seeded
// experiments, drive the Turing-machine reduction, and sweep parameters.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmab/heuristics.hpp"
#include "rmab/index.hpp"
#include "rmab/instances.hpp"
#include "rmab/prob.hpp"
#include "rmab/reduction.hpp"
#include "rmab/sim.hpp"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    std::string family;
    std::string file;
    std::string config;
    std::string out;
    std::string policies = "greedy_min";
    std::string prob_estimator = "exact";
    int n = 20;
    double rho = 0.9;
    double R = 1.0;
    double beta = 0.9;
    int T = 10;
    int reps = 10;
    std::uint64_t seed = 1;
    double m = 2.0;
    long mc_samples = 1000;
    double budget = 1.0;
};

void add_common_flags(CLI::App* cmd, Opts& o) {
    cmd->add_option("--family", o.family, "instance family: claim1, adversarial, uniform");
    cmd->add_option("--file", o.file, "instance JSON file (overrides --family)");
    cmd->add_option("--n", o.n, "number of arms");
    cmd->add_option("--rho", o.rho, "per-step satisfaction probability target");
    cmd->add_option("--R", o.R, "reward threshold");
    cmd->add_option("--beta", o.beta, "discount factor");
    cmd->add_option("--seed", o.seed, "base seed; all randomness derives from it");
    cmd->add_option("--config", o.config, "JSON config file; explicit flags win");
    cmd->add_option("--out,-o", o.out, "output path or prefix");
}

void add_run_flags(CLI::App* cmd, Opts& o) {
    cmd->add_option("--T", o.T, "episode horizon (steps)");
    cmd->add_option("--reps", o.reps, "independent repetitions");
    cmd->add_option("--policies", o.policies, "comma-separated policy list");
    cmd->add_option("--m", o.m, "budget multiplier (> 1)");
    cmd->add_option("--prob-estimator", o.prob_estimator, "exact, mc, or hoeffding");
    cmd->add_option("--mc-samples", o.mc_samples, "Monte Carlo sample count");
    cmd->add_option("--budget", o.budget, "per-step budget for greedy_max");
}

// Fills in values from the JSON config for flags the user did not pass.
void merge_config(CLI::App* cmd, Opts& o) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw UsageError("cannot open config " + o.config);
    json j = json::parse(in);
    auto merge = [&](const std::string& flag, const char* key, auto& var) {
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        if (!opt || opt->count() > 0) return;
        if (j.contains(key)) var = j.at(key).get<std::decay_t<decltype(var)>>();
    };
    merge("--family", "family", o.family);
    merge("--file", "file", o.file);
    merge("--n", "n", o.n);
    merge("--rho", "rho", o.rho);
    merge("--R", "R", o.R);
    merge("--beta", "beta", o.beta);
    merge("--T", "T", o.T);
    merge("--reps", "reps", o.reps);
    merge("--seed", "seed", o.seed);
    merge("--policies", "policies", o.policies);
    merge("--m", "m", o.m);
    merge("--prob-estimator", "prob_estimator", o.prob_estimator);
    merge("--mc-samples", "mc_samples", o.mc_samples);
    merge("--budget", "budget", o.budget);
    merge("--out", "out", o.out);
}

rmab::RmabInstance build_instance(const Opts& o) {
    if (!o.file.empty()) return rmab::load_instance(o.file);
    if (o.family == "claim1") return rmab::claim1_instance(o.n, o.rho, o.R, o.beta);
    if (o.family == "adversarial")
        return rmab::make_hidden_instance(rmab::adversarial_instance(o.n, o.seed), o.beta, o.R, o.rho);
    if (o.family == "uniform")
        return rmab::make_hidden_instance(rmab::uniform_instance(o.n, o.seed), o.beta, o.R, o.rho);
    if (o.family.empty()) throw UsageError("need --family or --file");
    throw UsageError("unknown family: " + o.family);
}

std::vector<rmab::PolicyKind> parse_policies(const std::string& csv) {
    std::vector<rmab::PolicyKind> kinds;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            kinds.push_back(rmab::parse_policy(tok));
        } catch (const std::invalid_argument&) {
            throw UsageError("unknown policy: " + tok);
        }
    }
    if (kinds.empty()) throw UsageError("no policies given");
    return kinds;
}

rmab::ProbEstimator parse_estimator(const std::string& name) {
    if (name == "exact") return rmab::ProbEstimator::Exact;
    if (name == "mc") return rmab::ProbEstimator::Mc;
    if (name == "hoeffding") return rmab::ProbEstimator::Hoeffding;
    throw UsageError("unknown prob estimator: " + name);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

rmab::ExperimentResult run_opts(const Opts& o, const rmab::RmabInstance& inst) {
    rmab::SelectorConfig cfg = rmab::SelectorConfig::from_instance(inst);
    cfg.m = o.m;
    cfg.prob = rmab::make_satisfaction_fn(parse_estimator(o.prob_estimator), o.mc_samples);
    return rmab::run_experiment(inst, parse_policies(o.policies), cfg, o.reps, o.T, o.seed,
                                o.budget);
}

// Minimal line chart: one polyline of mean cost per policy over the swept grid.
std::string sweep_svg(const std::string& vary, const std::vector<double>& grid,
                      const std::vector<std::string>& policies,
                      const std::vector<std::vector<double>>& means) {
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 30, mb = 50;
    double lo = 0.0, hi = 1e-12, glo = grid.front(), ghi = grid.back();
    for (const auto& row : means)
        for (double v : row) hi = std::max(hi, v);
    if (ghi <= glo) ghi = glo + 1.0;
    auto X = [&](double g) { return ml + (g - glo) / (ghi - glo) * (w - ml - mr); };
    auto Y = [&](double v) { return h - mb - (v - lo) / (hi - lo) * (h - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    s << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
      << "' stroke='black'/>\n";
    s << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
      << "' stroke='black'/>\n";
    for (double g : grid)
        s << "<text x='" << X(g) << "' y='" << h - mb + 18 << "' font-size='11' text-anchor='middle'>"
          << g << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        double v = lo + (hi - lo) * t / 4.0;
        s << "<text x='" << ml - 8 << "' y='" << Y(v) + 4
          << "' font-size='11' text-anchor='end'>" << v << "</text>\n";
    }
    s << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
      << "' font-size='13' text-anchor='middle'>" << vary << "</text>\n";
    s << "<text x='16' y='" << (mt + h - mb) / 2
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << (mt + h - mb) / 2 << ")'>mean discounted cost</text>\n";
    for (std::size_t p = 0; p < policies.size(); ++p) {
        const char* col = colors[p % 6];
        s << "<polyline fill='none' stroke='" << col << "' stroke-width='2' points='";
        for (std::size_t i = 0; i < grid.size(); ++i)
            s << X(grid[i]) << "," << Y(means[p][i]) << " ";
        s << "'/>\n";
        s << "<text x='" << w - mr - 5 << "' y='" << mt + 16 * p + 6 << "' font-size='12' fill='"
          << col << "' text-anchor='end'>" << policies[p] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

int dispatch(int argc, char** argv) {
    CLI::App app{"restless-bandit cost minimization toolkit"};
    app.require_subcommand(1);
    Opts o;

    CLI::App* gen = app.add_subcommand("gen", "generate an instance and write JSON");
    add_common_flags(gen, o);
    CLI::App* idx = app.add_subcommand("index", "compute the Whittle index table (CSV)");
    add_common_flags(idx, o);
    CLI::App* run = app.add_subcommand("run", "run a seeded experiment, emit CSVs");
    add_common_flags(run, o);
    add_run_flags(run, o);
    CLI::App* sweep = app.add_subcommand("sweep", "vary one of {R,n,rho} over a grid");
    add_common_flags(sweep, o);
    add_run_flags(sweep, o);
    std::string vary = "rho", grid_csv;
    std::string svg_path;
    sweep->add_option("--vary", vary, "parameter to vary: R, n, or rho");
    sweep->add_option("--grid", grid_csv, "comma-separated grid values")->required();
    sweep->add_option("--svg", svg_path, "also write a simple SVG line chart");
    CLI::App* reduce = app.add_subcommand("reduce", "compile a Turing machine and verify");
    std::string tm_path;
    double alpha = 2.0, red_R = 1.0;
    int horizon_tm = 20;
    reduce->add_option("--tm", tm_path, "Turing machine JSON file")->required();
    reduce->add_option("--alpha", alpha, "approximation factor (>= 1)");
    reduce->add_option("--R", red_R, "reward threshold");
    reduce->add_option("--horizon", horizon_tm, "Turing steps to verify");
    reduce->add_option("--out,-o", o.out, "also write the compiled instance JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    merge_config(sub, o);

    if (sub == gen) {
        rmab::RmabInstance inst = build_instance(o);
        std::string text = rmab::serialize_instance(inst);
        if (o.out.empty())
            std::cout << text;
        else
            write_file(o.out, text);
        return 0;
    }
    if (sub == idx) {
        rmab::RmabInstance inst = build_instance(o);
        std::string csv = rmab::build_index_table(inst).to_csv();
        if (o.out.empty())
            std::cout << csv;
        else
            write_file(o.out, csv);
        return 0;
    }
    if (sub == run) {
        rmab::RmabInstance inst = build_instance(o);
        rmab::ExperimentResult res = run_opts(o, inst);
        if (o.out.empty()) {
            std::cout << res.aggregate_csv;
        } else {
            write_file(o.out + "_runs.csv", res.per_run_csv);
            write_file(o.out + "_agg.csv", res.aggregate_csv);
        }
        return 0;
    }
    if (sub == sweep) {
        if (o.family.empty()) throw UsageError("sweep needs --family");
        if (vary != "R" && vary != "n" && vary != "rho")
            throw UsageError("--vary must be one of R, n, rho");
        std::vector<double> grid;
        std::stringstream ss(grid_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
        if (grid.empty()) throw UsageError("empty --grid");

        std::vector<std::string> policy_names;
        for (rmab::PolicyKind k : parse_policies(o.policies))
            policy_names.push_back(rmab::policy_name(k));
        std::vector<std::vector<double>> means(policy_names.size(),
                                               std::vector<double>(grid.size(), 0.0));
        std::ostringstream csv;
        csv << "policy," << vary << ",mean_cost,std_cost,violation_rate,tail_bound,reps\n";
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            Opts local = o;
            if (vary == "R")
                local.R = grid[gi];
            else if (vary == "rho")
                local.rho = grid[gi];
            else
                local.n = static_cast<int>(grid[gi]);
            rmab::RmabInstance inst = build_instance(local);
            rmab::ExperimentResult res = run_opts(local, inst);
            for (std::size_t p = 0; p < res.aggregates.size(); ++p) {
                const rmab::Aggregate& a = res.aggregates[p];
                means[p][gi] = a.mean_cost;
                csv << a.policy << "," << grid[gi] << "," << a.mean_cost << "," << a.std_cost
                    << "," << a.violation_rate << "," << a.tail_bound << "," << a.reps << "\n";
            }
        }
        if (o.out.empty())
            std::cout << csv.str();
        else
            write_file(o.out, csv.str());
        if (!svg_path.empty()) write_file(svg_path, sweep_svg(vary, grid, policy_names, means));
        return 0;
    }
    // reduce
    rmab::TmSpec tm = rmab::load_tm(tm_path);
    rmab::ReductionParams params;
    params.alpha = alpha;
    params.R = red_R;
    if (!o.out.empty()) {
        rmab::CompiledReduction red = rmab::compile_tm(tm, params);
        rmab::save_instance(red.instance, o.out);
    }
    rmab::ReductionReport rep = rmab::verify_reduction(tm, params, horizon_tm);
    std::cout << rep.summary() << "\n";
    bool ok = rep.cost_iff_ok && rep.tape_ok && rep.faithful_violations == 0 &&
              rep.special_violations == 0 &&
              rep.perturbations_detected == rep.perturbations_total;
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
