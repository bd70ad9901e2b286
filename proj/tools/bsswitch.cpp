#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bsswitch/baselines.hpp"
#include "bsswitch/errors.hpp"
#include "bsswitch/harness.hpp"
#include "bsswitch/rem_store.hpp"
#include "bsswitch/rl_engine.hpp"
#include "bsswitch/scenario.hpp"

using namespace bsswitch;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string scenario_path;
    std::string seed_triple;
    std::string out;
    int passes = 0;
    int batches = 0;
    double grid = 0.0;
    bool quiet = false;
};

struct LearnerOptions {
    std::string strategy = "ucb";
    LearnerConfig cfg;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("-s,--scenario", o.scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed_triple, "Seed triple scenario,channel,learner");
    cmd->add_option("-o,--out", o.out, "Output path (stdout when omitted)");
    cmd->add_option("--passes", o.passes, "Override the number of passes")->check(CLI::PositiveNumber);
    cmd->add_option("--batches", o.batches, "Override the batches per pass")->check(CLI::PositiveNumber);
    cmd->add_option("--grid-size", o.grid, "Override the grid size g in meters")->check(CLI::PositiveNumber);
    cmd->add_flag("-q,--quiet", o.quiet, "Do not report defaults applied");
}

void add_learner(CLI::App* cmd, LearnerOptions& o)
{
    cmd->add_option("--strategy", o.strategy, "epsilon_greedy | ucb | gradient_bandit | rem_ea");
    cmd->add_option("--alpha", o.cfg.alpha, "Value filter step size");
    cmd->add_option("--xi", o.cfg.xi, "Discount factor");
    cmd->add_option("--beta", o.cfg.beta, "Epsilon-greedy root exponent");
    cmd->add_option("--c", o.cfg.c, "UCB / REM-EA exploration weight");
    cmd->add_option("--alpha-gb", o.cfg.alpha_gb, "Gradient-bandit step size");
    cmd->add_option("--gamma", o.cfg.gamma, "REM-EA distance exponent");
    cmd->add_flag("--asr", o.cfg.asr_enabled, "Enable action space reduction");
    cmd->add_option("--optimistic-init", o.cfg.optimistic_init, "Initial Q in Mbit/J");
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text, const std::string& what)
{
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string tok;
    auto number = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(t, &used);
            if (used != t.size() || t.empty() || t[0] == '-') {
                throw std::invalid_argument(t);
            }
            return v;
        } catch (const std::logic_error&) {
            throw ValidationError(what, "'" + t + "' is not an unsigned integer");
        }
    };
    while (std::getline(ss, tok, ',')) {
        // "a..b" expands to the inclusive range.
        if (const std::size_t dots = tok.find(".."); dots != std::string::npos) {
            const std::uint64_t lo = number(tok.substr(0, dots));
            const std::uint64_t hi = number(tok.substr(dots + 2));
            if (hi < lo) {
                throw ValidationError(what, "empty range '" + tok + "'");
            }
            for (std::uint64_t v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
        } else {
            out.push_back(number(tok));
        }
    }
    return out;
}

NetworkScenario load(const CommonOptions& o)
{
    std::optional<std::vector<std::uint64_t>> seeds;
    if (!o.seed_triple.empty()) {
        seeds = parse_seed_list(o.seed_triple, "--seed");
        if (seeds->size() != 3) {
            throw ValidationError("--seed", "expected scenario,channel,learner");
        }
    }
    LoadedScenario loaded;
    if (seeds) {
        // Inject the triple before parsing so UE clusters expand with the new scenario seed.
        std::ifstream is(o.scenario_path);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ValidationError(o.scenario_path, e.what());
        }
        if (j.is_object()) {
            j["seeds"] = {{"scenario", (*seeds)[0]}, {"channel", (*seeds)[1]}, {"learner", (*seeds)[2]}};
        }
        loaded = parse_scenario(j.dump());
    } else {
        loaded = load_scenario(o.scenario_path);
    }
    NetworkScenario s = std::move(loaded.scenario);
    if (!o.quiet && !loaded.defaults_applied.empty()) {
        std::cerr << "defaults applied:";
        for (const std::string& p : loaded.defaults_applied) {
            std::cerr << ' ' << p;
        }
        std::cerr << '\n';
    }
    if (o.passes > 0) {
        s.plan.passes = o.passes;
    }
    if (o.batches > 0) {
        s.plan.batches = o.batches;
    }
    if (o.grid > 0.0) {
        s.grid = o.grid;
    }
    validate(s);
    return s;
}

LearnerConfig learner_config(const LearnerOptions& o, const NetworkScenario& s)
{
    LearnerConfig cfg = o.cfg;
    cfg.strategy = parse_strategy(o.strategy);
    cfg.rng_seed = s.seeds.learner;
    validate(cfg);
    return cfg;
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text)) {
        throw std::runtime_error("cannot write " + out);
    }
}

LearnerConfig parse_grid_cell(const json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ValidationError(path, "expected an object");
    }
    LearnerConfig cfg;
    for (const auto& [key, v] : j.items()) {
        const std::string p = path + "." + key;
        if (key == "strategy") {
            if (!v.is_string()) {
                throw ValidationError(p, "expected a string");
            }
            cfg.strategy = parse_strategy(v.get<std::string>());
            continue;
        }
        if (key == "asr") {
            if (!v.is_boolean()) {
                throw ValidationError(p, "expected a boolean");
            }
            cfg.asr_enabled = v.get<bool>();
            continue;
        }
        if (!v.is_number()) {
            throw ValidationError(p, "expected a number");
        }
        const double x = v.get<double>();
        if (key == "alpha") {
            cfg.alpha = x;
        } else if (key == "xi") {
            cfg.xi = x;
        } else if (key == "beta") {
            cfg.beta = x;
        } else if (key == "c") {
            cfg.c = x;
        } else if (key == "alpha_gb") {
            cfg.alpha_gb = x;
        } else if (key == "gamma") {
            cfg.gamma = x;
        } else if (key == "optimistic_init") {
            cfg.optimistic_init = x;
        } else {
            throw ValidationError(p, "unknown key");
        }
    }
    try {
        validate(cfg);
    } catch (const ValidationError& e) {
        throw ValidationError(path + "." + e.path(), e.message());
    }
    return cfg;
}

std::vector<LearnerConfig> load_grid(const std::string& path)
{
    std::ifstream is(path);
    if (!is) {
        throw std::runtime_error("cannot read " + path);
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError(path, e.what());
    }
    if (!j.is_array() || j.empty()) {
        throw ValidationError("grid", "expected a non-empty array of learner configs");
    }
    std::vector<LearnerConfig> grid;
    for (std::size_t i = 0; i < j.size(); ++i) {
        grid.push_back(parse_grid_cell(j[i], "grid[" + std::to_string(i) + "]"));
    }
    return grid;
}

std::string inspect_rem(const RemDb& db)
{
    std::ostringstream os;
    os << "format_version: " << RemDb::kFormatVersion << '\n'
       << "grid_size: " << db.grid() << '\n'
       << "n_bs: " << db.n_bs() << '\n'
       << "actions: " << db.action_count() << '\n'
       << "entries: " << db.size() << '\n'
       << "entry,points,visits,actions_tried,greedy_action,greedy_q\n";
    const std::vector<ActiveSet> actions = all_actions(db.n_bs());
    for (std::size_t i = 0; i < db.size(); ++i) {
        const RemEntry& e = db.entry(i);
        const auto tried = std::count_if(e.n.begin(), e.n.end(), [](std::uint64_t n) { return n > 0; });
        const ActiveSet g = greedy_action(e, actions);
        os << i << ',' << e.state.size() << ',' << e.total_visits() << ',' << tried << ',' << g.to_string() << ','
           << e.q[g.index()] << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Base-station sleep switching simulator and learner"};
    app.require_subcommand(1);

    CommonOptions run_common;
    LearnerOptions run_learner;
    std::string run_format = "summary";
    std::string rem_in;
    std::string rem_out;
    ConvergenceSpec spec;
    auto* run_cmd = app.add_subcommand("run", "Run one learner over a scenario");
    add_common(run_cmd, run_common);
    add_learner(run_cmd, run_learner);
    run_cmd->add_option("--format", run_format, "csv | summary")->check(CLI::IsMember({"csv", "summary"}));
    run_cmd->add_option("--rem-in", rem_in, "Warm-start REM file")->check(CLI::ExistingFile);
    run_cmd->add_option("--rem-out", rem_out, "Write the learned REM here");
    run_cmd->add_option("--window", spec.window, "Moving-average window in passes")->check(CLI::PositiveNumber);
    run_cmd->add_option("--tolerance", spec.tolerance, "Convergence tolerance (fraction of final mean)");
    run_cmd->add_option("--final-window", spec.final_window, "Passes averaged for the final reward")
        ->check(CLI::PositiveNumber);

    CommonOptions sweep_common;
    std::string grid_path;
    std::string sweep_seeds;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a grid of learner configs over several seeds");
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->add_option("--grid", grid_path, "JSON array of learner configs")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--seeds", sweep_seeds, "Comma-separated seeds or ranges, e.g. 1..20")->required();
    sweep_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    CommonOptions oracle_common;
    std::string oracle_avg;
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive best action per batch");
    add_common(oracle_cmd, oracle_common);
    oracle_cmd->add_option("--average-seeds", oracle_avg, "Average rewards over these channel episode seeds");

    CommonOptions swes_common;
    double swes_budget = 0.05;
    auto* swes_cmd = app.add_subcommand("swes", "Greedy switch-off baseline per batch");
    add_common(swes_cmd, swes_common);
    swes_cmd->add_option("--budget", swes_budget, "Median bitrate loss budget")->check(CLI::Range(0.0, 1.0));

    CommonOptions cmp_common;
    LearnerOptions cmp_learner;
    double cmp_budget = 0.05;
    auto* cmp_cmd = app.add_subcommand("compare", "Oracle vs SWES vs learned policy on the final pass");
    add_common(cmp_cmd, cmp_common);
    add_learner(cmp_cmd, cmp_learner);
    cmp_cmd->add_option("--budget", cmp_budget, "SWES median bitrate loss budget")->check(CLI::Range(0.0, 1.0));

    auto* rem_cmd = app.add_subcommand("rem", "REM file tools");
    rem_cmd->require_subcommand(1);
    std::string inspect_path;
    auto* inspect_cmd = rem_cmd->add_subcommand("inspect", "Dump a REM file");
    inspect_cmd->add_option("file", inspect_path, "REM file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run_cmd) {
            const NetworkScenario s = load(run_common);
            std::optional<RemDb> warm;
            if (!rem_in.empty()) {
                warm = bsswitch::load(rem_in);
            }
            const RunResult res = run(s, learner_config(run_learner, s), std::move(warm), spec);
            emit(run_format == "csv" ? report_csv(res.report) : report_summary(res.report), run_common.out);
            if (!rem_out.empty()) {
                save(res.rem, rem_out);
            }
        } else if (*sweep_cmd) {
            const NetworkScenario s = load(sweep_common);
            const std::vector<LearnerConfig> grid = load_grid(grid_path);
            const std::vector<std::uint64_t> seeds = parse_seed_list(sweep_seeds, "--seeds");
            if (seeds.empty()) {
                throw ValidationError("--seeds", "at least one seed is required");
            }
            emit(sweep_csv(sweep(s, grid, seeds, spec, threads)), sweep_common.out);
        } else if (*oracle_cmd) {
            const NetworkScenario s = load(oracle_common);
            const std::vector<std::uint64_t> avg = parse_seed_list(oracle_avg, "--average-seeds");
            std::ostringstream os;
            os << "batch,best_action,best_reward,power\n";
            for (int b = 0; b < s.plan.batches; ++b) {
                const std::vector<UeState> ues = s.ues_at_batch(b);
                const OracleResult r = avg.empty()
                                           ? exhaustive_oracle(s.net, ues, episode_seed(s.seeds.channel, 0, b))
                                           : exhaustive_oracle_averaged(s.net, ues, avg);
                os << b << ',' << r.best_action.to_string() << ',' << r.best_reward << ','
                   << total_power(s.net, r.best_action) << '\n';
            }
            emit(os.str(), oracle_common.out);
        } else if (*swes_cmd) {
            const NetworkScenario s = load(swes_common);
            std::ostringstream os;
            os << "batch,action,reward,power\n";
            for (int b = 0; b < s.plan.batches; ++b) {
                const std::vector<UeState> ues = s.ues_at_batch(b);
                const std::uint64_t seed = episode_seed(s.seeds.channel, 0, b);
                const ActiveSet a = swes(s.net, ues, seed, swes_budget);
                const EpisodeOutcome o = episode_outcome(s.net, ues, a, seed);
                os << b << ',' << a.to_string() << ',' << reward(o) << ',' << o.avg_power << '\n';
            }
            emit(os.str(), swes_common.out);
        } else if (*cmp_cmd) {
            const NetworkScenario s = load(cmp_common);
            const LearnerConfig cfg = learner_config(cmp_learner, s);
            const RunResult res = run(s, cfg);
            const std::vector<CompareRow> rows = compare_policies(s, cfg, res.rem, cmp_budget);
            emit(compare_csv(rows, res.report.all_on_power), cmp_common.out);
        } else if (*inspect_cmd) {
            std::cout << inspect_rem(bsswitch::load(inspect_path));
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const RemFileError& e) {
        std::cerr << "rem error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
