#include "bsswitch/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <sstream>

#include "bsswitch/baselines.hpp"
#include "bsswitch/errors.hpp"
#include "bsswitch/seeding.hpp"

namespace bsswitch {

namespace {

std::string fmt(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

template <typename T>
T parse_field(const std::string& tok, const std::string& column)
{
    T v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ValidationError(column, "cannot parse '" + tok + "'");
    }
    return v;
}

double mean(std::span<const double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

int converge_metric(std::span<const double> trace, int window, double tolerance, int final_window)
{
    if (window < 1) {
        throw ContractViolation("converge_metric: window must be >= 1");
    }
    if (trace.size() < static_cast<std::size_t>(window)) {
        throw ContractViolation("converge_metric: trace of " + std::to_string(trace.size()) +
                                " points is shorter than the window " + std::to_string(window));
    }
    const std::size_t n = trace.size();
    const std::size_t k = static_cast<std::size_t>(window);
    const std::size_t tail = std::min(n, static_cast<std::size_t>(std::max(final_window, 1)));
    const double final = mean(trace.subspan(n - tail));
    const double band = tolerance * std::abs(final);

    int converged = 0;
    for (std::size_t i = n - k + 1; i-- > 0;) {
        const double ma = mean(trace.subspan(i, k));
        if (std::abs(ma - final) > band) {
            converged = static_cast<int>(i) + 1;
            break;
        }
    }
    return converged > static_cast<int>(n - k) ? kNoConvergence : converged;
}

ConvergenceSummary summarize(const RunReport& report, const ConvergenceSpec& spec)
{
    ConvergenceSummary s;
    const auto& pm = report.pass_mean_reward;
    if (!pm.empty()) {
        const std::size_t tail = std::min(pm.size(), static_cast<std::size_t>(std::max(spec.final_window, 1)));
        s.final_mean_reward = mean(std::span<const double>(pm).subspan(pm.size() - tail));
        if (pm.size() >= static_cast<std::size_t>(spec.window)) {
            s.passes_to_converge = converge_metric(pm, spec.window, spec.tolerance, spec.final_window);
        }
    }

    std::map<std::size_t, std::vector<double>> per_state;
    for (const EpisodeRecord& r : report.records) {
        per_state[r.state_id].push_back(r.reward);
    }
    double visits_sum = 0.0;
    for (const auto& [id, trace] : per_state) {
        ++s.states_total;
        if (trace.size() < static_cast<std::size_t>(spec.window)) {
            continue;
        }
        const int c = converge_metric(trace, spec.window, spec.tolerance, spec.final_window);
        if (c != kNoConvergence) {
            ++s.states_converged;
            visits_sum += c;
        }
    }
    if (s.states_converged > 0) {
        s.mean_visits_to_converge = visits_sum / s.states_converged;
    }
    return s;
}

std::uint64_t episode_seed(std::uint64_t channel_seed, int pass, int batch)
{
    return mix_seed({channel_seed, static_cast<std::uint64_t>(pass), static_cast<std::uint64_t>(batch)});
}

RunResult run(const NetworkScenario& scenario, const LearnerConfig& learner_cfg, std::optional<RemDb> warm,
              const ConvergenceSpec& spec)
{
    validate(scenario);
    validate(learner_cfg);
    const Network& net = scenario.net;
    RemDb db = warm ? std::move(*warm) : RemDb(scenario.grid, net.n_bs(), learner_cfg.optimistic_init);
    if (db.grid() != scenario.grid || db.n_bs() != net.n_bs()) {
        throw ValidationError("rem", "warm-start REM grid/BS count does not match the scenario");
    }

    Learner learner(learner_cfg);
    const std::vector<ActiveSet> every_action = all_actions(net.n_bs());

    RunReport report;
    report.strategy = to_string(learner_cfg.strategy) + (learner_cfg.asr_enabled ? "+asr" : "");
    report.batches = scenario.plan.batches;
    report.all_on_power = total_power(net, ActiveSet::all_on(net.n_bs()));
    report.records.reserve(static_cast<std::size_t>(scenario.plan.total_episodes()));

    // UE positions repeat every pass; compute them once.
    std::vector<std::vector<UeState>> batch_ues;
    std::vector<UePositionSet> batch_states;
    for (int b = 0; b < scenario.plan.batches; ++b) {
        batch_ues.push_back(scenario.ues_at_batch(b));
        std::vector<Vec2> pts;
        for (const UeState& u : batch_ues.back()) {
            pts.push_back(u.position);
        }
        batch_states.push_back(quantize(pts, scenario.grid));
    }

    int episode = 0;
    for (int pass = 0; pass < scenario.plan.passes; ++pass) {
        double pass_sum = 0.0;
        for (int batch = 0; batch < scenario.plan.batches; ++batch) {
            const std::uint64_t seed = episode_seed(scenario.seeds.channel, pass, batch);
            const GainMatrix gains = compute_gains(net, batch_ues[static_cast<std::size_t>(batch)], seed);
            const MatchResult m = db.match_or_insert(batch_states[static_cast<std::size_t>(batch)]);

            const std::vector<ActiveSet> candidates = learner_cfg.asr_enabled ? asr_filter(net, gains) : every_action;
            const ActiveSet action = learner.select(db, m.index, candidates);
            const EpisodeOutcome out = evaluate(net, gains, action);
            const double r = reward(out);
            learner.update(db, m.index, candidates, action, r);

            EpisodeRecord rec;
            rec.episode = episode++;
            rec.pass = pass;
            rec.batch = batch;
            rec.state_id = m.index;
            rec.new_state = m.was_new;
            rec.action = action.index();
            rec.candidate_count = static_cast<int>(candidates.size());
            rec.reward = r;
            rec.ee = out.ee;
            rec.median_bitrate = out.median_bitrate;
            rec.avg_power = out.avg_power;
            rec.served_count = out.served_count;
            rec.entry_count = db.size();
            report.records.push_back(rec);
            pass_sum += r;
        }
        report.pass_mean_reward.push_back(pass_sum / scenario.plan.batches);
    }
    report.summary = summarize(report, spec);
    return RunResult{std::move(report), std::move(db)};
}

std::vector<SweepRow> sweep(const NetworkScenario& scenario, std::span<const LearnerConfig> grid,
                            std::span<const std::uint64_t> seeds, const ConvergenceSpec& spec, unsigned threads)
{
    if (grid.empty()) {
        throw ValidationError("grid", "sweep needs at least one learner config");
    }
    if (seeds.empty()) {
        throw ValidationError("seeds", "sweep needs at least one seed");
    }
    struct Cell {
        std::size_t config;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        for (std::uint64_t s : seeds) {
            cells.push_back({c, s});
        }
    }

    auto run_cell = [&](const Cell& cell) {
        LearnerConfig cfg = grid[cell.config];
        cfg.rng_seed = cell.seed;
        const RunResult res = run(scenario.with_channel_seed(cell.seed), cfg, std::nullopt, spec);
        SweepRow row;
        row.config_index = cell.config;
        row.config = cfg;
        row.seed = cell.seed;
        row.final_mean_reward = res.report.summary.final_mean_reward;
        row.passes_to_converge = res.report.summary.passes_to_converge;
        row.converged_runs = res.report.summary.passes_to_converge == kNoConvergence ? 0 : 1;
        return row;
    };

    std::vector<SweepRow> cell_rows(cells.size());
    const unsigned workers = std::max(1u, threads);
    for (std::size_t start = 0; start < cells.size(); start += workers) {
        std::vector<std::future<SweepRow>> batch;
        const std::size_t stop = std::min(cells.size(), start + workers);
        for (std::size_t i = start; i < stop; ++i) {
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_cell, cells[i]));
        }
        for (std::size_t i = start; i < stop; ++i) {
            cell_rows[i] = batch[i - start].get();
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        SweepRow agg;
        agg.config_index = c;
        agg.config = grid[c];
        agg.runs = 0;
        double reward_sum = 0.0;
        double conv_sum = 0.0;
        for (const SweepRow& r : cell_rows) {
            if (r.config_index != c) {
                continue;
            }
            rows.push_back(r);
            ++agg.runs;
            reward_sum += r.final_mean_reward;
            if (r.converged_runs > 0) {
                ++agg.converged_runs;
                conv_sum += r.passes_to_converge;
            }
        }
        agg.final_mean_reward = reward_sum / agg.runs;
        agg.passes_to_converge = agg.converged_runs > 0 ? conv_sum / agg.converged_runs : kNoConvergence;
        rows.push_back(agg);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows)
{
    std::ostringstream os;
    os << "config,strategy,asr,alpha,beta,c,alpha_gb,gamma,seed,runs,converged_runs,final_mean_reward,"
          "passes_to_converge\n";
    for (const SweepRow& r : rows) {
        const LearnerConfig& c = r.config;
        os << r.config_index << ',' << to_string(c.strategy) << ',' << (c.asr_enabled ? 1 : 0) << ',' << fmt(c.alpha)
           << ',' << fmt(c.beta) << ',' << fmt(c.c) << ',' << fmt(c.alpha_gb) << ',' << fmt(c.gamma) << ','
           << (r.seed ? std::to_string(*r.seed) : std::string("mean")) << ',' << r.runs << ',' << r.converged_runs
           << ',' << fmt(r.final_mean_reward) << ',' << fmt(r.passes_to_converge) << '\n';
    }
    return os.str();
}

// ---- report export ----------------------------------------------------------

namespace {

constexpr const char* kReportHeader =
    "episode,pass,batch,state_id,new_state,action,candidate_count,reward,ee,median_bitrate,avg_power,served_count,"
    "entry_count";

}  // namespace

double energy_savings(const RunReport& report)
{
    if (report.records.empty() || report.all_on_power <= 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const EpisodeRecord& r : report.records) {
        sum += r.avg_power;
    }
    return 1.0 - (sum / static_cast<double>(report.records.size())) / report.all_on_power;
}

std::string report_csv(const RunReport& report)
{
    std::ostringstream os;
    os << kReportHeader << '\n';
    for (const EpisodeRecord& r : report.records) {
        os << r.episode << ',' << r.pass << ',' << r.batch << ',' << r.state_id << ',' << (r.new_state ? 1 : 0) << ','
           << r.action << ',' << r.candidate_count << ',' << fmt(r.reward) << ',' << fmt(r.ee) << ','
           << fmt(r.median_bitrate) << ',' << fmt(r.avg_power) << ',' << r.served_count << ',' << r.entry_count
           << '\n';
    }
    return os.str();
}

std::vector<EpisodeRecord> parse_report_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kReportHeader) {
        throw ValidationError("header", "not a run report CSV");
    }
    std::vector<EpisodeRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            f.push_back(tok);
        }
        if (f.size() != 13) {
            throw ValidationError("row " + std::to_string(out.size()), "expected 13 columns");
        }
        EpisodeRecord r;
        r.episode = parse_field<int>(f[0], "episode");
        r.pass = parse_field<int>(f[1], "pass");
        r.batch = parse_field<int>(f[2], "batch");
        r.state_id = parse_field<std::size_t>(f[3], "state_id");
        r.new_state = parse_field<int>(f[4], "new_state") != 0;
        r.action = parse_field<std::uint32_t>(f[5], "action");
        r.candidate_count = parse_field<int>(f[6], "candidate_count");
        r.reward = parse_field<double>(f[7], "reward");
        r.ee = parse_field<double>(f[8], "ee");
        r.median_bitrate = parse_field<double>(f[9], "median_bitrate");
        r.avg_power = parse_field<double>(f[10], "avg_power");
        r.served_count = parse_field<int>(f[11], "served_count");
        r.entry_count = parse_field<std::size_t>(f[12], "entry_count");
        out.push_back(r);
    }
    return out;
}

std::string report_summary(const RunReport& report)
{
    const ConvergenceSummary& s = report.summary;
    double ee_sum = 0.0;
    double rate_sum = 0.0;
    double power_sum = 0.0;
    for (const EpisodeRecord& r : report.records) {
        ee_sum += r.ee;
        rate_sum += r.median_bitrate;
        power_sum += r.avg_power;
    }
    const double n = std::max<double>(1.0, static_cast<double>(report.records.size()));
    std::ostringstream os;
    os << "strategy: " << report.strategy << '\n'
       << "episodes: " << report.records.size() << '\n'
       << "rem_entries: " << (report.records.empty() ? 0 : report.records.back().entry_count) << '\n'
       << "final_mean_reward_mbit_per_j: " << fmt(s.final_mean_reward * 1e-6) << '\n'
       << "passes_to_converge: "
       << (s.passes_to_converge == kNoConvergence ? std::string("none") : std::to_string(s.passes_to_converge))
       << '\n'
       << "states_converged: " << s.states_converged << '/' << s.states_total << '\n'
       << "mean_visits_to_converge: " << fmt(s.mean_visits_to_converge) << '\n'
       << "mean_ee_mbit_per_j: " << fmt(ee_sum / n * 1e-6) << '\n'
       << "mean_median_bitrate_mbps: " << fmt(rate_sum / n * 1e-6) << '\n'
       << "mean_power_w: " << fmt(power_sum / n) << '\n'
       << "all_on_power_w: " << fmt(report.all_on_power) << '\n'
       << "energy_savings_percent: " << fmt(100.0 * energy_savings(report)) << '\n';
    return os.str();
}

void export_report(const RunReport& report, const std::filesystem::path& path, ReportFormat format)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << (format == ReportFormat::csv ? report_csv(report) : report_summary(report));
    os.flush();
    if (!os) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

// ---- policy comparison ------------------------------------------------------

std::vector<CompareRow> compare_policies(const NetworkScenario& scenario, const LearnerConfig& learner,
                                         const RemDb& learned, double swes_budget)
{
    validate(scenario);
    const Network& net = scenario.net;
    const int last_pass = scenario.plan.passes - 1;
    const std::vector<ActiveSet> every_action = all_actions(net.n_bs());
    std::vector<CompareRow> rows;
    for (int batch = 0; batch < scenario.plan.batches; ++batch) {
        const std::vector<UeState> ues = scenario.ues_at_batch(batch);
        const GainMatrix gains = compute_gains(net, ues, episode_seed(scenario.seeds.channel, last_pass, batch));
        std::vector<Vec2> pts;
        for (const UeState& u : ues) {
            pts.push_back(u.position);
        }
        const UePositionSet state = quantize(pts, scenario.grid);

        CompareRow row;
        row.batch = batch;
        const OracleResult oracle = exhaustive_oracle(net, gains);
        const ActiveSet sw = swes(net, gains, swes_budget);
        ActiveSet mine = ActiveSet::all_on(net.n_bs());
        const MatchResult m = learned.nearest(state);
        if (m.index < learned.size() && m.distance < learned.grid()) {
            const std::vector<ActiveSet> candidates = learner.asr_enabled ? asr_filter(net, gains) : every_action;
            mine = greedy_action(learned.entry(m.index), candidates);
            row.state_id = m.index;
        } else {
            row.state_id = learned.size();
        }
        const EpisodeOutcome o_sw = evaluate(net, gains, sw);
        const EpisodeOutcome o_mine = evaluate(net, gains, mine);
        row.oracle_reward = oracle.best_reward;
        row.swes_reward = reward(o_sw);
        row.all_on_reward = reward(evaluate(net, gains, ActiveSet::all_on(net.n_bs())));
        row.learned_reward = reward(o_mine);
        row.oracle_power = total_power(net, oracle.best_action);
        row.swes_power = o_sw.avg_power;
        row.learned_power = o_mine.avg_power;
        row.oracle_action = oracle.best_action.index();
        row.swes_action = sw.index();
        row.learned_action = mine.index();
        rows.push_back(row);
    }
    return rows;
}

std::string compare_csv(std::span<const CompareRow> rows, double all_on_power)
{
    std::ostringstream os;
    os << "batch,state_id,oracle_action,swes_action,learned_action,oracle_reward,swes_reward,all_on_reward,"
          "learned_reward,oracle_power,swes_power,learned_power,all_on_power\n";
    for (const CompareRow& r : rows) {
        os << r.batch << ',' << r.state_id << ',' << r.oracle_action << ',' << r.swes_action << ',' << r.learned_action
           << ',' << fmt(r.oracle_reward) << ',' << fmt(r.swes_reward) << ',' << fmt(r.all_on_reward) << ','
           << fmt(r.learned_reward) << ',' << fmt(r.oracle_power) << ',' << fmt(r.swes_power) << ','
           << fmt(r.learned_power) << ',' << fmt(all_on_power) << '\n';
    }
    return os.str();
}

}  // namespace bsswitch
