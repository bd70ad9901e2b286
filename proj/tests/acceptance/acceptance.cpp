// Acceptance checks. One line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bsswitch/baselines.hpp"
#include "bsswitch/geometry.hpp"
#include "bsswitch/harness.hpp"
#include "bsswitch/net_model.hpp"
#include "bsswitch/rem_store.hpp"
#include "bsswitch/rl_engine.hpp"
#include "bsswitch/scenario.hpp"

using namespace bsswitch;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

NetworkScenario scenario(const char* name)
{
    return load_scenario(std::string(BSSWITCH_SCENARIO_DIR) + "/" + name).scenario;
}

double brute_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b)
{
    auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
        double worst = 0.0;
        for (const Vec2& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& q : to) {
                best = std::min(best, std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// 45 of the 50 UEs, chosen by `seed`, on a re-seeded channel.
NetworkScenario perturbed(const NetworkScenario& base, std::uint64_t seed)
{
    NetworkScenario p = base.with_channel_seed(1000 + seed);
    std::mt19937_64 rng(seed);
    std::shuffle(p.ues.begin(), p.ues.end(), rng);
    p.ues.resize(45);
    std::sort(p.ues.begin(), p.ues.end(), [](const Trajectory& a, const Trajectory& b) { return a.id < b.id; });
    return p;
}

std::vector<UeState> random_ues(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> count(5, 50);
    std::uniform_real_distribution<double> near(-250.0, 250.0);
    std::uniform_real_distribution<double> hole(-40.0, 40.0);
    std::bernoulli_distribution use_hole(0.5);
    std::vector<UeState> ues;
    const int n = count(rng);
    const bool with_hole = use_hole(rng);
    for (int i = 0; i < n; ++i) {
        Vec2 p{near(rng), near(rng)};
        if (with_hole && i % 8 == 0) {
            p = Vec2{1400.0 + hole(rng), hole(rng)};
        }
        ues.push_back(UeState{i, p, 0.0});
    }
    return ues;
}

Outcome power_model()
{
    const NetworkScenario s = scenario("default.json");
    const Network& net = s.net;
    const double macro = bs_power(net.bs[0], net.power, true);
    const double pico = bs_power(net.bs[1], net.power, true);
    const double off = bs_power(net.bs[1], net.power, false);
    const double all_on = total_power(net, ActiveSet::all_on(net.n_bs()));
    const bool ok = std::abs(macro - 141.02) <= 0.01 && std::abs(pico - 25.0) <= 0.01 && std::abs(off - 10.0) <= 0.01 &&
                    std::abs(all_on - 266.02) <= 0.01;
    return {ok, format("macro %.4f W, pico %.4f W, off %.4f W, all-on (1 macro + %d picos) %.4f W", macro, pico, off,
                       net.n_bs() - 1, all_on)};
}

Outcome hausdorff_oracle()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(1, 8);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<Vec2> a(size(rng));
        std::vector<Vec2> b(size(rng));
        for (Vec2& p : a) p = {coord(rng), coord(rng)};
        for (Vec2& p : b) p = {coord(rng), coord(rng)};
        if (hausdorff(a, b) != brute_hausdorff(a, b)) {
            ++mismatches;
        }
    }
    return {mismatches == 0, format("%d mismatches over 1000 pairs", mismatches)};
}

Outcome q_filter()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    std::uniform_real_distribution<double> step(1e-3, 1.0);
    std::uniform_int_distribution<int> steps(1, 50);
    int identity_fail = 0;
    double worst_rel = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const double q = val(rng);
        const double r = val(rng);
        const double a = step(rng);
        if (q_update(q, r, a) != (1.0 - a) * q + a * r) {
            ++identity_fail;
        }
        const int k = steps(rng);
        double it = q;
        for (int i = 0; i < k; ++i) {
            it = q_update(it, r, a);
        }
        const double decay = std::pow(1.0 - a, k);
        const double closed = decay * q + (1.0 - decay) * r;
        const double scale = std::max({std::abs(closed), std::abs(q), std::abs(r)});
        worst_rel = std::max(worst_rel, std::abs(it - closed) / scale);
    }
    return {identity_fail == 0 && worst_rel <= 1e-12,
            format("%d identity mismatches, worst k-step relative error %.3g", identity_fail, worst_rel)};
}

Outcome asr_safety()
{
    const NetworkScenario s = scenario("default.json");
    std::mt19937_64 rng(7);
    int checked = 0;
    int positive = 0;
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        const std::vector<UeState> ues = random_ues(rng);
        const std::uint64_t seed = rng();
        const OracleResult o = exhaustive_oracle(s.net, ues, seed);
        ++checked;
        if (o.best_reward > 0.0) {
            ++positive;
            const std::vector<ActiveSet> cands = asr_filter(s.net, ues, seed);
            if (std::find(cands.begin(), cands.end(), o.best_action) == cands.end()) {
                ++violations;
            }
        }
    }
    return {violations == 0 && checked >= 100,
            format("%d states, %d with positive oracle reward, %d oracle actions pruned", checked, positive, violations)};
}

Outcome oracle_dominance()
{
    int states = 0;
    int violations = 0;
    for (const char* name : {"default.json", "stationary4.json"}) {
        const NetworkScenario s = scenario(name);
        const ActiveSet all_on = ActiveSet::all_on(s.net.n_bs());
        for (int pass = 0; pass < 3; ++pass) {
            for (int b = 0; b < s.plan.batches; ++b) {
                const std::vector<UeState> ues = s.ues_at_batch(b);
                const GainMatrix gains = compute_gains(s.net, ues, episode_seed(s.seeds.channel, pass, b));
                const OracleResult o = exhaustive_oracle(s.net, gains);
                const double r_swes = evaluate(s.net, gains, swes(s.net, gains)).reward;
                const double r_all = evaluate(s.net, gains, all_on).reward;
                ++states;
                if (!(o.best_reward >= r_swes) || !(o.best_reward >= r_all)) {
                    ++violations;
                }
            }
        }
    }
    return {violations == 0, format("%d states over 2 scenarios, %d violations", states, violations)};
}

Outcome ucb_reaches_oracle()
{
    const NetworkScenario s = scenario("stationary4.json");
    const std::vector<ActiveSet> actions = all_actions(s.net.n_bs());
    int hits = 0;
    int total = 0;
    std::uint64_t min_visits = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        LearnerConfig cfg;
        cfg.strategy = Strategy::ucb;
        cfg.c = 0.01;
        cfg.rng_seed = seed;
        const RunResult r = run(s, cfg);
        for (int b = 0; b < s.plan.batches; ++b) {
            const std::vector<UeState> ues = s.ues_at_batch(b);
            std::vector<Vec2> pts;
            for (const UeState& u : ues) pts.push_back(u.position);
            const MatchResult m = r.rem.nearest(quantize(pts, s.grid));
            const RemEntry& e = r.rem.entry(m.index);
            min_visits = std::min(min_visits, e.total_visits());
            const OracleResult o = exhaustive_oracle(s.net, ues, episode_seed(s.seeds.channel, 0, b));
            hits += greedy_action(e, actions) == o.best_action;
            ++total;
        }
    }
    const double share = static_cast<double>(hits) / total;
    return {share >= 0.95 && min_visits <= 200,
            format("greedy = oracle in %d/%d states (%.1f%%), %d actions, %llu visits per state", hits, total,
                   100.0 * share, static_cast<int>(actions.size()), static_cast<unsigned long long>(min_visits))};
}

Outcome convergence_ordering()
{
    const NetworkScenario s = scenario("default.json");
    std::vector<LearnerConfig> grid(3);
    grid[0].strategy = Strategy::ucb;
    grid[1].strategy = Strategy::ucb;
    grid[1].asr_enabled = true;
    grid[2].strategy = Strategy::rem_ea;
    grid[2].asr_enabled = true;
    grid[2].gamma = 1.5;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t k = 1; k <= 20; ++k) seeds.push_back(k);
    const std::vector<SweepRow> rows =
        sweep(s, grid, seeds, ConvergenceSpec{}, std::max(1u, std::thread::hardware_concurrency()));

    // A run that never settles is charged the full pass count.
    double passes[3] = {0, 0, 0};
    double reward[3] = {0, 0, 0};
    int unconverged[3] = {0, 0, 0};
    for (const SweepRow& row : rows) {
        if (!row.seed) continue;
        const std::size_t i = row.config_index;
        const bool converged = row.passes_to_converge != kNoConvergence;
        passes[i] += converged ? row.passes_to_converge : s.plan.passes;
        unconverged[i] += !converged;
        reward[i] += row.final_mean_reward;
    }
    for (int i = 0; i < 3; ++i) {
        passes[i] /= seeds.size();
        reward[i] /= seeds.size();
    }
    const double gap = 0.10 * passes[0];
    const double best = *std::max_element(reward, reward + 3);
    const double worst = *std::min_element(reward, reward + 3);
    const bool ordered = passes[2] <= passes[1] - gap && passes[1] <= passes[0] - gap;
    const bool rewards_close = worst >= 0.98 * best;
    return {ordered && rewards_close,
            format("passes UCB %.2f, UCB+ASR %.2f, REM-EA+ASR %.2f (unconverged %d/%d/%d); final Mbit/J %.4f/%.4f/%.4f, "
                   "spread %.2f%%",
                   passes[0], passes[1], passes[2], unconverged[0], unconverged[1], unconverged[2], reward[0] * 1e-6,
                   reward[1] * 1e-6, reward[2] * 1e-6, 100.0 * (best - worst) / best)};
}

std::vector<std::uint32_t> action_trace(const RunReport& r)
{
    std::vector<std::uint32_t> out;
    for (const EpisodeRecord& rec : r.records) out.push_back(rec.action);
    return out;
}

Outcome rem_ea_degeneracy()
{
    NetworkScenario still = scenario("stationary4.json");
    for (Trajectory& t : still.ues) t.speed = 0.0;
    still.plan = EpisodePlan{10, 10, 1.0};

    NetworkScenario moving = scenario("default.json");
    moving.plan = EpisodePlan{20, 5, moving.plan.gap_s};

    int compared = 0;
    int differing = 0;
    std::size_t still_entries = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (bool asr : {false, true}) {
        LearnerConfig ucb;
        ucb.strategy = Strategy::ucb;
        ucb.asr_enabled = asr;
        LearnerConfig ea = ucb;
        ea.strategy = Strategy::rem_ea;

        ea.gamma = 1.5;
        const RunResult u1 = run(still, ucb);
        const RunResult e1 = run(still, ea);
        still_entries = std::max(still_entries, e1.rem.size());
        differing += action_trace(u1.report) != action_trace(e1.report);
        compared += 1;

        ea.gamma = 64.0;
        const RunResult u2 = run(moving, ucb);
        const RunResult e2 = run(moving, ea);
        for (std::size_t i = 0; i < e2.rem.size(); ++i) {
            for (std::size_t j = i + 1; j < e2.rem.size(); ++j) {
                min_gap = std::min(min_gap, hausdorff(e2.rem.entry(i).state, e2.rem.entry(j).state));
            }
        }
        differing += action_trace(u2.report) != action_trace(e2.report);
        compared += 1;
    }
    return {differing == 0 && still_entries == 1 && min_gap > 1.0,
            format("%d/%d 100-episode traces identical (single entry; gamma 64 with min inter-entry HD %.1f m)",
                   compared - differing, compared, min_gap)};
}

Outcome grid_tradeoff()
{
    const NetworkScenario base = scenario("default.json");
    const double sizes[] = {3.0, 5.0, 6.0, 10.0};
    std::size_t entries[4] = {0, 0, 0, 0};
    double reward[4] = {0, 0, 0, 0};
    const int n_seeds = 5;
    for (int k = 0; k < 4; ++k) {
        for (int seed = 1; seed <= n_seeds; ++seed) {
            NetworkScenario s = base.with_channel_seed(seed);
            s.grid = sizes[k];
            LearnerConfig cfg;
            cfg.strategy = Strategy::rem_ea;
            cfg.asr_enabled = true;
            cfg.rng_seed = seed;
            const RunResult r = run(s, cfg);
            entries[k] = r.rem.size();
            reward[k] += r.report.summary.final_mean_reward / n_seeds;
        }
    }
    const bool monotone = entries[0] >= entries[1] && entries[1] >= entries[2] && entries[2] >= entries[3];
    return {monotone && reward[3] < reward[0],
            format("entries %zu/%zu/%zu/%zu for g = 3/5/6/10 m; final Mbit/J %.4f (g=3) vs %.4f (g=10)", entries[0],
                   entries[1], entries[2], entries[3], reward[0] * 1e-6, reward[3] * 1e-6)};
}

Outcome determinism_and_persistence()
{
    const NetworkScenario base = scenario("default.json");
    LearnerConfig cfg;
    cfg.strategy = Strategy::rem_ea;
    cfg.asr_enabled = true;

    const RunResult a = run(base, cfg);
    const RunResult b = run(base, cfg);
    const bool identical =
        report_csv(a.report) == report_csv(b.report) && report_summary(a.report) == report_summary(b.report);

    std::stringstream first;
    write_rem(a.rem, first);
    const std::string text = first.str();
    std::stringstream in(text);
    const RemDb loaded = read_rem(in);
    std::stringstream second;
    write_rem(loaded, second);
    const bool round_trip = loaded == a.rem && second.str() == text;

    // Each seed is checked on its own; a run that never settles is charged the full pass count.
    const int n_seeds = 5;
    auto charged = [&](const RunResult& r) {
        const int p = r.report.summary.passes_to_converge;
        return p == kNoConvergence ? base.plan.passes : p;
    };
    int slower = 0;
    double cold_sum = 0.0;
    double warm_sum = 0.0;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        cfg.rng_seed = seed;
        const RunResult prior = run(base.with_channel_seed(seed), cfg);
        const NetworkScenario p = perturbed(base, seed);
        const int cold = charged(run(p, cfg));
        const int warm = charged(run(p, cfg, prior.rem));
        slower += warm > 1.05 * cold;
        cold_sum += cold;
        warm_sum += warm;
    }
    const double cold_mean = cold_sum / n_seeds;
    const double warm_mean = warm_sum / n_seeds;
    return {identical && round_trip && slower == 0 && warm_mean <= 1.05 * cold_mean,
            format("reports identical: %s; REM round trip exact: %s (%zu entries); perturbed warm/cold passes %.2f/%.2f, "
                   "%d of %d seeds slower",
                   identical ? "yes" : "no", round_trip ? "yes" : "no", a.rem.size(), warm_mean, cold_mean, slower,
                   n_seeds)};
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> check;
    };
    const Criterion criteria[] = {
        {1, "power model exactness", 1.0, power_model},
        {2, "Hausdorff oracle equivalence", 5.0, hausdorff_oracle},
        {3, "Q-filter identity", 1.0, q_filter},
        {4, "ASR safety", 120.0, asr_safety},
        {5, "oracle dominance", 120.0, oracle_dominance},
        {6, "UCB reaches oracle", 600.0, ucb_reaches_oracle},
        {7, "convergence ordering", 900.0, convergence_ordering},
        {8, "REM-EA/UCB degeneracy", 600.0, rem_ea_degeneracy},
        {9, "grid-size tradeoff", 600.0, grid_tradeoff},
        {10, "determinism and persistence", 600.0, determinism_and_persistence},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt <= c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s criterion %d (%s): %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), dt, c.limit_s, in_time ? "" : ", over limit");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
