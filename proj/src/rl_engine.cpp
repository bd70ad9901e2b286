#include "bsswitch/rl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsswitch/errors.hpp"

namespace bsswitch {

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::epsilon_greedy:
        return "epsilon_greedy";
    case Strategy::ucb:
        return "ucb";
    case Strategy::gradient_bandit:
        return "gradient_bandit";
    case Strategy::rem_ea:
        return "rem_ea";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s)
{
    if (s == "epsilon_greedy" || s == "egreedy") {
        return Strategy::epsilon_greedy;
    }
    if (s == "ucb") {
        return Strategy::ucb;
    }
    if (s == "gradient_bandit" || s == "gb") {
        return Strategy::gradient_bandit;
    }
    if (s == "rem_ea" || s == "remea") {
        return Strategy::rem_ea;
    }
    throw ValidationError("strategy", "unknown strategy '" + s + "'");
}

void validate(const LearnerConfig& cfg)
{
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
        throw ValidationError("alpha", "must be in (0, 1]");
    }
    if (!(cfg.xi >= 0.0 && cfg.xi <= 1.0)) {
        throw ValidationError("xi", "must be in [0, 1]");
    }
    if (!(cfg.beta >= 1.0)) {
        throw ValidationError("beta", "must be >= 1");
    }
    if (!(cfg.c >= 0.0)) {
        throw ValidationError("c", "must be >= 0");
    }
    if (!(cfg.alpha_gb > 0.0)) {
        throw ValidationError("alpha_gb", "must be positive");
    }
    if (!(cfg.gamma > 0.0)) {
        throw ValidationError("gamma", "must be positive");
    }
    if (!(cfg.optimistic_init >= 0.0)) {
        throw ValidationError("optimistic_init", "must be >= 0");
    }
    if (!(cfg.reward_scale > 0.0)) {
        throw ValidationError("reward_scale", "must be positive");
    }
}

void GbState::observe(std::size_t entry, double r)
{
    if (entry >= avg_reward.size()) {
        avg_reward.resize(entry + 1, 0.0);
        reward_count.resize(entry + 1, 0);
    }
    reward_count[entry] += 1;
    avg_reward[entry] += (r - avg_reward[entry]) / static_cast<double>(reward_count[entry]);
}

double reward(const EpisodeOutcome& outcome)
{
    return outcome.served_count >= outcome.all_on_served ? outcome.ee : 0.0;
}

double q_update(double q_old, double r, double alpha, double xi, double max_next_q)
{
    if (xi == 0.0) {
        return (1.0 - alpha) * q_old + alpha * r;
    }
    return q_old + alpha * (r + xi * max_next_q - q_old);
}

double epsilon_schedule(std::uint64_t total_visits, double beta)
{
    if (total_visits == 0) {
        return 1.0;
    }
    const double eps = 1.0 / std::pow(static_cast<double>(total_visits), 1.0 / beta);
    return std::clamp(eps, std::numeric_limits<double>::min(), 1.0);
}

namespace {

void require_candidates(std::span<const ActiveSet> candidates)
{
    if (candidates.empty()) {
        throw ContractViolation("action selection: empty candidate set");
    }
}

// Strictly better score, or an exact tie won by the global tie rule.
bool beats(double score, const ActiveSet& a, double best_score, const ActiveSet& best)
{
    if (score != best_score) {
        return score > best_score;
    }
    return tie_precedes(a, best);
}

template <typename Score>
ActiveSet argmax_by(std::span<const ActiveSet> candidates, Score score)
{
    std::size_t best = 0;
    double best_score = score(0);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = score(i);
        if (beats(s, candidates[i], best_score, candidates[best])) {
            best = i;
            best_score = s;
        }
    }
    return candidates[best];
}

ActiveSet first_by_tie_rule(std::span<const ActiveSet> candidates, const std::vector<std::size_t>& which)
{
    ActiveSet best = candidates[which.front()];
    for (std::size_t i : which) {
        if (tie_precedes(candidates[i], best)) {
            best = candidates[i];
        }
    }
    return best;
}

}  // namespace

ActiveSet greedy_action(const RemEntry& entry, std::span<const ActiveSet> candidates)
{
    require_candidates(candidates);
    return argmax_by(candidates, [&](std::size_t i) { return entry.q[candidates[i].index()]; });
}

ActiveSet select_epsilon_greedy_with(const RemEntry& entry, std::span<const ActiveSet> candidates, double epsilon,
                                     std::mt19937_64& rng)
{
    require_candidates(candidates);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        return candidates[pick(rng)];
    }
    return greedy_action(entry, candidates);
}

ActiveSet select_epsilon_greedy(const RemEntry& entry, std::span<const ActiveSet> candidates, double beta,
                                std::mt19937_64& rng)
{
    return select_epsilon_greedy_with(entry, candidates, epsilon_schedule(entry.total_visits(), beta), rng);
}

ActiveSet select_ucb_scores(std::span<const double> q, std::span<const double> n,
                            std::span<const ActiveSet> candidates, double c)
{
    require_candidates(candidates);
    std::vector<std::size_t> unvisited;
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (n[i] == 0.0) {
            unvisited.push_back(i);
        }
        total += n[i];
    }
    if (!unvisited.empty()) {
        return first_by_tie_rule(candidates, unvisited);
    }
    // A total below one only arises from fractional aggregated counts; the
    // bonus is then zero rather than imaginary.
    const double log_total = std::max(0.0, std::log(total));
    return argmax_by(candidates, [&](std::size_t i) { return q[i] + c * std::sqrt(log_total / n[i]); });
}

ActiveSet select_ucb(const RemEntry& entry, std::span<const ActiveSet> candidates, double c)
{
    require_candidates(candidates);
    std::vector<double> q(candidates.size());
    std::vector<double> n(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        q[i] = entry.q[candidates[i].index()];
        n[i] = static_cast<double>(entry.n[candidates[i].index()]);
    }
    return select_ucb_scores(q, n, candidates, c);
}

std::vector<double> softmax_policy(const RemEntry& entry, std::span<const ActiveSet> candidates)
{
    require_candidates(candidates);
    double top = -std::numeric_limits<double>::infinity();
    for (const ActiveSet& a : candidates) {
        top = std::max(top, entry.q[a.index()]);
    }
    std::vector<double> pi(candidates.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        pi[i] = std::exp(entry.q[candidates[i].index()] - top);
        sum += pi[i];
    }
    for (double& p : pi) {
        p /= sum;
    }
    return pi;
}

ActiveSet select_gradient_bandit(const RemEntry& entry, std::span<const ActiveSet> candidates, std::mt19937_64& rng)
{
    const std::vector<double> pi = softmax_policy(entry, candidates);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        acc += pi[i];
        if (x < acc) {
            return candidates[i];
        }
    }
    return candidates.back();
}

void gb_update(RemEntry& entry, std::size_t entry_index, GbState& gb, std::span<const ActiveSet> candidates,
               const ActiveSet& taken, double r, double alpha_gb)
{
    const std::vector<double> pi = softmax_policy(entry, candidates);
    const double advantage = r - gb.baseline(entry_index);
    bool found = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double& pref = entry.q[candidates[i].index()];
        if (candidates[i] == taken) {
            pref += alpha_gb * advantage * (1.0 - pi[i]);
            found = true;
        } else {
            pref -= alpha_gb * advantage * pi[i];
        }
    }
    if (!found) {
        throw ContractViolation("gb_update: taken action is not a candidate");
    }
    gb.observe(entry_index, r);
}

std::vector<ActiveSet> asr_filter(const Network& net, const GainMatrix& gains)
{
    // A UE is served under an action iff some active BS reaches the threshold.
    std::vector<std::uint32_t> reach(gains.n_ue(), 0);
    for (std::size_t u = 0; u < gains.n_ue(); ++u) {
        for (std::size_t b = 0; b < gains.n_bs(); ++b) {
            if (net.bs[b].tx_power_w * gains(u, b) >= net.rss_threshold_w) {
                reach[u] |= 1u << b;
            }
        }
    }
    const std::vector<ActiveSet> actions = all_actions(net.n_bs());
    std::vector<int> served(actions.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::uint32_t mask = actions[i].mask();
        served[i] = static_cast<int>(std::count_if(reach.begin(), reach.end(), [&](std::uint32_t r) { return (r & mask) != 0; }));
        best = std::max(best, served[i]);
    }
    std::vector<ActiveSet> kept;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (served[i] == best) {
            kept.push_back(actions[i]);
        }
    }
    return kept;
}

std::vector<ActiveSet> asr_filter(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed)
{
    if (ues.empty()) {
        throw ContractViolation("asr_filter: empty state");
    }
    return asr_filter(net, compute_gains(net, ues, episode_seed));
}

RemEaEstimate rem_ea_estimate(const RemDb& db, std::size_t current, std::span<const ActiveSet> candidates,
                              double gamma)
{
    const RemEntry& self = db.entry(current);

    // Neighbor weights 1/d^gamma. A weight too small to move 1 + w in double
    // precision is dropped, so an action nobody visited within reach keeps an
    // exact zero count.
    struct Neighbor {
        const RemEntry* e;
        double w;
    };
    std::vector<Neighbor> neighbors;
    for (std::size_t l = 0; l < db.size(); ++l) {
        if (l == current) {
            continue;
        }
        const double d = hausdorff(self.state, db.entry(l).state);
        if (!(d > 0.0)) {
            throw ContractViolation("REM-EA: two entries share the same state");
        }
        const double w = std::pow(d, -gamma);
        if (1.0 + w == 1.0) {
            continue;
        }
        neighbors.push_back({&db.entry(l), w});
    }

    RemEaEstimate est;
    est.q_hat.resize(candidates.size());
    est.n_hat.resize(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t a = candidates[i].index();
        double q_num = self.q[a];
        double q_den = 1.0;
        double n_num = static_cast<double>(self.n[a]);
        double n_den = 1.0;
        for (const Neighbor& nb : neighbors) {
            const double qa = nb.e->q[a];
            if (qa != 0.0) {
                q_num += qa * nb.w;
                q_den += nb.w;
            }
            n_num += static_cast<double>(nb.e->n[a]) * nb.w;
            n_den += nb.w;
        }
        est.q_hat[i] = q_num / q_den;
        est.n_hat[i] = n_num / n_den;
    }
    return est;
}

ActiveSet select_rem_ea(const RemDb& db, std::size_t current, std::span<const ActiveSet> candidates, double c,
                        double gamma)
{
    require_candidates(candidates);
    const RemEaEstimate est = rem_ea_estimate(db, current, candidates, gamma);
    return select_ucb_scores(est.q_hat, est.n_hat, candidates, c);
}

// ---- Learner ---------------------------------------------------------------

Learner::Learner(LearnerConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed)
{
    validate(cfg_);
}

ActiveSet Learner::select(const RemDb& db, std::size_t entry, std::span<const ActiveSet> candidates)
{
    const RemEntry& e = db.entry(entry);
    switch (cfg_.strategy) {
    case Strategy::epsilon_greedy:
        return select_epsilon_greedy(e, candidates, cfg_.beta, rng_);
    case Strategy::ucb:
        return select_ucb(e, candidates, cfg_.c);
    case Strategy::gradient_bandit:
        return select_gradient_bandit(e, candidates, rng_);
    case Strategy::rem_ea:
        return select_rem_ea(db, entry, candidates, cfg_.c, cfg_.gamma);
    }
    throw ContractViolation("unknown strategy");
}

void Learner::update(RemDb& db, std::size_t entry, std::span<const ActiveSet> candidates, const ActiveSet& taken,
                     double reward_bpj)
{
    const double r = reward_bpj * cfg_.reward_scale;
    RemEntry& e = db.entry(entry);
    if (cfg_.strategy == Strategy::gradient_bandit) {
        gb_update(e, entry, gb_, candidates, taken, r, cfg_.alpha_gb);
        db.record(entry, taken, e.q[taken.index()]);
        return;
    }
    // Actions do not drive state transitions, so the bootstrap term uses the
    // best value of the same state when xi > 0.
    const double max_next = cfg_.xi == 0.0 ? 0.0 : *std::max_element(e.q.begin(), e.q.end());
    db.record(entry, taken, q_update(e.q[taken.index()], r, cfg_.alpha, cfg_.xi, max_next));
}

}  // namespace bsswitch
