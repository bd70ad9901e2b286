#include "bsswitch/baselines.hpp"

#include "bsswitch/errors.hpp"
#include "bsswitch/rl_engine.hpp"

namespace bsswitch {

namespace {

OracleResult pick_best(int n_bs, std::vector<double> rewards)
{
    OracleResult res;
    res.rewards = std::move(rewards);
    res.best_action = ActiveSet::from_index(0, n_bs);
    res.best_reward = res.rewards[0];
    for (std::uint32_t i = 1; i < res.rewards.size(); ++i) {
        const ActiveSet a = ActiveSet::from_index(i, n_bs);
        const double r = res.rewards[i];
        if (r > res.best_reward || (r == res.best_reward && tie_precedes(a, res.best_action))) {
            res.best_reward = r;
            res.best_action = a;
        }
    }
    return res;
}

}  // namespace

OracleResult exhaustive_oracle(const Network& net, const GainMatrix& gains)
{
    const std::uint32_t count = ActiveSet::action_count(net.n_bs());
    std::vector<double> rewards(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        rewards[i] = reward(evaluate(net, gains, ActiveSet::from_index(i, net.n_bs())));
    }
    return pick_best(net.n_bs(), std::move(rewards));
}

OracleResult exhaustive_oracle(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed)
{
    if (ues.empty()) {
        throw ContractViolation("exhaustive_oracle: empty state");
    }
    return exhaustive_oracle(net, compute_gains(net, ues, episode_seed));
}

OracleResult exhaustive_oracle_averaged(const Network& net, std::span<const UeState> ues,
                                        std::span<const std::uint64_t> seeds)
{
    if (seeds.empty()) {
        throw ContractViolation("exhaustive_oracle_averaged: no seeds");
    }
    std::vector<double> sum(ActiveSet::action_count(net.n_bs()), 0.0);
    for (std::uint64_t s : seeds) {
        const OracleResult one = exhaustive_oracle(net, ues, s);
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += one.rewards[i];
        }
    }
    for (double& v : sum) {
        v /= static_cast<double>(seeds.size());
    }
    return pick_best(net.n_bs(), std::move(sum));
}

ActiveSet swes(const Network& net, const GainMatrix& gains, double budget)
{
    if (gains.n_ue() == 0) {
        throw ContractViolation("swes: empty state");
    }
    ActiveSet current = ActiveSet::all_on(net.n_bs());
    const EpisodeOutcome initial = evaluate(net, gains, current);
    const double floor = (1.0 - budget) * initial.median_bitrate;

    for (;;) {
        int pick = -1;
        double pick_median = 0.0;
        for (int b = 1; b < net.n_bs(); ++b) {
            if (!current.active(b)) {
                continue;
            }
            const EpisodeOutcome o = evaluate(net, gains, current.with(b, false));
            if (o.served_count < initial.served_count || o.median_bitrate < floor) {
                continue;
            }
            // Smallest contribution == highest median once removed.
            if (pick < 0 || o.median_bitrate > pick_median) {
                pick = b;
                pick_median = o.median_bitrate;
            }
        }
        if (pick < 0) {
            break;
        }
        current = current.with(pick, false);
    }
    return current;
}

ActiveSet swes(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed, double budget)
{
    if (ues.empty()) {
        throw ContractViolation("swes: empty state");
    }
    return swes(net, compute_gains(net, ues, episode_seed), budget);
}

}  // namespace bsswitch
