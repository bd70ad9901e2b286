#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsswitch/active_set.hpp"
#include "bsswitch/net_model.hpp"

namespace bsswitch {

struct OracleResult {
    ActiveSet best_action;
    double best_reward = 0.0;     // bit/J
    std::vector<double> rewards;  // indexed by ActiveSet::index()
};

// Reward of every action under one seed; best by the global tie rule.
OracleResult exhaustive_oracle(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed);
OracleResult exhaustive_oracle(const Network& net, const GainMatrix& gains);

// Rewards averaged over several seeds before taking the argmax.
OracleResult exhaustive_oracle_averaged(const Network& net, std::span<const UeState> ues,
                                        std::span<const std::uint64_t> seeds);

// Greedy switch-off adapted to full-buffer traffic. Starting from all-on, a
// pico is removable if dropping it keeps the all-on served count and keeps
// the median bitrate within `budget` of the initial all-on median. Each round
// removes the removable pico whose loss costs the least median bitrate
// (lowest id on ties) until none is removable. The budget is cumulative.
ActiveSet swes(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed, double budget = 0.05);
ActiveSet swes(const Network& net, const GainMatrix& gains, double budget = 0.05);

}  // namespace bsswitch
