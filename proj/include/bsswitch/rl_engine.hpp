#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bsswitch/active_set.hpp"
#include "bsswitch/net_model.hpp"
#include "bsswitch/rem_store.hpp"

namespace bsswitch {

enum class Strategy { epsilon_greedy, ucb, gradient_bandit, rem_ea };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);  // throws ValidationError

struct LearnerConfig {
    double alpha = 0.5;         // value filter step size, (0, 1]
    double xi = 0.0;            // discount; 0 gives the myopic filter
    double beta = 1.0;          // epsilon-greedy root exponent, >= 1
    double c = 0.01;            // UCB / REM-EA exploration weight, >= 0
    double alpha_gb = 10.0;     // gradient-bandit step size, > 0
    double gamma = 1.5;         // REM-EA distance exponent, > 0
    Strategy strategy = Strategy::ucb;
    bool asr_enabled = false;
    double optimistic_init = 0.0;  // initial Q, in learner units
    // Learner units per bit/J. Values, bonuses and softmax preferences live
    // in Mbit/J by default, the scale the exploration weights are tuned for.
    double reward_scale = 1e-6;
    std::uint64_t rng_seed = 1;
};

void validate(const LearnerConfig& cfg);  // throws ValidationError

// Per-entry running mean of observed rewards, the gradient-bandit baseline.
struct GbState {
    std::vector<double> avg_reward;
    std::vector<std::uint64_t> reward_count;

    double baseline(std::size_t entry) const { return entry < avg_reward.size() ? avg_reward[entry] : 0.0; }
    void observe(std::size_t entry, double r);
};

// ---- pure pieces ----------------------------------------------------------

// EE when the action serves at least as many UEs as all-on, else 0 (bit/J).
double reward(const EpisodeOutcome& outcome);

double q_update(double q_old, double r, double alpha, double xi = 0.0, double max_next_q = 0.0);

// 1 / total_visits^(1/beta); 1 for an unvisited state.
double epsilon_schedule(std::uint64_t total_visits, double beta);

// Candidate with the highest q, global tie rule on exact ties.
ActiveSet greedy_action(const RemEntry& entry, std::span<const ActiveSet> candidates);

// ---- selection ------------------------------------------------------------

ActiveSet select_epsilon_greedy(const RemEntry& entry, std::span<const ActiveSet> candidates, double beta,
                                std::mt19937_64& rng);
// Same with a caller-supplied exploration probability.
ActiveSet select_epsilon_greedy_with(const RemEntry& entry, std::span<const ActiveSet> candidates, double epsilon,
                                     std::mt19937_64& rng);

// Upper-confidence score over (q, n); unvisited candidates come first.
ActiveSet select_ucb_scores(std::span<const double> q, std::span<const double> n,
                            std::span<const ActiveSet> candidates, double c);
ActiveSet select_ucb(const RemEntry& entry, std::span<const ActiveSet> candidates, double c);

// Softmax over the candidates' q, aligned with `candidates`.
std::vector<double> softmax_policy(const RemEntry& entry, std::span<const ActiveSet> candidates);
ActiveSet select_gradient_bandit(const RemEntry& entry, std::span<const ActiveSet> candidates, std::mt19937_64& rng);

// Preference update for every candidate, then the baseline absorbs r.
void gb_update(RemEntry& entry, std::size_t entry_index, GbState& gb, std::span<const ActiveSet> candidates,
               const ActiveSet& taken, double r, double alpha_gb);

// Actions whose threshold-served UE count reaches the maximum over all
// actions, on the gains the episode is evaluated with. Ascending index order.
std::vector<ActiveSet> asr_filter(const Network& net, const GainMatrix& gains);
std::vector<ActiveSet> asr_filter(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed);

// Distance-weighted aggregation of Q and N across REM entries.
struct RemEaEstimate {
    std::vector<double> q_hat;  // aligned with candidates
    std::vector<double> n_hat;
};
RemEaEstimate rem_ea_estimate(const RemDb& db, std::size_t current, std::span<const ActiveSet> candidates,
                              double gamma);
ActiveSet select_rem_ea(const RemDb& db, std::size_t current, std::span<const ActiveSet> candidates, double c,
                        double gamma);

// ---- stateful learner -----------------------------------------------------

// Dispatches selection and value updates for one configured strategy. Owns
// the exploration RNG and the gradient-bandit baselines.
class Learner {
public:
    explicit Learner(LearnerConfig cfg);

    const LearnerConfig& config() const { return cfg_; }

    ActiveSet select(const RemDb& db, std::size_t entry, std::span<const ActiveSet> candidates);

    // `reward_bpj` is in bit/J; it is scaled to learner units here.
    void update(RemDb& db, std::size_t entry, std::span<const ActiveSet> candidates, const ActiveSet& taken,
                double reward_bpj);

private:
    LearnerConfig cfg_;
    std::mt19937_64 rng_;
    GbState gb_;
};

}  // namespace bsswitch
