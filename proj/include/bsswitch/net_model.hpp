#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bsswitch/active_set.hpp"
#include "bsswitch/geometry.hpp"

namespace bsswitch {

enum class BsKind { macro, pico };

struct BsConfig {
    int id = 0;
    BsKind kind = BsKind::pico;
    Vec2 position;
    int antennas = 1;
    double tx_power_w = 1.0;
};

// Massive-MIMO BS power consumption parameters. Defaults are the reference
// hardware values (0.5 amplifier efficiency, 0.4 W per transceiver chain,
// 0.2 W local oscillator, 10 W fixed, 10 W stand-by).
struct PowerParams {
    double eta = 0.5;
    double p_tc_per_antenna = 0.4;
    double p_lo = 0.2;
    double p_fix = 10.0;
    double p_off = 10.0;
};

// Parametric large-scale channel: log-distance pathloss, per-link lognormal
// shadowing, array gain M^exponent and per-episode lognormal jitter.
struct ChannelParams {
    double pathloss_exponent = 3.5;
    double reference_loss_db = 60.0;
    double shadowing_sigma_db = 4.0;
    double noise_power_w = 1e-12;
    double bandwidth_hz = 300e6;
    double max_spectral_efficiency = 7.4;
    double array_gain_exponent = 1.0;
    double interference_leakage = 0.05;
    double perturbation_sigma_db = 0.5;
};

struct UeState {
    int id = 0;
    Vec2 position;
    double speed = 0.0;
};

struct Network {
    std::vector<BsConfig> bs;
    PowerParams power;
    ChannelParams channel;
    double rss_threshold_w = 1e-15;  // -120 dBm
    std::uint64_t channel_seed = 1;

    int n_bs() const { return static_cast<int>(bs.size()); }
};

struct EpisodeOutcome {
    std::vector<double> bitrates;  // bit/s per UE, 0 when unserved
    std::vector<int> serving;      // serving BS id per UE, -1 when unserved
    int served_count = 0;
    int all_on_served = 0;  // served count of the all-on action, same gains
    double avg_power = 0.0;       // W
    double median_bitrate = 0.0;  // bit/s
    double ee = 0.0;              // bit/J
    double reward = 0.0;          // bit/J
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double w);

// Throws ValidationError on broken type invariants.
void validate(const BsConfig& bs);
void validate(const PowerParams& p);
void validate(const ChannelParams& p);
void validate(const Network& net);

double bs_power(const BsConfig& bs, const PowerParams& params, bool active);

double total_power(const Network& net, const ActiveSet& action);

// Linear large-scale gain between a UE and a BS. Shadowing is drawn from
// (channel_seed, ue.id, bs.id), the jitter from (episode_seed, ue.id, bs.id).
// Distances below 1 m are clamped to 1 m.
double channel_gain(const UeState& ue, const BsConfig& bs, const ChannelParams& params,
                    std::uint64_t channel_seed, std::uint64_t episode_seed);

// Row-major UE x BS linear gains.
class GainMatrix {
public:
    GainMatrix(std::size_t n_ue, std::size_t n_bs) : n_ue_(n_ue), n_bs_(n_bs), g_(n_ue * n_bs, 0.0) {}

    double operator()(std::size_t ue, std::size_t bs) const { return g_[ue * n_bs_ + bs]; }
    double& operator()(std::size_t ue, std::size_t bs) { return g_[ue * n_bs_ + bs]; }
    std::size_t n_ue() const { return n_ue_; }
    std::size_t n_bs() const { return n_bs_; }

private:
    std::size_t n_ue_;
    std::size_t n_bs_;
    std::vector<double> g_;
};

GainMatrix compute_gains(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed);

// Serving BS per UE (max RSS among active BSs, lowest id on ties), or -1 when
// that maximum is below the threshold.
std::vector<int> associate(const Network& net, const GainMatrix& gains, const ActiveSet& action);

int served_count(const std::vector<int>& serving);

// Evaluates one action on precomputed gains. all_on_served is taken from the
// all-on association on the same gains.
EpisodeOutcome evaluate(const Network& net, const GainMatrix& gains, const ActiveSet& action);

// Throws ContractViolation on an empty UE list or a malformed action.
EpisodeOutcome episode_outcome(const Network& net, std::span<const UeState> ues, const ActiveSet& action,
                               std::uint64_t episode_seed);

double median(std::vector<double> values);

}  // namespace bsswitch
