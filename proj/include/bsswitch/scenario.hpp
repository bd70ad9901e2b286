#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bsswitch/geometry.hpp"
#include "bsswitch/net_model.hpp"

namespace bsswitch {

// Piecewise-linear walk over waypoints at constant speed, bouncing back at
// the ends. A single waypoint or zero speed means a static UE.
struct Trajectory {
    int id = 0;
    std::vector<Vec2> waypoints;
    double speed = 0.0;

    Vec2 position_at(double t) const;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct EpisodePlan {
    int batches = 15;      // decision points per pass over the trajectories
    int passes = 60;       // repetitions of the whole pass
    double gap_s = 1.0;    // movement time between consecutive batches

    int total_episodes() const { return batches * passes; }

    friend bool operator==(const EpisodePlan&, const EpisodePlan&) = default;
};

struct Seeds {
    std::uint64_t scenario = 1;  // UE placement generators
    std::uint64_t channel = 1;   // shadowing and per-episode jitter
    std::uint64_t learner = 1;   // exploration RNG

    friend bool operator==(const Seeds&, const Seeds&) = default;
};

struct NetworkScenario {
    Network net;
    std::vector<Trajectory> ues;
    EpisodePlan plan;
    double grid = 3.0;
    Seeds seeds;

    // UE states at time t since the start of a pass.
    std::vector<UeState> ues_at(double t) const;
    std::vector<UeState> ues_at_batch(int batch) const { return ues_at(batch * plan.gap_s); }

    // Copy with the channel seed (shadowing + jitter) replaced.
    NetworkScenario with_channel_seed(std::uint64_t seed) const;
};

bool operator==(const BsConfig& a, const BsConfig& b);
bool operator==(const PowerParams& a, const PowerParams& b);
bool operator==(const ChannelParams& a, const ChannelParams& b);
bool operator==(const Network& a, const Network& b);
bool operator==(const NetworkScenario& a, const NetworkScenario& b);

// Throws ValidationError naming the offending field path.
void validate(const NetworkScenario& s);

struct LoadedScenario {
    NetworkScenario scenario;
    std::vector<std::string> defaults_applied;  // field paths filled from defaults
};

inline constexpr int kScenarioFormatVersion = 1;

// JSON scenario files; see README for the schema. Unknown keys, missing
// required fields and broken invariants raise ValidationError with the path.
LoadedScenario parse_scenario(const std::string& text);
LoadedScenario load_scenario(const std::filesystem::path& path);

// Writes the fully expanded scenario (explicit UEs, watts) so that
// load_scenario(save_scenario(s)) == s.
std::string dump_scenario(const NetworkScenario& s);
void save_scenario(const NetworkScenario& s, const std::filesystem::path& path);

}  // namespace bsswitch
