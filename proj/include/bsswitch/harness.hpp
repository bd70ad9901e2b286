#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsswitch/rem_store.hpp"
#include "bsswitch/rl_engine.hpp"
#include "bsswitch/scenario.hpp"

namespace bsswitch {

struct EpisodeRecord {
    int episode = 0;
    int pass = 0;
    int batch = 0;
    std::size_t state_id = 0;
    bool new_state = false;
    std::uint32_t action = 0;  // ActiveSet::index()
    int candidate_count = 0;
    double reward = 0.0;          // bit/J
    double ee = 0.0;              // bit/J
    double median_bitrate = 0.0;  // bit/s
    double avg_power = 0.0;       // W
    int served_count = 0;
    std::size_t entry_count = 0;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Moving-average convergence settings. Times are in passes for the run-level
// trace and in visits for per-state traces.
struct ConvergenceSpec {
    int window = 5;
    double tolerance = 0.05;
    int final_window = 30;
};

inline constexpr int kNoConvergence = -1;

struct ConvergenceSummary {
    int passes_to_converge = kNoConvergence;
    double final_mean_reward = 0.0;  // bit/J, mean of the last final_window passes
    double mean_visits_to_converge = 0.0;  // over states that converged
    int states_converged = 0;
    int states_total = 0;
};

struct RunReport {
    std::string strategy;
    int batches = 0;
    double all_on_power = 0.0;  // W
    std::vector<EpisodeRecord> records;
    std::vector<double> pass_mean_reward;  // bit/J per pass
    ConvergenceSummary summary;
};

// Smallest index t such that every forward K-window mean starting at or after
// t lies within tolerance * |final| of `final`, the mean of the last
// final_window values. kNoConvergence if even the last window misses.
// Throws ContractViolation when window < 1 or the trace is shorter than it.
int converge_metric(std::span<const double> trace, int window, double tolerance, int final_window);

ConvergenceSummary summarize(const RunReport& report, const ConvergenceSpec& spec);

std::uint64_t episode_seed(std::uint64_t channel_seed, int pass, int batch);

struct RunResult {
    RunReport report;
    RemDb rem;
};

// Episode loop: move UEs, quantize, match the REM, optional ASR, select,
// evaluate, learn. A warm-start REM must match the scenario's grid and BS count.
RunResult run(const NetworkScenario& scenario, const LearnerConfig& learner, std::optional<RemDb> warm = std::nullopt,
              const ConvergenceSpec& spec = {});

struct SweepRow {
    std::size_t config_index = 0;
    LearnerConfig config;
    std::optional<std::uint64_t> seed;  // empty on aggregate rows
    double final_mean_reward = 0.0;
    double passes_to_converge = kNoConvergence;  // mean over converged runs on aggregate rows
    int runs = 1;
    int converged_runs = 0;
};

// One run per (config, seed), with the seed replacing both the channel and
// learner seeds, followed by one aggregate row per config. Cells run on up
// to `threads` workers; rows come back in (config, seed) order.
std::vector<SweepRow> sweep(const NetworkScenario& scenario, std::span<const LearnerConfig> grid,
                            std::span<const std::uint64_t> seeds, const ConvergenceSpec& spec = {},
                            unsigned threads = 1);

std::string sweep_csv(std::span<const SweepRow> rows);

enum class ReportFormat { csv, summary };

double energy_savings(const RunReport& report);  // 1 - mean power / all-on power

std::string report_csv(const RunReport& report);
std::vector<EpisodeRecord> parse_report_csv(const std::string& text);
std::string report_summary(const RunReport& report);
void export_report(const RunReport& report, const std::filesystem::path& path, ReportFormat format);

// Per-state comparison on the final pass of a learned REM: oracle, SWES,
// all-on and the learner's greedy action, all under the same episode seed.
struct CompareRow {
    int batch = 0;
    std::size_t state_id = 0;
    double oracle_reward = 0.0;
    double swes_reward = 0.0;
    double all_on_reward = 0.0;
    double learned_reward = 0.0;
    double oracle_power = 0.0;
    double swes_power = 0.0;
    double learned_power = 0.0;
    std::uint32_t oracle_action = 0;
    std::uint32_t swes_action = 0;
    std::uint32_t learned_action = 0;
};

std::vector<CompareRow> compare_policies(const NetworkScenario& scenario, const LearnerConfig& learner,
                                         const RemDb& learned, double swes_budget = 0.05);
std::string compare_csv(std::span<const CompareRow> rows, double all_on_power);

}  // namespace bsswitch
