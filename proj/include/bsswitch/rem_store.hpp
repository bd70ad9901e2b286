#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsswitch/active_set.hpp"
#include "bsswitch/geometry.hpp"

namespace bsswitch {

// One REM row: a recognized UE position set with per-action values and
// visit counts, both indexed by ActiveSet::index().
struct RemEntry {
    UePositionSet state;
    std::vector<double> q;
    std::vector<std::uint64_t> n;

    std::uint64_t total_visits() const;

    friend bool operator==(const RemEntry&, const RemEntry&) = default;
};

struct MatchResult {
    std::size_t index = 0;
    bool was_new = false;
    double distance = 0.0;  // HD to the matched entry (0 for a new one)
};

class RemDb {
public:
    static constexpr int kFormatVersion = 1;

    RemDb(double grid, int n_bs, double initial_q = 0.0);

    double grid() const { return grid_; }
    int n_bs() const { return n_bs_; }
    double initial_q() const { return initial_q_; }
    std::size_t action_count() const { return ActiveSet::action_count(n_bs_); }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<RemEntry>& entries() const { return entries_; }
    const RemEntry& entry(std::size_t i) const { return entries_.at(i); }
    RemEntry& entry(std::size_t i) { return entries_.at(i); }

    // Nearest stored entry with HD < grid (earliest inserted on ties), or a
    // fresh entry labeled with `observed`.
    MatchResult match_or_insert(const UePositionSet& observed);

    // Nearest entry and its distance without inserting; index == size() when empty.
    MatchResult nearest(const UePositionSet& observed) const;

    // q(action) <- q_new, n(action) += 1.
    void record(std::size_t entry, const ActiveSet& action, double q_new);

    // Used by the re-seeded warm start; appends an entry verbatim.
    void append(RemEntry e);

    friend bool operator==(const RemDb&, const RemDb&) = default;

private:
    double grid_;
    int n_bs_;
    double initial_q_;
    std::vector<RemEntry> entries_;
};

class RemFileError : public std::runtime_error {
public:
    enum class Kind { io, version, corrupt, invariant };

    RemFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Line-oriented text format:
//   bsswitch-rem format_version=1 g=<g> n_bs=<n> entry_count=<k> initial_q=<q0>
//   entry <point_count> <x> <y> ... q <v0> ... n <c0> ...
//   end
// Doubles are written in shortest round-trip form.
void save(const RemDb& db, const std::filesystem::path& path);
RemDb load(const std::filesystem::path& path);

void write_rem(const RemDb& db, std::ostream& os);
RemDb read_rem(std::istream& is);

}  // namespace bsswitch
