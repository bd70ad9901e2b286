#include "bsswitch/rem_store.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "bsswitch/errors.hpp"

namespace bsswitch {

std::uint64_t RemEntry::total_visits() const
{
    return std::accumulate(n.begin(), n.end(), std::uint64_t{0});
}

RemDb::RemDb(double grid, int n_bs, double initial_q) : grid_(grid), n_bs_(n_bs), initial_q_(initial_q)
{
    if (!(grid_ > 0.0)) {
        throw ContractViolation("RemDb: grid size must be positive");
    }
    if (n_bs_ < 1 || n_bs_ > ActiveSet::kMaxBs) {
        throw ContractViolation("RemDb: unsupported BS count " + std::to_string(n_bs_));
    }
}

MatchResult RemDb::nearest(const UePositionSet& observed) const
{
    MatchResult best{entries_.size(), false, 0.0};
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double d = hausdorff(entries_[i].state, observed);
        if (d < best_d) {
            best_d = d;
            best.index = i;
            best.distance = d;
        }
    }
    return best;
}

MatchResult RemDb::match_or_insert(const UePositionSet& observed)
{
    MatchResult m = nearest(observed);
    if (m.index < entries_.size() && m.distance < grid_) {
        return m;
    }
    const std::size_t slots = action_count();
    entries_.push_back(RemEntry{observed, std::vector<double>(slots, initial_q_), std::vector<std::uint64_t>(slots, 0)});
    return MatchResult{entries_.size() - 1, true, 0.0};
}

void RemDb::record(std::size_t entry, const ActiveSet& action, double q_new)
{
    if (action.n_bs() != n_bs_) {
        throw ContractViolation("RemDb::record: action length mismatch");
    }
    RemEntry& e = entries_.at(entry);
    e.q[action.index()] = q_new;
    e.n[action.index()] += 1;
}

void RemDb::append(RemEntry e)
{
    if (e.q.size() != action_count() || e.n.size() != action_count()) {
        throw ContractViolation("RemDb::append: action slot count mismatch");
    }
    entries_.push_back(std::move(e));
}

// ---- persistence ---------------------------------------------------------

namespace {

constexpr const char* kMagic = "bsswitch-rem";

std::string fmt(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

[[noreturn]] void corrupt(const std::string& why)
{
    throw RemFileError(RemFileError::Kind::corrupt, "REM file corrupt: " + why);
}

double parse_double(const std::string& tok)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        corrupt("bad number '" + tok + "'");
    }
    return v;
}

std::uint64_t parse_count(const std::string& tok)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        corrupt("bad count '" + tok + "'");
    }
    return v;
}

std::string header_value(std::istringstream& ss, const std::string& key)
{
    std::string tok;
    if (!(ss >> tok)) {
        corrupt("header missing " + key);
    }
    const std::string prefix = key + "=";
    if (tok.rfind(prefix, 0) != 0) {
        corrupt("expected " + key + ", found '" + tok + "'");
    }
    return tok.substr(prefix.size());
}

std::string next_token(std::istringstream& ss, const char* what)
{
    std::string tok;
    if (!(ss >> tok)) {
        corrupt(std::string("truncated entry (missing ") + what + ")");
    }
    return tok;
}

}  // namespace

void write_rem(const RemDb& db, std::ostream& os)
{
    os << kMagic << " format_version=" << RemDb::kFormatVersion << " g=" << fmt(db.grid()) << " n_bs=" << db.n_bs()
       << " entry_count=" << db.size() << " initial_q=" << fmt(db.initial_q()) << '\n';
    for (const RemEntry& e : db.entries()) {
        os << "entry " << e.state.size();
        for (const Vec2& p : e.state.points()) {
            os << ' ' << fmt(p.x) << ' ' << fmt(p.y);
        }
        os << " q";
        for (double v : e.q) {
            os << ' ' << fmt(v);
        }
        os << " n";
        for (std::uint64_t c : e.n) {
            os << ' ' << c;
        }
        os << '\n';
    }
    os << "end\n";
}

RemDb read_rem(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        corrupt("missing header");
    }
    std::istringstream hs(line);
    std::string magic;
    hs >> magic;
    if (magic != kMagic) {
        corrupt("not a REM file");
    }
    const std::uint64_t version = parse_count(header_value(hs, "format_version"));
    if (version != static_cast<std::uint64_t>(RemDb::kFormatVersion)) {
        throw RemFileError(RemFileError::Kind::version, "REM file has format version " + std::to_string(version) +
                                                            ", this build reads version " +
                                                            std::to_string(RemDb::kFormatVersion));
    }
    const double g = parse_double(header_value(hs, "g"));
    const std::uint64_t n_bs = parse_count(header_value(hs, "n_bs"));
    const std::uint64_t count = parse_count(header_value(hs, "entry_count"));
    const double q0 = parse_double(header_value(hs, "initial_q"));
    if (!(g > 0.0) || n_bs < 1 || n_bs > static_cast<std::uint64_t>(ActiveSet::kMaxBs)) {
        throw RemFileError(RemFileError::Kind::invariant, "REM header out of range (g or n_bs)");
    }

    RemDb db(g, static_cast<int>(n_bs), q0);
    const std::size_t slots = db.action_count();
    std::set<std::vector<Vec2>> seen;
    for (std::uint64_t k = 0; k < count; ++k) {
        if (!std::getline(is, line)) {
            corrupt("expected " + std::to_string(count) + " entries, found " + std::to_string(k));
        }
        std::istringstream es(line);
        if (next_token(es, "tag") != "entry") {
            corrupt("entry " + std::to_string(k) + " has no 'entry' tag");
        }
        const std::uint64_t npts = parse_count(next_token(es, "point count"));
        if (npts == 0) {
            throw RemFileError(RemFileError::Kind::invariant, "entry " + std::to_string(k) + " has an empty state");
        }
        std::vector<Vec2> pts;
        pts.reserve(npts);
        for (std::uint64_t i = 0; i < npts; ++i) {
            const double x = parse_double(next_token(es, "point"));
            const double y = parse_double(next_token(es, "point"));
            pts.push_back({x, y});
        }
        if (next_token(es, "q tag") != "q") {
            corrupt("entry " + std::to_string(k) + ": expected q array");
        }
        RemEntry e{UePositionSet(pts, g), {}, {}};
        if (e.state.size() != pts.size()) {
            throw RemFileError(RemFileError::Kind::invariant, "entry " + std::to_string(k) + " repeats a point");
        }
        e.q.reserve(slots);
        for (std::size_t a = 0; a < slots; ++a) {
            e.q.push_back(parse_double(next_token(es, "q value")));
        }
        if (next_token(es, "n tag") != "n") {
            corrupt("entry " + std::to_string(k) + ": q array length does not match n_bs");
        }
        e.n.reserve(slots);
        for (std::size_t a = 0; a < slots; ++a) {
            e.n.push_back(parse_count(next_token(es, "n value")));
        }
        std::string extra;
        if (es >> extra) {
            corrupt("entry " + std::to_string(k) + ": trailing data '" + extra + "'");
        }
        // Quantized sets at HD < g are identical sets, so distinctness is the
        // stored form of the insertion invariant.
        if (!seen.insert(e.state.points()).second) {
            throw RemFileError(RemFileError::Kind::invariant,
                               "entry " + std::to_string(k) + " duplicates an earlier state");
        }
        db.append(std::move(e));
    }
    if (!std::getline(is, line) || line != "end") {
        corrupt("missing end marker");
    }
    return db;
}

void save(const RemDb& db, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw RemFileError(RemFileError::Kind::io, "cannot open " + path.string() + " for writing");
    }
    write_rem(db, os);
    os.flush();
    if (!os) {
        throw RemFileError(RemFileError::Kind::io, "write failed: " + path.string());
    }
}

RemDb load(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw RemFileError(RemFileError::Kind::io, "cannot open " + path.string());
    }
    return read_rem(is);
}

}  // namespace bsswitch
