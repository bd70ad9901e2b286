#include "bsswitch/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bsswitch/errors.hpp"
#include "bsswitch/seeding.hpp"

namespace bsswitch {

using json = nlohmann::json;

Vec2 Trajectory::position_at(double t) const
{
    if (waypoints.empty()) {
        return {};
    }
    if (waypoints.size() == 1 || speed <= 0.0) {
        return waypoints.front();
    }
    double leg_total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        leg_total += distance(waypoints[i - 1], waypoints[i]);
    }
    if (leg_total <= 0.0) {
        return waypoints.front();
    }
    // Out and back is one period.
    double s = std::fmod(speed * t, 2.0 * leg_total);
    if (s > leg_total) {
        s = 2.0 * leg_total - s;
    }
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double len = distance(waypoints[i - 1], waypoints[i]);
        if (s <= len || i + 1 == waypoints.size()) {
            const double f = len > 0.0 ? std::min(s / len, 1.0) : 0.0;
            const Vec2& a = waypoints[i - 1];
            const Vec2& b = waypoints[i];
            return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
        }
        s -= len;
    }
    return waypoints.back();
}

std::vector<UeState> NetworkScenario::ues_at(double t) const
{
    std::vector<UeState> out;
    out.reserve(ues.size());
    for (const Trajectory& tr : ues) {
        out.push_back({tr.id, tr.position_at(t), tr.speed});
    }
    return out;
}

NetworkScenario NetworkScenario::with_channel_seed(std::uint64_t seed) const
{
    NetworkScenario s = *this;
    s.seeds.channel = seed;
    s.net.channel_seed = seed;
    return s;
}

bool operator==(const BsConfig& a, const BsConfig& b)
{
    return a.id == b.id && a.kind == b.kind && a.position == b.position && a.antennas == b.antennas &&
           a.tx_power_w == b.tx_power_w;
}

bool operator==(const PowerParams& a, const PowerParams& b)
{
    return a.eta == b.eta && a.p_tc_per_antenna == b.p_tc_per_antenna && a.p_lo == b.p_lo && a.p_fix == b.p_fix &&
           a.p_off == b.p_off;
}

bool operator==(const ChannelParams& a, const ChannelParams& b)
{
    return a.pathloss_exponent == b.pathloss_exponent && a.reference_loss_db == b.reference_loss_db &&
           a.shadowing_sigma_db == b.shadowing_sigma_db && a.noise_power_w == b.noise_power_w &&
           a.bandwidth_hz == b.bandwidth_hz && a.max_spectral_efficiency == b.max_spectral_efficiency &&
           a.array_gain_exponent == b.array_gain_exponent && a.interference_leakage == b.interference_leakage &&
           a.perturbation_sigma_db == b.perturbation_sigma_db;
}

bool operator==(const Network& a, const Network& b)
{
    return a.bs == b.bs && a.power == b.power && a.channel == b.channel && a.rss_threshold_w == b.rss_threshold_w &&
           a.channel_seed == b.channel_seed;
}

bool operator==(const NetworkScenario& a, const NetworkScenario& b)
{
    return a.net == b.net && a.ues == b.ues && a.plan == b.plan && a.grid == b.grid && a.seeds == b.seeds;
}

void validate(const NetworkScenario& s)
{
    validate(s.net);
    if (s.ues.empty()) {
        throw ValidationError("ues", "at least one UE is required");
    }
    std::set<int> ids;
    for (std::size_t i = 0; i < s.ues.size(); ++i) {
        const Trajectory& t = s.ues[i];
        const std::string path = "ues[" + std::to_string(i) + "]";
        if (!ids.insert(t.id).second) {
            throw ValidationError(path + ".id", "duplicate UE id " + std::to_string(t.id));
        }
        if (t.waypoints.empty()) {
            throw ValidationError(path + ".path", "needs at least one waypoint");
        }
        if (!(t.speed >= 0.0)) {
            throw ValidationError(path + ".speed", "must be >= 0");
        }
    }
    if (s.plan.batches < 1) {
        throw ValidationError("episodes.batches", "must be >= 1");
    }
    if (s.plan.passes < 1) {
        throw ValidationError("episodes.passes", "must be >= 1");
    }
    if (!(s.plan.gap_s >= 0.0)) {
        throw ValidationError("episodes.gap_s", "must be >= 0");
    }
    if (!(s.grid > 0.0)) {
        throw ValidationError("grid_size", "must be positive");
    }
    if (s.seeds.channel != s.net.channel_seed) {
        throw ValidationError("seeds.channel", "network channel seed out of sync");
    }
}

// ---- JSON reading -----------------------------------------------------------

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path, std::vector<std::string>& defaults)
        : j_(j), path_(std::move(path)), defaults_(defaults)
    {
        if (!j_.is_object()) {
            throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& required(const std::string& key)
    {
        if (!j_.contains(key)) {
            throw ValidationError(sub(key), "missing required field");
        }
        seen_.insert(key);
        return j_.at(key);
    }

    const json* optional(const std::string& key)
    {
        if (!j_.contains(key)) {
            return nullptr;
        }
        seen_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key, double fallback)
    {
        const json* v = optional(key);
        if (v == nullptr) {
            defaults_.push_back(sub(key));
            return fallback;
        }
        return as_number(*v, sub(key));
    }

    double required_number(const std::string& key) { return as_number(required(key), sub(key)); }

    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        const json* v = optional(key);
        if (v == nullptr) {
            defaults_.push_back(sub(key));
            return fallback;
        }
        return as_integer(*v, sub(key));
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback)
    {
        const json* v = optional(key);
        if (v == nullptr) {
            defaults_.push_back(sub(key));
            return fallback;
        }
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
            throw ValidationError(sub(key), "expected a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ValidationError(sub(it.key()), "unknown key");
            }
        }
    }

    static double as_number(const json& v, const std::string& path)
    {
        if (!v.is_number()) {
            throw ValidationError(path, "expected a number");
        }
        return v.get<double>();
    }

    static std::int64_t as_integer(const json& v, const std::string& path)
    {
        if (!v.is_number_integer()) {
            throw ValidationError(path, "expected an integer");
        }
        return v.get<std::int64_t>();
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& defaults_;
    std::set<std::string> seen_;
};

Vec2 read_point(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2) {
        throw ValidationError(path, "expected [x, y]");
    }
    return {ObjectReader::as_number(v[0], path + "[0]"), ObjectReader::as_number(v[1], path + "[1]")};
}

BsConfig read_bs(const json& j, std::size_t index, std::vector<std::string>& defaults)
{
    const std::string path = "base_stations[" + std::to_string(index) + "]";
    ObjectReader r(j, path, defaults);
    BsConfig b;
    b.id = static_cast<int>(r.integer("id", static_cast<std::int64_t>(index)));
    const json& kind = r.required("kind");
    if (kind == "macro") {
        b.kind = BsKind::macro;
    } else if (kind == "pico") {
        b.kind = BsKind::pico;
    } else {
        throw ValidationError(r.sub("kind"), "expected \"macro\" or \"pico\"");
    }
    b.position = read_point(r.required("position"), r.sub("position"));
    b.antennas = static_cast<int>(r.integer("antennas", b.kind == BsKind::macro ? 128 : 32));
    const json* dbm = r.optional("tx_power_dbm");
    const json* w = r.optional("tx_power_w");
    if (dbm != nullptr && w != nullptr) {
        throw ValidationError(r.sub("tx_power_w"), "give either tx_power_dbm or tx_power_w, not both");
    }
    if (w != nullptr) {
        b.tx_power_w = ObjectReader::as_number(*w, r.sub("tx_power_w"));
    } else if (dbm != nullptr) {
        b.tx_power_w = dbm_to_watts(ObjectReader::as_number(*dbm, r.sub("tx_power_dbm")));
    } else {
        defaults.push_back(r.sub("tx_power_dbm"));
        b.tx_power_w = dbm_to_watts(b.kind == BsKind::macro ? 46.0 : 30.0);
    }
    r.finish();
    if (b.id != static_cast<int>(index)) {
        throw ValidationError(r.sub("id"), "must equal the list position " + std::to_string(index));
    }
    if ((index == 0) != (b.kind == BsKind::macro)) {
        throw ValidationError(r.sub("kind"), index == 0 ? "the macro BS must be at index 0"
                                                        : "only index 0 may be a macro BS");
    }
    try {
        validate(b);
    } catch (const ValidationError& e) {
        throw ValidationError(r.sub(e.path()), e.message());
    }
    return b;
}

PowerParams read_power(const json* j, std::vector<std::string>& defaults)
{
    PowerParams p;
    if (j == nullptr) {
        defaults.push_back("power");
        return p;
    }
    ObjectReader r(*j, "power", defaults);
    p.eta = r.number("eta", p.eta);
    p.p_tc_per_antenna = r.number("p_tc_per_antenna", p.p_tc_per_antenna);
    p.p_lo = r.number("p_lo", p.p_lo);
    p.p_fix = r.number("p_fix", p.p_fix);
    p.p_off = r.number("p_off", p.p_off);
    r.finish();
    try {
        validate(p);
    } catch (const ValidationError& e) {
        throw ValidationError(r.sub(e.path()), e.message());
    }
    return p;
}

ChannelParams read_channel(const json* j, std::vector<std::string>& defaults)
{
    ChannelParams c;
    if (j == nullptr) {
        defaults.push_back("channel");
        return c;
    }
    ObjectReader r(*j, "channel", defaults);
    c.pathloss_exponent = r.number("pathloss_exponent", c.pathloss_exponent);
    c.reference_loss_db = r.number("reference_loss_db", c.reference_loss_db);
    c.shadowing_sigma_db = r.number("shadowing_sigma_db", c.shadowing_sigma_db);
    c.noise_power_w = r.number("noise_power_w", c.noise_power_w);
    c.bandwidth_hz = r.number("bandwidth_hz", c.bandwidth_hz);
    c.max_spectral_efficiency = r.number("max_spectral_efficiency", c.max_spectral_efficiency);
    c.array_gain_exponent = r.number("array_gain_exponent", c.array_gain_exponent);
    c.interference_leakage = r.number("interference_leakage", c.interference_leakage);
    c.perturbation_sigma_db = r.number("perturbation_sigma_db", c.perturbation_sigma_db);
    r.finish();
    try {
        validate(c);
    } catch (const ValidationError& e) {
        throw ValidationError(r.sub(e.path()), e.message());
    }
    return c;
}

Trajectory read_ue(const json& j, std::size_t index, std::vector<std::string>& defaults)
{
    ObjectReader r(j, "ues[" + std::to_string(index) + "]", defaults);
    Trajectory t;
    t.id = static_cast<int>(r.integer("id", static_cast<std::int64_t>(index)));
    t.speed = r.number("speed", 0.0);
    const json& path = r.required("path");
    if (!path.is_array() || path.empty()) {
        throw ValidationError(r.sub("path"), "expected a non-empty list of [x, y] waypoints");
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
        t.waypoints.push_back(read_point(path[k], r.sub("path") + "[" + std::to_string(k) + "]"));
    }
    r.finish();
    if (!(t.speed >= 0.0)) {
        throw ValidationError(r.sub("speed"), "must be >= 0");
    }
    return t;
}

// Cluster generator: `count` UEs uniform in a disk; the first
// round(count * moving_fraction) walk a straight path of `path_length`
// meters in a random direction and back.
void expand_cluster(const json& j, std::size_t index, std::uint64_t scenario_seed, std::vector<Trajectory>& out,
                    std::vector<std::string>& defaults)
{
    ObjectReader r(j, "ue_clusters[" + std::to_string(index) + "]", defaults);
    const Vec2 center = read_point(r.required("center"), r.sub("center"));
    const double radius = r.required_number("radius");
    const std::int64_t count = ObjectReader::as_integer(r.required("count"), r.sub("count"));
    const double speed = r.number("speed", 1.5);
    const double moving_fraction = r.number("moving_fraction", 1.0);
    const double path_length = r.number("path_length", 20.0);
    r.finish();
    if (!(radius >= 0.0)) {
        throw ValidationError(r.sub("radius"), "must be >= 0");
    }
    if (count < 1) {
        throw ValidationError(r.sub("count"), "must be >= 1");
    }
    if (!(moving_fraction >= 0.0 && moving_fraction <= 1.0)) {
        throw ValidationError(r.sub("moving_fraction"), "must be in [0, 1]");
    }
    if (!(speed >= 0.0) || !(path_length >= 0.0)) {
        throw ValidationError(r.sub("speed"), "speed and path_length must be >= 0");
    }
    const auto moving = static_cast<std::int64_t>(std::llround(static_cast<double>(count) * moving_fraction));
    const std::uint64_t ci = index;
    for (std::int64_t k = 0; k < count; ++k) {
        const std::uint64_t ki = static_cast<std::uint64_t>(k);
        const double rr = radius * std::sqrt(keyed_uniform({scenario_seed, ci, ki, 1}));
        const double th = 2.0 * std::numbers::pi * keyed_uniform({scenario_seed, ci, ki, 2});
        Trajectory t;
        t.id = out.empty() ? 0 : out.back().id + 1;
        const Vec2 start{center.x + rr * std::cos(th), center.y + rr * std::sin(th)};
        t.waypoints.push_back(start);
        if (k < moving && path_length > 0.0 && speed > 0.0) {
            const double dir = 2.0 * std::numbers::pi * keyed_uniform({scenario_seed, ci, ki, 3});
            t.waypoints.push_back({start.x + path_length * std::cos(dir), start.y + path_length * std::sin(dir)});
            t.speed = speed;
        }
        out.push_back(std::move(t));
    }
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("<root>", std::string("malformed JSON: ") + e.what());
    }
    LoadedScenario out;
    auto& defaults = out.defaults_applied;
    NetworkScenario& s = out.scenario;
    ObjectReader r(j, "", defaults);

    const std::int64_t version = ObjectReader::as_integer(r.required("format_version"), "format_version");
    if (version != kScenarioFormatVersion) {
        throw ValidationError("format_version", "unsupported version " + std::to_string(version) + " (expected " +
                                                    std::to_string(kScenarioFormatVersion) + ")");
    }

    const json& bs = r.required("base_stations");
    if (!bs.is_array() || bs.empty()) {
        throw ValidationError("base_stations", "expected a non-empty list");
    }
    for (std::size_t i = 0; i < bs.size(); ++i) {
        s.net.bs.push_back(read_bs(bs[i], i, defaults));
    }
    s.net.power = read_power(r.optional("power"), defaults);
    s.net.channel = read_channel(r.optional("channel"), defaults);

    const json* th_dbm = r.optional("rss_threshold_dbm");
    const json* th_w = r.optional("rss_threshold_w");
    if (th_dbm != nullptr && th_w != nullptr) {
        throw ValidationError("rss_threshold_w", "give either rss_threshold_dbm or rss_threshold_w, not both");
    }
    if (th_w != nullptr) {
        s.net.rss_threshold_w = ObjectReader::as_number(*th_w, "rss_threshold_w");
    } else if (th_dbm != nullptr) {
        s.net.rss_threshold_w = dbm_to_watts(ObjectReader::as_number(*th_dbm, "rss_threshold_dbm"));
    } else {
        defaults.push_back("rss_threshold_dbm");
        s.net.rss_threshold_w = dbm_to_watts(-120.0);
    }

    s.grid = r.number("grid_size", 3.0);

    if (const json* ep = r.optional("episodes")) {
        ObjectReader er(*ep, "episodes", defaults);
        s.plan.batches = static_cast<int>(er.integer("batches", s.plan.batches));
        s.plan.passes = static_cast<int>(er.integer("passes", s.plan.passes));
        s.plan.gap_s = er.number("gap_s", s.plan.gap_s);
        er.finish();
    } else {
        defaults.push_back("episodes");
    }

    if (const json* sd = r.optional("seeds")) {
        ObjectReader sr(*sd, "seeds", defaults);
        s.seeds.scenario = sr.seed("scenario", s.seeds.scenario);
        s.seeds.channel = sr.seed("channel", s.seeds.channel);
        s.seeds.learner = sr.seed("learner", s.seeds.learner);
        sr.finish();
    } else {
        defaults.push_back("seeds");
    }
    s.net.channel_seed = s.seeds.channel;

    if (const json* ues = r.optional("ues")) {
        if (!ues->is_array()) {
            throw ValidationError("ues", "expected a list");
        }
        for (std::size_t i = 0; i < ues->size(); ++i) {
            s.ues.push_back(read_ue((*ues)[i], i, defaults));
        }
    }
    if (const json* cl = r.optional("ue_clusters")) {
        if (!cl->is_array()) {
            throw ValidationError("ue_clusters", "expected a list");
        }
        for (std::size_t i = 0; i < cl->size(); ++i) {
            expand_cluster((*cl)[i], i, s.seeds.scenario, s.ues, defaults);
        }
    }
    r.finish();

    validate(s);
    return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw ValidationError(path.string(), "cannot open scenario file");
    }
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

std::string dump_scenario(const NetworkScenario& s)
{
    json j;
    j["format_version"] = kScenarioFormatVersion;
    json bs = json::array();
    for (const BsConfig& b : s.net.bs) {
        bs.push_back({{"id", b.id},
                      {"kind", b.kind == BsKind::macro ? "macro" : "pico"},
                      {"position", {b.position.x, b.position.y}},
                      {"antennas", b.antennas},
                      {"tx_power_w", b.tx_power_w}});
    }
    j["base_stations"] = bs;
    const PowerParams& p = s.net.power;
    j["power"] = {{"eta", p.eta},
                  {"p_tc_per_antenna", p.p_tc_per_antenna},
                  {"p_lo", p.p_lo},
                  {"p_fix", p.p_fix},
                  {"p_off", p.p_off}};
    const ChannelParams& c = s.net.channel;
    j["channel"] = {{"pathloss_exponent", c.pathloss_exponent},
                    {"reference_loss_db", c.reference_loss_db},
                    {"shadowing_sigma_db", c.shadowing_sigma_db},
                    {"noise_power_w", c.noise_power_w},
                    {"bandwidth_hz", c.bandwidth_hz},
                    {"max_spectral_efficiency", c.max_spectral_efficiency},
                    {"array_gain_exponent", c.array_gain_exponent},
                    {"interference_leakage", c.interference_leakage},
                    {"perturbation_sigma_db", c.perturbation_sigma_db}};
    j["rss_threshold_w"] = s.net.rss_threshold_w;
    j["grid_size"] = s.grid;
    j["episodes"] = {{"batches", s.plan.batches}, {"passes", s.plan.passes}, {"gap_s", s.plan.gap_s}};
    j["seeds"] = {{"scenario", s.seeds.scenario}, {"channel", s.seeds.channel}, {"learner", s.seeds.learner}};
    json ues = json::array();
    for (const Trajectory& t : s.ues) {
        json path = json::array();
        for (const Vec2& w : t.waypoints) {
            path.push_back({w.x, w.y});
        }
        ues.push_back({{"id", t.id}, {"speed", t.speed}, {"path", path}});
    }
    j["ues"] = ues;
    return j.dump(2) + "\n";
}

void save_scenario(const NetworkScenario& s, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot write scenario to " + path.string());
    }
    os << dump_scenario(s);
    if (!os) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace bsswitch
