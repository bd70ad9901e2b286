#include "bsswitch/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsswitch/errors.hpp"
#include "bsswitch/seeding.hpp"

namespace bsswitch {

namespace {

constexpr std::uint64_t kShadowingSalt = 0x5348414430ull;
constexpr std::uint64_t kJitterSalt = 0x4a4954544552ull;

std::uint64_t as_key(int v)
{
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(v));
}

void check_action(const Network& net, const ActiveSet& action)
{
    if (action.n_bs() != net.n_bs()) {
        throw ContractViolation("action covers " + std::to_string(action.n_bs()) + " BSs, network has " +
                                std::to_string(net.n_bs()));
    }
}

}  // namespace

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watts_to_dbm(double w)
{
    return 10.0 * std::log10(w) + 30.0;
}

void validate(const BsConfig& bs)
{
    if (bs.antennas < 1) {
        throw ValidationError("antennas", "must be >= 1");
    }
    if (!(bs.tx_power_w > 0.0)) {
        throw ValidationError("tx_power", "must be positive");
    }
}

void validate(const PowerParams& p)
{
    if (!(p.eta > 0.0 && p.eta <= 1.0)) {
        throw ValidationError("eta", "must be in (0, 1]");
    }
    if (!(p.p_tc_per_antenna > 0.0)) {
        throw ValidationError("p_tc_per_antenna", "must be positive");
    }
    if (!(p.p_lo > 0.0)) {
        throw ValidationError("p_lo", "must be positive");
    }
    if (!(p.p_fix > 0.0)) {
        throw ValidationError("p_fix", "must be positive");
    }
    if (!(p.p_off > 0.0)) {
        throw ValidationError("p_off", "must be positive");
    }
}

void validate(const ChannelParams& p)
{
    if (!(p.pathloss_exponent >= 2.0)) {
        throw ValidationError("pathloss_exponent", "must be >= 2");
    }
    if (!(p.shadowing_sigma_db >= 0.0)) {
        throw ValidationError("shadowing_sigma_db", "must be >= 0");
    }
    if (!(p.perturbation_sigma_db >= 0.0)) {
        throw ValidationError("perturbation_sigma_db", "must be >= 0");
    }
    if (!(p.noise_power_w > 0.0)) {
        throw ValidationError("noise_power_w", "must be positive");
    }
    if (!(p.bandwidth_hz > 0.0)) {
        throw ValidationError("bandwidth_hz", "must be positive");
    }
    if (!(p.max_spectral_efficiency > 0.0)) {
        throw ValidationError("max_spectral_efficiency", "must be positive");
    }
    if (!(p.array_gain_exponent >= 0.0)) {
        throw ValidationError("array_gain_exponent", "must be >= 0");
    }
    if (!(p.interference_leakage >= 0.0 && p.interference_leakage <= 1.0)) {
        throw ValidationError("interference_leakage", "must be in [0, 1]");
    }
}

void validate(const Network& net)
{
    if (net.bs.empty()) {
        throw ValidationError("bs", "at least one BS is required");
    }
    if (net.n_bs() > ActiveSet::kMaxBs) {
        throw ValidationError("bs", "at most " + std::to_string(ActiveSet::kMaxBs) + " BSs are supported");
    }
    for (int i = 0; i < net.n_bs(); ++i) {
        const BsConfig& b = net.bs[static_cast<std::size_t>(i)];
        const std::string path = "bs[" + std::to_string(i) + "]";
        if (b.id != i) {
            throw ValidationError(path + ".id", "ids must be 0..N-1 in order");
        }
        if ((i == 0) != (b.kind == BsKind::macro)) {
            throw ValidationError(path + ".kind", i == 0 ? "BS 0 must be the macro" : "only BS 0 may be a macro");
        }
        try {
            validate(b);
        } catch (const ValidationError& e) {
            throw ValidationError(path + "." + e.path(), e.message());
        }
    }
    validate(net.power);
    validate(net.channel);
    if (!(net.rss_threshold_w > 0.0)) {
        throw ValidationError("rss_threshold", "must be positive");
    }
}

double bs_power(const BsConfig& bs, const PowerParams& params, bool active)
{
    if (!active) {
        return params.p_off;
    }
    const double etp = bs.tx_power_w / params.eta;
    const double transceivers = bs.antennas * params.p_tc_per_antenna + params.p_lo;
    return etp + params.p_fix + transceivers;
}

double total_power(const Network& net, const ActiveSet& action)
{
    if (net.bs.empty()) {
        return 0.0;
    }
    check_action(net, action);
    double sum = 0.0;
    for (const BsConfig& b : net.bs) {
        sum += bs_power(b, net.power, action.active(b.id));
    }
    return sum;
}

double channel_gain(const UeState& ue, const BsConfig& bs, const ChannelParams& params, std::uint64_t channel_seed,
                    std::uint64_t episode_seed)
{
    const double d = std::max(distance(ue.position, bs.position), 1.0);
    double gain_db = -params.reference_loss_db - 10.0 * params.pathloss_exponent * std::log10(d);
    gain_db += params.array_gain_exponent * 10.0 * std::log10(static_cast<double>(bs.antennas));
    if (params.shadowing_sigma_db > 0.0) {
        gain_db += params.shadowing_sigma_db *
                   keyed_normal({kShadowingSalt, channel_seed, as_key(ue.id), as_key(bs.id)});
    }
    if (params.perturbation_sigma_db > 0.0) {
        gain_db += params.perturbation_sigma_db *
                   keyed_normal({kJitterSalt, channel_seed, episode_seed, as_key(ue.id), as_key(bs.id)});
    }
    return std::pow(10.0, gain_db / 10.0);
}

GainMatrix compute_gains(const Network& net, std::span<const UeState> ues, std::uint64_t episode_seed)
{
    GainMatrix g(ues.size(), net.bs.size());
    for (std::size_t u = 0; u < ues.size(); ++u) {
        for (std::size_t b = 0; b < net.bs.size(); ++b) {
            g(u, b) = channel_gain(ues[u], net.bs[b], net.channel, net.channel_seed, episode_seed);
        }
    }
    return g;
}

std::vector<int> associate(const Network& net, const GainMatrix& gains, const ActiveSet& action)
{
    check_action(net, action);
    std::vector<int> serving(gains.n_ue(), -1);
    for (std::size_t u = 0; u < gains.n_ue(); ++u) {
        double best = -1.0;
        int best_bs = -1;
        for (std::size_t b = 0; b < gains.n_bs(); ++b) {
            if (!action.active(static_cast<int>(b))) {
                continue;
            }
            const double rss = net.bs[b].tx_power_w * gains(u, b);
            if (rss > best) {
                best = rss;
                best_bs = static_cast<int>(b);
            }
        }
        if (best >= net.rss_threshold_w) {
            serving[u] = best_bs;
        }
    }
    return serving;
}

int served_count(const std::vector<int>& serving)
{
    return static_cast<int>(std::count_if(serving.begin(), serving.end(), [](int s) { return s >= 0; }));
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) {
        return *mid;
    }
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

EpisodeOutcome evaluate(const Network& net, const GainMatrix& gains, const ActiveSet& action)
{
    if (gains.n_ue() == 0) {
        throw ContractViolation("episode_outcome: empty state");
    }
    check_action(net, action);

    EpisodeOutcome out;
    out.serving = associate(net, gains, action);
    out.served_count = served_count(out.serving);
    out.all_on_served =
        action == ActiveSet::all_on(net.n_bs()) ? out.served_count : served_count(associate(net, gains, ActiveSet::all_on(net.n_bs())));

    std::vector<int> load(net.bs.size(), 0);
    for (int s : out.serving) {
        if (s >= 0) {
            ++load[static_cast<std::size_t>(s)];
        }
    }

    const ChannelParams& ch = net.channel;
    out.bitrates.assign(gains.n_ue(), 0.0);
    for (std::size_t u = 0; u < gains.n_ue(); ++u) {
        const int s = out.serving[u];
        if (s < 0) {
            continue;
        }
        double signal = 0.0;
        double other = 0.0;
        for (std::size_t b = 0; b < gains.n_bs(); ++b) {
            if (!action.active(static_cast<int>(b))) {
                continue;
            }
            const double rss = net.bs[b].tx_power_w * gains(u, b);
            if (static_cast<int>(b) == s) {
                signal = rss;
            } else {
                other += rss;
            }
        }
        const double sinr = signal / (ch.noise_power_w + ch.interference_leakage * other);
        const double se = std::min(std::log2(1.0 + sinr), ch.max_spectral_efficiency);
        out.bitrates[u] = ch.bandwidth_hz / load[static_cast<std::size_t>(s)] * se;
    }

    out.median_bitrate = median(out.bitrates);
    out.avg_power = total_power(net, action);
    out.ee = out.avg_power > 0.0 ? out.median_bitrate / out.avg_power : 0.0;
    out.reward = out.served_count >= out.all_on_served ? out.ee : 0.0;
    return out;
}

EpisodeOutcome episode_outcome(const Network& net, std::span<const UeState> ues, const ActiveSet& action,
                               std::uint64_t episode_seed)
{
    if (ues.empty()) {
        throw ContractViolation("episode_outcome: empty state");
    }
    check_action(net, action);
    return evaluate(net, compute_gains(net, ues, episode_seed), action);
}

}  // namespace bsswitch
