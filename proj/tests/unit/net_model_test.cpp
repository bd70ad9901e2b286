#include <doctest.h>

#include <cmath>

#include "bsswitch/errors.hpp"
#include "bsswitch/net_model.hpp"
#include "bsswitch/rl_engine.hpp"
#include "../support.hpp"

using namespace bsswitch;
using namespace bsswitch::testing;

namespace {

double db(double ratio)
{
    return 10.0 * std::log10(ratio);
}

}  // namespace

TEST_CASE("bs_power matches hand-evaluated values")
{
    const PowerParams p;
    CHECK(std::abs(bs_power(macro_at({0, 0}), p, true) - 141.02) < 0.01);
    CHECK(std::abs(bs_power(pico_at(1, {0, 0}), p, true) - 25.0) < 0.01);
    CHECK(bs_power(macro_at({0, 0}), p, false) == 10.0);
    CHECK(bs_power(pico_at(1, {0, 0}), p, false) == 10.0);
}

TEST_CASE("total_power sums per-BS draw")
{
    const Network net = ring_network(5);
    CHECK(std::abs(total_power(net, ActiveSet::all_on(6)) - 266.02) < 0.01);
    CHECK(std::abs(total_power(net, ActiveSet::all_on(6).with(3, false)) - 251.02) < 0.01);
    CHECK(total_power(Network{}, ActiveSet{}) == 0.0);
    CHECK_THROWS_AS(total_power(net, ActiveSet::all_on(4)), ContractViolation);
}

TEST_CASE("channel_gain follows the log-distance law")
{
    ChannelParams ch;
    ch.pathloss_exponent = 2.0;
    ch.shadowing_sigma_db = 0.0;
    ch.perturbation_sigma_db = 0.0;
    ch.array_gain_exponent = 0.0;
    const BsConfig bs = pico_at(1, {0, 0});
    const double near = channel_gain(UeState{0, {10, 0}, 0}, bs, ch, 1, 1);
    const double far = channel_gain(UeState{0, {20, 0}, 0}, bs, ch, 1, 1);
    CHECK(db(near / far) == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("channel_gain array term and determinism")
{
    ChannelParams ch;
    BsConfig big = macro_at({0, 0});
    BsConfig one = big;
    one.antennas = 1;
    const UeState ue{3, {40, 25}, 0};
    const double g128 = channel_gain(ue, big, ch, 9, 77);
    CHECK(db(g128 / channel_gain(ue, one, ch, 9, 77)) == doctest::Approx(21.072).epsilon(1e-4));
    CHECK(channel_gain(ue, big, ch, 9, 77) == g128);
    CHECK(channel_gain(ue, big, ch, 9, 78) != g128);
}

TEST_CASE("channel_gain clamps distance at one meter")
{
    ChannelParams ch;
    ch.shadowing_sigma_db = 0.0;
    ch.perturbation_sigma_db = 0.0;
    const BsConfig bs = pico_at(1, {0, 0});
    CHECK(channel_gain(UeState{0, {0, 0}, 0}, bs, ch, 1, 1) == channel_gain(UeState{0, {0.5, 0}, 0}, bs, ch, 1, 1));
}

TEST_CASE("associate applies threshold and max-RSS rules")
{
    Network net = ring_network(2);
    net.rss_threshold_w = dbm_to_watts(-120.0);
    GainMatrix g(3, 3);
    // UE 0: best BS is pico 1 at -119 dBm.
    g(0, 1) = dbm_to_watts(-119.0) / net.bs[1].tx_power_w;
    // UE 1: only pico 2 is above threshold.
    g(1, 2) = dbm_to_watts(-100.0) / net.bs[2].tx_power_w;
    g(1, 0) = dbm_to_watts(-130.0) / net.bs[0].tx_power_w;
    // UE 2: distinct RSS everywhere, pico 2 strongest.
    g(2, 0) = dbm_to_watts(-90.0) / net.bs[0].tx_power_w;
    g(2, 1) = dbm_to_watts(-80.0) / net.bs[1].tx_power_w;
    g(2, 2) = dbm_to_watts(-70.0) / net.bs[2].tx_power_w;

    const std::vector<int> all = associate(net, g, ActiveSet::all_on(3));
    CHECK(all == std::vector<int>{1, 2, 2});

    const std::vector<int> no_pico2 = associate(net, g, ActiveSet::all_on(3).with(2, false));
    CHECK(no_pico2[1] == -1);
    CHECK(no_pico2[2] == 1);
    CHECK(served_count(no_pico2) == 2);
}

TEST_CASE("associate breaks exact ties toward the lower id")
{
    Network net = ring_network(2);
    GainMatrix g(1, 3);
    g(0, 1) = 1e-9 / net.bs[1].tx_power_w;
    g(0, 2) = 1e-9 / net.bs[2].tx_power_w;
    CHECK(associate(net, g, ActiveSet::all_on(3))[0] == 1);
}

TEST_CASE("evaluate yields EE as median bitrate over power")
{
    // One macro, one UE, SINR far above the cap: bitrate = B * se_max.
    Network net;
    net.bs.push_back(BsConfig{0, BsKind::macro, {0, 0}, 1, 119.7});
    net.channel.bandwidth_hz = 100e6;
    net.channel.max_spectral_efficiency = 1.0;
    GainMatrix g(1, 1);
    g(0, 0) = 1e-6;
    const EpisodeOutcome o = evaluate(net, g, ActiveSet::all_on(1));
    CHECK(o.median_bitrate == doctest::Approx(100e6));
    CHECK(o.avg_power == doctest::Approx(250.0));
    CHECK(o.ee == doctest::Approx(0.4e6));
    CHECK(o.reward == doctest::Approx(0.4e6));
}

TEST_CASE("reward gate zeroes actions that lose coverage")
{
    EpisodeOutcome full;
    full.ee = 0.4e6;
    full.served_count = 50;
    full.all_on_served = 50;
    CHECK(reward(full) == 0.4e6);

    EpisodeOutcome short_one = full;
    short_one.ee = 0.9e6;
    short_one.served_count = 49;
    CHECK(reward(short_one) == 0.0);
}

TEST_CASE("episode_outcome is deterministic and gated against all-on")
{
    Network net = ring_network(3);
    net.rss_threshold_w = dbm_to_watts(-95.0);
    net.channel.reference_loss_db = 70.0;
    net.channel.noise_power_w = 1e-11;
    // UE 1 sits under pico 1 far from the macro: switching pico 1 off drops it.
    const std::vector<UeState> ues = ues_at({{10, 10}, {800, 0}, {-40, 30}});
    net.bs[1].position = {810, 0};
    const EpisodeOutcome a = episode_outcome(net, ues, ActiveSet::all_on(4), 5);
    const EpisodeOutcome b = episode_outcome(net, ues, ActiveSet::all_on(4), 5);
    CHECK(a.bitrates == b.bitrates);
    CHECK(a.ee == b.ee);
    CHECK(a.reward == a.ee);

    const EpisodeOutcome off = episode_outcome(net, ues, ActiveSet::all_on(4).with(1, false), 5);
    CHECK(off.served_count < off.all_on_served);
    CHECK(off.reward == 0.0);
    CHECK(off.bitrates[1] == 0.0);
}

TEST_CASE("median counts even-length inputs as the midpoint")
{
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK(median({}) == 0.0);
}

TEST_CASE("network validation names the offending field")
{
    Network net = ring_network(2);
    net.bs[1].antennas = 0;
    try {
        validate(net);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.path() == "bs[1].antennas");
    }
    net = ring_network(2);
    net.power.eta = 0.0;
    CHECK_THROWS_AS(validate(net), ValidationError);
}
