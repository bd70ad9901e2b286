#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "bsswitch/net_model.hpp"
#include "bsswitch/scenario.hpp"

namespace bsswitch::testing {

inline std::filesystem::path scenario_path(const std::string& name)
{
    return std::filesystem::path(BSSWITCH_SCENARIO_DIR) / name;
}

inline BsConfig macro_at(Vec2 p)
{
    return BsConfig{0, BsKind::macro, p, 128, dbm_to_watts(46.0)};
}

inline BsConfig pico_at(int id, Vec2 p)
{
    return BsConfig{id, BsKind::pico, p, 32, dbm_to_watts(30.0)};
}

// One macro and `picos` picos on a ring, default power and channel parameters.
inline Network ring_network(int picos, double radius = 150.0)
{
    Network net;
    net.bs.push_back(macro_at({0.0, 0.0}));
    for (int i = 1; i <= picos; ++i) {
        const double t = 6.283185307179586 * (i - 1) / picos;
        net.bs.push_back(pico_at(i, {radius * std::cos(t), radius * std::sin(t)}));
    }
    return net;
}

inline std::vector<UeState> ues_at(const std::vector<Vec2>& pts)
{
    std::vector<UeState> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.push_back(UeState{static_cast<int>(i), pts[i], 0.0});
    }
    return out;
}

}  // namespace bsswitch::testing
