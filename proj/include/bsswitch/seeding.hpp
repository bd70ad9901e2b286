#pragma once

#include <cstdint>
#include <initializer_list>

namespace bsswitch {

// Counter-based draws: every value is a pure function of its key, so channel
// terms do not depend on evaluation order.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> key);

// Uniform in (0, 1).
double keyed_uniform(std::initializer_list<std::uint64_t> key);

// Standard normal (Box-Muller over two keyed uniforms).
double keyed_normal(std::initializer_list<std::uint64_t> key);

}  // namespace bsswitch
