#include "bsswitch/seeding.hpp"

#include <cmath>
#include <numbers>

namespace bsswitch {

namespace {

// splitmix64 finalizer
std::uint64_t splitmix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double to_open_unit(std::uint64_t bits)
{
    // 53 random bits, shifted off zero
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> key)
{
    std::uint64_t h = 0x6a09e667f3bcc909ull;
    for (std::uint64_t k : key) {
        h = splitmix(h ^ splitmix(k));
    }
    return h;
}

double keyed_uniform(std::initializer_list<std::uint64_t> key)
{
    return to_open_unit(mix_seed(key));
}

double keyed_normal(std::initializer_list<std::uint64_t> key)
{
    const std::uint64_t h = mix_seed(key);
    const double u1 = to_open_unit(splitmix(h));
    const double u2 = to_open_unit(splitmix(h ^ 0xd1b54a32d192ed03ull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bsswitch
