#include "bsswitch/active_set.hpp"

#include <bit>

#include "bsswitch/errors.hpp"

namespace bsswitch {

namespace {

void check_n_bs(int n_bs)
{
    if (n_bs < 1 || n_bs > ActiveSet::kMaxBs) {
        throw ContractViolation("ActiveSet: n_bs must be in [1, " + std::to_string(ActiveSet::kMaxBs) + "], got " +
                                std::to_string(n_bs));
    }
}

}  // namespace

ActiveSet ActiveSet::from_index(std::uint32_t index, int n_bs)
{
    check_n_bs(n_bs);
    if (index >= action_count(n_bs)) {
        throw ContractViolation("ActiveSet: index " + std::to_string(index) + " out of range for " +
                                std::to_string(n_bs) + " BSs");
    }
    return ActiveSet((index << 1) | 1u, n_bs);
}

ActiveSet ActiveSet::all_on(int n_bs)
{
    check_n_bs(n_bs);
    return ActiveSet(static_cast<std::uint32_t>((std::uint64_t{1} << n_bs) - 1), n_bs);
}

ActiveSet ActiveSet::macro_only(int n_bs)
{
    check_n_bs(n_bs);
    return ActiveSet(1u, n_bs);
}

ActiveSet ActiveSet::from_bits(const std::vector<int>& bits)
{
    const int n = static_cast<int>(bits.size());
    check_n_bs(n);
    if (bits[0] != 1) {
        throw ContractViolation("ActiveSet: macro bit must be 1");
    }
    std::uint32_t mask = 0;
    for (int b = 0; b < n; ++b) {
        if (bits[b] != 0 && bits[b] != 1) {
            throw ContractViolation("ActiveSet: bits must be 0 or 1");
        }
        mask |= static_cast<std::uint32_t>(bits[b]) << b;
    }
    return ActiveSet(mask, n);
}

int ActiveSet::active_count() const
{
    return std::popcount(mask_);
}

ActiveSet ActiveSet::with(int bs, bool on) const
{
    if (bs <= 0 || bs >= n_bs_) {
        throw ContractViolation("ActiveSet::with: BS " + std::to_string(bs) + " cannot be toggled");
    }
    const std::uint32_t bit = 1u << bs;
    return ActiveSet(on ? (mask_ | bit) : (mask_ & ~bit), n_bs_);
}

std::string ActiveSet::to_string() const
{
    std::string s(static_cast<std::size_t>(n_bs_), '0');
    for (int b = 0; b < n_bs_; ++b) {
        if (active(b)) {
            s[static_cast<std::size_t>(b)] = '1';
        }
    }
    return s;
}

std::vector<ActiveSet> all_actions(int n_bs)
{
    std::vector<ActiveSet> out;
    const std::uint32_t count = ActiveSet::action_count(n_bs);
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        out.push_back(ActiveSet::from_index(i, n_bs));
    }
    return out;
}

}  // namespace bsswitch
