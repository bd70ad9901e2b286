#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bsswitch {

// Activity pattern over all base stations. Bit b of the mask is BS b; the
// macro (BS 0) is always on. The compact index drops the macro bit, so BS b
// (b >= 1) is bit b-1 of index() and indices span [0, 2^(n_bs-1)).
class ActiveSet {
public:
    static constexpr int kMaxBs = 24;

    ActiveSet() = default;

    static ActiveSet from_index(std::uint32_t index, int n_bs);
    static ActiveSet all_on(int n_bs);
    static ActiveSet macro_only(int n_bs);
    // Bits in BS order; throws ContractViolation unless bits[0] == 1.
    static ActiveSet from_bits(const std::vector<int>& bits);

    static std::uint32_t action_count(int n_bs) { return std::uint32_t{1} << (n_bs - 1); }

    int n_bs() const { return n_bs_; }
    std::uint32_t index() const { return mask_ >> 1; }
    std::uint32_t mask() const { return mask_; }
    bool active(int bs) const { return (mask_ >> bs) & 1u; }
    int active_count() const;

    ActiveSet with(int bs, bool on) const;

    // "101101" style, BS 0 first.
    std::string to_string() const;

    friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

private:
    ActiveSet(std::uint32_t mask, int n_bs) : mask_(mask), n_bs_(n_bs) {}

    std::uint32_t mask_ = 1;
    int n_bs_ = 1;
};

// Global tie rule: fewer active BSs first, then lower index.
inline bool tie_precedes(const ActiveSet& a, const ActiveSet& b)
{
    const int ca = a.active_count();
    const int cb = b.active_count();
    if (ca != cb) {
        return ca < cb;
    }
    return a.index() < b.index();
}

std::vector<ActiveSet> all_actions(int n_bs);

}  // namespace bsswitch
