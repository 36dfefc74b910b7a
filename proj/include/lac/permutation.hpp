#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lac {

/// Item labels are 0..R-1; position r (0-based) of the sequence holds the
/// item ranked (r+1)-th.
using Items = std::vector<int>;

/// r! as uint64; throws std::overflow_error for r > 20.
std::uint64_t factorial(int r);

bool is_permutation(const Items& items);

/// Lexicographic (Lehmer) rank of the sequence among all R! permutations.
/// encode([0,1,..,R-1]) == 0, encode(reverse) == R!-1.
/// Throws std::invalid_argument on duplicate or out-of-range labels.
std::uint64_t encode_permutation(const Items& items);

/// Inverse of encode_permutation. Throws std::out_of_range for index >= R!.
Items decode_permutation(std::uint64_t index, int item_count);

/// 1-based position of item in list k. Throws std::invalid_argument if absent.
int tau(const Items& k, int item);

/// |tau(k, d_r) - r| + 1 where d_r is the item at (1-based) position r of d.
/// Equals 1 iff k and d agree at position r; at most R.
int pos_distance(const Items& k, const Items& d, int r);

/// Sum over positions of absolute rank displacement between two permutations.
int spearman_footrule(const Items& a, const Items& b);

/// A full rank over R items, carried in both representations.
struct Permutation {
    Items items;
    std::uint64_t index = 0;

    Permutation() = default;

    static Permutation from_items(Items items);
    static Permutation from_index(std::uint64_t index, int item_count);

    int size() const { return static_cast<int>(items.size()); }

    bool operator==(const Permutation&) const = default;
};

/// All R! permutations of R items in lexicographic order, plus the inverse
/// (position-of-item) lookup used in likelihood inner loops.
class PermTable {
public:
    static PermTable build(int item_count);

    int item_count() const { return R_; }
    std::uint64_t size() const { return K_; }

    std::span<const int> perm(std::uint64_t k) const {
        return {items_.data() + k * R_, static_cast<std::size_t>(R_)};
    }

    /// 0-based position of item in permutation k.
    int position_of(std::uint64_t k, int item) const {
        return tau0_[k * R_ + item];
    }

    std::span<const std::uint8_t> positions(std::uint64_t k) const {
        return {tau0_.data() + k * R_, static_cast<std::size_t>(R_)};
    }

private:
    int R_ = 0;
    std::uint64_t K_ = 0;
    std::vector<int> items_;          // K x R, row k = k-th permutation
    std::vector<std::uint8_t> tau0_;  // K x R, [k][item] = 0-based position
};

} // namespace lac
