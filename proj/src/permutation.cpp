#include "lac/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lac {

std::uint64_t factorial(int r) {
    if (r < 0) throw std::invalid_argument("factorial: negative argument");
    if (r > 20) throw std::overflow_error("factorial: " + std::to_string(r) + "! exceeds uint64");
    std::uint64_t f = 1;
    for (int i = 2; i <= r; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

bool is_permutation(const Items& items) {
    const int n = static_cast<int>(items.size());
    std::vector<bool> seen(n, false);
    for (int x : items) {
        if (x < 0 || x >= n || seen[x]) return false;
        seen[x] = true;
    }
    return n > 0;
}

std::uint64_t encode_permutation(const Items& items) {
    if (!is_permutation(items)) {
        throw std::invalid_argument("encode_permutation: not a permutation of 0..R-1");
    }
    const int n = static_cast<int>(items.size());
    std::uint64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        int smaller_right = 0;
        for (int j = i + 1; j < n; ++j) {
            if (items[j] < items[i]) ++smaller_right;
        }
        rank += static_cast<std::uint64_t>(smaller_right) * factorial(n - 1 - i);
    }
    return rank;
}

Items decode_permutation(std::uint64_t index, int item_count) {
    if (item_count < 1) throw std::invalid_argument("decode_permutation: item_count < 1");
    const std::uint64_t total = factorial(item_count);
    if (index >= total) {
        throw std::out_of_range("decode_permutation: index " + std::to_string(index) +
                                " >= " + std::to_string(item_count) + "!");
    }
    Items pool(item_count);
    for (int i = 0; i < item_count; ++i) pool[i] = i;
    Items out;
    out.reserve(item_count);
    for (int i = item_count; i >= 1; --i) {
        const std::uint64_t f = factorial(i - 1);
        const auto digit = static_cast<std::size_t>(index / f);
        index %= f;
        out.push_back(pool[digit]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return out;
}

int tau(const Items& k, int item) {
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] == item) return static_cast<int>(i) + 1;
    }
    throw std::invalid_argument("tau: item " + std::to_string(item) + " not in list");
}

int pos_distance(const Items& k, const Items& d, int r) {
    if (r < 1 || r > static_cast<int>(d.size())) {
        throw std::invalid_argument("pos_distance: position out of range");
    }
    return std::abs(tau(k, d[static_cast<std::size_t>(r - 1)]) - r) + 1;
}

int spearman_footrule(const Items& a, const Items& b) {
    int total = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        total += std::abs(tau(a, b[i]) - static_cast<int>(i + 1));
    }
    return total;
}

Permutation Permutation::from_items(Items items) {
    Permutation p;
    p.index = encode_permutation(items);
    p.items = std::move(items);
    return p;
}

Permutation Permutation::from_index(std::uint64_t index, int item_count) {
    Permutation p;
    p.items = decode_permutation(index, item_count);
    p.index = index;
    return p;
}

PermTable PermTable::build(int item_count) {
    if (item_count < 2) throw std::invalid_argument("PermTable: need at least 2 items");
    if (item_count > 10) {
        throw std::invalid_argument("PermTable: R = " + std::to_string(item_count) +
                                    " would enumerate " + std::to_string(item_count) +
                                    "! permutations; refusing above R = 10");
    }
    PermTable t;
    t.R_ = item_count;
    t.K_ = factorial(item_count);
    t.items_.resize(t.K_ * static_cast<std::uint64_t>(item_count));
    t.tau0_.resize(t.items_.size());
    Items current(item_count);
    for (int i = 0; i < item_count; ++i) current[i] = i;
    for (std::uint64_t k = 0; k < t.K_; ++k) {
        for (int r = 0; r < item_count; ++r) {
            t.items_[k * item_count + r] = current[r];
            t.tau0_[k * item_count + current[r]] = static_cast<std::uint8_t>(r);
        }
        std::next_permutation(current.begin(), current.end());
    }
    return t;
}

} // namespace lac
