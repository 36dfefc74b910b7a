#include "lac/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace lac {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

Rng Rng::substream(std::uint64_t seed, std::string_view name) {
    std::uint64_t state = seed ^ fnv1a64(name);
    splitmix64(state);
    return Rng(splitmix64(state));
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

int Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("Rng::categorical: negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("Rng::categorical: zero total weight");
    const double u = uniform01() * total;
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int>(i);
        cum += weights[i];
        if (u < cum) return static_cast<int>(i);
    }
    return last_positive; // u landed on the rounding tail
}

std::vector<int> Rng::sample_without_replacement(int n, int m) {
    if (m < 0 || m > n) throw std::invalid_argument("sample_without_replacement: bad m");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace lac
