#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace lac {

/// Deterministic random stream. The raw engine is std::mt19937_64 (whose
/// output sequence is fixed by the standard); all value transforms are
/// implemented here instead of with std distributions, so identical seeds
/// give identical streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent stream derived from (seed, name). Used to hand each
    /// consumer (generation, quicksort pivots, ...) its own substream of a
    /// single top-level --seed.
    static Rng substream(std::uint64_t seed, std::string_view name);

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi); returns lo exactly when lo == hi.
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Unbiased integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Index drawn with probability weights[i] / sum(weights). Weights must
    /// be nonnegative with a positive sum.
    int categorical(std::span<const double> weights);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    /// m distinct integers from [0, n), returned in ascending order.
    std::vector<int> sample_without_replacement(int n, int m);

private:
    std::mt19937_64 gen_;
};

} // namespace lac
