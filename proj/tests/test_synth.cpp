#include <stdexcept>
#include <cmath>
#include <map>

#include "doctest.h"

#include "lac/synth.hpp"
#include "support/builders.hpp"

using namespace lac;

namespace {

/// Exact outcome distribution of the biased-rank draw at R = 3: slot 1
/// samples its row directly, slot 2 renormalizes its row over the unplaced
/// positions, slot 3 is forced.
std::map<Items, double> enumerate_rejection_r3(const Items& truth, const ConfusionMatrix& m) {
    std::map<Items, double> dist;
    for (int p1 = 0; p1 < 3; ++p1) {
        for (int p2 = 0; p2 < 3; ++p2) {
            if (p2 == p1) continue;
            const int p3 = 3 - p1 - p2;
            const double denom = 1.0 - m.at(1, p1);
            const double prob = m.at(0, p1) * (denom > 0.0 ? m.at(1, p2) / denom : 0.0);
            dist[{truth[p1], truth[p2], truth[p3]}] += prob;
        }
    }
    return dist;
}

} // namespace

TEST_CASE("gen_ability_matrix: rows sum to one and diagonals respect e") {
    Rng rng(31);
    for (double e : {0.1, 0.5, 0.9}) {
        for (int trial = 0; trial < 300; ++trial) {
            const auto m = gen_ability_matrix(e, 5, rng);
            for (int r = 0; r < 5; ++r) {
                double sum = 0.0;
                for (int t = 0; t < 5; ++t) {
                    CHECK(m.at(r, t) >= 0.0);
                    sum += m.at(r, t);
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
                CHECK(m.at(r, r) >= e);
            }
        }
    }
}

TEST_CASE("gen_ability_matrix: e = 1 is exactly the identity") {
    Rng rng(32);
    const auto m = gen_ability_matrix(1.0, 4, rng);
    for (int r = 0; r < 4; ++r) {
        for (int t = 0; t < 4; ++t) {
            CHECK(m.at(r, t) == (r == t ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("gen_biased_rank: identity matrix echoes the truth") {
    Rng rng(33);
    const Items truth = {2, 0, 3, 1};
    const auto id = ConfusionMatrix::identity(4);
    for (int trial = 0; trial < 200; ++trial) {
        CHECK(gen_biased_rank(truth, id, rng) == truth);
    }
}

TEST_CASE("gen_biased_rank: uniform matrix gives uniform permutations") {
    Rng rng(34);
    const Items truth = {1, 2, 0};
    const auto u = ConfusionMatrix::uniform(3);
    std::map<Items, int> hist;
    const int draws = 12000;
    for (int i = 0; i < draws; ++i) ++hist[gen_biased_rank(truth, u, rng)];
    CHECK(hist.size() == 6);
    const double expected = draws / 6.0;
    const double sigma = std::sqrt(draws * (1.0 / 6.0) * (5.0 / 6.0));
    for (const auto& [perm, count] : hist) {
        CAPTURE(perm[0]);
        CHECK(std::abs(count - expected) <= 4.0 * sigma);
    }
}

TEST_CASE("gen_biased_rank: R = 2 keeps the truth with the row-1 diagonal probability") {
    Rng rng(35);
    const auto m = ConfusionMatrix::from_rows({{0.9, 0.1}, {0.5, 0.5}});
    const Items truth = {1, 0};
    int kept = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        if (gen_biased_rank(truth, m, rng) == truth) ++kept;
    }
    CHECK(std::abs(kept / static_cast<double>(draws) - 0.9) <= 0.01);
}

TEST_CASE("gen_biased_rank matches the enumerated rejection distribution at R = 3") {
    Rng rng(36);
    const auto m = ConfusionMatrix::from_rows(
        {{0.7, 0.2, 0.1}, {0.15, 0.7, 0.15}, {0.1, 0.1, 0.8}});
    const Items truth = {2, 0, 1};
    const auto dist = enumerate_rejection_r3(truth, m);
    double total = 0.0;
    for (const auto& [perm, p] : dist) total += p;
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));

    std::map<Items, int> hist;
    const int draws = 30000;
    for (int i = 0; i < draws; ++i) ++hist[gen_biased_rank(truth, m, rng)];
    for (const auto& [perm, p] : dist) {
        const double expected = p * draws;
        const double sigma = std::sqrt(draws * p * (1.0 - p));
        CHECK(std::abs(hist[perm] - expected) <= 4.0 * sigma + 1.0);
    }
}

TEST_CASE("gen_dataset: eta = 1 annotates everything") {
    SynthConfig config;
    config.problem_count = 20;
    config.annotator_count = 4;
    config.rank_length = 3;
    config.annotation_ratio = 1.0;
    config.seed = 5;
    const auto ds = gen_dataset(config);
    CHECK(ds.data.annotations.size() == 20u * 4u);
}

TEST_CASE("gen_dataset: benchmark defaults produce 2500 annotations") {
    const SynthConfig config; // I=500, J=10, e=0.3, eta=0.5, R=5
    CHECK(config.annotators_per_problem() == 5);
    const auto ds = gen_dataset(config);
    CHECK(ds.data.annotations.size() == 2500u);
    CHECK(ds.data.problems.size() == 500u);
    CHECK(ds.data.ground_truth.size() == 500u);
    CHECK(ds.true_ability.size() == 10u);
}

TEST_CASE("gen_dataset: seed determinism") {
    SynthConfig config;
    config.problem_count = 15;
    config.annotator_count = 5;
    config.rank_length = 4;
    config.seed = 77;
    const auto a = gen_dataset(config);
    const auto b = gen_dataset(config);
    REQUIRE(a.data.annotations.size() == b.data.annotations.size());
    for (std::size_t i = 0; i < a.data.annotations.size(); ++i) {
        CHECK(a.data.annotations[i].problem_id == b.data.annotations[i].problem_id);
        CHECK(a.data.annotations[i].annotator_id == b.data.annotations[i].annotator_id);
        CHECK(a.data.annotations[i].rank.items == b.data.annotations[i].rank.items);
    }
    for (const auto& [pid, rank] : a.data.ground_truth) {
        CHECK(b.data.ground_truth.at(pid).items == rank.items);
    }
    config.seed = 78;
    const auto c = gen_dataset(config);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.data.annotations.size() && !any_difference; ++i) {
        any_difference = a.data.annotations[i].rank.items != c.data.annotations[i].rank.items;
    }
    CHECK(any_difference);
}

TEST_CASE("gen_dataset rejects bad configs") {
    SynthConfig config;
    config.annotation_ratio = 0.01; // round(0.01 * 10) = 0
    CHECK_THROWS_AS(gen_dataset(config), std::invalid_argument);
    config = {};
    config.quality = 1.5;
    CHECK_THROWS_AS(gen_dataset(config), std::invalid_argument);
    config = {};
    config.rank_length = 1;
    CHECK_THROWS_AS(gen_dataset(config), std::invalid_argument);
}
