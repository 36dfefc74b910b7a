#include <stdexcept>
#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "lac/errors.hpp"
#include "lac/likelihood.hpp"
#include "lac/rng.hpp"
#include "support/builders.hpp"
#include "support/naive_lac.hpp"

using namespace lac;
using lac::testing::annotate;
using lac::testing::make_dataset;

namespace {

ConfusionMatrix floored_identity(int R) {
    auto m = ConfusionMatrix::identity(R);
    m.floor_rows(kProbFloor);
    return m;
}

/// State with the given shared matrices for every annotator/problem and
/// uniform theta.
ModelState uniform_state(const IndexedDataset& ds, const ConfusionMatrix& ability,
                         const ConfusionMatrix& difficulty) {
    ModelState state;
    state.theta.assign(ds.K, 1.0 / static_cast<double>(ds.K));
    state.annotator_ids = ds.annotator_ids;
    state.problem_ids = ds.problem_ids;
    state.ability.assign(ds.annotator_ids.size(), ability);
    state.difficulty.assign(ds.problem_ids.size(), difficulty);
    return state;
}

} // namespace

TEST_CASE("log_factor: perfect agreement under floored identities is ~0") {
    const Items k = {0, 1, 2};
    const auto id = floored_identity(3);
    CHECK(log_factor(k, k, id, id) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("log_factor: disagreement under identities is extremely negative") {
    const auto id = floored_identity(3);
    CHECK(log_factor({0, 1, 2}, {1, 0, 2}, id, id) < -40.0);
}

TEST_CASE("log_factor: hand-evaluated uniform case") {
    const auto u = ConfusionMatrix::uniform(3);
    // distances are 2, 2, 1
    const double expected = -3.0 * std::log(9.0) - 2.0 * std::log(2.0);
    CHECK(log_factor({0, 1, 2}, {1, 0, 2}, u, u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_factor: monotone distance penalty under uniform matrices") {
    // with uniform matrices only the distance term varies, so a larger sum
    // of log displacements means a strictly smaller factor
    const auto u = ConfusionMatrix::uniform(4);
    const Items k = {0, 1, 2, 3};
    const Items near = {1, 0, 2, 3}; // log 2 + log 2
    const Items far = {2, 1, 0, 3};  // log 3 + log 3
    CHECK(log_factor(k, far, u, u) < log_factor(k, near, u, u));

    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        Items a(4), b(4);
        for (int i = 0; i < 4; ++i) a[i] = b[i] = i;
        rng.shuffle(a);
        rng.shuffle(b);
        double log_dist_a = 0.0, log_dist_b = 0.0;
        for (int r = 1; r <= 4; ++r) {
            log_dist_a += std::log(static_cast<double>(pos_distance(k, a, r)));
            log_dist_b += std::log(static_cast<double>(pos_distance(k, b, r)));
        }
        // distinct distance products only (2*2 and 4*1 tie exactly)
        if (log_dist_a < log_dist_b - 1e-9) {
            CHECK(log_factor(k, a, u, u) > log_factor(k, b, u, u));
        }
    }
}

TEST_CASE("log_factor: shape errors") {
    const auto id2 = ConfusionMatrix::identity(2);
    const auto id3 = ConfusionMatrix::identity(3);
    CHECK_THROWS_AS(log_factor({0, 1, 2}, {0, 1, 2}, id2, id3), std::invalid_argument);
    CHECK_THROWS_AS(log_factor({0, 1}, {0, 1, 2}, id2, id2), std::invalid_argument);
}

TEST_CASE("problem_log_likelihood: label symmetry under the uniform model") {
    auto ds = make_dataset(6, 1, 3);
    const auto perms = PermTable::build(3);
    for (int i = 0; i < 6; ++i) {
        const auto row = perms.perm(i);
        annotate(ds, "p" + std::to_string(i), "a0", Items(row.begin(), row.end()));
    }
    const auto indexed = IndexedDataset::build(ds);
    const auto state = uniform_state(indexed, ConfusionMatrix::uniform(3),
                                     ConfusionMatrix::uniform(3));
    const double reference = problem_log_likelihood(indexed, 0, state);
    for (int i = 1; i < 6; ++i) {
        CHECK(problem_log_likelihood(indexed, i, state) == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("problem_log_likelihood: two-hypothesis hand case") {
    auto ds = make_dataset(1, 1, 2);
    annotate(ds, "p0", "a0", {0, 1});
    const auto indexed = IndexedDataset::build(ds);
    const auto m = ConfusionMatrix::from_rows({{0.9, 0.1}, {0.1, 0.9}});
    const auto state = uniform_state(indexed, m, m);
    const double expected =
        std::log(0.5 * std::pow(0.9 * 0.9 / 1.0, 2) + 0.5 * std::pow(0.1 * 0.1 / 2.0, 2));
    CHECK(problem_log_likelihood(indexed, 0, state) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dataset_log_likelihood: additivity over identical problems") {
    auto ds = make_dataset(2, 2, 3);
    for (const char* pid : {"p0", "p1"}) {
        annotate(ds, pid, "a0", {1, 0, 2});
        annotate(ds, pid, "a1", {0, 2, 1});
    }
    const auto indexed = IndexedDataset::build(ds);
    auto ability = ConfusionMatrix::from_rows(
        {{0.7, 0.2, 0.1}, {0.15, 0.7, 0.15}, {0.1, 0.2, 0.7}});
    const auto state = uniform_state(indexed, ability, ConfusionMatrix::uniform(3));
    const double one = problem_log_likelihood(indexed, 0, state);
    CHECK(problem_log_likelihood(indexed, 1, state) == doctest::Approx(one).epsilon(1e-12));
    CHECK(dataset_log_likelihood(indexed, state) == doctest::Approx(2.0 * one).epsilon(1e-12));
}

TEST_CASE("dataset_log_likelihood matches brute-force enumeration") {
    auto ds = make_dataset(2, 2, 3);
    annotate(ds, "p0", "a0", {1, 0, 2});
    annotate(ds, "p0", "a1", {2, 0, 1});
    annotate(ds, "p1", "a0", {0, 1, 2});
    annotate(ds, "p1", "a1", {0, 2, 1});
    const auto indexed = IndexedDataset::build(ds);

    ModelState state;
    state.theta = {0.3, 0.1, 0.2, 0.15, 0.05, 0.2};
    state.annotator_ids = indexed.annotator_ids;
    state.problem_ids = indexed.problem_ids;
    state.ability = {
        ConfusionMatrix::from_rows({{0.8, 0.15, 0.05}, {0.1, 0.8, 0.1}, {0.05, 0.15, 0.8}}),
        ConfusionMatrix::from_rows({{0.5, 0.3, 0.2}, {0.25, 0.5, 0.25}, {0.2, 0.3, 0.5}})};
    state.difficulty = {
        ConfusionMatrix::from_rows({{0.6, 0.3, 0.1}, {0.2, 0.6, 0.2}, {0.1, 0.3, 0.6}}),
        ConfusionMatrix::from_rows({{0.9, 0.05, 0.05}, {0.05, 0.9, 0.05}, {0.05, 0.05, 0.9}})};

    // independent direct-product enumeration over all K hypotheses
    double expected = 0.0;
    for (int i = 0; i < indexed.problem_count; ++i) {
        double marginal = 0.0;
        for (std::uint64_t k = 0; k < indexed.K; ++k) {
            const Items hyp = lac::testing::perm_items(indexed, k);
            double term = state.theta[k];
            for (const auto& ann : indexed.by_problem[i]) {
                double f = 1.0;
                for (int r = 1; r <= indexed.R; ++r) {
                    const int t = tau(hyp, ann.items[r - 1]);
                    f *= state.ability[ann.annotator].at(r - 1, t - 1) *
                         state.difficulty[i].at(r - 1, t - 1) /
                         static_cast<double>(pos_distance(hyp, ann.items, r));
                }
                term *= f;
            }
            marginal += term;
        }
        expected += std::log(marginal);
    }
    CHECK(dataset_log_likelihood(indexed, state) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("log factors survive extreme annotation counts without under/overflow") {
    const int R = 5;
    auto ds = make_dataset(1, 50, R);
    // every annotator fully reverses the first hypothesis's order
    for (int j = 0; j < 50; ++j) {
        annotate(ds, "p0", "a" + std::to_string(j), {4, 3, 2, 1, 0});
    }
    const auto indexed = IndexedDataset::build(ds);
    const auto state = uniform_state(indexed, floored_identity(R), floored_identity(R));
    std::vector<double> lls;
    const auto posterior = [&] {
        const auto cache = build_log_factor_cache(indexed, 0, state);
        std::vector<double> scores(indexed.K);
        for (std::uint64_t k = 0; k < indexed.K; ++k) {
            double s = std::log(state.theta[k]);
            for (int a = 0; a < cache.annotation_count; ++a) s += cache.at(k, a);
            scores[k] = s;
        }
        detail::softmax_inplace(scores);
        return scores;
    }();
    double sum = 0.0;
    for (double v : posterior) {
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    // reversal hypothesis takes all the mass
    CHECK(posterior[indexed.K - 1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("annotation order does not change the likelihood") {
    auto ds = make_dataset(1, 3, 3);
    annotate(ds, "p0", "a0", {1, 0, 2});
    annotate(ds, "p0", "a1", {2, 0, 1});
    annotate(ds, "p0", "a2", {0, 1, 2});
    auto reordered = make_dataset(1, 3, 3);
    annotate(reordered, "p0", "a2", {0, 1, 2});
    annotate(reordered, "p0", "a0", {1, 0, 2});
    annotate(reordered, "p0", "a1", {2, 0, 1});

    const auto mk_state = [](const IndexedDataset& indexed) {
        auto ability = ConfusionMatrix::from_rows(
            {{0.7, 0.2, 0.1}, {0.15, 0.7, 0.15}, {0.1, 0.2, 0.7}});
        ModelState state;
        state.theta = {0.3, 0.1, 0.2, 0.15, 0.05, 0.2};
        state.annotator_ids = indexed.annotator_ids;
        state.problem_ids = indexed.problem_ids;
        state.ability.assign(3, ability);
        state.difficulty.assign(1, ConfusionMatrix::uniform(3));
        return state;
    };
    const auto a = IndexedDataset::build(ds);
    const auto b = IndexedDataset::build(reordered);
    CHECK(dataset_log_likelihood(a, mk_state(a)) ==
          doctest::Approx(dataset_log_likelihood(b, mk_state(b))).epsilon(1e-12));
}

TEST_CASE("log-sum-exp and softmax guards") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(detail::log_sum_exp(std::vector<double>{0.0, 0.0}) == doctest::Approx(std::log(2.0)));
    CHECK(detail::log_sum_exp(std::vector<double>{-inf, -inf}) == -inf);
    std::vector<double> with_inf = {-inf, 0.0};
    detail::softmax_inplace(with_inf);
    CHECK(with_inf[0] == 0.0);
    CHECK(with_inf[1] == doctest::Approx(1.0));
    std::vector<double> all_inf = {-inf, -inf};
    CHECK_THROWS_AS(detail::softmax_inplace(all_inf), NumericalError);
    std::vector<double> with_nan = {0.0, std::nan("")};
    CHECK_THROWS_AS(detail::softmax_inplace(with_nan), NumericalError);
}

TEST_CASE("softmax argmax is invariant to a positive scale on raw scores") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> scores(6);
        for (double& s : scores) s = -rng.uniform(0.0, 50.0);
        const double shift = std::log(rng.uniform(0.001, 1000.0)); // times a positive constant
        std::vector<double> scaled = scores;
        for (double& s : scaled) s += shift;
        auto a = scores, b = scaled;
        detail::softmax_inplace(a);
        detail::softmax_inplace(b);
        const auto amax = std::max_element(a.begin(), a.end()) - a.begin();
        const auto bmax = std::max_element(b.begin(), b.end()) - b.begin();
        CHECK(amax == bmax);
    }
}

TEST_CASE("a problem without annotations is a missing-annotation error") {
    // assembled by hand: validation would reject this dataset
    IndexedDataset ds;
    ds.R = 3;
    ds.K = 6;
    ds.problem_count = 1;
    ds.annotator_count = 1;
    ds.problem_ids = {"p0"};
    ds.annotator_ids = {"a0"};
    ds.by_problem.resize(1);
    ds.annotations_per_annotator = {0};
    ds.perms = PermTable::build(3);
    ModelState state;
    state.theta.assign(6, 1.0 / 6.0);
    state.annotator_ids = ds.annotator_ids;
    state.problem_ids = ds.problem_ids;
    state.ability.assign(1, ConfusionMatrix::uniform(3));
    state.difficulty.assign(1, ConfusionMatrix::uniform(3));
    CHECK_THROWS_AS(problem_log_likelihood(ds, 0, state), ValidationError);
}
