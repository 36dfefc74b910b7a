#include "lac/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lac/errors.hpp"

namespace lac {

PairwiseTally tally_annotations(const std::vector<Items>& annotations, int item_count) {
    if (annotations.empty()) throw std::invalid_argument("tally_annotations: no annotations");
    PairwiseTally tally;
    tally.item_count = item_count;
    tally.annotation_count = static_cast<int>(annotations.size());
    tally.counts.assign(static_cast<std::size_t>(item_count) * item_count, 0.0);
    for (const auto& rank : annotations) {
        if (static_cast<int>(rank.size()) != item_count) {
            throw std::invalid_argument("tally_annotations: rank length mismatch");
        }
        for (int r = 0; r < item_count; ++r) {
            for (int s = r + 1; s < item_count; ++s) {
                tally.at(rank[r], rank[s]) += 1.0;
            }
        }
    }
    return tally;
}

Items borda(const std::vector<Items>& annotations, int item_count) {
    if (annotations.empty()) throw std::invalid_argument("borda: no annotations");
    std::vector<double> score(item_count, 0.0);
    for (const auto& rank : annotations) {
        for (int r = 0; r < item_count; ++r) {
            score[rank[r]] += static_cast<double>(r + 1);
        }
    }
    Items order(item_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&score](int a, int b) {
        if (score[a] != score[b]) return score[a] < score[b];
        return a < b;
    });
    return order;
}

BradleyTerryResult bradley_terry(const PairwiseTally& tally, int max_iterations, double tol) {
    const int R = tally.item_count;
    // wins and pair totals with +0.5 on every ordered pair
    std::vector<double> wins(R, 0.0);
    std::vector<double> pair_total(static_cast<std::size_t>(R) * R, 0.0);
    for (int a = 0; a < R; ++a) {
        for (int b = 0; b < R; ++b) {
            if (a == b) continue;
            const double smoothed = tally.at(a, b) + 0.5;
            wins[a] += smoothed;
            pair_total[static_cast<std::size_t>(a) * R + b] =
                tally.at(a, b) + tally.at(b, a) + 1.0;
        }
    }

    BradleyTerryResult result;
    result.strengths.assign(R, 1.0);
    auto& w = result.strengths;
    for (int it = 0; it < max_iterations; ++it) {
        std::vector<double> next(R);
        for (int a = 0; a < R; ++a) {
            double denom = 0.0;
            for (int b = 0; b < R; ++b) {
                if (b == a) continue;
                denom += pair_total[static_cast<std::size_t>(a) * R + b] / (w[a] + w[b]);
            }
            next[a] = wins[a] / denom;
        }
        // keep the scale fixed; the order is scale-invariant anyway
        double sum = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& v : next) v *= static_cast<double>(R) / sum;
        double change = 0.0;
        for (int a = 0; a < R; ++a) change = std::max(change, std::abs(next[a] - w[a]));
        w = std::move(next);
        if (change < tol) {
            result.converged = true;
            break;
        }
    }

    result.order.resize(R);
    std::iota(result.order.begin(), result.order.end(), 0);
    std::sort(result.order.begin(), result.order.end(), [&w](int a, int b) {
        if (w[a] != w[b]) return w[a] > w[b];
        return a < b;
    });
    return result;
}

namespace {

// true when a must come before b (majority of annotations rank a above b,
// or a dead tie with the smaller label first)
bool majority_before(const PairwiseTally& tally, int a, int b) {
    const double ab = tally.at(a, b);
    const double ba = tally.at(b, a);
    if (ab != ba) return ab > ba;
    return a < b;
}

void quicksort_majority(Items& items, int lo, int hi, const PairwiseTally& tally, Rng& rng) {
    if (hi - lo <= 1) return;
    const int pivot_at = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo)));
    const int pivot = items[pivot_at];
    Items before, after;
    for (int i = lo; i < hi; ++i) {
        if (items[i] == pivot) continue;
        if (majority_before(tally, items[i], pivot)) {
            before.push_back(items[i]);
        } else {
            after.push_back(items[i]);
        }
    }
    int at = lo;
    for (int v : before) items[at++] = v;
    const int pivot_pos = at;
    items[at++] = pivot;
    for (int v : after) items[at++] = v;
    quicksort_majority(items, lo, pivot_pos, tally, rng);
    quicksort_majority(items, pivot_pos + 1, hi, tally, rng);
}

} // namespace

Items condorcet_fuse(const PairwiseTally& tally, Rng& rng) {
    Items items(tally.item_count);
    std::iota(items.begin(), items.end(), 0);
    quicksort_majority(items, 0, tally.item_count, tally, rng);
    return items;
}

std::map<std::string, Permutation> run_baseline(const AnnotationSet& dataset,
                                                BaselineMethod method, std::uint64_t seed) {
    validate_or_throw(dataset);
    const int R = dataset.item_count();

    std::map<std::string, std::vector<Items>> grouped;
    for (const auto& ann : dataset.annotations) {
        grouped[ann.problem_id].push_back(ann.rank.items);
    }

    std::map<std::string, Permutation> out;
    for (const auto& problem : dataset.problems) {
        const auto& annotations = grouped.at(problem.id);
        Items order;
        switch (method) {
        case BaselineMethod::borda:
            order = borda(annotations, R);
            break;
        case BaselineMethod::bradley_terry:
            order = bradley_terry(tally_annotations(annotations, R)).order;
            break;
        case BaselineMethod::condorcet: {
            Rng rng = Rng::substream(seed, "condorcet/" + problem.id);
            order = condorcet_fuse(tally_annotations(annotations, R), rng);
            break;
        }
        }
        out.emplace(problem.id, Permutation::from_items(std::move(order)));
    }
    return out;
}

} // namespace lac
