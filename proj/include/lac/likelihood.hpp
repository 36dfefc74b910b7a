#pragma once

#include <span>
#include <vector>

#include "lac/indexed_dataset.hpp"
#include "lac/types.hpp"

namespace lac {

/// Log of the per-annotation factor: sum over positions r of
///   log ability(r, t) + log difficulty(r, t) - log(|t - r| + 1)
/// where t is the true-rank position (under hypothesis k) of the item the
/// annotation d placed at slot r. Returns -inf when a matrix entry is 0.
double log_factor(const Items& k, const Items& d,
                  const ConfusionMatrix& ability, const ConfusionMatrix& difficulty);

/// Precomputed log factors of one problem: entry (k, a) is the log factor of
/// the problem's a-th annotation under hypothesis permutation k.
struct LogFactorCache {
    std::uint64_t hypothesis_count = 0;
    int annotation_count = 0;
    std::vector<double> values; // K x n_annotations, row-major

    double at(std::uint64_t k, int annotation) const {
        return values[k * annotation_count + annotation];
    }
};

LogFactorCache build_log_factor_cache(const IndexedDataset& ds, int problem,
                                      const ModelState& state);

/// log sum over hypotheses k of exp(log theta_k + sum over the problem's
/// annotations of their log factor), evaluated with a max-shifted
/// log-sum-exp. Throws on a problem without annotations.
double problem_log_likelihood(const IndexedDataset& ds, int problem, const ModelState& state);

/// Sum of problem_log_likelihood over all problems; throws NumericalError
/// if the result is not finite.
double dataset_log_likelihood(const IndexedDataset& ds, const ModelState& state);

namespace detail {

/// Per-state log tables shared by the E-step and likelihood evaluation.
struct LogTables {
    std::vector<double> log_theta;
    std::vector<std::vector<double>> log_ability;    // per annotator, R x R
    std::vector<std::vector<double>> log_difficulty; // per problem, R x R
    std::vector<double> log_gap;                     // log(g + 1) for gap g

    static LogTables build(const IndexedDataset& ds, const ModelState& state);
};

/// Adds each annotation's log factor into scores[k] for every hypothesis k;
/// scores must hold K entries. The per-problem part of both the E-step and
/// the likelihood.
void accumulate_problem_scores(const IndexedDataset& ds, int problem,
                               const LogTables& tables, std::span<double> scores);

double log_sum_exp(std::span<const double> v);

/// In-place softmax with max shift. Throws NumericalError when the row has
/// no finite entry.
void softmax_inplace(std::span<double> v);

} // namespace detail

} // namespace lac
