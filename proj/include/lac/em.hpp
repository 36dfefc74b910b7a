#pragma once

#include <map>
#include <string>
#include <vector>

#include "lac/indexed_dataset.hpp"
#include "lac/types.hpp"

namespace lac {

struct EmConfig {
    int max_iterations = 500;
    /// Relative change in dataset log-likelihood below which the fit stops.
    double ll_tolerance = 1e-8;
    /// Max absolute change in any posterior entry below which the fit stops.
    double posterior_tolerance = 1e-6;
    /// Probability floor applied to theta and confusion-matrix rows.
    double smoothing_eps = 1e-12;
    /// Recorded for audit; the fit itself is deterministic (argmax ties are
    /// broken by smallest canonical index, never randomly).
    std::uint64_t rng_seed = 0;

    void check() const; // throws std::invalid_argument on bad tolerances
};

struct FitResult {
    ModelState state;
    std::map<std::string, Permutation> inferred_ranks;
    int iterations_used = 0;
    bool converged = false;
    std::vector<double> log_likelihood_trace; // entry t = LL of the params after iteration t
    std::vector<std::string> annotators_without_annotations;
};

/// Starting state: theta uniform; posterior by soft majority vote over each
/// problem's annotations (count of exact matches plus eps, normalized); the
/// confusion matrices come from one M-step pass on that posterior.
ModelState initialize(const IndexedDataset& ds, const EmConfig& config = {});

/// Responsibilities: softmax over hypotheses k of
/// log theta_k + sum of the problem's annotation log factors.
/// When problem_lls is given it also receives each problem's log-likelihood
/// under the current state (the log normalizer of the softmax).
PosteriorTable e_step(const IndexedDataset& ds, const ModelState& state,
                      std::vector<double>* problem_lls = nullptr);

/// theta_k = mean over problems of the responsibility for k, floored at eps
/// and renormalized.
std::vector<double> m_step_theta(const PosteriorTable& posterior, double eps);

/// Per-annotator confusion matrices from responsibility-weighted position
/// counts, row-normalized with an eps floor. Annotators with no annotations
/// get a uniform matrix and are reported through `flagged`.
std::vector<ConfusionMatrix> m_step_ability(const IndexedDataset& ds,
                                            const PosteriorTable& posterior, double eps,
                                            std::vector<int>* flagged = nullptr);

/// Per-problem analogue of m_step_ability over each problem's own annotations.
std::vector<ConfusionMatrix> m_step_difficulty(const IndexedDataset& ds,
                                               const PosteriorTable& posterior, double eps);

/// Full fitting loop: initialize, then alternate E- and M-steps until the
/// log-likelihood or posterior convergence test fires (or max_iterations),
/// then infer each problem's rank as the posterior argmax.
FitResult fit(const IndexedDataset& ds, const EmConfig& config = {});
FitResult fit(const AnnotationSet& dataset, const EmConfig& config = {});

} // namespace lac
