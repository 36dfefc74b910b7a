#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lac/permutation.hpp"

namespace lac {

/// Floor applied to probability rows before log-space evaluation, so the
/// likelihood never sees log 0.
inline constexpr double kProbFloor = 1e-12;

/// One ranking task: R items whose true order is unknown.
struct Problem {
    std::string id;
    int item_count = 0;
    std::vector<std::string> payloads; // optional opaque item texts, size R when present
};

/// A full rank over one problem's items by one annotator.
struct Annotation {
    std::string problem_id;
    std::string annotator_id;
    Permutation rank;
};

/// The observed dataset: problems, annotator roster, and noisy ranks,
/// optionally with embedded ground truth.
struct AnnotationSet {
    std::vector<Problem> problems;
    std::vector<std::string> annotators;
    std::vector<Annotation> annotations;
    std::map<std::string, Permutation> ground_truth;

    /// Shared R of the dataset (0 if there are no problems).
    int item_count() const { return problems.empty() ? 0 : problems.front().item_count; }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks every dataset invariant and reports all violations (duplicate
/// annotations, non-permutation ranks, unknown ids, inconsistent R, problems
/// without annotations, incomplete ground truth). Never partially accepts.
ValidationReport validate(const AnnotationSet& dataset);

/// Returns the dataset unchanged when valid; throws ValidationError carrying
/// the full report otherwise.
const AnnotationSet& validate_or_throw(const AnnotationSet& dataset);

/// Floors every entry at eps, then rescales to sum 1.
void floor_and_normalize(std::span<double> row, double eps);

/// Row-stochastic R x R matrix over rank positions. Entry (r, t), 0-based,
/// is the probability that slot r of an annotated list receives the item
/// whose true-rank position is t+1.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(int size) : R_(size), m_(static_cast<std::size_t>(size) * size, 0.0) {}

    static ConfusionMatrix identity(int size);
    static ConfusionMatrix uniform(int size);
    static ConfusionMatrix from_rows(const std::vector<std::vector<double>>& rows);
    /// Row-normalized counts with an eps floor; any nonnegative count matrix
    /// with positive row sums yields a row-stochastic result.
    static ConfusionMatrix from_counts(int size, std::span<const double> counts, double eps);

    int size() const { return R_; }
    double at(int r, int c) const { return m_[static_cast<std::size_t>(r) * R_ + c]; }
    double& at(int r, int c) { return m_[static_cast<std::size_t>(r) * R_ + c]; }
    std::span<const double> row(int r) const { return {m_.data() + static_cast<std::size_t>(r) * R_, static_cast<std::size_t>(R_)}; }
    std::span<const double> data() const { return m_; }

    void floor_rows(double eps);
    bool is_row_stochastic(double tol = 1e-9) const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    int R_ = 0;
    std::vector<double> m_; // row-major
};

/// Per-problem distribution over all K = R! candidate true ranks; row order
/// follows the dataset's problem order, entry enc(k) is E[I(y_i = k)].
struct PosteriorTable {
    std::uint64_t hypothesis_count = 0;
    std::vector<std::vector<double>> rows;

    int problem_count() const { return static_cast<int>(rows.size()); }
};

/// Full parameter set of the model plus fitting bookkeeping. Ability and
/// difficulty matrices are stored in dataset order with their ids alongside.
struct ModelState {
    std::vector<double> theta; // prior over the K permutations
    std::vector<std::string> annotator_ids;
    std::vector<ConfusionMatrix> ability;
    std::vector<std::string> problem_ids;
    std::vector<ConfusionMatrix> difficulty;
    PosteriorTable posterior;
    double log_likelihood = 0.0;
    int iteration = 0;

    const ConfusionMatrix& ability_for(const std::string& annotator_id) const;
    const ConfusionMatrix& difficulty_for(const std::string& problem_id) const;
};

} // namespace lac
