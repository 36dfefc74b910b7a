#include "lac/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lac/errors.hpp"
#include "lac/likelihood.hpp"
#include "lac/parallel.hpp"

namespace lac {

namespace {

/// Posterior marginals of one problem: entry (t, item) is the posterior
/// probability that `item` occupies true-rank position t+1. Both M-steps
/// consume annotations through this table.
std::vector<double> position_marginals(const IndexedDataset& ds,
                                       std::span<const double> responsibilities) {
    const int R = ds.R;
    std::vector<double> m(static_cast<std::size_t>(R) * R, 0.0);
    for (std::uint64_t k = 0; k < ds.K; ++k) {
        const double w = responsibilities[k];
        if (w == 0.0) continue;
        const auto pos = ds.perms.positions(k);
        for (int item = 0; item < R; ++item) {
            m[static_cast<std::size_t>(pos[item]) * R + item] += w;
        }
    }
    return m;
}

std::vector<std::vector<double>> all_position_marginals(const IndexedDataset& ds,
                                                        const PosteriorTable& posterior) {
    std::vector<std::vector<double>> out(ds.problem_count);
    parallel_for(static_cast<std::size_t>(ds.problem_count), [&](std::size_t i) {
        out[i] = position_marginals(ds, posterior.rows[i]);
    });
    return out;
}

} // namespace

void EmConfig::check() const {
    if (max_iterations < 1) throw std::invalid_argument("EmConfig: max_iterations must be >= 1");
    if (!(ll_tolerance > 0.0)) throw std::invalid_argument("EmConfig: ll_tolerance must be > 0");
    if (!(posterior_tolerance > 0.0)) {
        throw std::invalid_argument("EmConfig: posterior_tolerance must be > 0");
    }
    if (!(smoothing_eps > 0.0)) throw std::invalid_argument("EmConfig: smoothing_eps must be > 0");
}

ModelState initialize(const IndexedDataset& ds, const EmConfig& config) {
    config.check();
    ModelState state;
    state.annotator_ids = ds.annotator_ids;
    state.problem_ids = ds.problem_ids;
    state.theta.assign(ds.K, 1.0 / static_cast<double>(ds.K));

    // Soft majority vote: responsibility proportional to the number of
    // annotations exactly equal to each candidate rank, plus eps everywhere.
    state.posterior.hypothesis_count = ds.K;
    state.posterior.rows.assign(ds.problem_count, {});
    for (int i = 0; i < ds.problem_count; ++i) {
        auto& row = state.posterior.rows[i];
        row.assign(ds.K, config.smoothing_eps);
        for (const auto& ann : ds.by_problem[i]) row[ann.rank_index] += 1.0;
        const double total = static_cast<double>(ds.by_problem[i].size()) +
                             config.smoothing_eps * static_cast<double>(ds.K);
        for (double& v : row) v /= total;
    }

    state.ability = m_step_ability(ds, state.posterior, config.smoothing_eps);
    state.difficulty = m_step_difficulty(ds, state.posterior, config.smoothing_eps);
    state.iteration = 0;
    return state;
}

PosteriorTable e_step(const IndexedDataset& ds, const ModelState& state,
                      std::vector<double>* problem_lls) {
    const detail::LogTables tables = detail::LogTables::build(ds, state);
    PosteriorTable posterior;
    posterior.hypothesis_count = ds.K;
    posterior.rows.assign(ds.problem_count, {});
    if (problem_lls) problem_lls->assign(ds.problem_count, 0.0);
    parallel_for(static_cast<std::size_t>(ds.problem_count), [&](std::size_t i) {
        auto& row = posterior.rows[i];
        row = tables.log_theta; // scores start from the prior
        detail::accumulate_problem_scores(ds, static_cast<int>(i), tables, row);
        if (problem_lls) (*problem_lls)[i] = detail::log_sum_exp(row);
        detail::softmax_inplace(row);
    });
    return posterior;
}

std::vector<double> m_step_theta(const PosteriorTable& posterior, double eps) {
    if (posterior.rows.empty()) throw std::invalid_argument("m_step_theta: empty posterior");
    const auto K = static_cast<std::size_t>(posterior.hypothesis_count);
    std::vector<double> theta(K, 0.0);
    for (const auto& row : posterior.rows) {
        for (std::size_t k = 0; k < K; ++k) theta[k] += row[k];
    }
    const double inv_count = 1.0 / static_cast<double>(posterior.rows.size());
    for (double& v : theta) v *= inv_count;
    floor_and_normalize(theta, eps);
    return theta;
}

std::vector<ConfusionMatrix> m_step_ability(const IndexedDataset& ds,
                                            const PosteriorTable& posterior, double eps,
                                            std::vector<int>* flagged) {
    const int R = ds.R;
    const auto marginals = all_position_marginals(ds, posterior);
    std::vector<std::vector<double>> counts(
        ds.annotator_count, std::vector<double>(static_cast<std::size_t>(R) * R, 0.0));
    for (int i = 0; i < ds.problem_count; ++i) {
        const auto& m = marginals[i];
        for (const auto& ann : ds.by_problem[i]) {
            auto& c = counts[ann.annotator];
            // Slot r of the annotation holds item d_r; credit every true
            // position t with the posterior mass of d_r sitting there.
            for (int r = 0; r < R; ++r) {
                const int item = ann.items[r];
                for (int t = 0; t < R; ++t) {
                    c[static_cast<std::size_t>(r) * R + t] += m[static_cast<std::size_t>(t) * R + item];
                }
            }
        }
    }
    if (flagged) flagged->clear();
    std::vector<ConfusionMatrix> out;
    out.reserve(ds.annotator_count);
    for (int j = 0; j < ds.annotator_count; ++j) {
        if (ds.annotations_per_annotator[j] == 0) {
            out.push_back(ConfusionMatrix::uniform(R));
            if (flagged) flagged->push_back(j);
        } else {
            out.push_back(ConfusionMatrix::from_counts(R, counts[j], eps));
        }
    }
    return out;
}

std::vector<ConfusionMatrix> m_step_difficulty(const IndexedDataset& ds,
                                               const PosteriorTable& posterior, double eps) {
    const int R = ds.R;
    const auto marginals = all_position_marginals(ds, posterior);
    std::vector<ConfusionMatrix> out(ds.problem_count);
    parallel_for(static_cast<std::size_t>(ds.problem_count), [&](std::size_t i) {
        std::vector<double> c(static_cast<std::size_t>(R) * R, 0.0);
        const auto& m = marginals[i];
        for (const auto& ann : ds.by_problem[i]) {
            for (int r = 0; r < R; ++r) {
                const int item = ann.items[r];
                for (int t = 0; t < R; ++t) {
                    c[static_cast<std::size_t>(r) * R + t] += m[static_cast<std::size_t>(t) * R + item];
                }
            }
        }
        out[i] = ConfusionMatrix::from_counts(R, c, eps);
    });
    return out;
}

namespace {

double max_abs_change(const PosteriorTable& a, const PosteriorTable& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        for (std::size_t k = 0; k < a.rows[i].size(); ++k) {
            worst = std::max(worst, std::abs(a.rows[i][k] - b.rows[i][k]));
        }
    }
    return worst;
}

std::map<std::string, Permutation> infer_ranks(const IndexedDataset& ds,
                                               const PosteriorTable& posterior) {
    std::map<std::string, Permutation> out;
    for (int i = 0; i < ds.problem_count; ++i) {
        const auto& row = posterior.rows[i];
        std::uint64_t best = 0;
        for (std::uint64_t k = 1; k < ds.K; ++k) {
            if (row[k] > row[best]) best = k; // ties keep the smaller index
        }
        out.emplace(ds.problem_ids[i], Permutation::from_index(best, ds.R));
    }
    return out;
}

} // namespace

FitResult fit(const IndexedDataset& ds, const EmConfig& config) {
    config.check();
    FitResult result;
    ModelState state = initialize(ds, config);

    std::vector<int> flagged;
    std::vector<double> problem_lls;

    for (int t = 1; t <= config.max_iterations; ++t) {
        // The E-step's normalizers give the LL of the parameters entering
        // this iteration, so trace entry t-1 becomes available here.
        PosteriorTable responsibilities = e_step(ds, state, &problem_lls);
        double ll = 0.0;
        for (double v : problem_lls) ll += v;
        if (!std::isfinite(ll)) throw NumericalError("EM: log-likelihood became non-finite");
        result.log_likelihood_trace.push_back(ll);

        state.theta = m_step_theta(responsibilities, config.smoothing_eps);
        state.ability = m_step_ability(ds, responsibilities, config.smoothing_eps, &flagged);
        state.difficulty = m_step_difficulty(ds, responsibilities, config.smoothing_eps);

        // state.posterior still holds the previous iteration's table
        const double posterior_change = max_abs_change(responsibilities, state.posterior);
        state.posterior = std::move(responsibilities);
        state.iteration = t;
        result.iterations_used = t;

        bool ll_settled = false;
        const std::size_t n = result.log_likelihood_trace.size();
        if (n >= 2) {
            const double curr = result.log_likelihood_trace[n - 1];
            const double prev = result.log_likelihood_trace[n - 2];
            ll_settled = std::abs(curr - prev) / std::max(1.0, std::abs(curr)) < config.ll_tolerance;
        }
        if (ll_settled || posterior_change < config.posterior_tolerance) {
            result.converged = true;
            break;
        }
    }

    // One final E-pass under the converged parameters: completes the trace
    // and yields the posterior that the rank inference reads.
    state.posterior = e_step(ds, state, &problem_lls);
    double final_ll = 0.0;
    for (double v : problem_lls) final_ll += v;
    if (!std::isfinite(final_ll)) throw NumericalError("EM: log-likelihood became non-finite");
    result.log_likelihood_trace.push_back(final_ll);
    state.log_likelihood = final_ll;

    result.inferred_ranks = infer_ranks(ds, state.posterior);
    for (int j : flagged) result.annotators_without_annotations.push_back(ds.annotator_ids[j]);
    result.state = std::move(state);
    return result;
}

FitResult fit(const AnnotationSet& dataset, const EmConfig& config) {
    return fit(IndexedDataset::build(dataset), config);
}

} // namespace lac
