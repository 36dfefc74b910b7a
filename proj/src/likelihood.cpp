#include "lac/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lac/errors.hpp"

namespace lac {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_square(const ConfusionMatrix& m, int R, const char* what) {
    if (m.size() != R) {
        throw std::invalid_argument(std::string(what) + " matrix is " +
                                    std::to_string(m.size()) + "x" + std::to_string(m.size()) +
                                    ", expected " + std::to_string(R));
    }
}

} // namespace

double log_factor(const Items& k, const Items& d,
                  const ConfusionMatrix& ability, const ConfusionMatrix& difficulty) {
    const int R = static_cast<int>(k.size());
    if (static_cast<int>(d.size()) != R) {
        throw std::invalid_argument("log_factor: rank lengths differ");
    }
    check_square(ability, R, "ability");
    check_square(difficulty, R, "difficulty");
    double sum = 0.0;
    for (int r = 0; r < R; ++r) {
        const int t = tau(k, d[r]) - 1;
        const int gap = std::abs(t - r);
        sum += std::log(ability.at(r, t)) + std::log(difficulty.at(r, t)) -
               std::log(static_cast<double>(gap + 1));
    }
    return sum;
}

namespace detail {

LogTables LogTables::build(const IndexedDataset& ds, const ModelState& state) {
    LogTables t;
    t.log_theta.resize(state.theta.size());
    std::transform(state.theta.begin(), state.theta.end(), t.log_theta.begin(),
                   [](double v) { return std::log(v); });
    auto log_matrix = [](const ConfusionMatrix& m) {
        std::vector<double> out(m.data().size());
        std::transform(m.data().begin(), m.data().end(), out.begin(),
                       [](double v) { return std::log(v); });
        return out;
    };
    t.log_ability.reserve(state.ability.size());
    for (const auto& m : state.ability) {
        check_square(m, ds.R, "ability");
        t.log_ability.push_back(log_matrix(m));
    }
    t.log_difficulty.reserve(state.difficulty.size());
    for (const auto& m : state.difficulty) {
        check_square(m, ds.R, "difficulty");
        t.log_difficulty.push_back(log_matrix(m));
    }
    t.log_gap.resize(ds.R);
    for (int g = 0; g < ds.R; ++g) t.log_gap[g] = std::log(static_cast<double>(g + 1));
    return t;
}

void accumulate_problem_scores(const IndexedDataset& ds, int problem,
                               const LogTables& tables, std::span<double> scores) {
    const int R = ds.R;
    const std::uint64_t K = ds.K;
    std::vector<double> g(static_cast<std::size_t>(R) * R);
    for (const auto& ann : ds.by_problem[problem]) {
        const double* la = tables.log_ability[ann.annotator].data();
        const double* ld = tables.log_difficulty[problem].data();
        // g(r, t) = log pi(r, t) + log delta(r, t) - log(|t - r| + 1)
        for (int r = 0; r < R; ++r) {
            for (int t = 0; t < R; ++t) {
                g[r * R + t] = la[r * R + t] + ld[r * R + t] - tables.log_gap[std::abs(t - r)];
            }
        }
        const int* d = ann.items.data();
        for (std::uint64_t k = 0; k < K; ++k) {
            const auto pos = ds.perms.positions(k);
            double s = 0.0;
            for (int r = 0; r < R; ++r) s += g[r * R + pos[d[r]]];
            scores[k] += s;
        }
    }
}

double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) {
        if (std::isnan(x)) throw NumericalError("log_sum_exp: NaN score");
        m = std::max(m, x);
    }
    if (m == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

void softmax_inplace(std::span<double> v) {
    double m = kNegInf;
    for (double x : v) {
        if (std::isnan(x)) throw NumericalError("softmax: NaN score");
        m = std::max(m, x);
    }
    if (m == kNegInf) throw NumericalError("softmax: no finite score in row");
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - m);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

} // namespace detail

LogFactorCache build_log_factor_cache(const IndexedDataset& ds, int problem,
                                      const ModelState& state) {
    const auto& anns = ds.by_problem[problem];
    LogFactorCache cache;
    cache.hypothesis_count = ds.K;
    cache.annotation_count = static_cast<int>(anns.size());
    cache.values.resize(ds.K * anns.size());
    const detail::LogTables tables = detail::LogTables::build(ds, state);
    const int R = ds.R;
    std::vector<double> g(static_cast<std::size_t>(R) * R);
    for (std::size_t a = 0; a < anns.size(); ++a) {
        const double* la = tables.log_ability[anns[a].annotator].data();
        const double* ld = tables.log_difficulty[problem].data();
        for (int r = 0; r < R; ++r) {
            for (int t = 0; t < R; ++t) {
                g[r * R + t] = la[r * R + t] + ld[r * R + t] - tables.log_gap[std::abs(t - r)];
            }
        }
        for (std::uint64_t k = 0; k < ds.K; ++k) {
            const auto pos = ds.perms.positions(k);
            double s = 0.0;
            for (int r = 0; r < R; ++r) s += g[r * R + pos[anns[a].items[r]]];
            cache.values[k * anns.size() + a] = s;
        }
    }
    return cache;
}

double problem_log_likelihood(const IndexedDataset& ds, int problem, const ModelState& state) {
    if (ds.by_problem[problem].empty()) {
        throw ValidationError("problem '" + ds.problem_ids[problem] + "' has no annotations");
    }
    const LogFactorCache cache = build_log_factor_cache(ds, problem, state);
    std::vector<double> scores(ds.K);
    for (std::uint64_t k = 0; k < ds.K; ++k) {
        double s = std::log(state.theta[k]);
        for (int a = 0; a < cache.annotation_count; ++a) s += cache.at(k, a);
        scores[k] = s;
    }
    return detail::log_sum_exp(scores);
}

double dataset_log_likelihood(const IndexedDataset& ds, const ModelState& state) {
    double total = 0.0;
    for (int i = 0; i < ds.problem_count; ++i) {
        total += problem_log_likelihood(ds, i, state);
    }
    if (!std::isfinite(total)) {
        throw NumericalError("dataset log-likelihood is not finite");
    }
    return total;
}

} // namespace lac
