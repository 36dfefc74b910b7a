#include "lac/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lac/errors.hpp"

namespace lac {

int SynthConfig::annotators_per_problem() const {
    return static_cast<int>(std::lround(annotation_ratio * annotator_count));
}

void SynthConfig::check() const {
    if (problem_count < 1) throw std::invalid_argument("SynthConfig: I must be >= 1");
    if (annotator_count < 1) throw std::invalid_argument("SynthConfig: J must be >= 1");
    if (rank_length < 2) throw std::invalid_argument("SynthConfig: R must be >= 2");
    if (quality < 0.0 || quality > 1.0) throw std::invalid_argument("SynthConfig: e must be in [0, 1]");
    if (!(annotation_ratio > 0.0) || annotation_ratio > 1.0) {
        throw std::invalid_argument("SynthConfig: eta must be in (0, 1]");
    }
    if (annotators_per_problem() < 1) {
        throw std::invalid_argument("SynthConfig: round(eta * J) must be >= 1");
    }
}

ConfusionMatrix gen_ability_matrix(double quality, int rank_length, Rng& rng) {
    if (quality < 0.0 || quality > 1.0) {
        throw std::invalid_argument("gen_ability_matrix: e must be in [0, 1]");
    }
    if (rank_length < 2) throw std::invalid_argument("gen_ability_matrix: R must be >= 2");
    ConfusionMatrix m(rank_length);
    std::vector<double> weights(rank_length - 1);
    for (int r = 0; r < rank_length; ++r) {
        const double v = rng.uniform(quality, 1.0);
        m.at(r, r) = v;
        double sum = 0.0;
        for (double& w : weights) {
            w = rng.uniform01();
            sum += w;
        }
        const double rest = 1.0 - v;
        int c = 0;
        for (int t = 0; t < rank_length; ++t) {
            if (t == r) continue;
            m.at(r, t) = sum > 0.0 ? rest * weights[c] / sum
                                   : rest / static_cast<double>(rank_length - 1);
            ++c;
        }
    }
    return m;
}

Items gen_biased_rank(const Items& truth, const ConfusionMatrix& ability, Rng& rng) {
    const int R = static_cast<int>(truth.size());
    if (ability.size() != R) throw std::invalid_argument("gen_biased_rank: matrix size mismatch");
    constexpr long kMaxDraws = 1'000'000;
    Items out(R, -1);
    std::vector<bool> placed(R, false); // by true-rank position
    for (int r = 0; r < R - 1; ++r) {
        long draws = 0;
        int p;
        do {
            if (++draws > kMaxDraws) {
                throw NumericalError("gen_biased_rank: sampling stalled at slot " +
                                     std::to_string(r + 1));
            }
            p = rng.categorical(ability.row(r));
        } while (placed[p]);
        placed[p] = true;
        out[r] = truth[p];
    }
    for (int p = 0; p < R; ++p) {
        if (!placed[p]) out[R - 1] = truth[p];
    }
    return out;
}

SynthDataset gen_dataset(const SynthConfig& config) {
    config.check();
    Rng rng = Rng::substream(config.seed, "gen");

    SynthDataset out;
    out.true_ability.reserve(config.annotator_count);
    for (int j = 0; j < config.annotator_count; ++j) {
        out.true_ability.push_back(gen_ability_matrix(config.quality, config.rank_length, rng));
        out.data.annotators.push_back("a" + std::to_string(j));
    }

    Items identity(config.rank_length);
    for (int t = 0; t < config.rank_length; ++t) identity[t] = t;

    const int per_problem = config.annotators_per_problem();
    for (int i = 0; i < config.problem_count; ++i) {
        Problem problem;
        problem.id = "p" + std::to_string(i);
        problem.item_count = config.rank_length;
        out.data.problems.push_back(problem);

        Items truth = identity;
        rng.shuffle(truth);
        out.data.ground_truth.emplace(problem.id, Permutation::from_items(truth));

        for (int j : rng.sample_without_replacement(config.annotator_count, per_problem)) {
            Annotation ann;
            ann.problem_id = problem.id;
            ann.annotator_id = out.data.annotators[j];
            ann.rank = Permutation::from_items(gen_biased_rank(truth, out.true_ability[j], rng));
            out.data.annotations.push_back(std::move(ann));
        }
    }
    validate_or_throw(out.data);
    return out;
}

} // namespace lac
