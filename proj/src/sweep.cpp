#include "lac/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lac/baselines.hpp"
#include "lac/metrics.hpp"
#include "lac/parallel.hpp"

namespace lac {

std::string method_name(Method m) {
    switch (m) {
    case Method::lac: return "lac";
    case Method::borda: return "borda";
    case Method::bradley_terry: return "bt";
    case Method::condorcet: return "condorcet";
    }
    return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "lac") return Method::lac;
    if (name == "borda") return Method::borda;
    if (name == "bt" || name == "bradley_terry") return Method::bradley_terry;
    if (name == "condorcet") return Method::condorcet;
    return std::nullopt;
}

void SweepSpec::check() const {
    static const char* allowed[] = {"R", "I", "eta", "J", "e"};
    if (std::find(std::begin(allowed), std::end(allowed), parameter) == std::end(allowed)) {
        throw std::invalid_argument("SweepSpec: unknown parameter '" + parameter + "'");
    }
    if (values.empty()) throw std::invalid_argument("SweepSpec: no grid values");
    if (trials < 1) throw std::invalid_argument("SweepSpec: trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("SweepSpec: no methods");
    for (double v : values) apply_parameter(base, parameter, v).check();
}

SynthConfig apply_parameter(const SynthConfig& base, const std::string& parameter, double value) {
    SynthConfig config = base;
    auto as_int = [&](const char* what) {
        if (value != std::round(value)) {
            throw std::invalid_argument(std::string("SweepSpec: ") + what +
                                        " requires integer grid values");
        }
        return static_cast<int>(value);
    };
    if (parameter == "R") {
        config.rank_length = as_int("R");
    } else if (parameter == "I") {
        config.problem_count = as_int("I");
    } else if (parameter == "J") {
        config.annotator_count = as_int("J");
    } else if (parameter == "e") {
        config.quality = value;
    } else if (parameter == "eta") {
        config.annotation_ratio = value;
    } else {
        throw std::invalid_argument("SweepSpec: unknown parameter '" + parameter + "'");
    }
    return config;
}

namespace {

std::map<std::string, Permutation> predict(const SynthDataset& ds, Method method,
                                           const EmConfig& em, std::uint64_t seed,
                                           double* ability_error) {
    if (method == Method::lac) {
        const FitResult result = fit(ds.data, em);
        if (ability_error) {
            *ability_error = ability_estimation_error(ds.true_ability, result.state.ability);
        }
        return result.inferred_ranks;
    }
    BaselineMethod bm = BaselineMethod::borda;
    if (method == Method::bradley_terry) bm = BaselineMethod::bradley_terry;
    if (method == Method::condorcet) bm = BaselineMethod::condorcet;
    return run_baseline(ds.data, bm, seed);
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.check();
    SweepResult result;
    result.spec = spec;

    struct Task {
        double value;
        int trial;
    };
    std::vector<Task> tasks;
    for (double v : spec.values) {
        for (int t = 0; t < spec.trials; ++t) tasks.push_back({v, t});
    }
    result.cells.assign(tasks.size() * spec.methods.size(), SweepCell{});

    // One task = one dataset draw shared by all methods; tasks are
    // independent, so they parallelize across workers while the EM engine
    // runs single-threaded inside each.
    parallel_for(tasks.size(), [&](std::size_t ti) {
        const Task task = tasks[ti];
        SynthConfig config = apply_parameter(spec.base, spec.parameter, task.value);
        config.seed = spec.base.seed + static_cast<std::uint64_t>(task.trial);
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
            SweepCell& cell = result.cells[ti * spec.methods.size() + mi];
            cell.method = spec.methods[mi];
            cell.value = task.value;
            cell.trial = task.trial;
            try {
                const SynthDataset ds = gen_dataset(config);
                double ability_error = -1.0;
                const auto predictions =
                    predict(ds, cell.method, spec.em, config.seed, &ability_error);
                cell.accuracy = positionwise_accuracy(predictions, ds.data.ground_truth);
                cell.ability_error = ability_error;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
        }
    });
    return result;
}

std::vector<SweepSummary> SweepResult::summarize() const {
    std::vector<SweepSummary> out;
    for (Method m : spec.methods) {
        for (double v : spec.values) {
            SweepSummary s;
            s.method = m;
            s.value = v;
            double sum = 0.0;
            std::vector<double> xs;
            for (const auto& cell : cells) {
                if (cell.method == m && cell.value == v && cell.ok) {
                    xs.push_back(cell.accuracy);
                    sum += cell.accuracy;
                }
            }
            s.completed_trials = static_cast<int>(xs.size());
            if (!xs.empty()) {
                s.mean = sum / static_cast<double>(xs.size());
                if (xs.size() > 1) {
                    double ss = 0.0;
                    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
                    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
                }
            }
            out.push_back(s);
        }
    }
    return out;
}

namespace {

std::string format_value(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

} // namespace

void write_raw_csv(const SweepResult& result, std::ostream& out) {
    out << "method,param,value,trial,accuracy\n";
    for (const auto& cell : result.cells) {
        out << method_name(cell.method) << ',' << result.spec.parameter << ','
            << format_value(cell.value) << ',' << cell.trial << ',';
        if (cell.ok) out << format_value(cell.accuracy);
        out << '\n';
    }
}

void write_summary_csv(const SweepResult& result, std::ostream& out) {
    out << "method,param,value,mean,std\n";
    for (const auto& s : result.summarize()) {
        out << method_name(s.method) << ',' << result.spec.parameter << ','
            << format_value(s.value) << ',' << format_value(s.mean) << ','
            << format_value(s.stddev) << '\n';
    }
}

void write_ability_error_csv(const SweepResult& result, std::ostream& out) {
    out << "param,value,trial,error\n";
    for (const auto& cell : result.cells) {
        if (cell.method != Method::lac || !cell.ok || cell.ability_error < 0.0) continue;
        out << result.spec.parameter << ',' << format_value(cell.value) << ',' << cell.trial
            << ',' << format_value(cell.ability_error) << '\n';
    }
}

} // namespace lac
