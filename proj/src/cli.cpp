#include "lac/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "lac/baselines.hpp"
#include "lac/dataset_io.hpp"
#include "lac/em.hpp"
#include "lac/errors.hpp"
#include "lac/metrics.hpp"
#include "lac/sweep.hpp"
#include "lac/synth.hpp"
#include "lac/version.hpp"

namespace lac {

namespace {

using nlohmann::ordered_json;

class PhaseTimer {
public:
    explicit PhaseTimer(RunManifest& manifest) : manifest_(manifest), start_(clock::now()) {}

    void phase(const std::string& name) {
        const auto now = clock::now();
        manifest_.phase_seconds.emplace_back(name, seconds(mark_, now));
        mark_ = now;
    }

    void finish() { manifest_.wall_clock_seconds = seconds(start_, clock::now()); }

private:
    using clock = std::chrono::steady_clock;
    static double seconds(clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    }
    RunManifest& manifest_;
    clock::time_point start_;
    clock::time_point mark_ = start_;
};

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct GenerateArgs {
    SynthConfig config;
    std::string out;
    std::string ability_out;
};

int cmd_generate(const GenerateArgs& args) {
    RunManifest manifest;
    manifest.command = "generate";
    manifest.version = kVersion;
    manifest.seed = args.config.seed;
    manifest.config = {{"I", args.config.problem_count},
                       {"J", args.config.annotator_count},
                       {"R", args.config.rank_length},
                       {"e", args.config.quality},
                       {"eta", args.config.annotation_ratio},
                       {"seed", args.config.seed},
                       {"out", args.out},
                       {"ability_out", args.ability_out}};
    PhaseTimer timer(manifest);

    const SynthDataset ds = gen_dataset(args.config);
    timer.phase("generate");

    save_dataset(ds.data, args.out, /*include_truth=*/true);
    if (!args.ability_out.empty()) {
        save_matrices(ds.data.annotators, ds.true_ability, args.ability_out);
    }
    timer.phase("write");
    timer.finish();
    write_manifest(manifest, args.out + ".manifest.json");

    std::cout << "wrote " << args.out << ": " << ds.data.problems.size() << " problems, "
              << ds.data.annotators.size() << " annotators, " << ds.data.annotations.size()
              << " annotations, R = " << ds.data.item_count() << '\n';
    return 0;
}

struct AggregateArgs {
    std::string in;
    std::string method = "lac";
    std::string out;
    EmConfig em;
    std::uint64_t seed = 0;
};

int cmd_aggregate(const AggregateArgs& args) {
    RunManifest manifest;
    manifest.command = "aggregate";
    manifest.version = kVersion;
    manifest.seed = args.seed;
    manifest.config = {{"in", args.in},
                       {"method", args.method},
                       {"out", args.out},
                       {"seed", args.seed},
                       {"max_iterations", args.em.max_iterations},
                       {"ll_tolerance", args.em.ll_tolerance},
                       {"posterior_tolerance", args.em.posterior_tolerance},
                       {"smoothing_eps", args.em.smoothing_eps}};
    PhaseTimer timer(manifest);

    const LoadResult loaded = load_dataset(args.in);
    print_warnings(loaded.warnings);
    timer.phase("load");

    std::map<std::string, Permutation> predictions;
    if (args.method == "lac") {
        EmConfig em = args.em;
        em.rng_seed = args.seed;
        const FitResult result = fit(loaded.dataset, em);
        predictions = result.inferred_ranks;
        timer.phase("fit");

        save_matrices(result.state.annotator_ids, result.state.ability, args.out + ".ability.txt");
        save_matrices(result.state.problem_ids, result.state.difficulty,
                      args.out + ".difficulty.txt");
        save_series(result.state.theta, "theta", args.out + ".theta.txt");
        save_series(result.log_likelihood_trace, "log_likelihood", args.out + ".ll.txt");
        for (const auto& id : result.annotators_without_annotations) {
            std::cerr << "warning: annotator '" << id
                      << "' has no annotations; ability left uniform\n";
        }
        std::cout << "lac: " << result.iterations_used << " iteration(s), "
                  << (result.converged ? "converged" : "hit max_iterations")
                  << ", log-likelihood " << result.state.log_likelihood << '\n';
    } else {
        const auto method = method_from_name(args.method);
        if (!method || *method == Method::lac) {
            throw CLI::ValidationError("--method", "unknown method '" + args.method + "'");
        }
        BaselineMethod bm = BaselineMethod::borda;
        if (*method == Method::bradley_terry) bm = BaselineMethod::bradley_terry;
        if (*method == Method::condorcet) bm = BaselineMethod::condorcet;
        predictions = run_baseline(loaded.dataset, bm, args.seed);
        timer.phase("fit");
    }

    save_predictions(predictions, args.out);
    timer.phase("write");
    timer.finish();
    write_manifest(manifest, args.out + ".manifest.json");
    std::cout << "wrote " << args.out << ": " << predictions.size() << " predicted ranks\n";
    return 0;
}

struct EvaluateArgs {
    std::string pred;
    std::string truth;
    std::string out;
    std::string ability_truth;
    std::string ability_est;
};

int cmd_evaluate(const EvaluateArgs& args) {
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.version = kVersion;
    manifest.config = {{"pred", args.pred},
                       {"truth", args.truth},
                       {"out", args.out},
                       {"ability_truth", args.ability_truth},
                       {"ability_est", args.ability_est}};
    PhaseTimer timer(manifest);

    const auto predictions = load_predictions(args.pred);
    const auto truth = load_predictions(args.truth);
    timer.phase("load");

    ordered_json report;
    const double accuracy = positionwise_accuracy(predictions, truth);
    report["problems"] = predictions.size();
    report["positionwise_accuracy"] = accuracy;
    std::cout << "positionwise_accuracy " << accuracy << '\n';

    if (!args.ability_truth.empty() || !args.ability_est.empty()) {
        if (args.ability_truth.empty() || args.ability_est.empty()) {
            throw CLI::ValidationError("--ability-truth",
                                       "needs both --ability-truth and --ability-est");
        }
        auto [true_ids, true_mats] = load_matrices(args.ability_truth);
        auto [est_ids, est_mats] = load_matrices(args.ability_est);
        if (true_ids != est_ids) {
            // align by id when the orders differ
            std::vector<ConfusionMatrix> reordered;
            for (const auto& id : true_ids) {
                const auto it = std::find(est_ids.begin(), est_ids.end(), id);
                if (it == est_ids.end()) {
                    throw ValidationError("no estimated ability matrix for annotator '" + id +
                                          "'");
                }
                reordered.push_back(est_mats[static_cast<std::size_t>(it - est_ids.begin())]);
            }
            est_mats = std::move(reordered);
        }
        const double error = ability_estimation_error(true_mats, est_mats);
        report["ability_estimation_error"] = error;
        std::cout << "ability_estimation_error " << error << '\n';
    }
    timer.phase("evaluate");

    {
        std::ofstream out(args.out);
        if (!out) throw IoError("cannot write '" + args.out + "'");
        out << report.dump(2) << '\n';
    }
    timer.finish();
    write_manifest(manifest, args.out + ".manifest.json");
    return 0;
}

struct SweepArgs {
    std::string spec_path;
    std::string out_dir;
};

SweepSpec parse_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ValidationError("'" + path.string() + "': not a JSON object");
    }
    SweepSpec spec;
    spec.parameter = doc.value("parameter", "");
    if (doc.contains("values") && doc["values"].is_array()) {
        for (const auto& v : doc["values"]) spec.values.push_back(v.get<double>());
    }
    spec.trials = doc.value("trials", 5);
    if (doc.contains("base") && doc["base"].is_object()) {
        const auto& base = doc["base"];
        spec.base.problem_count = base.value("I", spec.base.problem_count);
        spec.base.annotator_count = base.value("J", spec.base.annotator_count);
        spec.base.rank_length = base.value("R", spec.base.rank_length);
        spec.base.quality = base.value("e", spec.base.quality);
        spec.base.annotation_ratio = base.value("eta", spec.base.annotation_ratio);
        spec.base.seed = base.value("seed", spec.base.seed);
    }
    if (doc.contains("methods") && doc["methods"].is_array()) {
        spec.methods.clear();
        for (const auto& m : doc["methods"]) {
            const auto method = method_from_name(m.get<std::string>());
            if (!method) {
                throw ValidationError("'" + path.string() + "': unknown method '" +
                                      m.get<std::string>() + "'");
            }
            spec.methods.push_back(*method);
        }
    }
    if (doc.contains("em") && doc["em"].is_object()) {
        const auto& em = doc["em"];
        spec.em.max_iterations = em.value("max_iterations", spec.em.max_iterations);
        spec.em.ll_tolerance = em.value("ll_tolerance", spec.em.ll_tolerance);
        spec.em.posterior_tolerance = em.value("posterior_tolerance", spec.em.posterior_tolerance);
        spec.em.smoothing_eps = em.value("smoothing_eps", spec.em.smoothing_eps);
    }
    return spec;
}

int cmd_sweep(const SweepArgs& args) {
    RunManifest manifest;
    manifest.command = "sweep";
    manifest.version = kVersion;
    PhaseTimer timer(manifest);

    const SweepSpec spec = parse_sweep_spec(args.spec_path);
    manifest.seed = spec.base.seed;
    manifest.config = {{"spec", args.spec_path},
                       {"out_dir", args.out_dir},
                       {"parameter", spec.parameter},
                       {"values", spec.values},
                       {"trials", spec.trials},
                       {"base_seed", spec.base.seed}};
    timer.phase("load");

    const SweepResult result = run_sweep(spec);
    timer.phase("sweep");

    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);
    {
        std::ofstream raw(dir / "raw.csv");
        if (!raw) throw IoError("cannot write '" + (dir / "raw.csv").string() + "'");
        write_raw_csv(result, raw);
        std::ofstream summary(dir / "summary.csv");
        if (!summary) throw IoError("cannot write '" + (dir / "summary.csv").string() + "'");
        write_summary_csv(result, summary);
        std::ofstream ability(dir / "ability_error.csv");
        if (!ability) throw IoError("cannot write '" + (dir / "ability_error.csv").string() + "'");
        write_ability_error_csv(result, ability);
    }
    timer.phase("write");
    timer.finish();
    write_manifest(manifest, dir / "manifest.json");

    int failed = 0;
    for (const auto& cell : result.cells) {
        if (!cell.ok) {
            ++failed;
            std::cerr << "warning: cell (" << method_name(cell.method) << ", "
                      << result.spec.parameter << " = " << cell.value << ", trial " << cell.trial
                      << ") failed: " << cell.error << '\n';
        }
    }
    std::cout << "wrote " << (dir / "raw.csv").string() << " (" << result.cells.size()
              << " cells, " << failed << " failed)\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"listwise full-rank aggregation for crowdsourced annotations"};
    app.set_version_flag("--version", std::string("lac ") + kVersion);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "draw a synthetic benchmark dataset");
    generate->add_option("--I", gen.config.problem_count, "number of problems")
        ->capture_default_str();
    generate->add_option("--J", gen.config.annotator_count, "number of annotators")
        ->capture_default_str();
    generate->add_option("--R", gen.config.rank_length, "items per problem")
        ->capture_default_str();
    generate->add_option("--e", gen.config.quality, "annotator quality in [0,1]")
        ->capture_default_str();
    generate->add_option("--eta", gen.config.annotation_ratio, "annotation ratio in (0,1]")
        ->capture_default_str();
    generate->add_option("--seed", gen.config.seed, "RNG seed")->capture_default_str();
    generate->add_option("--out", gen.out, "output dataset file")->required();
    generate->add_option("--ability-out", gen.ability_out,
                         "also write the true ability matrices here");

    AggregateArgs agg;
    auto* aggregate = app.add_subcommand("aggregate", "infer ranks from a dataset file");
    aggregate->add_option("--in", agg.in, "input dataset file")->required();
    aggregate->add_option("--method", agg.method, "lac | borda | bt | condorcet")
        ->capture_default_str();
    aggregate->add_option("--out", agg.out, "output predictions file")->required();
    aggregate->add_option("--max-iterations", agg.em.max_iterations, "EM iteration cap")
        ->capture_default_str();
    aggregate->add_option("--ll-tolerance", agg.em.ll_tolerance,
                          "relative log-likelihood convergence tolerance")
        ->capture_default_str();
    aggregate->add_option("--posterior-tolerance", agg.em.posterior_tolerance,
                          "max posterior change convergence tolerance")
        ->capture_default_str();
    aggregate->add_option("--smoothing-eps", agg.em.smoothing_eps, "probability floor")
        ->capture_default_str();
    aggregate->add_option("--seed", agg.seed, "seed for quicksort pivots / audit")
        ->capture_default_str();

    EvaluateArgs eval;
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    evaluate->add_option("--pred", eval.pred, "predictions file")->required();
    evaluate->add_option("--truth", eval.truth, "truth source (dataset or predictions file)")
        ->required();
    evaluate->add_option("--out", eval.out, "metrics report (JSON)")->required();
    evaluate->add_option("--ability-truth", eval.ability_truth, "true ability matrices");
    evaluate->add_option("--ability-est", eval.ability_est, "estimated ability matrices");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep from a spec file");
    sweep_cmd->add_option("--spec", sweep.spec_path, "sweep spec (JSON)")->required();
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (aggregate->parsed()) return cmd_aggregate(agg);
        if (evaluate->parsed()) return cmd_evaluate(eval);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep);
        std::cerr << app.help();
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace lac
