// Command-line front end: generate benchmarks, tune DBSCAN parameters, run
// the three-phase pipeline, and evaluate score tables.

#include <cstdio>
#include <fstream>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "sdcor/driver.hpp"
#include "sdcor/metrics.hpp"
#include "sdcor/model_io.hpp"
#include "sdcor/synthgen.hpp"

namespace {

using namespace sdcor;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInvariant = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SDCOR_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return v;
    }
    return 1;
}

// Expands `--config FILE` into `--key=value` tokens from a flat key=value
// file. Keys already given as flags keep their command-line values.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i),
                       args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw sdcor::InputError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw sdcor::InputError("config line is not key=value: " + line);
        const std::string key = line.substr(0, eq);
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) args.push_back(flag + "=" + line.substr(eq + 1));
    }
    return args;
}

struct GenArgs {
    std::string out;
    std::string manifest;
    int clusters = 6;
    int dims = 30;
    std::size_t n = 50000;
    double outliers = 0.01;
    double inner = 4.0;
    double outer = 6.0;
    double prune = 1.0;
    std::uint64_t seed = default_seed();
    bool noise_ramp = false;
    bool scaling = false;
};

int cmd_gen(const GenArgs& args) {
    if (args.noise_ramp) {
        auto files = generate_noise_ramp(args.seed, args.out);
        for (const auto& f : files)
            std::printf("%s rows=%zu outliers=%zu\n", f.csv_path.c_str(), f.rows, f.outliers);
        return kExitOk;
    }
    if (args.scaling) {
        auto files = generate_scaling_family(args.seed, args.out);
        for (const auto& f : files)
            std::printf("%s rows=%zu outliers=%zu\n", f.csv_path.c_str(), f.rows, f.outliers);
        return kExitOk;
    }
    GenSpec spec = make_gen_spec(args.clusters, args.dims, args.n, args.outliers, args.seed);
    spec.inner_radius_mult = args.inner;
    spec.outer_radius_mult = args.outer;
    spec.prune_radius_mult = args.prune;
    const std::string manifest =
        args.manifest.empty() ? args.out + ".manifest" : args.manifest;
    const GenResult res = generate(spec, args.out, manifest);
    std::printf("%s rows=%zu outliers=%zu\n", res.csv_path.c_str(), res.rows, res.outliers);
    return kExitOk;
}

struct TuneArgs {
    std::string data;
    bool label_column = false;
    std::string mode = "kdist";
    int k = 0;         // kdist neighbor count; min_pts = k + 1
    int min_pts = 0;   // 0 = floor(ln n)
    int minpts_upper = 0;
    double rate = 0.005;
    std::uint64_t seed = default_seed();
    std::string report = "tune_report.txt";
    std::string kdist_csv;
};

void write_tune_report(const TunedParams& tuned, const std::string& mode,
                       std::uint64_t seed, const std::string& path) {
    Report report;
    report.set("mode", mode);
    report.set("eps_sample", tuned.sample_params.eps);
    report.set("eps_original", tuned.original_params.eps);
    report.set("min_pts", tuned.sample_params.min_pts);
    report.set("fitness", tuned.fitness);
    report.set("aggregation", std::string("davies_bouldin+cs+noise_ratio"));
    report.set("seed", static_cast<std::size_t>(seed));
    report.write(path);
    std::fputs(report.to_string().c_str(), stdout);
}

int cmd_tune(const TuneArgs& args) {
    ChunkedDataset ds = ChunkedDataset::open(args.data, 65536, args.label_column);
    SampleSet sample = random_sample(ds, args.rate, args.seed);
    const int min_pts = args.min_pts > 0   ? args.min_pts
                        : args.k > 0       ? args.k + 1
                                           : default_min_pts(ds.rows());
    TunedParams tuned;
    if (args.mode == "kdist") {
        tuned = tune_by_kdist(sample, min_pts);
    } else if (args.mode == "pso") {
        const int upper =
            args.minpts_upper > 0 ? args.minpts_upper : std::max(2 * min_pts, 8);
        PsoConfig cfg = make_pso_config(sample, ds.rows(), upper, args.seed);
        tuned = pso_tune(sample, cfg);
    } else {
        throw InputError("unknown tune mode: " + args.mode);
    }
    if (!args.kdist_csv.empty()) {
        const int k = std::max(1, tuned.sample_params.min_pts - 1);
        write_kdist_csv(kdist_graph(sample.rows, std::min<int>(k, sample.rows.rows() - 1)),
                        args.kdist_csv);
    }
    write_tune_report(tuned, args.mode, args.seed, args.report);
    return kExitOk;
}

struct RunArgs {
    std::string data;
    bool label_column = false;
    double eta = 0.005;
    double lambda = 1.0;
    double alpha = 2.0;
    double beta = 2.0;
    int chunks = 10;
    std::size_t chunk_rows = 0;
    std::uint64_t seed = default_seed();
    double eps = 0.0;      // explicit override (sampling-space)
    int min_pts = 0;       // with --eps: explicit; alone: tuning MinPts
    std::string tune_mode = "kdist";
    int minpts_upper = 0;
    std::string scores_out = "scores.csv";
    std::string model_out = "model.json";
    std::string report = "run_report.txt";
    std::string chunk_log;
    std::string sample_indices_out;
    std::string retained_out;
    bool score_only = false;
    std::string model_in;
};

int cmd_run(const RunArgs& args) {
    std::size_t probe_chunk = args.chunk_rows > 0 ? args.chunk_rows : 65536;
    ChunkedDataset ds = ChunkedDataset::open(args.data, probe_chunk, args.label_column);
    std::size_t chunk_rows = args.chunk_rows;
    if (chunk_rows == 0) {
        if (args.chunks < 1) throw InputError("--chunks must be >= 1");
        chunk_rows = (ds.rows() + static_cast<std::size_t>(args.chunks) - 1) /
                     static_cast<std::size_t>(args.chunks);
    }
    ds = ChunkedDataset::open(args.data, chunk_rows, args.label_column);

    if (args.score_only) {
        if (args.model_in.empty())
            throw InputError("--score-only requires --model");
        const LoadedModel loaded = load_model(args.model_in);
        const ScoreTable table = score_only(ds, loaded.model);
        write_scores(table, args.scores_out);
        std::printf("scored %zu rows against %zu clusters -> %s\n", table.entries.size(),
                    loaded.model.clusters.size(), args.scores_out.c_str());
        return kExitOk;
    }

    RunOptions options;
    options.eta = args.eta;
    options.lambda = args.lambda;
    options.alpha = args.alpha;
    options.beta = args.beta;
    options.seed = args.seed;
    options.min_pts = args.min_pts;
    options.pso_minpts_upper = args.minpts_upper;
    options.tune_mode = args.tune_mode == "pso" ? TuneMode::kPso : TuneMode::kKdist;
    if (args.tune_mode != "pso" && args.tune_mode != "kdist")
        throw InputError("unknown tune mode: " + args.tune_mode);
    if (args.eps > 0.0) {
        const int mp = args.min_pts > 0 ? args.min_pts : default_min_pts(ds.rows());
        options.explicit_params = DbscanParams{args.eps, mp};
    }

    const RunResult result = run_sdcor(ds, options);

    write_scores(result.scores, args.scores_out);
    ModelMeta meta{args.eta, args.lambda, args.alpha, args.beta, args.seed};
    save_model(result.final_model, meta, args.model_out);
    if (!args.sample_indices_out.empty())
        write_sample_indices(result.sample_indices, args.sample_indices_out);
    if (!args.retained_out.empty()) {
        // End-of-pass temporary outliers, kept for diagnostics then dropped.
        std::FILE* f = std::fopen(args.retained_out.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + args.retained_out);
        for (Eigen::Index i = 0; i < result.final_retained.rows(); ++i) {
            for (Eigen::Index j = 0; j < result.final_retained.cols(); ++j)
                std::fprintf(f, j + 1 == result.final_retained.cols() ? "%.17g" : "%.17g,",
                             result.final_retained(i, j));
            std::fputc('\n', f);
        }
        std::fclose(f);
    }
    if (!args.chunk_log.empty()) {
        std::FILE* f = std::fopen(args.chunk_log.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + args.chunk_log);
        std::fputs("chunk,rows,absorbed,new_miniclusters,split_searches,retained_after\n", f);
        for (const ChunkCounters& c : result.log.per_chunk)
            std::fprintf(f, "%zu,%zu,%zu,%zu,%zu,%zu\n", c.chunk_index, c.rows, c.absorbed,
                         c.new_miniclusters, c.split_searches, c.retained_after);
        std::fclose(f);
    }

    Report report;
    report.set("n", ds.rows());
    report.set("p", ds.cols());
    report.set("eta", args.eta);
    report.set("lambda", args.lambda);
    report.set("alpha", args.alpha);
    report.set("beta", args.beta);
    report.set("chunk_rows", chunk_rows);
    report.set("chunks", ds.chunk_count());
    report.set("seed", static_cast<std::size_t>(args.seed));
    report.set("sampling_attempts", result.sampling_attempts);
    report.set("eps_sample", result.params.sample_params.eps);
    report.set("eps_original", result.params.original_params.eps);
    report.set("min_pts", result.params.sample_params.min_pts);
    report.set("fitness", result.params.fitness);
    report.set("t_initial", result.t_initial);
    report.set("miniclusters", result.minicluster_count);
    report.set("absorbed_total", result.log.absorbed_total);
    report.set("adopted_total", result.log.adopted_total);
    report.set("retained_final", static_cast<std::size_t>(result.final_retained.rows()));
    report.set("membership_checks", result.log.membership_checks);
    report.set("membership_violations", result.log.membership_violations);
    report.set("determinant_checks", result.log.determinant_checks);
    report.set("determinant_violations", result.log.determinant_violations);
    report.set("live_cells_high_water", result.log.live_cells_high_water);
    report.set("cell_bound", result.cell_bound);
    report.set("phase1_seconds", result.phase1_seconds);
    report.set("phase2_seconds", result.phase2_seconds);
    report.set("phase3_seconds", result.phase3_seconds);
    report.set("total_seconds",
               result.phase1_seconds + result.phase2_seconds + result.phase3_seconds);
    report.write(args.report);
    std::fputs(report.to_string().c_str(), stdout);
    return kExitOk;
}

struct EvalArgs {
    std::string scores;
    std::size_t top_o = 0;  // 0 = number of positive labels
    std::string report = "eval_report.txt";
    std::string roc_csv;
    std::string pr_csv;
};

int cmd_eval(const EvalArgs& args) {
    const ScoreTable table = read_scores(args.scores);
    LabeledScores ls;
    ls.scores.reserve(table.entries.size());
    ls.labels.reserve(table.entries.size());
    for (const ScoreEntry& e : table.entries) {
        if (!e.label)
            throw InputError("scores file has no labels; evaluation needs ground truth");
        ls.scores.push_back(e.score);
        ls.labels.push_back(*e.label);
    }
    const std::size_t positives =
        static_cast<std::size_t>(std::count(ls.labels.begin(), ls.labels.end(), 1));
    const std::size_t o = args.top_o > 0 ? args.top_o : positives;

    Report report;
    report.set("n", table.entries.size());
    report.set("o", o);
    report.set("auroc", auroc(ls));
    report.set("auprc", auprc(ls));

    PartitionPair pair;
    pair.predicted = extract_outlier_partition(table, o);
    pair.truth.assignments.resize(table.entries.size());
    for (const ScoreEntry& e : table.entries)
        pair.truth.assignments[e.row_index] = 1 + *e.label;
    pair.truth.k = 2;
    report.set("purity", purity(pair));
    report.set("mirkin", mirkin(pair));
    report.set("f_measure", f_measure(pair));
    report.set("entropy", entropy(pair));
    report.set("vi", variation_of_information(pair));
    report.set("auprc_integration", std::string("stepwise"));
    report.write(args.report);
    std::fputs(report.to_string().c_str(), stdout);

    if (!args.roc_csv.empty()) {
        std::FILE* f = std::fopen(args.roc_csv.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + args.roc_csv);
        std::fputs("fpr,tpr\n", f);
        for (const auto& [x, y] : roc_points(ls)) std::fprintf(f, "%.17g,%.17g\n", x, y);
        std::fclose(f);
    }
    if (!args.pr_csv.empty()) {
        std::FILE* f = std::fopen(args.pr_csv.c_str(), "w");
        if (!f) throw InputError("cannot open for writing: " + args.pr_csv);
        std::fputs("recall,precision\n", f);
        for (const auto& [x, y] : pr_points(ls)) std::fprintf(f, "%.17g,%.17g\n", x, y);
        std::fclose(f);
    }
    return kExitOk;
}

struct KdistArgs {
    std::string data;
    bool label_column = false;
    int k = 4;
    double rate = 1.0;
    std::uint64_t seed = default_seed();
    std::string out = "kdist.csv";
};

int cmd_kdist(const KdistArgs& args) {
    ChunkedDataset ds = ChunkedDataset::open(args.data, 65536, args.label_column);
    SampleSet sample = random_sample(ds, args.rate, args.seed);
    const KDistGraph graph = kdist_graph(sample.rows, args.k);
    write_kdist_csv(graph, args.out);
    const KneeResult knee = detect_knee(graph);
    std::printf("points=%zu k=%d knee_eps=%.17g knee_index=%zu%s\n", graph.values.size(),
                args.k, knee.eps, knee.index, knee.low_confidence ? " (low confidence)" : "");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Out-of-core density-based local outlier detection"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* app_gen = app.add_subcommand("gen", "Generate synthetic benchmark datasets");
    app_gen->add_option("--out", gen.out, "Output CSV path (or directory for families)")
        ->required();
    app_gen->add_option("--manifest", gen.manifest, "Manifest path");
    app_gen->add_option("--clusters", gen.clusters, "Gaussian cluster count");
    app_gen->add_option("--dims", gen.dims, "Dimensionality");
    app_gen->add_option("--n", gen.n, "Total rows (inliers + outliers)");
    app_gen->add_option("--outliers", gen.outliers, "Outlier fraction of total rows");
    app_gen->add_option("--inner", gen.inner, "Inner shell radius multiplier");
    app_gen->add_option("--outer", gen.outer, "Outer shell radius multiplier");
    app_gen->add_option("--prune", gen.prune, "Inlier prune radius multiplier");
    app_gen->add_option("--seed", gen.seed, "RNG seed");
    app_gen->add_flag("--noise-ramp", gen.noise_ramp, "Emit the 11-member noise ramp");
    app_gen->add_flag("--scaling", gen.scaling, "Emit the 10-member scaling family");

    TuneArgs tune;
    CLI::App* app_tune = app.add_subcommand("tune", "Find DBSCAN parameters on a sample");
    app_tune->add_option("--data", tune.data, "Dataset CSV")->required();
    app_tune->add_flag("--label-column", tune.label_column, "Last column is a 0/1 label");
    app_tune->add_option("--mode", tune.mode, "kdist or pso");
    app_tune->add_option("--k", tune.k, "k-dist neighbor count (MinPts = k + 1)");
    app_tune->add_option("--min-pts", tune.min_pts, "MinPts (overrides --k)");
    app_tune->add_option("--minpts-upper", tune.minpts_upper, "PSO MinPts upper bound");
    app_tune->add_option("--rate", tune.rate, "Sampling rate");
    app_tune->add_option("--seed", tune.seed, "RNG seed");
    app_tune->add_option("--report", tune.report, "Report path");
    app_tune->add_option("--kdist-csv", tune.kdist_csv, "Also dump the sorted graph");

    RunArgs run;
    CLI::App* app_run = app.add_subcommand("run", "Run the full pipeline");
    app_run->add_option("--data", run.data, "Dataset CSV")->required();
    app_run->add_flag("--label-column", run.label_column, "Last column is a 0/1 label");
    app_run->add_option("--eta", run.eta, "Random sampling rate");
    app_run->add_option("--lambda", run.lambda, "PC total variance share");
    app_run->add_option("--alpha", run.alpha, "Membership threshold");
    app_run->add_option("--beta", run.beta, "Pruning threshold");
    app_run->add_option("--chunks", run.chunks, "Number of chunks (chunk_rows = ceil(n/N))");
    app_run->add_option("--chunk-rows", run.chunk_rows, "Rows per chunk (overrides --chunks)");
    app_run->add_option("--seed", run.seed, "RNG seed");
    app_run->add_option("--eps", run.eps, "Explicit sampling-space eps (skips tuning)");
    app_run->add_option("--min-pts", run.min_pts, "MinPts");
    app_run->add_option("--tune-mode", run.tune_mode, "kdist or pso");
    app_run->add_option("--minpts-upper", run.minpts_upper, "PSO MinPts upper bound");
    app_run->add_option("--scores-out", run.scores_out, "Score table path");
    app_run->add_option("--model-out", run.model_out, "Model JSON path");
    app_run->add_option("--report", run.report, "Run report path");
    app_run->add_option("--chunk-log", run.chunk_log, "Per-chunk counters CSV");
    app_run->add_option("--sample-indices-out", run.sample_indices_out,
                        "Sample index audit file");
    app_run->add_option("--retained-out", run.retained_out,
                        "End-of-pass retained rows (temporary outliers)");
    app_run->add_flag("--score-only", run.score_only, "Only run the scoring pass");
    app_run->add_option("--model", run.model_in, "Model JSON for --score-only");

    EvalArgs eval;
    CLI::App* app_eval = app.add_subcommand("eval", "Evaluate a labeled score table");
    app_eval->add_option("--scores", eval.scores, "Score table CSV")->required();
    app_eval->add_option("--top-o", eval.top_o, "Anomaly cluster size (default: #positives)");
    app_eval->add_option("--report", eval.report, "Report path");
    app_eval->add_option("--roc-csv", eval.roc_csv, "ROC points CSV");
    app_eval->add_option("--pr-csv", eval.pr_csv, "PR points CSV");

    KdistArgs kdist;
    CLI::App* app_kd = app.add_subcommand("kdist", "Dump a sorted k-distance graph");
    app_kd->add_option("--data", kdist.data, "Dataset CSV")->required();
    app_kd->add_flag("--label-column", kdist.label_column, "Last column is a 0/1 label");
    app_kd->add_option("--k", kdist.k, "Neighbor count");
    app_kd->add_option("--rate", kdist.rate, "Sampling rate");
    app_kd->add_option("--seed", kdist.seed, "RNG seed");
    app_kd->add_option("--out", kdist.out, "Graph CSV path");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes reversed args
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    } catch (const sdcor::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }

    try {
        if (app_gen->parsed()) return cmd_gen(gen);
        if (app_tune->parsed()) return cmd_tune(tune);
        if (app_run->parsed()) return cmd_run(run);
        if (app_eval->parsed()) return cmd_eval(eval);
        if (app_kd->parsed()) return cmd_kdist(kdist);
    } catch (const sdcor::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const sdcor::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const sdcor::InvariantError& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvariant;
    }
    return kExitOk;
}
