#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "entcop/analysis.hpp"
#include "entcop/loop.hpp"
#include "entcop/tptp.hpp"

namespace entcop::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kCorpusEnv = "ENTCOP_CORPUS";

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct SearchFlags {
    int inference_limit = 20000;
    int bigstep_frequency = 200;
    double cp = 1.0;
    double wall_clock = 300.0;
    bool no_paramodulation = false;
    int path_limit = 100;

    void add(CLI::App& app) {
        app.add_option("--inference-limit", inference_limit, "Inferences per problem")->capture_default_str();
        app.add_option("--bigstep-frequency", bigstep_frequency, "Playouts between bigsteps")->capture_default_str();
        app.add_option("--cp", cp, "UCT exploration constant")->capture_default_str();
        app.add_option("--wall-clock", wall_clock, "Seconds per problem")->capture_default_str();
        app.add_flag("--no-paramodulation", no_paramodulation, "Disable the paramodulation rule (default: off)")
            ->capture_default_str();
        app.add_option("--path-limit", path_limit, "Longest active path with legal actions")->capture_default_str();
    }
    SearchLimits limits() const {
        SearchLimits l;
        l.inference_limit = inference_limit;
        l.bigstep_frequency = bigstep_frequency;
        l.cp = cp;
        l.wall_clock_seconds = wall_clock;
        validate(l);
        return l;
    }
    TableauOptions tableau() const {
        if (path_limit < 1) throw std::invalid_argument("path limit must be positive");
        return TableauOptions{!no_paramodulation, path_limit};
    }
};

struct PredictorFlags {
    std::string kind = "uniform";
    std::string policy_model;
    std::string value_model;
    double temperature = 0.0;
    double hstar = 0.8;
    std::uint64_t seed = 1;

    void add(CLI::App& app, const std::string& prefix = "") {
        const std::string p = prefix.empty() ? "--" : "--" + prefix + "-";
        app.add_option(p + "predictor", kind, "Predictor: uniform, linear or fixed-entropy")
            ->check(CLI::IsMember({"uniform", "linear", "fixed-entropy"}))
            ->capture_default_str();
        app.add_option(p + "policy-model", policy_model, "Policy model file (linear; ordering for fixed-entropy) (default: none)")
            ->capture_default_str();
        app.add_option(p + "value-model", value_model, "Value model file (default: none)")->capture_default_str();
        app.add_option(p + "temperature", temperature, "Softmax temperature override (0 keeps the model's)")
            ->capture_default_str();
        app.add_option(p + "hstar", hstar, "Target normalized entropy for fixed-entropy")->capture_default_str();
        if (prefix.empty()) app.add_option("--seed", seed, "Global seed")->capture_default_str();
    }

    std::shared_ptr<const Predictor> make() const {
        std::optional<LinearModel> policy, value;
        if (!policy_model.empty()) policy = load_model(fs::path(policy_model));
        if (!value_model.empty()) value = load_model(fs::path(value_model));
        if (temperature < 0.0) throw std::invalid_argument("temperature must be positive");
        std::shared_ptr<const Predictor> linear;
        if (policy || value) {
            LinearPredictor lp(policy, value);
            linear = std::make_shared<LinearPredictor>(temperature > 0.0 ? lp.with_temperature(temperature) : lp);
        }
        if (kind == "uniform") return std::make_shared<UniformPredictor>();
        if (kind == "linear") {
            if (!linear) throw std::invalid_argument("--predictor linear needs --policy-model or --value-model");
            return linear;
        }
        std::shared_ptr<const Predictor> ordering = linear ? linear : std::make_shared<UniformPredictor>();
        return std::make_shared<FixedEntropyPredictor>(ordering, hstar, seed);
    }
};

struct TrainFlags {
    double alpha = 0.7;
    std::string alpha_sweep;
    double learning_rate = 0.5;
    double lr_decay = 0.5;
    int epochs = 20;
    int batch_size = 16;
    std::uint32_t dim = kDefaultFeatureDim;

    void add(CLI::App& app) {
        app.add_option("--alpha", alpha, "Entropy coefficient")->capture_default_str();
        app.add_option("--alpha-sweep", alpha_sweep, "Comma-separated entropy coefficients; one loop each (default: none, use --alpha)")
            ->capture_default_str();
        app.add_option("--learning-rate", learning_rate, "SGD learning rate")->capture_default_str();
        app.add_option("--lr-decay", lr_decay, "Step in epoch e is learning-rate / (1 + lr-decay * e)")
            ->capture_default_str();
        app.add_option("--epochs", epochs, "Training epochs per iteration")->capture_default_str();
        app.add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str();
        app.add_option("--dim", dim, "Feature hash dimension")->capture_default_str();
    }
};

std::vector<fs::path> problem_inputs(const std::vector<std::string>& given) {
    std::vector<fs::path> inputs(given.begin(), given.end());
    if (inputs.empty()) {
        const char* env = std::getenv(kCorpusEnv);
        if (env == nullptr || *env == '\0') {
            throw HarnessError(std::string("no problems given and ") + kCorpusEnv + " is not set");
        }
        inputs.emplace_back(env);
    }
    for (const auto& p : inputs) {
        if (!fs::exists(p)) throw HarnessError("no such file or directory: '" + p.string() + "'");
    }
    auto files = collect_problem_files(inputs);
    if (files.empty()) throw HarnessError("no problem files found");
    return files;
}

std::string compiler_id() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

void write_manifest(const fs::path& dir, const std::string& command, const CLI::App& sub,
                    const std::vector<fs::path>& problems) {
    std::ofstream out(dir / "manifest.txt");
    if (!out) throw HarnessError("cannot write manifest in '" + dir.string() + "'");
    // Metadata is commented out so the manifest doubles as a config file.
    out << "# entcop run manifest\n";
    out << "# entcop_version " << kVersion << '\n';
    out << "# compiler " << compiler_id() << '\n';
    out << "# command " << command << '\n';
    out << "# problem_count " << problems.size() << '\n';
    for (const auto& p : problems) out << "# problem " << p.string() << '\n';
    out << "# configuration\n";
    out << sub.config_to_str(true, false);
}

fs::path prepare_out(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string alpha_label(double alpha) {
    std::ostringstream os;
    os << alpha;
    return os.str();
}

void write_trace(const fs::path& path, const std::string& problem, const std::vector<Action>& actions) {
    std::ofstream out(path);
    if (!out) throw HarnessError("cannot write '" + path.string() + "'");
    out << "problem " << problem << '\n';
    for (const auto& a : actions) out << encode_action(a) << '\n';
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

// CLI11 only reads config files on the top-level app, so subcommands parse
// their own. Options already given on the command line are left alone.
void apply_config_file(CLI::App& sub, const std::string& file) {
    std::ifstream in(file);
    if (!in) throw HarnessError("cannot open config file '" + file + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw HarnessError(file + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        // A manifest names the config file it was run with; nested files are not followed.
        if (key == "config") continue;
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt) opt = sub.get_option_no_throw(key);
        if (!opt) throw HarnessError(file + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        std::vector<std::string> values;
        if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
            std::stringstream items(value.substr(1, value.size() - 2));
            std::string item;
            while (std::getline(items, item, ',')) values.push_back(unquote(trim(item)));
        } else {
            values.push_back(unquote(value));
        }
        opt->add_result(values);
        opt->run_callback();
    }
}

// ------------------------------------------------------------------ prove

struct ProveCommand {
    std::vector<std::string> problems;
    std::string out_dir = "entcop-out";
    int workers = default_workers();
    SearchFlags search;
    PredictorFlags predictor;

    void add(CLI::App& app) {
        app.add_option("problems", problems, "Problem files or directories (default: $ENTCOP_CORPUS)");
        app.add_option("--out", out_dir, "Output directory")->capture_default_str();
        app.add_option("--workers", workers, "Worker threads")->capture_default_str();
        search.add(app);
        predictor.add(app);
    }

    int run(const CLI::App& sub, std::ostream& out) {
        auto files = problem_inputs(problems);
        SearchOptions so;
        so.tableau = search.tableau();
        auto limits = search.limits();
        auto pred = predictor.make();
        if (workers < 1) throw std::invalid_argument("worker count must be positive");

        fs::path dir = prepare_out(out_dir);
        fs::create_directories(dir / "proofs");
        fs::create_directories(dir / "training");
        write_manifest(dir, "prove", sub, files);

        ClausifyOptions co;
        std::vector<ProblemEntry> entries;
        for (const auto& f : files) entries.push_back(load_problem(f, co));
        auto outcomes = prove_all(entries, *pred, limits, so, workers);

        std::ofstream records(dir / "results.tsv");
        records << "problem\tstatus\tinferences\tplayouts\tbigsteps\ttrace\n";
        int solved = 0;
        for (const auto& o : outcomes) {
            if (!o.result) {
                records << o.name << "\terror\t0\t0\t0\t-\t" << o.error.value_or("") << '\n';
                out << o.name << ": error: " << o.error.value_or("") << '\n';
                continue;
            }
            const ProofResult& r = *o.result;
            std::string trace = "-";
            if (r.proof) {
                ++solved;
                trace = "proofs/" + o.name + ".trace";
                write_trace(dir / trace, o.name, *r.proof);
            }
            write_examples(dir / "training" / (o.name + ".jsonl"), extract_training_data(r, o.name, 0));
            records << o.name << '\t' << to_string(r.status) << '\t' << r.inferences << '\t' << r.playouts << '\t'
                    << r.bigsteps << '\t' << trace << '\n';
            out << o.name << ": " << to_string(r.status) << " (" << r.inferences << " inferences)\n";
        }
        out << "solved " << solved << " of " << outcomes.size() << '\n';
        return kExitOk;
    }
};

// ------------------------------------------------------------------- loop

struct LoopCommand {
    std::vector<std::string> problems;
    std::string out_dir = "entcop-out";
    int workers = default_workers();
    int iterations = 3;
    std::uint64_t seed = 1;
    SearchFlags search;
    TrainFlags train;

    void add(CLI::App& app) {
        app.add_option("problems", problems, "Problem files or directories (default: $ENTCOP_CORPUS)");
        app.add_option("--out", out_dir, "Output directory")->capture_default_str();
        app.add_option("--workers", workers, "Worker threads")->capture_default_str();
        app.add_option("--iterations", iterations, "Loop iterations K (iteration 0 is unguided)")
            ->capture_default_str();
        app.add_option("--seed", seed, "Global seed")->capture_default_str();
        search.add(app);
        train.add(app);
    }

    LoopConfig config(double alpha, const fs::path& dir) const {
        LoopConfig c;
        c.iterations = iterations;
        c.limits = search.limits();
        c.search.tableau = search.tableau();
        c.train.alpha = alpha;
        c.train.learning_rate = train.learning_rate;
        c.train.decay = train.lr_decay;
        c.train.epochs = train.epochs;
        c.train.batch_size = train.batch_size;
        c.train.dim = train.dim;
        c.train.seed = seed;
        c.workers = workers;
        c.out_dir = dir;
        validate(c);
        return c;
    }

    int run(const CLI::App& sub, std::ostream& out) {
        auto files = problem_inputs(problems);
        const bool sweep = !train.alpha_sweep.empty();
        std::vector<double> alphas = sweep ? parse_list(train.alpha_sweep) : std::vector<double>{train.alpha};
        // Validate every setting before any work is done.
        for (double a : alphas) (void)config(a, out_dir);
        fs::path dir = prepare_out(out_dir);
        write_manifest(dir, "loop", sub, files);

        auto entries = load_problems(files);
        std::vector<SweepRow> rows;
        for (double a : alphas) {
            fs::path run_dir = sweep ? dir / ("alpha_" + alpha_label(a)) : dir;
            auto result = run_loop(entries, config(a, run_dir), [&](const IterationStats& s) {
                out << "alpha " << alpha_label(a) << " iteration " << s.iteration << ": solved " << s.solved
                    << ", mean entropy " << std::fixed << std::setprecision(4) << s.mean_entropy
                    << std::defaultfloat << '\n';
            });
            if (result.resumed_iterations > 0) {
                out << "alpha " << alpha_label(a) << ": resumed after " << result.resumed_iterations
                    << " completed iterations\n";
            }
            rows.push_back(SweepRow{"alpha=" + alpha_label(a), a, result.stats});
        }
        if (sweep) {
            std::ofstream csv(dir / "sweep.csv");
            write_sweep_csv(csv, rows, iterations);
        }
        return kExitOk;
    }
};

// ---------------------------------------------------------------- harvest

struct HarvestCommand {
    std::vector<std::string> problems;
    std::string bank = "statebank.txt";
    int workers = default_workers();
    std::size_t cap = 200;
    SearchFlags search;

    void add(CLI::App& app) {
        app.add_option("problems", problems, "Problem files or directories (default: $ENTCOP_CORPUS)");
        app.add_option("--bank", bank, "State bank file to write")->capture_default_str();
        app.add_option("--workers", workers, "Worker threads")->capture_default_str();
        app.add_option("--cap", cap, "States kept per problem")->capture_default_str();
        search.add(app);
    }

    int run(std::ostream& out) {
        auto files = problem_inputs(problems);
        HarvestOptions ho;
        ho.limits = search.limits();
        ho.tableau = search.tableau();
        ho.per_problem_cap = cap;
        ho.workers = workers;
        StateBank b = harvest_states(load_problems(files), ho);
        fs::path path(bank);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        write_state_bank(path, b);
        out << "harvested " << b.states.size() << " states into " << bank << '\n';
        return kExitOk;
    }
};

// ---------------------------------------------------------------- analyze

struct AnalyzeCommand {
    std::vector<std::string> problems;
    std::string bank = "statebank.txt";
    std::string out_csv;
    std::string label = "a-vs-b";
    SearchFlags search;
    PredictorFlags a, b;

    void add(CLI::App& app) {
        app.add_option("problems", problems, "Problem files or directories (default: $ENTCOP_CORPUS)");
        app.add_option("--bank", bank, "State bank produced by `entcop harvest`")->capture_default_str();
        app.add_option("--csv", out_csv, "Write the report here (default: stdout)")->capture_default_str();
        app.add_option("--label", label, "Row label")->capture_default_str();
        search.add(app);
        a.add(app, "a");
        b.add(app, "b");
        app.add_option("--seed", a.seed, "Seed for fixed-entropy vectors")->capture_default_str();
    }

    int run(std::ostream& out) {
        if (!fs::exists(bank)) {
            throw HarnessError("state bank '" + bank + "' not found; run `entcop harvest --bank " + bank +
                               "` first");
        }
        b.seed = a.seed;
        StateBank sb = read_state_bank(fs::path(bank));
        std::map<std::string, std::shared_ptr<const Matrix>> matrices;
        for (const auto& e : load_problems(problem_inputs(problems))) {
            if (e.matrix) matrices.emplace(e.name, e.matrix);
        }
        auto pa = a.make();
        auto pb = b.make();
        AgreementRow row{label, std::nullopt, compare(*pa, *pb, sb, matrices, search.tableau())};
        if (out_csv.empty()) {
            write_agreement_csv(out, std::span<const AgreementRow>(&row, 1));
        } else {
            std::ofstream f(out_csv);
            if (!f) throw HarnessError("cannot write '" + out_csv + "'");
            write_agreement_csv(f, std::span<const AgreementRow>(&row, 1));
        }
        return kExitOk;
    }
};

// ------------------------------------------------------------------ check

struct CheckCommand {
    std::string problem;
    std::string trace;
    bool no_paramodulation = false;
    int path_limit = 100;

    void add(CLI::App& app) {
        app.add_option("problem", problem, "Problem file")->required();
        app.add_option("trace", trace, "Proof trace file")->required();
        app.add_flag("--no-paramodulation", no_paramodulation, "Disable the paramodulation rule (default: off)")
            ->capture_default_str();
        app.add_option("--path-limit", path_limit, "Longest active path with legal actions")->capture_default_str();
    }

    int run(std::ostream& out, std::ostream& err) {
        std::shared_ptr<const Matrix> matrix;
        std::vector<Action> actions;
        std::string name;
        try {
            matrix = std::make_shared<const Matrix>(clausify(tptp::parse_problem_file(problem)));
            std::ifstream in(trace);
            if (!in) throw std::runtime_error("cannot open trace '" + trace + "'");
            std::string line;
            int lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                if (line.rfind("problem ", 0) == 0) {
                    name = line.substr(8);
                    continue;
                }
                try {
                    actions.push_back(decode_action(line));
                } catch (const std::exception& e) {
                    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
                }
            }
        } catch (const std::exception& e) {
            err << "parse error: " << e.what() << '\n';
            return kExitError;
        }
        if (!name.empty() && name != problem_name(problem)) {
            out << "warning: trace was recorded for problem '" << name << "'\n";
        }
        ProofCheck c = check_proof(matrix, actions, TableauOptions{!no_paramodulation, path_limit});
        if (c.valid) {
            out << "valid proof (" << actions.size() << " steps)\n";
            return kExitOk;
        }
        out << "invalid proof: step " << c.failed_step.value_or(0) << ": " << c.reason << '\n';
        return kExitInvalid;
    }
};

// ----------------------------------------------------------------- vector

struct VectorCommand {
    std::size_t n = 10;
    double hstar = 0.8;
    std::uint64_t seed = 1;

    void add(CLI::App& app) {
        app.add_option("--n", n, "Vector length")->capture_default_str();
        app.add_option("--hstar", hstar, "Target normalized entropy")->capture_default_str();
        app.add_option("--seed", seed, "Seed")->capture_default_str();
    }

    int run(std::ostream& out) {
        auto p = make_fixed_entropy_vector(n, hstar, seed);
        out << std::setprecision(17);
        for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
        out << '\n' << "normalized_entropy " << normalized_entropy(p) << '\n';
        return kExitOk;
    }
};

// ------------------------------------------------------------------- dump

struct DumpCommand {
    std::string problem;

    void add(CLI::App& app) { app.add_option("problem", problem, "Problem file")->required(); }

    int run(std::ostream& out, std::ostream& err) {
        try {
            out << dump_matrix(clausify(tptp::parse_problem_file(problem)));
        } catch (const tptp::ParseError& e) {
            err << "parse error: " << e.what() << '\n';
            return kExitError;
        }
        return kExitOk;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entropy-shaped MCTS connection-tableau prover", "entcop"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    ProveCommand prove_cmd;
    LoopCommand loop_cmd;
    HarvestCommand harvest_cmd;
    AnalyzeCommand analyze_cmd;
    CheckCommand check_cmd;
    VectorCommand vector_cmd;
    DumpCommand dump_cmd;

    std::map<CLI::App*, std::string> config_files;
    auto config_opt = [&](CLI::App* sub) {
        sub->add_option("--config", config_files[sub], "key=value configuration file; flags take precedence (default: none)");
    };
    auto* prove = app.add_subcommand("prove", "Prove problems and write result records and proof traces");
    prove_cmd.add(*prove);
    config_opt(prove);
    auto* loop = app.add_subcommand("loop", "Run the prove/learn loop and write per-iteration statistics");
    loop_cmd.add(*loop);
    config_opt(loop);
    auto* harvest = app.add_subcommand("harvest", "Collect a state bank from unguided runs");
    harvest_cmd.add(*harvest);
    config_opt(harvest);
    auto* analyze = app.add_subcommand("analyze", "Compare two predictors on a state bank");
    analyze_cmd.add(*analyze);
    config_opt(analyze);
    auto* check = app.add_subcommand("check", "Replay a proof trace against a problem");
    check_cmd.add(*check);
    auto* vector = app.add_subcommand("vector", "Print a fixed-entropy probability vector");
    vector_cmd.add(*vector);
    auto* dump = app.add_subcommand("dump", "Print the clausified matrix of a problem");
    dump_cmd.add(*dump);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    try {
        for (auto& [sub, file] : config_files) {
            if (*sub && !file.empty()) apply_config_file(*sub, file);
        }
        if (*prove) return prove_cmd.run(*prove, out);
        if (*loop) return loop_cmd.run(*loop, out);
        if (*harvest) return harvest_cmd.run(out);
        if (*analyze) return analyze_cmd.run(out);
        if (*check) return check_cmd.run(out, err);
        if (*vector) return vector_cmd.run(out);
        if (*dump) return dump_cmd.run(out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace entcop::cli
