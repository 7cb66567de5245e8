#include "entcop/loop.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "entcop/tptp.hpp"

namespace entcop {

namespace fs = std::filesystem;

std::string problem_name(const fs::path& path) { return path.stem().string(); }

ProblemEntry load_problem(const fs::path& path, const ClausifyOptions& options) {
    ProblemEntry e;
    e.name = problem_name(path);
    e.path = path;
    try {
        e.matrix = std::make_shared<const Matrix>(clausify(tptp::parse_problem_file(path), options));
    } catch (const std::exception& ex) {
        e.error = ex.what();
    }
    return e;
}

std::vector<fs::path> collect_problem_files(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(in)) {
                if (entry.is_regular_file() && entry.path().extension() == ".p") found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(in);
        }
    }
    return out;
}

std::vector<ProblemEntry> load_problems(const std::vector<fs::path>& inputs, const ClausifyOptions& options) {
    std::vector<ProblemEntry> out;
    for (const auto& p : collect_problem_files(inputs)) out.push_back(load_problem(p, options));
    return out;
}

std::vector<ProblemOutcome> prove_all(const std::vector<ProblemEntry>& problems, const Predictor& predictor,
                                      const SearchLimits& limits, const SearchOptions& options, int workers) {
    validate(limits);
    std::vector<ProblemOutcome> out(problems.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < problems.size(); i = next++) {
            const ProblemEntry& p = problems[i];
            ProblemOutcome& o = out[i];
            o.name = p.name;
            if (!p.matrix) {
                o.error = p.error.value_or("problem not loaded");
                continue;
            }
            try {
                o.result = prove(p.matrix, predictor, limits, options);
            } catch (const std::exception& ex) {
                o.error = ex.what();
            }
        }
    };
    const int n = std::clamp(workers, 1, std::max(1, static_cast<int>(problems.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(work);
    }
    return out;
}

IterationStats summarize(int iteration, const std::vector<ProblemOutcome>& outcomes) {
    IterationStats s;
    s.iteration = iteration;
    PolicyStats merged;
    for (const auto& o : outcomes) {
        if (!o.result) continue;
        s.solved += o.solved();
        s.inferences_total += o.result->inferences;
        merged.merge(o.result->policy_stats);
    }
    s.mean_entropy = merged.mean_entropy();
    s.mean_normalized_entropy = merged.mean_normalized_entropy();
    return s;
}

// -------------------------------------------------------------- Stats CSV

void write_stats_header(std::ostream& out) {
    out << "iteration,solved,mean_entropy,mean_normalized_entropy,inferences_total\n";
}

void write_stats_row(std::ostream& out, const IterationStats& r) {
    std::ostringstream line;
    line << std::fixed << std::setprecision(6);
    line << r.iteration << ',' << r.solved << ',' << r.mean_entropy << ',' << r.mean_normalized_entropy << ','
         << r.inferences_total << '\n';
    out << line.str();
}

void write_stats_csv(std::ostream& out, const std::vector<IterationStats>& rows) {
    write_stats_header(out);
    for (const auto& r : rows) write_stats_row(out, r);
}

std::vector<IterationStats> read_stats_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "iteration,solved,mean_entropy,mean_normalized_entropy,inferences_total") {
        throw std::runtime_error("bad statistics header");
    }
    std::vector<IterationStats> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        IterationStats r;
        if (!(fields >> r.iteration >> r.solved >> r.mean_entropy >> r.mean_normalized_entropy >> r.inferences_total)) {
            throw std::runtime_error("bad statistics row '" + line + "'");
        }
        out.push_back(r);
    }
    return out;
}

// ------------------------------------------------------------------- Loop

void validate(const LoopConfig& c) {
    if (c.iterations < 1) throw std::invalid_argument("the loop needs at least one iteration");
    if (c.workers < 1) throw std::invalid_argument("worker count must be positive");
    validate(c.limits);
    validate(c.train);
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
    // splitmix64 finalizer over the pair.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(iteration + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

constexpr const char* kCheckpointMagic = "entcop-checkpoint";
constexpr int kCheckpointVersion = 1;

// Everything that influences the loop's results, so a checkpoint is only
// resumed under the configuration that produced it.
std::string fingerprint(const LoopConfig& c, const std::vector<ProblemEntry>& problems) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "limits " << c.limits.inference_limit << ' ' << c.limits.bigstep_frequency << ' ' << c.limits.cp;
    os << " tableau " << c.search.tableau.paramodulation << ' ' << c.search.tableau.path_limit;
    os << " train " << c.train.alpha << ' ' << c.train.learning_rate << ' ' << c.train.decay << ' ' << c.train.epochs << ' '
       << c.train.batch_size << ' ' << c.train.dim << ' ' << c.train.seed << ' ' << c.train.temperature;
    os << " problems";
    for (const auto& p : problems) os << ' ' << p.name;
    return os.str();
}

struct Checkpoint {
    int completed = 0;
    std::string fingerprint;
};

std::optional<Checkpoint> read_checkpoint(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string magic, key;
    int version = 0;
    Checkpoint c;
    if (!(in >> magic >> version) || magic != kCheckpointMagic || version != kCheckpointVersion) {
        throw std::runtime_error("bad checkpoint file '" + path.string() + "'");
    }
    if (!(in >> key >> c.completed) || key != "completed") throw std::runtime_error("bad checkpoint: completed");
    in >> std::ws;
    if (!std::getline(in, c.fingerprint) || c.fingerprint.rfind("config ", 0) != 0) {
        throw std::runtime_error("bad checkpoint: config");
    }
    c.fingerprint.erase(0, 7);
    return c;
}

void write_atomically(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

fs::path examples_path(const fs::path& dir, int iteration) {
    return dir / ("examples_" + std::to_string(iteration) + ".jsonl");
}

}  // namespace

LoopResult run_loop(const std::vector<ProblemEntry>& problems, const LoopConfig& config,
                    const LoopObserver& observer) {
    validate(config);
    LoopResult result;
    std::vector<TrainingExample> data;
    int first = 0;
    const std::string fp = fingerprint(config, problems);

    if (config.out_dir) {
        fs::create_directories(*config.out_dir);
        if (auto cp = read_checkpoint(*config.out_dir / "checkpoint")) {
            if (cp->fingerprint != fp) {
                throw std::runtime_error("checkpoint in '" + config.out_dir->string() +
                                         "' was written under a different configuration");
            }
            first = std::min(cp->completed, config.iterations);
            std::ifstream stats_in(*config.out_dir / "stats.csv");
            if (!stats_in) throw std::runtime_error("checkpoint present but stats.csv missing");
            result.stats = read_stats_csv(stats_in);
            if (static_cast<int>(result.stats.size()) < first) throw std::runtime_error("stats.csv shorter than checkpoint");
            result.stats.resize(static_cast<std::size_t>(first));
            for (int k = 0; k < first; ++k) {
                auto ex = read_examples(examples_path(*config.out_dir, k));
                data.insert(data.end(), ex.begin(), ex.end());
            }
            result.resumed_iterations = first;
        }
    }

    for (int k = first; k < config.iterations; ++k) {
        std::vector<ProblemOutcome> outcomes;
        std::optional<TrainedModels> models;
        if (k == 0 || data.empty()) {
            UniformPredictor uniform;
            outcomes = prove_all(problems, uniform, config.limits, config.search, config.workers);
        } else {
            TrainConfig tc = config.train;
            tc.seed = iteration_seed(config.train.seed, k);
            models = train(data, tc);
            LinearPredictor predictor(models->policy, models->value);
            outcomes = prove_all(problems, predictor, config.limits, config.search, config.workers);
        }

        std::vector<TrainingExample> fresh;
        for (const auto& o : outcomes) {
            if (!o.result) continue;
            auto ex = extract_training_data(*o.result, o.name, k, config.train.dim);
            fresh.insert(fresh.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
        }
        IterationStats stats = summarize(k, outcomes);
        result.stats.push_back(stats);

        if (config.out_dir) {
            const fs::path& dir = *config.out_dir;
            write_examples(examples_path(dir, k), fresh);
            if (models) {
                save_model(models->policy, dir / ("policy_" + std::to_string(k) + ".model"));
                save_model(models->value, dir / ("value_" + std::to_string(k) + ".model"));
            }
            std::ostringstream stats_text;
            write_stats_csv(stats_text, result.stats);
            write_atomically(dir / "stats.csv", stats_text.str());
            std::ostringstream cp;
            cp << kCheckpointMagic << ' ' << kCheckpointVersion << "\ncompleted " << k + 1 << "\nconfig " << fp << '\n';
            write_atomically(dir / "checkpoint", cp.str());
        }

        data.insert(data.end(), std::make_move_iterator(fresh.begin()), std::make_move_iterator(fresh.end()));
        if (observer) observer(stats);
        result.last_outcomes = std::move(outcomes);
        result.last_models = std::move(models);
    }
    return result;
}

}  // namespace entcop
