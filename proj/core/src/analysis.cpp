#include "entcop/analysis.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace entcop {

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("KL divergence of distributions with different lengths");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(sum, 0.0);
}

std::size_t argmax_first(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return best;
}

// ---------------------------------------------------------------- StateBank

namespace {

constexpr const char* kBankHeader = "entcop-statebank v1";

std::string encode_path(const std::vector<Action>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += ';';
        out += encode_action(path[i]);
    }
    return out;
}

std::vector<Action> decode_path(const std::string& text) {
    std::vector<Action> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        out.push_back(decode_action(std::string_view(text).substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

}  // namespace

void write_state_bank(std::ostream& out, const StateBank& bank) {
    out << kBankHeader << '\n';
    for (const auto& s : bank.states) out << s.problem << '\t' << s.action_count << '\t' << encode_path(s.path) << '\n';
}

void write_state_bank(const std::filesystem::path& path, const StateBank& bank) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write state bank '" + path.string() + "'");
    write_state_bank(out, bank);
}

StateBank read_state_bank(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kBankHeader) throw std::runtime_error("not a state bank file");
    StateBank bank;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw std::runtime_error("state bank line " + std::to_string(lineno) + ": bad record");
        BankState s;
        s.problem = line.substr(0, t1);
        try {
            s.action_count = std::stoul(line.substr(t1 + 1, t2 - t1 - 1));
            s.path = decode_path(line.substr(t2 + 1));
        } catch (const std::exception& e) {
            throw std::runtime_error("state bank line " + std::to_string(lineno) + ": " + e.what());
        }
        bank.states.push_back(std::move(s));
    }
    return bank;
}

StateBank read_state_bank(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state bank '" + path.string() + "'");
    return read_state_bank(in);
}

StateBank harvest_states(const std::vector<ProblemEntry>& problems, const HarvestOptions& options) {
    SearchOptions so;
    so.tableau = options.tableau;
    so.record_expanded = true;
    so.max_expanded_records = options.per_problem_cap;
    UniformPredictor uniform;
    auto outcomes = prove_all(problems, uniform, options.limits, so, options.workers);

    StateBank bank;
    for (const auto& o : outcomes) {
        if (!o.result) continue;
        std::set<std::string> seen;
        for (const auto& rec : o.result->expanded) {
            if (rec.action_count < 2) continue;
            if (!seen.insert(encode_path(rec.path)).second) continue;
            bank.states.push_back(BankState{o.name, rec.path, rec.action_count});
        }
    }
    return bank;
}

AgreementReport compare(const Predictor& a, const Predictor& b, const StateBank& bank,
                        const std::map<std::string, std::shared_ptr<const Matrix>>& problems,
                        const TableauOptions& options) {
    AgreementReport r;
    std::size_t best = 0, order = 0, finite_ab = 0, finite_ba = 0;
    double kl_ab = 0.0, kl_ba = 0.0, ent_a = 0.0, ent_b = 0.0, nent_a = 0.0, nent_b = 0.0;
    for (const auto& s : bank.states) {
        auto it = problems.find(s.problem);
        if (it == problems.end()) throw std::runtime_error("state bank refers to unknown problem '" + s.problem + "'");
        TableauState state = replay(it->second, s.path, options);
        auto actions = legal_actions(state, options);
        if (actions.size() != s.action_count) {
            throw std::runtime_error("state bank entry of '" + s.problem + "' has " + std::to_string(actions.size()) +
                                     " actions, expected " + std::to_string(s.action_count));
        }
        auto pa = predict(a, state, actions).policy.value();
        auto pb = predict(b, state, actions).policy.value();
        best += argmax_first(pa.probs()) == argmax_first(pb.probs());
        order += descending_ranking(pa.probs()) == descending_ranking(pb.probs());
        double ab = kl_divergence(pa, pb), ba = kl_divergence(pb, pa);
        if (std::isinf(ab)) {
            ++r.infinite_ab;
        } else {
            kl_ab += ab;
            ++finite_ab;
        }
        if (std::isinf(ba)) {
            ++r.infinite_ba;
        } else {
            kl_ba += ba;
            ++finite_ba;
        }
        ent_a += entropy(pa);
        ent_b += entropy(pb);
        nent_a += normalized_entropy(pa);
        nent_b += normalized_entropy(pb);
        ++r.states;
    }
    if (r.states) {
        const double n = static_cast<double>(r.states);
        r.best = static_cast<double>(best) / n;
        r.order = static_cast<double>(order) / n;
        r.mean_entropy_a = ent_a / n;
        r.mean_entropy_b = ent_b / n;
        r.mean_normalized_entropy_a = nent_a / n;
        r.mean_normalized_entropy_b = nent_b / n;
    }
    if (finite_ab) r.kl_ab = kl_ab / static_cast<double>(finite_ab);
    if (finite_ba) r.kl_ba = kl_ba / static_cast<double>(finite_ba);
    return r;
}

// ------------------------------------------------------------------ Reports

namespace {

std::string fixed2(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << x;
    return os.str();
}

}  // namespace

void write_agreement_csv(std::ostream& out, std::span<const AgreementRow> rows) {
    out << "label,succ,best,order,kl_ab,kl_ba,ent_a,ent_b,states,inf_ab,inf_ba\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << row.label << ',' << (row.solved ? std::to_string(*row.solved) : std::string()) << ','
            << fixed2(r.best) << ',' << fixed2(r.order) << ',' << fixed2(r.kl_ab) << ',' << fixed2(r.kl_ba) << ','
            << fixed2(r.mean_entropy_a) << ',' << fixed2(r.mean_entropy_b) << ',' << r.states << ','
            << r.infinite_ab << ',' << r.infinite_ba << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, int iterations) {
    out << "label,alpha";
    for (int k = 0; k < iterations; ++k) out << ",ent_" << k << ",succ_" << k;
    out << '\n';
    for (const auto& row : rows) {
        if (static_cast<int>(row.iterations.size()) != iterations) {
            throw std::invalid_argument("sweep row '" + row.label + "' has the wrong iteration count");
        }
        out << row.label << ',' << fixed2(row.alpha);
        for (const auto& it : row.iterations) out << ',' << fixed2(it.mean_entropy) << ',' << it.solved;
        out << '\n';
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t end = line.find(',', start);
        out.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

}  // namespace entcop
