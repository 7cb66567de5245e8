#include <benchmark/benchmark.h>

#include <filesystem>

#include "entcop/learn.hpp"
#include "entcop/search.hpp"
#include "entcop/tptp.hpp"

using namespace entcop;

namespace {

std::shared_ptr<const Matrix> load(const std::string& name) {
    auto path = std::filesystem::path(ENTCOP_BENCH_CORPUS_DIR) / (name + ".p");
    return std::make_shared<const Matrix>(clausify(tptp::parse_problem_file(path)));
}

// f(g(X0, ..., h(X1)), ...) nested `depth` levels, against a ground instance.
std::pair<Term, Term> nested_pair(SymbolTable& symbols, int depth) {
    SymbolId f = symbols.intern("f", 2, SymbolKind::Function);
    SymbolId a = symbols.intern("a", 0, SymbolKind::Function);
    Term open = Term::variable(0), ground = Term::compound(a, {});
    for (int i = 1; i <= depth; ++i) {
        open = Term::compound(f, {open, Term::variable(i)});
        ground = Term::compound(f, {ground, Term::compound(a, {})});
    }
    return {open, ground};
}

void BM_Unify(benchmark::State& state) {
    SymbolTable symbols;
    auto [open, ground] = nested_pair(symbols, static_cast<int>(state.range(0)));
    Substitution s;
    for (auto _ : state) {
        auto mark = s.mark();
        benchmark::DoNotOptimize(unify_in_place(open, ground, s));
        s.undo(mark);
    }
}
BENCHMARK(BM_Unify)->Arg(4)->Arg(16)->Arg(64);

void BM_LegalActions(benchmark::State& state) {
    auto m = load("pel34_lite");
    auto s = apply_action(initial_states(m)[0], legal_actions(initial_states(m)[0]).at(0));
    for (auto _ : state) benchmark::DoNotOptimize(legal_actions(s));
}
BENCHMARK(BM_LegalActions);

void BM_Features(benchmark::State& state) {
    auto m = load("pel34_lite");
    auto s = apply_action(initial_states(m)[0], legal_actions(initial_states(m)[0]).at(0));
    auto actions = legal_actions(s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(s));
        for (const auto& a : actions) benchmark::DoNotOptimize(extract_action_features(s, a));
    }
}
BENCHMARK(BM_Features);

// Playout throughput: an unprovable-within-budget problem runs the full budget.
void BM_Playouts(benchmark::State& state) {
    auto m = load("pel12");
    SearchLimits limits;
    limits.inference_limit = static_cast<int>(state.range(0));
    UniformPredictor uniform;
    for (auto _ : state) benchmark::DoNotOptimize(prove(m, uniform, limits).inferences);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Playouts)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FixedEntropyVector(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(make_fixed_entropy_vector(static_cast<std::size_t>(state.range(0)), 0.8, ++seed));
}
BENCHMARK(BM_FixedEntropyVector)->Arg(10)->Arg(100);

void BM_PolicyLoss(benchmark::State& state) {
    std::vector<double> p(static_cast<std::size_t>(state.range(0)), 1.0 / state.range(0)), z(p.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 0.1 * static_cast<double>(i);
    for (auto _ : state) benchmark::DoNotOptimize(policy_loss(p, z, 0.7));
}
BENCHMARK(BM_PolicyLoss)->Arg(10);

}  // namespace
BENCHMARK_MAIN();
