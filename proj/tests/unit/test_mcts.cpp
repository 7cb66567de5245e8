#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "entcop/mcts.hpp"
#include "synthetic.hpp"

using namespace entcop;
using entcop::testing::SyntheticDomain;
using boost::multiprecision::cpp_bin_float_50;

namespace {

using Tree = SearchTree<SyntheticDomain>;
using Node = Tree::Node;

// Hand-built tree: children per state id, priors, values, closed states.
struct ScriptedDomain {
    struct State {
        int id = 0;
    };
    using Action = int;

    std::map<int, std::vector<int>> children;
    std::map<int, std::vector<double>> priors;
    std::map<int, double> values;
    std::set<int> closed;
    int inferences = 0;
    int limit = 1000000;

    bool can_apply() const { return inferences < limit; }
    State apply(const State& s, const Action& a) {
        ++inferences;
        return State{children.at(s.id).at(static_cast<std::size_t>(a))};
    }
    Evaluation<Action> evaluate(const State& s) const {
        Evaluation<Action> e;
        if (closed.contains(s.id)) {
            e.closed = true;
            return e;
        }
        auto it = children.find(s.id);
        if (it == children.end()) return e;
        for (std::size_t i = 0; i < it->second.size(); ++i) e.actions.push_back(static_cast<int>(i));
        e.priors = priors.count(s.id) ? priors.at(s.id)
                                      : std::vector<double>(it->second.size(), 1.0 / double(it->second.size()));
        e.value = values.count(s.id) ? values.at(s.id) : 0.5;
        return e;
    }
};

using STree = SearchTree<ScriptedDomain>;
using SNode = STree::Node;

template <class N, class F>
void visit(const N& n, F&& f) {
    f(n);
    for (const auto& c : n.children) {
        if (c) visit(*c, f);
    }
}

}  // namespace

// ------------------------------------------------------------------- UCT

TEST(Uct, Examples) {
    EXPECT_EQ(uct_score(1, 1, 1, 1, 1), 1.0);
    EXPECT_NEAR(uct_score(0, 1, 0.5, std::exp(1.0), 2), 1.0, 1e-15);
    EXPECT_EQ(unexpanded_score(0.5, 1, 3.0), 0.0);
    EXPECT_NEAR(unexpanded_score(0.5, std::exp(4.0), 1.0), 1.0, 1e-15);
}

TEST(Uct, MatchesHighPrecisionOracle) {
    std::mt19937_64 rng(77);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int N = 2 + static_cast<int>(rng() % 100000);
        double cp = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
        int k = 2 + static_cast<int>(rng() % 10);
        std::size_t best = 0, best_hp = 0;
        double best_s = -1;
        cpp_bin_float_50 best_hs = -1;
        for (int i = 0; i < k; ++i) {
            int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(N));
            double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * n;
            double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            double s = uct_score(r, n, p, N, cp);
            cpp_bin_float_50 hs = cpp_bin_float_50(r) / n +
                                  cpp_bin_float_50(cp) * cpp_bin_float_50(p) *
                                      sqrt(log(cpp_bin_float_50(N)) / cpp_bin_float_50(n));
            double rel = static_cast<double>(abs((cpp_bin_float_50(s) - hs) / hs));
            worst = std::max(worst, rel);
            if (s > best_s) best_s = s, best = static_cast<std::size_t>(i);
            if (hs > best_hs) best_hs = hs, best_hp = static_cast<std::size_t>(i);
        }
        EXPECT_EQ(best, best_hp);
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Uct, ExplorationDominance) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        int N = 10 + static_cast<int>(rng() % 1000);
        double mean = std::uniform_real_distribution<double>(0, 1)(rng);
        double p = std::uniform_real_distribution<double>(0.01, 1)(rng);
        int n1 = 1 + static_cast<int>(rng() % (N - 1)), n2 = 1 + static_cast<int>(rng() % (N - 1));
        if (n1 == n2) continue;
        double s1 = uct_score(mean * n1, n1, p, N, 1.0), s2 = uct_score(mean * n2, n2, p, N, 1.0);
        EXPECT_EQ(n1 < n2, s1 > s2);
    }
}

// --------------------------------------------------------------- playouts

TEST(Playout, SingleChildChain) {
    ScriptedDomain d;
    d.children[0] = {1};
    d.children[1] = {2};
    STree t(d, {0}, 1.0);
    EXPECT_EQ(t.root().visits, 1);
    EXPECT_EQ(t.playout(), PlayoutOutcome::Expanded);
    EXPECT_EQ(t.root().visits, 2);
    EXPECT_EQ(d.inferences, 1);
}

TEST(Playout, ClosedLeafDiscount) {
    ScriptedDomain d;
    d.children[0] = {1};
    d.children[1] = {2};
    d.children[2] = {3};
    d.closed = {3};
    STree t(d, {0}, 1.0);
    PlayoutOutcome o = PlayoutOutcome::Expanded;
    for (int i = 0; i < 3; ++i) o = t.playout();
    EXPECT_EQ(o, PlayoutOutcome::Proof);
    ASSERT_NE(t.proof_node(), nullptr);
    EXPECT_EQ(t.proof_node()->depth, 3);
    EXPECT_DOUBLE_EQ(t.proof_node()->reward, 0.99 * 0.99 * 0.99);
    EXPECT_NEAR(t.proof_node()->reward, 0.9703, 1e-4);
    EXPECT_EQ(t.path_to(*t.proof_node()), (std::vector<int>{0, 0, 0}));
    // No further playouts after a proof.
    EXPECT_EQ(t.playout(), PlayoutOutcome::Proof);
    EXPECT_EQ(d.inferences, 3);
}

TEST(Playout, DeadEndGetsZeroAndIsExhausted) {
    ScriptedDomain d;
    d.children[0] = {1, 2};
    d.children[2] = {3};
    d.values[2] = 0.8;
    STree t(d, {0}, 1.0);
    ASSERT_EQ(t.playout(), PlayoutOutcome::Expanded);  // slot 0: dead end
    EXPECT_TRUE(t.root().children[0]->exhausted);
    EXPECT_EQ(t.root().children[0]->reward, 0.0);
    ASSERT_EQ(t.playout(), PlayoutOutcome::Expanded);  // slot 1
    EXPECT_EQ(t.playout(), PlayoutOutcome::Expanded);  // under slot 1: dead end 3
    EXPECT_TRUE(t.root().exhausted);
    EXPECT_EQ(t.playout(), PlayoutOutcome::Exhausted);
}

TEST(Playout, BudgetStopsExpansion) {
    SyntheticDomain d{3, 5};
    Tree t(d, {}, 1.0);
    int expanded = 0;
    for (int i = 0; i < 100; ++i) {
        auto o = t.playout();
        if (o != PlayoutOutcome::Expanded) break;
        ++expanded;
    }
    EXPECT_LE(d.inferences, 5);
}

namespace {

// Independent step-by-step simulation of the playout rules on a scripted
// tree, keeping statistics in a map keyed by state id instead of nodes.
struct Simulation {
    struct Stats {
        int n = 0;
        double r = 0.0;
        bool exhausted = false;
        int parent = -1;
    };
    const ScriptedDomain& d;
    double cp;
    std::map<int, Stats> stats;

    Simulation(const ScriptedDomain& domain, double c) : d(domain), cp(c) { stats[0] = {1, d.values.at(0), false, -1}; }

    bool expanded(int id) const { return stats.count(id) != 0; }

    void playout() {
        int node = 0;
        for (;;) {
            const auto& kids = d.children.at(node);
            const auto& pri = d.priors.count(node) ? d.priors.at(node)
                                                   : std::vector<double>(kids.size(), 1.0 / double(kids.size()));
            const double N = stats[node].n;
            int best = -1;
            double bs = 0;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                double sc;
                if (!expanded(kids[i])) {
                    sc = cp * pri[i] * std::sqrt(std::log(N));
                } else {
                    const Stats& c = stats.at(kids[i]);
                    if (c.exhausted) continue;
                    sc = c.r / c.n + cp * pri[i] * std::sqrt(std::log(N) / c.n);
                }
                if (best < 0 || sc > bs) best = static_cast<int>(i), bs = sc;
            }
            int child = kids.at(static_cast<std::size_t>(best));
            if (expanded(child)) {
                node = child;
                continue;
            }
            bool dead = !d.children.count(child);
            double v = dead ? 0.0 : d.values.at(child);
            stats[child] = {1, v, dead, node};
            for (int a = node; a >= 0; a = stats[a].parent) {
                stats[a].n += 1;
                stats[a].r += v;
            }
            for (int a = node; dead && a >= 0; a = stats[a].parent) {
                for (int k : d.children.at(a)) {
                    if (!expanded(k) || !stats[k].exhausted) return;
                }
                stats[a].exhausted = true;
            }
            return;
        }
    }
};

}  // namespace

TEST(Playout, FiftyPlayoutsMatchScriptedSimulation) {
    // Two levels below the root; some grandchildren are dead ends, the
    // others have one dead-end child of their own.
    ScriptedDomain d;
    d.children[0] = {1, 2, 3};
    d.priors[0] = {0.5, 0.3, 0.2};
    d.values[0] = 0.5;
    d.values[1] = 0.4;
    d.values[2] = 0.7;
    d.values[3] = 0.1;
    int next = 10;
    for (int c : {1, 2, 3}) {
        for (int i = 0; i < 6; ++i) {
            int g = next++;
            d.children[c].push_back(g);
            if (i % 3 != 2) {
                d.values[g] = 0.05 * (i % 7) + 0.1 * c;
                d.children[g] = {1000 + g};
            }
        }
    }
    for (double cp : {0.5, 1.0, 2.0}) {
        ScriptedDomain dd = d;
        STree t(dd, {0}, cp);
        Simulation sim(d, cp);
        for (int i = 0; i < 50; ++i) {
            auto o = t.playout();
            if (o == PlayoutOutcome::Exhausted) break;
            ASSERT_EQ(o, PlayoutOutcome::Expanded);
            sim.playout();
        }
        std::size_t nodes = 0;
        visit(t.absolute_root(), [&](const SNode& n) {
            ++nodes;
            ASSERT_TRUE(sim.expanded(n.state.id)) << n.state.id;
            EXPECT_EQ(n.visits, sim.stats.at(n.state.id).n) << "cp " << cp << " state " << n.state.id;
            EXPECT_NEAR(n.reward, sim.stats.at(n.state.id).r, 1e-12);
            EXPECT_EQ(n.exhausted, sim.stats.at(n.state.id).exhausted);
        });
        EXPECT_EQ(nodes, sim.stats.size());
        EXPECT_GT(nodes, 30u);
    }
}

// ----------------------------------------------------------------- bigsteps

namespace {

// Expands both root children of a two-child scripted tree, then forces
// their mean rewards.
void set_means(STree& t, double m0, double m1) {
    while (t.root().expanded_count() < 2) ASSERT_EQ(t.playout(), PlayoutOutcome::Expanded);
    auto& c = t.root().children;
    c[0]->reward = m0 * c[0]->visits;
    c[1]->reward = m1 * c[1]->visits;
}

ScriptedDomain two_children() {
    ScriptedDomain d;
    d.children[0] = {1, 2};
    d.priors[0] = {0.3, 0.7};
    d.children[1] = {3};
    d.children[2] = {4};
    // zero values send the second playout to the unexpanded sibling
    d.values[1] = 0.0;
    d.values[2] = 0.0;
    return d;
}

}  // namespace

TEST(Bigstep, Examples) {
    {
        ScriptedDomain d = two_children();
        STree t(d, {0}, 1.0);
        set_means(t, 0.2, 0.9);
        EXPECT_EQ(t.bigstep_target(t.root()), t.root().children[1].get());
        EXPECT_TRUE(t.bigstep());
        EXPECT_EQ(t.root().state.id, 2);
        // Later playouts stay below the new root.
        int before = t.absolute_root().children[0]->visits;
        for (int i = 0; i < 2; ++i) t.playout();
        EXPECT_EQ(t.absolute_root().children[0]->visits, before);
    }
    {
        ScriptedDomain d = two_children();
        STree t(d, {0}, 1.0);
        set_means(t, 0.5, 0.5);
        EXPECT_EQ(t.bigstep_target(t.root()), t.root().children[0].get());
    }
    {
        ScriptedDomain d = two_children();
        STree t(d, {0}, 1.0);
        EXPECT_EQ(t.bigstep_target(t.root()), nullptr);
        EXPECT_FALSE(t.bigstep());  // nothing expanded
    }
}

TEST(Bigstep, PrefersProofSubtree) {
    ScriptedDomain d;
    d.children[0] = {1, 2};
    d.children[1] = {5};
    d.children[5] = {7};
    d.children[2] = {3};
    d.children[3] = {4};
    d.values[1] = 0.95;
    d.values[2] = 0.0;
    d.values[3] = 0.0;
    d.closed = {4};
    STree t(d, {0}, 1.0);
    PlayoutOutcome o = PlayoutOutcome::Expanded;
    while (o == PlayoutOutcome::Expanded) o = t.playout();
    ASSERT_EQ(o, PlayoutOutcome::Proof);
    const SNode* with_proof = t.root().children[1].get();
    ASSERT_TRUE(with_proof && with_proof->has_proof);
    ASSERT_TRUE(t.root().children[0]);
    t.root().children[0]->reward = 0.99 * t.root().children[0]->visits;
    EXPECT_GT(t.root().children[0]->mean(), with_proof->mean());
    EXPECT_EQ(t.bigstep_target(t.root()), with_proof);
}

// --------------------------------------------------------- random trees

TEST(Invariants, ThousandRandomTrees) {
    std::mt19937_64 rng(2718);
    int proofs = 0, exhausted = 0, budget = 0;
    for (int tree = 0; tree < 1000; ++tree) {
        SyntheticDomain d{rng(), 5 + static_cast<int>(rng() % 400)};
        Tree t(d, {rng(), 0}, std::uniform_real_distribution<double>(0.2, 4.0)(rng));
        int playouts = 0;
        PlayoutOutcome o = PlayoutOutcome::Expanded;
        int every = 1 + static_cast<int>(rng() % 50);
        while (o == PlayoutOutcome::Expanded) {
            o = t.playout();
            if (o == PlayoutOutcome::Expanded && ++playouts % every == 0 && !t.bigstep()) break;
        }
        proofs += o == PlayoutOutcome::Proof;
        exhausted += o == PlayoutOutcome::Exhausted;
        budget += o == PlayoutOutcome::BudgetExhausted;

        // Budget exactness: one inference per created node below the root.
        int nodes = 0;
        visit(t.absolute_root(), [&](const Node& n) {
            ++nodes;
            int child_sum = 0;
            double prior_sum = 0;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                prior_sum += n.priors[i];
                if (n.children[i]) child_sum += n.children[i]->visits;
            }
            // Visit conservation.
            EXPECT_EQ(n.visits, 1 + child_sum);
            // Reward bounds.
            EXPECT_GE(n.mean(), 0.0);
            EXPECT_LE(n.mean(), 1.0);
            EXPECT_GE(n.prior, 0.0);
            EXPECT_LE(n.prior, 1.0);
            // Prior normalization.
            if (!n.priors.empty()) EXPECT_NEAR(prior_sum, 1.0, 1e-6);
            // Exploration dominance among equal-prior, equal-mean siblings.
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                for (std::size_t j = 0; j < n.children.size(); ++j) {
                    const Node* a = n.children[i].get();
                    const Node* b = n.children[j].get();
                    if (!a || !b || n.priors[i] != n.priors[j] || a->mean() != b->mean() || a->visits >= b->visits) {
                        continue;
                    }
                    EXPECT_GT(uct_score(a->reward, a->visits, n.priors[i], n.visits, t.cp()),
                              uct_score(b->reward, b->visits, n.priors[j], n.visits, t.cp()));
                }
            }
        });
        EXPECT_EQ(d.inferences, nodes - 1);
        EXPECT_LE(d.inferences, d.limit);
    }
    // The generator exercises every ending.
    EXPECT_GT(proofs, 50);
    EXPECT_GT(exhausted, 10);
    EXPECT_GT(budget, 10);
}

TEST(Invariants, SelectionIsDeterministic) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SyntheticDomain a{seed, 300}, b{seed, 300};
        Tree ta(a, {seed, 0}, 1.0), tb(b, {seed, 0}, 1.0);
        for (int i = 0; i < 300; ++i) {
            auto oa = ta.playout(), ob = tb.playout();
            ASSERT_EQ(oa, ob);
            if (oa != PlayoutOutcome::Expanded) break;
            ASSERT_EQ(ta.path_to(*ta.last_leaf()), tb.path_to(*tb.last_leaf()));
        }
    }
}
