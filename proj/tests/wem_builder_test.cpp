#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "expert/errors.hpp"
#include "expert/wem_builder.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace expert;

namespace {

AuthorGraph complete_graph(std::size_t n, double weight)
{
    AuthorGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.push_back("n" + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            g.edges.push_back({i, j, weight});
        }
    }
    return g;
}

/// Tight cliques of the given sizes (weight 0.9 inside) followed by isolated nodes.
AuthorGraph clusters_plus_isolated(std::vector<std::size_t> sizes, std::size_t isolated)
{
    AuthorGraph g;
    std::size_t base = 0;
    for (auto s : sizes) {
        for (std::size_t i = 0; i < s; ++i) {
            g.nodes.push_back("n" + std::to_string(base + i));
            for (std::size_t j = i + 1; j < s; ++j) {
                g.edges.push_back({base + i, base + j, 0.9});
            }
        }
        base += s;
    }
    for (std::size_t i = 0; i < isolated; ++i) {
        g.nodes.push_back("iso" + std::to_string(i));
    }
    return g;
}

AuthorEntityEvidence ev(std::string entity, double rho, std::size_t docs)
{
    AuthorEntityEvidence e;
    e.author_id = "a";
    e.entity_id = std::move(entity);
    e.rho = rho;
    for (std::size_t i = 0; i < docs; ++i) {
        e.doc_ids.push_back("d" + std::to_string(i));
    }
    return e;
}

std::vector<std::vector<double>> dense(const AuthorGraph& g)
{
    std::vector<std::vector<double>> w(g.nodes.size(), std::vector<double>(g.nodes.size(), 0.0));
    for (const auto& e : g.edges) {
        w[e.u][e.v] = w[e.v][e.u] = e.weight;
    }
    return w;
}

}  // namespace

TEST(AuthorGraph, SingleEntity)
{
    KnowledgeGraph kb({"e1"}, {});
    Relatedness rel(kb);
    std::vector<AuthorEntityEvidence> evidence = {ev("e1", 0.5, 1)};
    auto g = build_author_graph(evidence, rel);
    EXPECT_EQ(g.nodes.size(), 1U);
    EXPECT_TRUE(g.edges.empty());
}

TEST(AuthorGraph, EdgeWeightIsRelatedness)
{
    // W=10, in-links {2,3,4,5} and {2,3}: relatedness 1 - ln2/ln5.
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) {
        ids.push_back("e" + std::to_string(i));
    }
    KnowledgeGraph kb(ids, {{"e2", "e0"}, {"e3", "e0"}, {"e4", "e0"}, {"e5", "e0"},
                            {"e2", "e1"}, {"e3", "e1"}});
    Relatedness rel(kb);
    std::vector<AuthorEntityEvidence> evidence = {ev("e0", 0.5, 1), ev("e1", 0.5, 1),
                                                  ev("unknown", 0.5, 1)};
    auto g = build_author_graph(evidence, rel);
    ASSERT_EQ(g.edges.size(), 1U);
    EXPECT_NEAR(g.edges[0].weight, 1.0 - std::log(2.0) / std::log(5.0), 1e-12);
    EXPECT_NEAR(g.weight(0, 1), 0.5693, 1e-4);
    EXPECT_EQ(g.weight(0, 2), 0.0);
}

TEST(AuthorGraph, UnrelatedEntitiesGiveNoEdges)
{
    KnowledgeGraph kb({"a", "b", "c", "x", "y", "z"}, {{"x", "a"}, {"y", "b"}, {"z", "c"}});
    Relatedness rel(kb);
    std::vector<AuthorEntityEvidence> evidence = {ev("a", 1, 1), ev("b", 1, 1), ev("c", 1, 1)};
    EXPECT_TRUE(build_author_graph(evidence, rel).edges.empty());
}

TEST(Outliers, SmallGraphsKeptWhole)
{
    auto g = clusters_plus_isolated({2}, 1);
    auto r = remove_outliers(g);
    EXPECT_EQ(r.retained.size(), 3U);
    EXPECT_FALSE(r.clustering_applied);
}

TEST(Outliers, IsolatedNodeAmongTwelveRemoved)
{
    auto g = clusters_plus_isolated({6, 5}, 1);
    ASSERT_EQ(g.nodes.size(), 12U);
    auto r = remove_outliers(g);
    EXPECT_TRUE(r.clustering_applied);
    EXPECT_EQ(r.noise, std::vector<std::size_t>{11});
    EXPECT_EQ(r.retained.size(), 11U);
}

TEST(Outliers, TooMuchNoiseKeepsEverything)
{
    auto g = clusters_plus_isolated({5}, 3);
    auto r = remove_outliers(g);
    EXPECT_FALSE(r.clustering_applied);
    EXPECT_EQ(r.retained.size(), 8U);
    EXPECT_TRUE(r.noise.empty());
}

TEST(Ppr, SingleNode)
{
    AuthorGraph g;
    g.nodes = {"x"};
    std::vector<double> t = {0.3};
    auto r = personalized_pagerank(g, t);
    ASSERT_EQ(r.scores.size(), 1U);
    EXPECT_NEAR(r.scores[0], 1.0, 1e-12);
}

TEST(Ppr, TwoNodesSymmetric)
{
    auto g = complete_graph(2, 0.4);
    std::vector<double> t = {1.0, 1.0};
    auto r = personalized_pagerank(g, t);
    EXPECT_NEAR(r.scores[0], 0.5, 1e-12);
    EXPECT_NEAR(r.scores[1], 0.5, 1e-12);
}

TEST(Ppr, TwoNodesClosedForm)
{
    // r0 = 0.15 + 0.85 r1, r1 = 0.85 r0  =>  r0 = 0.15 / (1 - 0.85^2).
    auto g = complete_graph(2, 0.7);
    std::vector<double> t = {1.0, 0.0};
    auto r = personalized_pagerank(g, t);
    const double r0 = 0.15 / (1.0 - 0.85 * 0.85);
    EXPECT_NEAR(r.scores[0], r0, 1e-8);
    EXPECT_NEAR(r.scores[1], 0.85 * r0, 1e-8);
    EXPECT_NEAR(r.scores[0], 0.5405, 1e-4);
}

TEST(Ppr, EmptyGraph)
{
    AuthorGraph g;
    EXPECT_TRUE(compute_relevance(g, {}).empty());
}

TEST(Ppr, MatchesDenseOracleOnRandomGraphs)
{
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        AuthorGraph g;
        for (std::size_t i = 0; i < n; ++i) {
            g.nodes.push_back("n" + std::to_string(i));
            for (std::size_t j = i + 1; j < n; ++j) {
                if (u(rng) < 0.4) {
                    g.edges.push_back({i, j, 0.05 + 0.95 * u(rng)});
                }
            }
        }
        std::vector<double> t(n);
        for (auto& x : t) {
            x = u(rng) < 0.2 ? 0.0 : u(rng);
        }
        auto got = personalized_pagerank(g, t).scores;
        auto want = oracle::dense_ppr(dense(g), t, 0.85);
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(got[i], want[i], 1e-8) << "trial " << trial;
            mass += got[i];
        }
        EXPECT_NEAR(mass, 1.0, 1e-9);
    }
}

TEST(Ppr, ScalingWeightsKeepsRanking)
{
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = complete_graph(7, 1.0);
        for (auto& e : g.edges) {
            e.weight = u(rng) * 0.5;
        }
        std::vector<AuthorEntityEvidence> evidence;
        for (std::size_t i = 0; i < 7; ++i) {
            evidence.push_back(ev(g.nodes[i], u(rng), 1 + rng() % 5));
        }
        auto base = compute_relevance(g, evidence);
        auto scaled_graph = g;
        for (auto& e : scaled_graph.edges) {
            e.weight *= 1.9;
        }
        auto scaled = compute_relevance(scaled_graph, evidence);
        auto argsort = [](const std::vector<double>& v) {
            std::vector<std::size_t> idx(v.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(),
                             [&](auto a, auto b) { return v[a] > v[b]; });
            return idx;
        };
        EXPECT_EQ(argsort(base), argsort(scaled));
    }
}

TEST(Teleport, ProportionalToRhoTimesLogDocs)
{
    std::vector<AuthorEntityEvidence> evidence = {ev("a", 0.5, 1), ev("b", 1.0, 3)};
    auto t = teleport_distribution(evidence);
    const double wa = 0.5 * std::log(2.0);
    const double wb = 1.0 * std::log(4.0);
    EXPECT_NEAR(t[0], wa / (wa + wb), 1e-15);
    EXPECT_NEAR(t[1], wb / (wa + wb), 1e-15);
}

TEST(AuthorVector, TopKSums)
{
    EmbeddingModel m(3);
    std::vector<float> va = {1, 0, 2}, vb = {0, 1, 1}, vc = {5, 5, 5};
    m.add("a", va);
    m.add("b", vb);
    m.add("c", vc);
    std::vector<std::string> ordered = {"a", "b", "c"};
    std::vector<double> rel = {0.5, 0.3, 0.2};
    EXPECT_EQ(build_author_vector(ordered, rel, m, 1), va);
    EXPECT_EQ(build_author_vector(ordered, rel, m, 2), (std::vector<float>{1, 1, 3}));
    EXPECT_EQ(build_author_vector(ordered, rel, m, 10), (std::vector<float>{6, 6, 8}));
    std::vector<std::string> with_missing = {"a", "zzz"};
    EXPECT_EQ(build_author_vector(with_missing, rel, m, 2), va);
    auto weighted = build_author_vector(ordered, rel, m, 2, true);
    EXPECT_FLOAT_EQ(weighted[2], 0.5F * 2 + 0.3F * 1);
}

TEST(Profile, InvariantsAndFileRoundTrip)
{
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> links;
    for (int i = 0; i < 12; ++i) {
        ids.push_back("e" + std::to_string(i));
    }
    std::mt19937 rng(3);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            if (i != j && rng() % 3 == 0) {
                links.emplace_back(ids[i], ids[j]);
            }
        }
    }
    KnowledgeGraph kb(ids, links);
    Relatedness rel(kb);
    std::vector<AuthorEntityEvidence> evidence;
    for (int i = 0; i < 8; ++i) {
        evidence.push_back(ev(ids[i], 0.3 + 0.05 * i, 1 + i % 3));
    }
    EmbeddingModel m(100);
    for (const auto& id : ids) {
        std::vector<float> v(100);
        for (auto& x : v) {
            x = static_cast<float>(rng() % 1000) / 1000.0F;
        }
        m.add(id, v);
    }
    auto p = build_profile("a", evidence, rel, &m);
    double total = 0.0;
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        total += p.nodes[i].relevance;
        if (i > 0) {
            const auto& prev = p.nodes[i - 1];
            EXPECT_TRUE(prev.relevance > p.nodes[i].relevance ||
                        (prev.relevance == p.nodes[i].relevance &&
                         prev.entity_id < p.nodes[i].entity_id));
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    for (const auto& e : p.edges) {
        EXPECT_LT(e.a, e.b);
        EXPECT_GT(e.weight, 0.0);
        EXPECT_LE(e.weight, 1.0);
        EXPECT_NE(p.find(e.a), nullptr);
        EXPECT_NE(p.find(e.b), nullptr);
    }
    EXPECT_EQ(p.vector.size(), 100U);

    test::TempDir dir;
    save_profile(p, dir / "a.wem");
    auto back = load_profile("a", dir / "a.wem");
    ASSERT_EQ(back.nodes.size(), p.nodes.size());
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        EXPECT_EQ(back.nodes[i].entity_id, p.nodes[i].entity_id);
        EXPECT_EQ(back.nodes[i].relevance, p.nodes[i].relevance);
        EXPECT_EQ(back.nodes[i].rho, p.nodes[i].rho);
        EXPECT_EQ(back.nodes[i].doc_count, p.nodes[i].doc_count);
    }
    EXPECT_EQ(back.edges, p.edges);
    EXPECT_EQ(back.vector, p.vector);
}

TEST(Profile, EmptyEvidence)
{
    KnowledgeGraph kb({"e"}, {});
    Relatedness rel(kb);
    auto p = build_profile("a", {}, rel, nullptr);
    EXPECT_TRUE(p.nodes.empty());
    test::TempDir dir;
    save_profile(p, dir / "a.wem");
    EXPECT_TRUE(load_profile("a", dir / "a.wem").nodes.empty());
}

TEST(DoubleIndex, EmptyAndShared)
{
    EXPECT_TRUE(DoubleIndex::build({}).entity_authors().empty());
    DoubleIndex::PostingMap lists = {{"a1", {"e", "f"}}, {"a2", {"e"}}};
    auto index = DoubleIndex::from_author_lists(lists);
    EXPECT_EQ(index.authors_of("e"), (std::vector<std::string>{"a1", "a2"}));
    EXPECT_TRUE(index.authors_of("zzz").empty());
}

TEST(DoubleIndex, TransposeIsInvolution)
{
    std::mt19937 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        DoubleIndex::PostingMap x;
        for (int a = 0; a < 8; ++a) {
            std::set<std::string> es;
            for (int k = 0; k < static_cast<int>(rng() % 6); ++k) {
                es.insert("e" + std::to_string(rng() % 10));
            }
            if (!es.empty()) {
                x["a" + std::to_string(a)] = {es.begin(), es.end()};
            }
        }
        EXPECT_EQ(transpose(transpose(x)), x);
        auto index = DoubleIndex::from_author_lists(x);
        test::TempDir dir;
        index.save(dir / "di.tsv");
        EXPECT_EQ(DoubleIndex::load(dir / "di.tsv"), index);
    }
}
