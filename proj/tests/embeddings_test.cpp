#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "expert/embeddings.hpp"
#include "expert/errors.hpp"
#include "test_support.hpp"

using namespace expert;

namespace {

/// Two 6-cliques (c0..c5, d0..d5) joined by the bridge c0 - d0.
KnowledgeGraph two_cliques()
{
    std::vector<std::string> names;
    for (char p : {'c', 'd'}) {
        for (int i = 0; i < 6; ++i) {
            names.push_back(std::string(1, p) + std::to_string(i));
        }
    }
    std::vector<std::pair<std::string, std::string>> links;
    for (char p : {'c', 'd'}) {
        for (int i = 0; i < 6; ++i) {
            for (int j = i + 1; j < 6; ++j) {
                links.emplace_back(std::string(1, p) + std::to_string(i),
                                   std::string(1, p) + std::to_string(j));
            }
        }
    }
    links.emplace_back("c0", "d0");
    return KnowledgeGraph(names, links);
}

}  // namespace

TEST(Cosine, Basics)
{
    std::vector<float> v = {1.0F, 2.0F, -3.0F};
    std::vector<float> neg = {-1.0F, -2.0F, 3.0F};
    std::vector<float> e1 = {1.0F, 0.0F, 0.0F};
    std::vector<float> e2 = {0.0F, 1.0F, 0.0F};
    std::vector<float> zero = {0.0F, 0.0F, 0.0F};
    EXPECT_NEAR(cosine(v, v), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
    EXPECT_NEAR(cosine(v, neg), -1.0, 1e-12);
    EXPECT_DOUBLE_EQ(cosine(v, zero), 0.0);
}

TEST(Cosine, BoundedOnRandomVectors)
{
    std::mt19937 rng(8);
    std::normal_distribution<float> n(0.0F, 10.0F);
    for (int t = 0; t < 1000; ++t) {
        std::vector<float> a(100), b(100);
        for (std::size_t i = 0; i < 100; ++i) {
            a[i] = n(rng);
            b[i] = t % 7 == 0 ? a[i] * 3.0F : n(rng);
        }
        EXPECT_LE(std::abs(cosine(a, b)), 1.0 + 1e-12);
    }
}

TEST(EmbeddingModel, RejectsBadVectors)
{
    EmbeddingModel m(3);
    std::vector<float> ok = {1, 2, 3};
    m.add("a", ok);
    EXPECT_THROW(m.add("a", ok), InvalidArgument);
    std::vector<float> shortv = {1, 2};
    EXPECT_THROW(m.add("b", shortv), InvalidArgument);
    std::vector<float> nan = {1, std::nanf(""), 3};
    EXPECT_THROW(m.add("c", nan), InvalidArgument);
}

TEST(EmbeddingModel, LoadsZeroVector)
{
    test::TempDir dir;
    std::string line = "#dim 100 #count 1\nE";
    for (int i = 0; i < 100; ++i) {
        line += " 0";
    }
    test::write_text(dir / "e.txt", line + "\n");
    auto m = EmbeddingModel::load(dir / "e.txt");
    ASSERT_EQ(m.size(), 1U);
    auto v = *m.find("E");
    double norm = 0.0;
    for (float x : v) {
        norm += x * x;
    }
    EXPECT_EQ(norm, 0.0);
}

TEST(EmbeddingModel, DimensionMismatchIsParseError)
{
    test::TempDir dir;
    std::string line = "#dim 100 #count 1\nE";
    for (int i = 0; i < 99; ++i) {
        line += " 0.5";
    }
    test::write_text(dir / "e.txt", line + "\n");
    EXPECT_THROW(EmbeddingModel::load(dir / "e.txt"), ParseError);
}

TEST(EmbeddingModel, SaveLoadIsBitIdentical)
{
    WalkConfig cfg;
    cfg.walks_per_node = 3;
    cfg.epochs = 1;
    auto m = train_deepwalk(two_cliques(), cfg);
    test::TempDir dir;
    m.save(dir / "e.txt");
    auto back = EmbeddingModel::load(dir / "e.txt");
    EXPECT_TRUE(back == m);
}

TEST(WalkConfig, Validation)
{
    WalkConfig cfg;
    cfg.window = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(DeepWalk, SingleNodeGraph)
{
    KnowledgeGraph g({"only"}, {});
    auto m = train_deepwalk(g, WalkConfig{});
    ASSERT_EQ(m.size(), 1U);
    for (float x : m.vector(0)) {
        EXPECT_TRUE(std::isfinite(x));
    }
}

TEST(DeepWalk, SameSeedSameVectors)
{
    WalkConfig cfg;
    cfg.seed = 42;
    auto a = train_deepwalk(two_cliques(), cfg);
    auto b = train_deepwalk(two_cliques(), cfg);
    EXPECT_TRUE(a == b);
    cfg.seed = 43;
    EXPECT_FALSE(train_deepwalk(two_cliques(), cfg) == a);
}

TEST(DeepWalk, ParallelWalksMatchSequential)
{
    WalkConfig cfg;
    auto seq = generate_walks(two_cliques(), cfg);
    cfg.parallel_walks = true;
    cfg.threads = 4;
    EXPECT_EQ(generate_walks(two_cliques(), cfg), seq);
}

TEST(DeepWalk, WalksFollowEdges)
{
    auto g = two_cliques();
    WalkConfig cfg;
    auto walks = generate_walks(g, cfg);
    EXPECT_EQ(walks.size(), g.size() * cfg.walks_per_node);
    for (const auto& w : walks) {
        EXPECT_EQ(w.size(), cfg.walk_length);
        for (std::size_t i = 1; i < w.size(); ++i) {
            auto nb = g.neighbors(w[i - 1]);
            EXPECT_TRUE(std::binary_search(nb.begin(), nb.end(), w[i]));
        }
    }
}

TEST(DeepWalk, CliquesSeparate)
{
    auto g = two_cliques();
    WalkConfig cfg;
    cfg.seed = 1;
    auto m = train_deepwalk(g, cfg);
    double intra = 0.0, inter = 0.0;
    int n_intra = 0, n_inter = 0;
    for (EntityIndex a = 0; a < 12; ++a) {
        for (EntityIndex b = a + 1; b < 12; ++b) {
            double c = cosine(*m.find(g.id(a)), *m.find(g.id(b)));
            if ((a < 6) == (b < 6)) {
                intra += c;
                ++n_intra;
            } else {
                inter += c;
                ++n_inter;
            }
        }
    }
    EXPECT_GT(intra / n_intra, inter / n_inter);
}
