#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "expert/doc_retrieval.hpp"
#include "expert/errors.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace expert;

namespace {

Corpus corpus_of(const oracle::TokenDocs& docs)
{
    std::vector<Document> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        Document d;
        d.doc_id = "d" + std::to_string(i);
        for (const auto& t : docs[i]) {
            d.body += t + " ";
        }
        d.author_ids = {"a" + std::to_string(i % 3)};
        out.push_back(std::move(d));
    }
    return Corpus(std::move(out), {{"a0", "A0"}, {"a1", "A1"}, {"a2", "A2"}});
}

std::string join(const std::vector<std::string>& q)
{
    std::string s;
    for (const auto& t : q) {
        s += t + " ";
    }
    return s;
}

std::vector<ScoringScheme> all_schemes()
{
    std::vector<ScoringScheme> out(4);
    out[0].kind = Scheme::tfidf;
    out[1].kind = Scheme::bm25;
    out[2].kind = Scheme::lm_dirichlet;
    out[3].kind = Scheme::lm_jelinek_mercer;
    return out;
}

std::vector<double> oracle_scores(const oracle::TokenDocs& docs,
                                  const std::vector<std::string>& q, const ScoringScheme& s)
{
    switch (s.kind) {
    case Scheme::tfidf: return oracle::tfidf(docs, q);
    case Scheme::bm25: return oracle::bm25(docs, q, s.k1, s.b);
    case Scheme::lm_dirichlet: return oracle::lm_dirichlet(docs, q, s.mu);
    case Scheme::lm_jelinek_mercer: return oracle::lm_jelinek_mercer(docs, q, s.lambda);
    }
    return {};
}

void expect_matches_oracle(const oracle::TokenDocs& docs, const std::vector<std::string>& q,
                           const ScoringScheme& scheme)
{
    auto index = InvertedIndex::build(corpus_of(docs));
    auto got = index.score(join(q), scheme);
    auto want = oracle_scores(docs, q, scheme);
    std::set<std::size_t> retrieved;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const auto d = std::stoul(got[i].doc_id.substr(1));
        retrieved.insert(d);
        EXPECT_NEAR(got[i].score, want[d], 1e-9) << to_string(scheme.kind);
        EXPECT_GT(got[i].score, 0.0);
        EXPECT_EQ(got[i].rank, i + 1);
        if (i > 0) {
            EXPECT_GE(got[i - 1].score, got[i].score);
        }
    }
    // Scores within rounding of zero may land on either side of the cut.
    for (std::size_t d = 0; d < want.size(); ++d) {
        if (want[d] > 1e-9) {
            EXPECT_TRUE(retrieved.count(d)) << to_string(scheme.kind) << " d" << d;
        }
    }
}

std::vector<DocScore> ranked_docs(std::vector<double> scores, std::vector<std::size_t> ranks)
{
    std::vector<DocScore> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.push_back({"d" + std::to_string(i), scores[i], ranks[i]});
    }
    return out;
}

}  // namespace

TEST(InvertedIndex, AbsentTermGivesEmptyList)
{
    auto index = InvertedIndex::build(test::small_corpus());
    for (const auto& s : all_schemes()) {
        EXPECT_TRUE(index.score("zzzzqqq", s).empty());
    }
    EXPECT_FALSE(index.matches_any("zzzzqqq"));
}

TEST(InvertedIndex, EmptyQueryGivesEmptyList)
{
    auto index = InvertedIndex::build(test::small_corpus());
    EXPECT_TRUE(index.score("", ScoringScheme{}).empty());
    EXPECT_TRUE(index.score("  ,;  ", ScoringScheme{}).empty());
}

TEST(InvertedIndex, SingleDocumentCorpus)
{
    oracle::TokenDocs docs = {{"graph"}};
    auto index = InvertedIndex::build(corpus_of(docs));
    for (const auto& s : all_schemes()) {
        auto r = index.score("graph", s);
        if (s.kind == Scheme::tfidf || s.kind == Scheme::lm_dirichlet) {
            // ln(N/df) = 0, and the document model equals the collection
            // model: both score exactly zero and zero scores are dropped.
            EXPECT_TRUE(r.empty()) << to_string(s.kind);
            continue;
        }
        ASSERT_EQ(r.size(), 1U) << to_string(s.kind);
        EXPECT_EQ(r[0].doc_id, "d0");
        EXPECT_EQ(r[0].rank, 1U);
    }
}

TEST(InvertedIndex, ThreeDocumentToyMatchesOracle)
{
    oracle::TokenDocs docs = {{"graph", "cluster", "graph"},
                              {"cluster", "mining", "data", "data"},
                              {"graph", "database"}};
    for (const auto& s : all_schemes()) {
        expect_matches_oracle(docs, {"graph", "cluster"}, s);
        expect_matches_oracle(docs, {"data"}, s);
        expect_matches_oracle(docs, {"graph", "graph", "mining"}, s);
    }
}

TEST(InvertedIndex, RandomSmallCorporaMatchOracle)
{
    const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "eps",
                                            "zeta",  "eta",  "theta", "iota",  "kappa"};
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        oracle::TokenDocs docs(1 + rng() % 10);
        for (auto& d : docs) {
            const std::size_t len = 1 + rng() % 15;
            for (std::size_t i = 0; i < len; ++i) {
                d.push_back(vocab[rng() % vocab.size()]);
            }
        }
        std::vector<std::string> q;
        for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) {
            q.push_back(vocab[rng() % vocab.size()]);
        }
        for (auto s : all_schemes()) {
            s.k1 = 0.5 + (rng() % 100) / 50.0;
            s.b = (rng() % 101) / 100.0;
            s.mu = 10.0 + rng() % 3000;
            s.lambda = 0.05 + (rng() % 90) / 100.0;
            expect_matches_oracle(docs, q, s);
        }
    }
}

TEST(InvertedIndex, SaveLoadRoundTrip)
{
    auto index = InvertedIndex::build(test::small_corpus());
    test::TempDir dir;
    index.save(dir / "postings.tsv");
    auto back = InvertedIndex::load(dir / "postings.tsv");
    EXPECT_EQ(back, index);
    EXPECT_EQ(back.document_count(), 12U);
}

TEST(ScoringScheme, Validation)
{
    ScoringScheme s;
    s.b = 1.5;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.mu = 0.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.lambda = 1.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = {};
    s.k1 = -1.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    EXPECT_THROW(parse_scheme("okapi"), InvalidArgument);
    EXPECT_EQ(parse_scheme("lm_dirichlet"), Scheme::lm_dirichlet);
}

TEST(DocFusion, WorkedExamples)
{
    auto rr = ranked_docs({0.9, 0.8}, {1, 2});
    EXPECT_DOUBLE_EQ(fuse_doc_scores(rr, 2, DocFusion::rr), 1.5);
    auto mx = ranked_docs({0.4, 0.8}, {3, 1});
    EXPECT_DOUBLE_EQ(fuse_doc_scores(mx, 2, DocFusion::max), 0.8);
    auto nz = ranked_docs({1.0, 0.5}, {1, 4});
    EXPECT_DOUBLE_EQ(fuse_doc_scores(nz, 4, DocFusion::combnz), 0.75);
}

TEST(DocFusion, Errors)
{
    auto docs = ranked_docs({1.0}, {1});
    EXPECT_THROW(fuse_doc_scores(docs, 1, DocFusion::meank, 0), InvalidArgument);
    EXPECT_THROW(fuse_doc_scores({}, 1, DocFusion::max), InvalidArgument);
}

TEST(DocFusion, MeankDividesByK)
{
    auto docs = ranked_docs({0.9, 0.3}, {1, 2});
    EXPECT_DOUBLE_EQ(fuse_doc_scores(docs, 2, DocFusion::meank, 5), 1.2 / 5.0);
    auto terms = doc_fusion_terms(docs, 2, DocFusion::meank, 5);
    EXPECT_DOUBLE_EQ(terms[0] + terms[1], fuse_doc_scores(docs, 2, DocFusion::meank, 5));
}

TEST(DocFusion, MatchesBruteForce)
{
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.01, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<double> scores(n);
        for (auto& s : scores) {
            s = u(rng);
        }
        std::sort(scores.rbegin(), scores.rend());
        std::vector<std::size_t> ranks;
        std::size_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
            r += 1 + rng() % 5;
            ranks.push_back(r);
        }
        const std::size_t total = n + rng() % 5;
        const std::size_t k = 1 + rng() % 10;
        auto docs = ranked_docs(scores, ranks);
        EXPECT_NEAR(fuse_doc_scores(docs, total, DocFusion::meank, k), oracle::meank(scores, k),
                    1e-12);
        EXPECT_NEAR(fuse_doc_scores(docs, total, DocFusion::max), oracle::max_of(scores), 1e-12);
        EXPECT_NEAR(fuse_doc_scores(docs, total, DocFusion::rr),
                    oracle::reciprocal_rank_sum(ranks), 1e-12);
        EXPECT_NEAR(fuse_doc_scores(docs, total, DocFusion::combnz),
                    oracle::combnz(scores, total), 1e-12);
        for (auto m : {DocFusion::meank, DocFusion::max, DocFusion::rr, DocFusion::combnz}) {
            auto terms = doc_fusion_terms(docs, total, m, k);
            double sum = 0.0;
            for (double t : terms) {
                sum += t;
            }
            if (m == DocFusion::max) {
                EXPECT_DOUBLE_EQ(sum, fuse_doc_scores(docs, total, m, k));
            } else {
                EXPECT_NEAR(sum, fuse_doc_scores(docs, total, m, k), 1e-12);
            }
        }
    }
}

TEST(DocFusion, ReciprocalRankIgnoresScores)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto docs = ranked_docs({5.0, 3.0, 1.0}, {1, 4, 7});
        const double base = fuse_doc_scores(docs, 3, DocFusion::rr);
        double s = 100.0;
        for (auto& d : docs) {
            s -= 1.0 + rng() % 10;
            d.score = s;
        }
        EXPECT_EQ(fuse_doc_scores(docs, 3, DocFusion::rr), base);
    }
}

TEST(DocFusion, MaxAndMeankAreMonotone)
{
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto docs = ranked_docs({u(rng), u(rng), u(rng), u(rng)}, {1, 2, 3, 4});
        std::sort(docs.begin(), docs.end(),
                  [](const auto& a, const auto& b) { return a.score > b.score; });
        const double max_before = fuse_doc_scores(docs, 4, DocFusion::max);
        const double mean_before = fuse_doc_scores(docs, 4, DocFusion::meank, 2);
        docs[rng() % 4].score += u(rng);
        std::sort(docs.begin(), docs.end(),
                  [](const auto& a, const auto& b) { return a.score > b.score; });
        EXPECT_GE(fuse_doc_scores(docs, 4, DocFusion::max), max_before);
        EXPECT_GE(fuse_doc_scores(docs, 4, DocFusion::meank, 2), mean_before);
    }
}

TEST(DocCentric, QueryMatchingOneAuthor)
{
    auto corpus = test::small_corpus();
    auto index = InvertedIndex::build(corpus);
    DocCentricConfig cfg;
    auto run = rank_authors_doc_centric("q", "genome crispr", index, corpus, cfg);
    ASSERT_EQ(run.size(), 1U);
    EXPECT_EQ(run.entries[0].author_id, "a3");
    EXPECT_EQ(run.query_id, "q");
}

TEST(DocCentric, EmptyQueryGivesEmptyRun)
{
    auto corpus = test::small_corpus();
    auto index = InvertedIndex::build(corpus);
    EXPECT_TRUE(rank_authors_doc_centric("q", "", index, corpus, {}).empty());
}

TEST(DocCentric, GroupByAuthorKeepsGlobalRanks)
{
    auto corpus = test::small_corpus();
    auto index = InvertedIndex::build(corpus);
    auto docs = index.score("graph clustering", ScoringScheme{});
    auto grouped = group_by_author(docs, corpus);
    for (const auto& [author, list] : grouped) {
        for (const auto& d : list) {
            auto it = std::find_if(docs.begin(), docs.end(),
                                   [&](const auto& x) { return x.doc_id == d.doc_id; });
            ASSERT_NE(it, docs.end());
            EXPECT_EQ(it->rank, d.rank);
            const auto& authors = corpus.document(d.doc_id).author_ids;
            EXPECT_NE(std::find(authors.begin(), authors.end(), author), authors.end());
        }
    }
}
