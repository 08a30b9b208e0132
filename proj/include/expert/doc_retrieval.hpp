#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "expert/corpus_store.hpp"
#include "expert/fusion.hpp"

namespace expert {

enum class Scheme { tfidf, bm25, lm_dirichlet, lm_jelinek_mercer };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view s);

struct ScoringScheme {
    Scheme kind = Scheme::bm25;
    double k1 = 1.2;
    double b = 0.75;
    double mu = 2000.0;
    double lambda = 0.1;

    void validate() const;
};

struct DocScore {
    std::string doc_id;
    double score = 0.0;
    /// 1-based position in the retrieved list.
    std::size_t rank = 0;

    bool operator==(const DocScore&) const = default;
};

/// Term -> (document, tf) postings over title and body.
class InvertedIndex {
  public:
    static InvertedIndex build(const Corpus& corpus);
    static InvertedIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Ranked documents with positive score, best first, ties by doc_id, at
    /// most `max_docs`. Query terms count with multiplicity.
    std::vector<DocScore> score(std::string_view query, const ScoringScheme& scheme,
                                std::size_t max_docs = 1000) const;

    std::size_t document_count() const { return m_doc_ids.size(); }
    std::size_t total_length() const { return m_total_length; }
    std::size_t document_frequency(std::string_view term) const;
    std::size_t collection_frequency(std::string_view term) const;
    /// True when some query term occurs in the collection.
    bool matches_any(std::string_view query) const;

    bool operator==(const InvertedIndex&) const = default;

  private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
        bool operator==(const Posting&) const = default;
    };
    struct TermEntry {
        std::vector<Posting> postings;
        std::size_t cf = 0;
        bool operator==(const TermEntry&) const = default;
    };

    void add_document(std::string doc_id, std::span<const std::string> terms);

    std::vector<std::string> m_doc_ids;
    std::vector<std::uint32_t> m_doc_len;
    std::size_t m_total_length = 0;
    std::unordered_map<std::string, TermEntry> m_terms;
};

/// Words indexed for a document.
std::vector<std::string> index_terms(const Document& doc);

enum class DocFusion { meank, max, rr, combnz };

std::string_view to_string(DocFusion fusion);
DocFusion parse_doc_fusion(std::string_view s);

/// Author score from that author's retrieved documents (in retrieval order,
/// carrying global ranks). `author_doc_count` is |D_a|. meank divides by k
/// even when fewer documents were retrieved. Throws InvalidArgument for
/// k == 0 with meank or for an empty document list.
double fuse_doc_scores(std::span<const DocScore> author_docs, std::size_t author_doc_count,
                       DocFusion method, std::size_t k = 5);

/// Per-document addends of fuse_doc_scores, aligned with `author_docs`.
std::vector<double> doc_fusion_terms(std::span<const DocScore> author_docs,
                                     std::size_t author_doc_count, DocFusion method,
                                     std::size_t k = 5);

/// Retrieved documents split by author (author-less documents dropped).
std::map<std::string, std::vector<DocScore>> group_by_author(std::span<const DocScore> docs,
                                                             const Corpus& corpus);

struct DocCentricConfig {
    ScoringScheme scheme;
    DocFusion fusion = DocFusion::rr;
    std::size_t meank_k = 5;
    std::size_t max_docs = 1000;
};

RankedRun rank_authors_doc_centric(std::string query_id, std::string_view query_text,
                                   const InvertedIndex& index, const Corpus& corpus,
                                   const DocCentricConfig& config);

}  // namespace expert
