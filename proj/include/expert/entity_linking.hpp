#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "expert/corpus_store.hpp"

namespace expert {

/// One linked mention. `begin`/`end` are byte offsets into the annotated text
/// and `surface` is exactly that substring.
struct EntityAnnotation {
    std::string entity_id;
    std::string surface;
    std::size_t begin = 0;
    std::size_t end = 0;
    double rho = 0.0;

    bool operator==(const EntityAnnotation&) const = default;
};

/// Per-author aggregate of an entity's mentions: rho is the maximum
/// confidence over D_a and doc_ids is D_{a,e}.
struct AuthorEntityEvidence {
    std::string author_id;
    std::string entity_id;
    double rho = 0.0;
    std::vector<std::string> doc_ids;

    std::size_t doc_count() const { return doc_ids.size(); }
    bool operator==(const AuthorEntityEvidence&) const = default;
};

struct LinkCandidate {
    std::string entity_id;
    double score = 0.0;
};

/// Surface form -> candidate entities. Surfaces are keyed by their token
/// sequence so matching is case-insensitive and punctuation-agnostic.
class LinkerDictionary {
  public:
    /// Lines: `surface TAB entity_id TAB score`.
    static LinkerDictionary load(const std::filesystem::path& path);

    void add(std::string_view surface, std::string entity_id, double score);

    /// Candidates for a normalized token key ("tok1 tok2"), best first.
    /// Empty span when absent.
    const std::vector<LinkCandidate>* find(std::string_view key) const;

    std::size_t max_tokens() const { return m_max_tokens; }
    std::size_t size() const { return m_entries.size(); }

  private:
    std::unordered_map<std::string, std::vector<LinkCandidate>> m_entries;
    std::size_t m_max_tokens = 0;
};

/// Extension point for annotators. Implementations must be safe to call
/// concurrently.
class Linker {
  public:
    virtual ~Linker() = default;
    virtual std::vector<EntityAnnotation> annotate(std::string_view text) const = 0;
};

/// Greedy longest-match, left-to-right, non-overlapping. Each match links to
/// the best-scoring candidate (ties: smallest entity_id) with rho equal to the
/// dictionary score.
class DictionaryLinker final : public Linker {
  public:
    explicit DictionaryLinker(LinkerDictionary dictionary) : m_dictionary(std::move(dictionary)) {}

    std::vector<EntityAnnotation> annotate(std::string_view text) const override;

    const LinkerDictionary& dictionary() const { return m_dictionary; }

  private:
    LinkerDictionary m_dictionary;
};

std::vector<EntityAnnotation> annotate(std::string_view text, const LinkerDictionary& dictionary);

/// E_q: distinct entity ids with rho strictly above `rho_filter`, sorted.
std::vector<std::string> annotate_query(std::string_view query_text, const Linker& linker,
                                        double rho_filter = 0.2);

/// Annotations of every document, keyed by doc_id.
class AnnotationStore {
  public:
    /// Annotates title and body (joined by a newline) of each document.
    static AnnotationStore build(const Corpus& corpus, const Linker& linker);
    static AnnotationStore load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// An empty list removes the document's entry.
    void set(std::string doc_id, std::vector<EntityAnnotation> annotations);
    /// Empty for documents without annotations.
    const std::vector<EntityAnnotation>& of(std::string_view doc_id) const;

    bool operator==(const AnnotationStore&) const = default;

  private:
    std::map<std::string, std::vector<EntityAnnotation>, std::less<>> m_by_doc;
};

/// Text that gets annotated for a document.
std::string annotation_text(const Document& doc);

/// E_a with supporting evidence. Entities whose max rho is <= `rho_threshold`
/// are dropped. Sorted by entity_id.
std::vector<AuthorEntityEvidence> build_author_evidence(std::string_view author_id,
                                                        const Corpus& corpus,
                                                        const AnnotationStore& annotations,
                                                        double rho_threshold = 0.2);

}  // namespace expert
