#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace expert {

enum class DocKind { thesis, paper, profile_page, course_page, other };

std::string_view to_string(DocKind kind);
DocKind parse_doc_kind(std::string_view s);

struct Document {
    std::string doc_id;
    std::string title;
    std::string body;
    std::vector<std::string> author_ids;
    DocKind kind = DocKind::other;

    bool operator==(const Document&) const = default;
};

struct Author {
    std::string author_id;
    std::string display_name;

    bool operator==(const Author&) const = default;
};

struct CorpusStats {
    std::size_t n_documents = 0;
    std::size_t n_authors = 0;
    std::size_t n_associations = 0;
    std::size_t docs_with_author = 0;

    bool operator==(const CorpusStats&) const = default;
};

/// Paths of the on-disk store. Everything derived from a corpus lives under
/// one directory; see README for the layout.
class StoreLayout {
  public:
    static constexpr std::string_view format_version = "1";

    explicit StoreLayout(std::filesystem::path root) : m_root(std::move(root)) {}

    const std::filesystem::path& root() const { return m_root; }
    std::filesystem::path version_file() const { return m_root / "FORMAT_VERSION"; }
    std::filesystem::path documents() const { return m_root / "documents.tsv"; }
    std::filesystem::path authors() const { return m_root / "authors.tsv"; }
    std::filesystem::path associations() const { return m_root / "associations.tsv"; }
    std::filesystem::path stats() const { return m_root / "stats.tsv"; }
    std::filesystem::path dictionary() const { return m_root / "dictionary.tsv"; }
    std::filesystem::path snapshot() const { return m_root / "snapshot.tsv"; }
    std::filesystem::path annotations() const { return m_root / "annotations.tsv"; }
    std::filesystem::path postings() const { return m_root / "postings.tsv"; }
    std::filesystem::path evidence() const { return m_root / "evidence.tsv"; }
    std::filesystem::path embeddings() const { return m_root / "embeddings.txt"; }
    std::filesystem::path double_index() const { return m_root / "double_index.tsv"; }
    std::filesystem::path profiles_dir() const { return m_root / "profiles"; }
    std::filesystem::path profile(std::string_view author_id) const
    {
        return profiles_dir() / (std::string(author_id) + ".wem");
    }

    /// Creates the directory and version file if needed; throws if an
    /// existing store has a different format version.
    void prepare() const;
    /// Throws MissingStage("index build") when no corpus has been ingested.
    void require_corpus() const;

  private:
    std::filesystem::path m_root;
};

/// Immutable document/author collection with the author-document
/// association index.
class Corpus {
  public:
    Corpus() = default;
    Corpus(std::vector<Document> documents, std::vector<Author> authors);

    /// Parses the line-delimited input files (see README for formats).
    static Corpus read(const std::filesystem::path& documents_path,
                       const std::filesystem::path& authors_path);
    static Corpus load(const StoreLayout& store);
    void save(const StoreLayout& store) const;

    /// Documents sorted by doc_id.
    const std::vector<Document>& documents() const { return m_documents; }
    /// Authors sorted by author_id.
    const std::vector<Author>& authors() const { return m_authors; }

    const Document& document(std::string_view doc_id) const;
    const Author& author(std::string_view author_id) const;
    bool has_author(std::string_view author_id) const;
    std::size_t document_index(std::string_view doc_id) const;

    /// D_a, ordered by doc_id. Throws NotFound for unknown authors.
    std::vector<const Document*> documents_of(std::string_view author_id) const;
    std::size_t document_count(std::string_view author_id) const;

    CorpusStats stats() const;

  private:
    std::vector<Document> m_documents;
    std::vector<Author> m_authors;
    std::map<std::string, std::size_t, std::less<>> m_doc_pos;
    std::map<std::string, std::size_t, std::less<>> m_author_pos;
    std::vector<std::vector<std::size_t>> m_docs_by_author;
};

/// Reads both files, validates them and persists the corpus into `store`.
/// Re-ingesting identical files rewrites identical bytes.
CorpusStats ingest_corpus(const std::filesystem::path& documents_path,
                          const std::filesystem::path& authors_path, const StoreLayout& store);

}  // namespace expert
