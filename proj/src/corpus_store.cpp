#include "expert/corpus_store.hpp"

#include <algorithm>
#include <sstream>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

std::string_view to_string(DocKind kind)
{
    switch (kind) {
    case DocKind::thesis: return "thesis";
    case DocKind::paper: return "paper";
    case DocKind::profile_page: return "profile_page";
    case DocKind::course_page: return "course_page";
    case DocKind::other: return "other";
    }
    return "other";
}

DocKind parse_doc_kind(std::string_view s)
{
    for (auto kind : {DocKind::thesis, DocKind::paper, DocKind::profile_page, DocKind::course_page,
                      DocKind::other}) {
        if (s == to_string(kind)) {
            return kind;
        }
    }
    throw InvalidArgument("unknown doc_kind '" + std::string(s) + "'");
}

void StoreLayout::prepare() const
{
    std::filesystem::create_directories(m_root);
    if (std::filesystem::exists(version_file())) {
        auto lines = io::read_lines(version_file());
        if (lines.empty() || lines.front() != format_version) {
            throw InvalidArgument("store " + m_root.string() + " has an unsupported format version");
        }
        return;
    }
    io::write_file(version_file(), std::string(format_version) + "\n");
}

void StoreLayout::require_corpus() const
{
    if (!std::filesystem::exists(version_file()) || !std::filesystem::exists(documents()) ||
        !std::filesystem::exists(authors())) {
        throw MissingStage("index build");
    }
    prepare();
}

Corpus::Corpus(std::vector<Document> documents, std::vector<Author> authors)
    : m_documents(std::move(documents)), m_authors(std::move(authors))
{
    std::sort(m_documents.begin(), m_documents.end(),
              [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
    std::sort(m_authors.begin(), m_authors.end(),
              [](const auto& a, const auto& b) { return a.author_id < b.author_id; });

    for (std::size_t i = 0; i < m_authors.size(); ++i) {
        if (!m_author_pos.emplace(m_authors[i].author_id, i).second) {
            throw InvalidArgument("duplicate author_id '" + m_authors[i].author_id + "'");
        }
    }
    m_docs_by_author.resize(m_authors.size());
    for (std::size_t i = 0; i < m_documents.size(); ++i) {
        const auto& doc = m_documents[i];
        if (!m_doc_pos.emplace(doc.doc_id, i).second) {
            throw InvalidArgument("duplicate doc_id '" + doc.doc_id + "'");
        }
        for (const auto& a : doc.author_ids) {
            auto it = m_author_pos.find(a);
            if (it == m_author_pos.end()) {
                throw InvalidArgument("document '" + doc.doc_id + "' references unknown author '" +
                                      a + "'");
            }
            m_docs_by_author[it->second].push_back(i);
        }
    }
}

namespace {

Document parse_document(std::string_view line, const std::filesystem::path& path, std::size_t lineno)
{
    auto fields = text::split(line, '\t');
    if (fields.size() != 5) {
        throw ParseError(path, lineno,
                         "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
    }
    try {
        Document doc;
        doc.doc_id = std::string(fields[0]);
        if (!text::is_valid_id(doc.doc_id)) {
            throw InvalidArgument("invalid doc_id '" + doc.doc_id + "'");
        }
        doc.title = text::normalize(text::unescape_field(fields[1]));
        doc.body = text::normalize(text::unescape_field(fields[2]));
        if (doc.body.empty()) {
            throw InvalidArgument("empty body");
        }
        if (!fields[3].empty()) {
            for (auto a : text::split(fields[3], ';')) {
                if (!text::is_valid_id(a)) {
                    throw InvalidArgument("invalid author id '" + std::string(a) + "'");
                }
                if (std::find(doc.author_ids.begin(), doc.author_ids.end(), a) ==
                    doc.author_ids.end()) {
                    doc.author_ids.emplace_back(a);
                }
            }
        }
        doc.kind = parse_doc_kind(fields[4]);
        return doc;
    } catch (const InvalidArgument& e) {
        throw ParseError(path, lineno, e.what());
    }
}

Author parse_author(std::string_view line, const std::filesystem::path& path, std::size_t lineno)
{
    auto fields = text::split(line, '\t');
    if (fields.size() != 2) {
        throw ParseError(path, lineno,
                         "expected 2 tab-separated fields, got " + std::to_string(fields.size()));
    }
    if (!text::is_valid_id(fields[0])) {
        throw ParseError(path, lineno, "invalid author_id '" + std::string(fields[0]) + "'");
    }
    try {
        return Author{std::string(fields[0]), text::normalize(text::unescape_field(fields[1]))};
    } catch (const InvalidArgument& e) {
        throw ParseError(path, lineno, e.what());
    }
}

std::string join_ids(const std::vector<std::string>& ids)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) {
            out.push_back(';');
        }
        out += ids[i];
    }
    return out;
}

}  // namespace

Corpus Corpus::read(const std::filesystem::path& documents_path,
                    const std::filesystem::path& authors_path)
{
    std::vector<Author> authors;
    std::map<std::string, std::size_t, std::less<>> author_lines;
    auto alines = io::read_lines(authors_path);
    for (std::size_t i = 0; i < alines.size(); ++i) {
        if (alines[i].empty()) {
            continue;
        }
        auto a = parse_author(alines[i], authors_path, i + 1);
        if (!author_lines.emplace(a.author_id, i + 1).second) {
            throw ParseError(authors_path, i + 1, "duplicate author_id '" + a.author_id + "'");
        }
        authors.push_back(std::move(a));
    }

    std::vector<Document> documents;
    std::map<std::string, std::size_t, std::less<>> doc_lines;
    auto dlines = io::read_lines(documents_path);
    for (std::size_t i = 0; i < dlines.size(); ++i) {
        if (dlines[i].empty()) {
            continue;
        }
        auto doc = parse_document(dlines[i], documents_path, i + 1);
        if (!doc_lines.emplace(doc.doc_id, i + 1).second) {
            throw ParseError(documents_path, i + 1, "duplicate doc_id '" + doc.doc_id + "'");
        }
        for (const auto& a : doc.author_ids) {
            if (!author_lines.contains(a)) {
                throw ParseError(documents_path, i + 1,
                                 "document '" + doc.doc_id + "' references unknown author '" + a +
                                     "'");
            }
        }
        documents.push_back(std::move(doc));
    }
    return Corpus(std::move(documents), std::move(authors));
}

Corpus Corpus::load(const StoreLayout& store)
{
    store.require_corpus();
    return read(store.documents(), store.authors());
}

void Corpus::save(const StoreLayout& store) const
{
    store.prepare();
    std::ostringstream docs;
    for (const auto& d : m_documents) {
        docs << d.doc_id << '\t' << text::escape_field(d.title) << '\t'
             << text::escape_field(d.body) << '\t' << join_ids(d.author_ids) << '\t'
             << to_string(d.kind) << '\n';
    }
    std::ostringstream authors;
    for (const auto& a : m_authors) {
        authors << a.author_id << '\t' << text::escape_field(a.display_name) << '\n';
    }
    std::ostringstream assoc;
    for (std::size_t i = 0; i < m_authors.size(); ++i) {
        for (auto d : m_docs_by_author[i]) {
            assoc << m_authors[i].author_id << '\t' << m_documents[d].doc_id << '\n';
        }
    }
    auto s = stats();
    std::ostringstream st;
    st << "n_documents\t" << s.n_documents << "\nn_authors\t" << s.n_authors
       << "\nn_associations\t" << s.n_associations << "\ndocs_with_author\t"
       << s.docs_with_author << '\n';

    io::write_file(store.documents(), docs.str());
    io::write_file(store.authors(), authors.str());
    io::write_file(store.associations(), assoc.str());
    io::write_file(store.stats(), st.str());
}

const Document& Corpus::document(std::string_view doc_id) const
{
    return m_documents[document_index(doc_id)];
}

std::size_t Corpus::document_index(std::string_view doc_id) const
{
    auto it = m_doc_pos.find(doc_id);
    if (it == m_doc_pos.end()) {
        throw NotFound("unknown document '" + std::string(doc_id) + "'");
    }
    return it->second;
}

const Author& Corpus::author(std::string_view author_id) const
{
    auto it = m_author_pos.find(author_id);
    if (it == m_author_pos.end()) {
        throw NotFound("unknown author '" + std::string(author_id) + "'");
    }
    return m_authors[it->second];
}

bool Corpus::has_author(std::string_view author_id) const
{
    return m_author_pos.contains(author_id);
}

std::vector<const Document*> Corpus::documents_of(std::string_view author_id) const
{
    auto it = m_author_pos.find(author_id);
    if (it == m_author_pos.end()) {
        throw NotFound("unknown author '" + std::string(author_id) + "'");
    }
    std::vector<const Document*> out;
    for (auto d : m_docs_by_author[it->second]) {
        out.push_back(&m_documents[d]);
    }
    return out;
}

std::size_t Corpus::document_count(std::string_view author_id) const
{
    auto it = m_author_pos.find(author_id);
    if (it == m_author_pos.end()) {
        throw NotFound("unknown author '" + std::string(author_id) + "'");
    }
    return m_docs_by_author[it->second].size();
}

CorpusStats Corpus::stats() const
{
    CorpusStats s;
    s.n_documents = m_documents.size();
    s.n_authors = m_authors.size();
    for (const auto& d : m_documents) {
        s.n_associations += d.author_ids.size();
        s.docs_with_author += d.author_ids.empty() ? 0 : 1;
    }
    return s;
}

CorpusStats ingest_corpus(const std::filesystem::path& documents_path,
                          const std::filesystem::path& authors_path, const StoreLayout& store)
{
    auto corpus = Corpus::read(documents_path, authors_path);
    corpus.save(store);
    return corpus.stats();
}

}  // namespace expert
