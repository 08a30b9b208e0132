#include "expert/entity_linking.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

std::string token_key(std::string_view surface, std::size_t* n_tokens)
{
    auto toks = text::terms(surface);
    std::string key;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) {
            key.push_back(' ');
        }
        key += toks[i];
    }
    *n_tokens = toks.size();
    return key;
}

}  // namespace

LinkerDictionary LinkerDictionary::load(const std::filesystem::path& path)
{
    LinkerDictionary dict;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto fields = text::split(lines[i], '\t');
        if (fields.size() != 3) {
            throw ParseError(path, i + 1, "expected `surface TAB entity_id TAB score`");
        }
        try {
            dict.add(fields[0], std::string(fields[1]), text::parse_double(fields[2]));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return dict;
}

void LinkerDictionary::add(std::string_view surface, std::string entity_id, double score)
{
    if (!(score >= 0.0 && score <= 1.0)) {
        throw InvalidArgument("dictionary score outside [0,1]");
    }
    if (!text::is_valid_id(entity_id)) {
        throw InvalidArgument("invalid entity id '" + entity_id + "'");
    }
    std::size_t n = 0;
    auto key = token_key(text::normalize(surface), &n);
    if (n == 0) {
        throw InvalidArgument("surface form has no tokens");
    }
    m_max_tokens = std::max(m_max_tokens, n);
    auto& cands = m_entries[key];
    auto it = std::find_if(cands.begin(), cands.end(),
                           [&](const auto& c) { return c.entity_id == entity_id; });
    if (it != cands.end()) {
        it->score = std::max(it->score, score);
    } else {
        cands.push_back({std::move(entity_id), score});
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        return a.score != b.score ? a.score > b.score : a.entity_id < b.entity_id;
    });
}

const std::vector<LinkCandidate>* LinkerDictionary::find(std::string_view key) const
{
    auto it = m_entries.find(std::string(key));
    return it == m_entries.end() ? nullptr : &it->second;
}

std::vector<EntityAnnotation> annotate(std::string_view text, const LinkerDictionary& dictionary)
{
    std::vector<EntityAnnotation> out;
    auto tokens = text::tokenize(text);
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t longest = std::min(dictionary.max_tokens(), tokens.size() - i);
        bool matched = false;
        for (std::size_t len = longest; len >= 1; --len) {
            std::string key = tokens[i].text;
            for (std::size_t j = 1; j < len; ++j) {
                key.push_back(' ');
                key += tokens[i + j].text;
            }
            const auto* cands = dictionary.find(key);
            if (cands == nullptr || cands->empty()) {
                continue;
            }
            const auto& best = cands->front();
            auto begin = tokens[i].begin;
            auto end = tokens[i + len - 1].end;
            out.push_back({best.entity_id, std::string(text.substr(begin, end - begin)), begin, end,
                           best.score});
            i += len;
            matched = true;
            break;
        }
        if (!matched) {
            ++i;
        }
    }
    return out;
}

std::vector<EntityAnnotation> DictionaryLinker::annotate(std::string_view text) const
{
    return expert::annotate(text, m_dictionary);
}

std::vector<std::string> annotate_query(std::string_view query_text, const Linker& linker,
                                        double rho_filter)
{
    std::set<std::string> ids;
    for (auto& a : linker.annotate(text::normalize(query_text))) {
        if (a.rho > rho_filter) {
            ids.insert(std::move(a.entity_id));
        }
    }
    return {ids.begin(), ids.end()};
}

std::string annotation_text(const Document& doc)
{
    return doc.title + "\n" + doc.body;
}

AnnotationStore AnnotationStore::build(const Corpus& corpus, const Linker& linker)
{
    AnnotationStore store;
    for (const auto& doc : corpus.documents()) {
        store.set(doc.doc_id, linker.annotate(annotation_text(doc)));
    }
    return store;
}

void AnnotationStore::set(std::string doc_id, std::vector<EntityAnnotation> annotations)
{
    if (annotations.empty()) {
        m_by_doc.erase(doc_id);
        return;
    }
    m_by_doc[std::move(doc_id)] = std::move(annotations);
}

const std::vector<EntityAnnotation>& AnnotationStore::of(std::string_view doc_id) const
{
    static const std::vector<EntityAnnotation> none;
    auto it = m_by_doc.find(doc_id);
    return it == m_by_doc.end() ? none : it->second;
}

void AnnotationStore::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    for (const auto& [doc_id, anns] : m_by_doc) {
        for (const auto& a : anns) {
            out << doc_id << '\t' << a.entity_id << '\t' << a.begin << '\t' << a.end << '\t'
                << text::format_double(a.rho) << '\t' << text::escape_field(a.surface) << '\n';
        }
    }
    io::write_file(path, out.str());
}

AnnotationStore AnnotationStore::load(const std::filesystem::path& path)
{
    AnnotationStore store;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], '\t');
        if (f.size() != 6) {
            throw ParseError(path, i + 1, "expected 6 fields in annotation record");
        }
        try {
            EntityAnnotation a{std::string(f[1]), text::unescape_field(f[5]),
                               static_cast<std::size_t>(text::parse_int(f[2])),
                               static_cast<std::size_t>(text::parse_int(f[3])),
                               text::parse_double(f[4])};
            store.m_by_doc[std::string(f[0])].push_back(std::move(a));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return store;
}

std::vector<AuthorEntityEvidence> build_author_evidence(std::string_view author_id,
                                                        const Corpus& corpus,
                                                        const AnnotationStore& annotations,
                                                        double rho_threshold)
{
    std::map<std::string, AuthorEntityEvidence, std::less<>> by_entity;
    for (const auto* doc : corpus.documents_of(author_id)) {
        for (const auto& a : annotations.of(doc->doc_id)) {
            auto [it, inserted] = by_entity.try_emplace(a.entity_id);
            auto& ev = it->second;
            if (inserted) {
                ev.author_id = std::string(author_id);
                ev.entity_id = a.entity_id;
                ev.rho = a.rho;
            } else {
                ev.rho = std::max(ev.rho, a.rho);
            }
            if (ev.doc_ids.empty() || ev.doc_ids.back() != doc->doc_id) {
                ev.doc_ids.push_back(doc->doc_id);
            }
        }
    }
    std::vector<AuthorEntityEvidence> out;
    for (auto& [id, ev] : by_entity) {
        if (ev.rho > rho_threshold) {
            out.push_back(std::move(ev));
        }
    }
    return out;
}

}  // namespace expert
