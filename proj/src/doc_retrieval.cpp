#include "expert/doc_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::tfidf: return "tfidf";
    case Scheme::bm25: return "bm25";
    case Scheme::lm_dirichlet: return "lm_dirichlet";
    case Scheme::lm_jelinek_mercer: return "lm_jelinek_mercer";
    }
    return "bm25";
}

Scheme parse_scheme(std::string_view s)
{
    for (auto v : {Scheme::tfidf, Scheme::bm25, Scheme::lm_dirichlet, Scheme::lm_jelinek_mercer}) {
        if (s == to_string(v)) {
            return v;
        }
    }
    throw InvalidArgument("unknown scoring scheme '" + std::string(s) + "'");
}

void ScoringScheme::validate() const
{
    if (!(k1 >= 0.0)) {
        throw InvalidArgument("bm25 k1 must be >= 0");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw InvalidArgument("bm25 b must be in [0,1]");
    }
    if (!(mu > 0.0)) {
        throw InvalidArgument("dirichlet mu must be > 0");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw InvalidArgument("jelinek-mercer lambda must be in (0,1)");
    }
}

std::vector<std::string> index_terms(const Document& doc)
{
    auto out = text::terms(doc.title);
    auto body = text::terms(doc.body);
    out.insert(out.end(), std::make_move_iterator(body.begin()),
               std::make_move_iterator(body.end()));
    return out;
}

void InvertedIndex::add_document(std::string doc_id, std::span<const std::string> terms)
{
    const auto doc = static_cast<std::uint32_t>(m_doc_ids.size());
    m_doc_ids.push_back(std::move(doc_id));
    m_doc_len.push_back(static_cast<std::uint32_t>(terms.size()));
    m_total_length += terms.size();
    for (const auto& t : terms) {
        auto& entry = m_terms[t];
        ++entry.cf;
        if (entry.postings.empty() || entry.postings.back().doc != doc) {
            entry.postings.push_back({doc, 1});
        } else {
            ++entry.postings.back().tf;
        }
    }
}

InvertedIndex InvertedIndex::build(const Corpus& corpus)
{
    InvertedIndex index;
    for (const auto& doc : corpus.documents()) {
        index.add_document(doc.doc_id, index_terms(doc));
    }
    return index;
}

void InvertedIndex::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    for (std::size_t i = 0; i < m_doc_ids.size(); ++i) {
        out << "D\t" << m_doc_ids[i] << '\t' << m_doc_len[i] << '\n';
    }
    std::vector<const std::string*> terms;
    for (const auto& [term, entry] : m_terms) {
        terms.push_back(&term);
    }
    std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
    for (const auto* term : terms) {
        out << "T\t" << *term;
        for (const auto& p : m_terms.at(*term).postings) {
            out << '\t' << p.doc << ':' << p.tf;
        }
        out << '\n';
    }
    io::write_file(path, out.str());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path)
{
    InvertedIndex index;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], '\t');
        try {
            if (f[0] == "D" && f.size() == 3) {
                index.m_doc_ids.emplace_back(f[1]);
                auto len = static_cast<std::uint32_t>(text::parse_int(f[2]));
                index.m_doc_len.push_back(len);
                index.m_total_length += len;
            } else if (f[0] == "T" && f.size() >= 3) {
                auto& entry = index.m_terms[std::string(f[1])];
                for (std::size_t j = 2; j < f.size(); ++j) {
                    auto colon = f[j].find(':');
                    if (colon == std::string_view::npos) {
                        throw InvalidArgument("posting without ':'");
                    }
                    Posting p{static_cast<std::uint32_t>(text::parse_int(f[j].substr(0, colon))),
                              static_cast<std::uint32_t>(text::parse_int(f[j].substr(colon + 1)))};
                    if (p.doc >= index.m_doc_ids.size()) {
                        throw InvalidArgument("posting references unknown document");
                    }
                    entry.cf += p.tf;
                    entry.postings.push_back(p);
                }
            } else {
                throw InvalidArgument("unrecognized postings record");
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return index;
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const
{
    auto it = m_terms.find(std::string(term));
    return it == m_terms.end() ? 0 : it->second.postings.size();
}

std::size_t InvertedIndex::collection_frequency(std::string_view term) const
{
    auto it = m_terms.find(std::string(term));
    return it == m_terms.end() ? 0 : it->second.cf;
}

bool InvertedIndex::matches_any(std::string_view query) const
{
    for (const auto& t : text::terms(text::normalize(query))) {
        if (m_terms.contains(t)) {
            return true;
        }
    }
    return false;
}

std::vector<DocScore> InvertedIndex::score(std::string_view query, const ScoringScheme& scheme,
                                           std::size_t max_docs) const
{
    scheme.validate();
    const auto n_docs = static_cast<double>(m_doc_ids.size());
    const double avgdl = m_doc_ids.empty() ? 0.0 : static_cast<double>(m_total_length) / n_docs;
    const auto total = static_cast<double>(m_total_length);

    std::vector<double> acc(m_doc_ids.size(), 0.0);
    std::vector<bool> touched(m_doc_ids.size(), false);
    for (const auto& term : text::terms(text::normalize(query))) {
        auto it = m_terms.find(term);
        if (it == m_terms.end()) {
            continue;
        }
        const auto& entry = it->second;
        const auto df = static_cast<double>(entry.postings.size());
        const double p_coll = static_cast<double>(entry.cf) / total;
        const double bm25_idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        const double tfidf_idf = std::log(n_docs / df);
        for (const auto& p : entry.postings) {
            const auto tf = static_cast<double>(p.tf);
            const auto dl = static_cast<double>(m_doc_len[p.doc]);
            double s = 0.0;
            switch (scheme.kind) {
            case Scheme::tfidf:
                s = tf * tfidf_idf;
                break;
            case Scheme::bm25:
                s = bm25_idf * tf * (scheme.k1 + 1.0) /
                    (tf + scheme.k1 * (1.0 - scheme.b + scheme.b * dl / avgdl));
                break;
            case Scheme::lm_dirichlet: {
                // Smoothed document model over collection model, floored at
                // zero. Ratios within rounding of 1 count as zero so that a
                // document matching the collection model is not retrieved on
                // noise.
                const double ratio = (tf + scheme.mu * p_coll) / ((dl + scheme.mu) * p_coll);
                s = ratio > 1.0 + 1e-12 ? std::log(ratio) : 0.0;
                break;
            }
            case Scheme::lm_jelinek_mercer:
                s = std::log(1.0 + ((1.0 - scheme.lambda) * tf / dl) / (scheme.lambda * p_coll));
                break;
            }
            acc[p.doc] += s;
            touched[p.doc] = true;
        }
    }

    std::vector<DocScore> out;
    for (std::size_t d = 0; d < acc.size(); ++d) {
        if (touched[d] && acc[d] > 0.0) {
            out.push_back({m_doc_ids[d], acc[d], 0});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    if (out.size() > max_docs) {
        out.resize(max_docs);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].rank = i + 1;
    }
    return out;
}

std::string_view to_string(DocFusion fusion)
{
    switch (fusion) {
    case DocFusion::meank: return "meank";
    case DocFusion::max: return "max";
    case DocFusion::rr: return "rr";
    case DocFusion::combnz: return "combnz";
    }
    return "rr";
}

DocFusion parse_doc_fusion(std::string_view s)
{
    for (auto v : {DocFusion::meank, DocFusion::max, DocFusion::rr, DocFusion::combnz}) {
        if (s == to_string(v)) {
            return v;
        }
    }
    throw InvalidArgument("unknown document fusion '" + std::string(s) + "'");
}

namespace {

void check_fusion_args(std::span<const DocScore> docs, DocFusion method, std::size_t k)
{
    if (docs.empty()) {
        throw InvalidArgument("document fusion needs at least one retrieved document");
    }
    if (method == DocFusion::meank && k == 0) {
        throw InvalidArgument("meank requires k >= 1");
    }
}

std::vector<std::size_t> by_score(std::span<const DocScore> docs)
{
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return docs[a].score > docs[b].score; });
    return order;
}

}  // namespace

double fuse_doc_scores(std::span<const DocScore> author_docs, std::size_t author_doc_count,
                       DocFusion method, std::size_t k)
{
    check_fusion_args(author_docs, method, k);
    switch (method) {
    case DocFusion::meank: {
        auto order = by_score(author_docs);
        double sum = 0.0;
        for (std::size_t j = 0; j < std::min(k, order.size()); ++j) {
            sum += author_docs[order[j]].score;
        }
        return sum / static_cast<double>(k);
    }
    case DocFusion::max: {
        double best = author_docs.front().score;
        for (const auto& d : author_docs) {
            best = std::max(best, d.score);
        }
        return best;
    }
    case DocFusion::rr: {
        double sum = 0.0;
        for (const auto& d : author_docs) {
            sum += 1.0 / static_cast<double>(d.rank);
        }
        return sum;
    }
    case DocFusion::combnz: {
        if (author_doc_count == 0) {
            throw InvalidArgument("combnz needs |D_a| >= 1");
        }
        double sum = 0.0;
        for (const auto& d : author_docs) {
            sum += d.score;
        }
        return static_cast<double>(author_docs.size()) / static_cast<double>(author_doc_count) *
               sum;
    }
    }
    return 0.0;
}

std::vector<double> doc_fusion_terms(std::span<const DocScore> author_docs,
                                     std::size_t author_doc_count, DocFusion method,
                                     std::size_t k)
{
    check_fusion_args(author_docs, method, k);
    std::vector<double> terms(author_docs.size(), 0.0);
    auto order = by_score(author_docs);
    switch (method) {
    case DocFusion::meank:
        for (std::size_t j = 0; j < std::min(k, order.size()); ++j) {
            terms[order[j]] = author_docs[order[j]].score / static_cast<double>(k);
        }
        break;
    case DocFusion::max:
        terms[order.front()] = author_docs[order.front()].score;
        break;
    case DocFusion::rr:
        for (std::size_t j = 0; j < author_docs.size(); ++j) {
            terms[j] = 1.0 / static_cast<double>(author_docs[j].rank);
        }
        break;
    case DocFusion::combnz: {
        const double factor =
            static_cast<double>(author_docs.size()) / static_cast<double>(author_doc_count);
        for (std::size_t j = 0; j < author_docs.size(); ++j) {
            terms[j] = factor * author_docs[j].score;
        }
        break;
    }
    }
    return terms;
}

std::map<std::string, std::vector<DocScore>> group_by_author(std::span<const DocScore> docs,
                                                             const Corpus& corpus)
{
    std::map<std::string, std::vector<DocScore>> out;
    for (const auto& d : docs) {
        for (const auto& a : corpus.document(d.doc_id).author_ids) {
            out[a].push_back(d);
        }
    }
    return out;
}

RankedRun rank_authors_doc_centric(std::string query_id, std::string_view query_text,
                                   const InvertedIndex& index, const Corpus& corpus,
                                   const DocCentricConfig& config)
{
    auto docs = index.score(query_text, config.scheme, config.max_docs);
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& [author, author_docs] : group_by_author(docs, corpus)) {
        scores.emplace_back(author, fuse_doc_scores(author_docs, corpus.document_count(author),
                                                    config.fusion, config.meank_k));
    }
    return RankedRun::from_scores(std::move(query_id), std::move(scores));
}

}  // namespace expert
