#include "expert/profile_retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "expert/errors.hpp"
#include "expert/simd.hpp"

namespace expert {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const Enum (&values)[N], const char* what)
{
    for (auto v : values) {
        if (s == to_string(v)) {
            return v;
        }
    }
    throw InvalidArgument("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Scaling scaling)
{
    switch (scaling) {
    case Scaling::identity: return "identity";
    case Scaling::sigmoid: return "sigmoid";
    case Scaling::sqrt: return "sqrt";
    case Scaling::square: return "square";
    }
    return "identity";
}

std::string_view to_string(ExactMethod m)
{
    switch (m) {
    case ExactMethod::ec_iaf: return "ec_iaf";
    case ExactMethod::ef_iaf: return "ef_iaf";
    case ExactMethod::rec_iaf: return "rec_iaf";
    }
    return "rec_iaf";
}

std::string_view to_string(Aggregation a)
{
    return a == Aggregation::max ? "max" : "mean";
}

std::string_view to_string(RelatedMethod m)
{
    switch (m) {
    case RelatedMethod::aer: return "aer";
    case RelatedMethod::raer: return "raer";
    case RelatedMethod::aes: return "aes";
    }
    return "aer";
}

Scaling parse_scaling(std::string_view s)
{
    static const Scaling all[] = {Scaling::identity, Scaling::sigmoid, Scaling::sqrt,
                                  Scaling::square};
    return parse_enum(s, all, "scaling function");
}

ExactMethod parse_exact_method(std::string_view s)
{
    static const ExactMethod all[] = {ExactMethod::ec_iaf, ExactMethod::ef_iaf,
                                      ExactMethod::rec_iaf};
    return parse_enum(s, all, "exact-match method");
}

Aggregation parse_aggregation(std::string_view s)
{
    static const Aggregation all[] = {Aggregation::max, Aggregation::mean};
    return parse_enum(s, all, "aggregation");
}

RelatedMethod parse_related_method(std::string_view s)
{
    static const RelatedMethod all[] = {RelatedMethod::aer, RelatedMethod::raer,
                                        RelatedMethod::aes};
    return parse_enum(s, all, "related-match method");
}

double scale(Scaling scaling, double r)
{
    switch (scaling) {
    case Scaling::identity: return r;
    case Scaling::sigmoid: return 1.0 / (1.0 + std::exp(-r));
    case Scaling::sqrt: return std::sqrt(r);
    case Scaling::square: return r * r;
    }
    return r;
}

void RelatedMatchConfig::validate() const
{
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) {
        throw InvalidArgument("top_fraction must be in (0,1]");
    }
}

ProfileSearcher::ProfileSearcher(std::vector<WemProfile> profiles,
                                 std::map<std::string, std::size_t> doc_counts,
                                 std::size_t n_authors, Relatedness* relatedness,
                                 const EmbeddingModel* embeddings)
    : m_doc_counts(doc_counts.begin(), doc_counts.end()),
      m_n_authors(n_authors),
      m_index(DoubleIndex::build(profiles)),
      m_relatedness(relatedness),
      m_embeddings(embeddings)
{
    for (auto& p : profiles) {
        auto id = p.author_id;
        m_profiles.emplace(std::move(id), std::move(p));
    }
}

std::vector<std::string> ProfileSearcher::candidate_authors(
    std::span<const std::string> query_entities) const
{
    std::set<std::string> out;
    for (const auto& e : query_entities) {
        const auto& authors = m_index.authors_of(e);
        out.insert(authors.begin(), authors.end());
    }
    return {out.begin(), out.end()};
}

double ProfileSearcher::iaf(std::string_view entity_id) const
{
    const auto n = m_index.authors_of(entity_id).size();
    if (n == 0) {
        throw InvalidArgument("iaf undefined: no author mentions '" + std::string(entity_id) + "'");
    }
    return std::log(static_cast<double>(m_n_authors) / static_cast<double>(n));
}

const WemProfile& ProfileSearcher::profile(std::string_view author_id) const
{
    auto it = m_profiles.find(author_id);
    if (it == m_profiles.end()) {
        throw NotFound("no profile for author '" + std::string(author_id) + "'");
    }
    return it->second;
}

bool ProfileSearcher::has_profile(std::string_view author_id) const
{
    return m_profiles.contains(author_id);
}

ScoreBreakdown ProfileSearcher::exact_match_score(std::string_view author_id,
                                                  std::span<const std::string> query_entities,
                                                  const ExactMatchConfig& config) const
{
    const auto& p = profile(author_id);
    ScoreBreakdown out;
    if (query_entities.empty()) {
        return out;
    }
    std::vector<double> g;
    std::vector<double> matched;
    for (const auto& e : query_entities) {
        const auto* node = p.find(e);
        double value = 0.0;
        if (node != nullptr) {
            const double ec = static_cast<double>(node->doc_count) * node->rho * iaf(e);
            switch (config.method) {
            case ExactMethod::ec_iaf: value = ec; break;
            case ExactMethod::ef_iaf: {
                auto it = m_doc_counts.find(author_id);
                const auto docs = it == m_doc_counts.end() ? 0 : it->second;
                if (docs == 0) {
                    throw InvalidArgument("ef_iaf needs |D_a| for author '" +
                                          std::string(author_id) + "'");
                }
                value = ec / static_cast<double>(docs);
                break;
            }
            case ExactMethod::rec_iaf: value = scale(config.scaling, node->relevance) * ec; break;
            }
        }
        g.push_back(value);
        matched.push_back(node != nullptr ? 1.0 : 0.0);
    }
    if (config.aggregation == Aggregation::max) {
        auto best = std::max_element(g.begin(), g.end()) - g.begin();
        out.score = g[static_cast<std::size_t>(best)];
        for (std::size_t i = 0; i < g.size(); ++i) {
            out.terms.push_back({query_entities[i], query_entities[i], matched[i],
                                 static_cast<std::ptrdiff_t>(i) == best ? g[i] : 0.0});
        }
    } else {
        double sum = 0.0;
        for (double x : g) {
            sum += x;
        }
        const auto n = static_cast<double>(g.size());
        out.score = sum / n;
        for (std::size_t i = 0; i < g.size(); ++i) {
            out.terms.push_back({query_entities[i], query_entities[i], matched[i], g[i] / n});
        }
    }
    return out;
}

double ProfileSearcher::relatedness(std::string_view a, std::string_view b) const
{
    if (m_relatedness == nullptr) {
        throw InvalidArgument("related-match scoring needs a knowledge graph");
    }
    const auto& graph = m_relatedness->graph();
    auto ia = graph.find(a);
    auto ib = graph.find(b);
    if (!ia || !ib) {
        return 0.0;
    }
    return (*m_relatedness)(*ia, *ib);
}

ScoreBreakdown ProfileSearcher::related_match_score(std::string_view author_id,
                                                    std::span<const std::string> query_entities,
                                                    const RelatedMatchConfig& config) const
{
    config.validate();
    const auto& p = profile(author_id);
    ScoreBreakdown out;
    if (query_entities.empty() || p.nodes.empty()) {
        return out;
    }

    if (config.method == RelatedMethod::aes) {
        if (m_embeddings == nullptr) {
            throw InvalidArgument("aes scoring needs entity embeddings");
        }
        std::vector<float> query_vec(m_embeddings->dim(), 0.0F);
        for (const auto& e : query_entities) {
            if (auto v = m_embeddings->find(e)) {
                simd::add(*v, query_vec);
            }
        }
        if (p.vector.size() != query_vec.size()) {
            throw InvalidArgument("author vector dimension differs from the embedding model");
        }
        out.score = cosine(query_vec, p.vector);
        out.terms.push_back({"*", "*", 1.0, out.score});
        return out;
    }

    const auto n = p.nodes.size();
    auto k = static_cast<std::size_t>(
        std::ceil(config.top_fraction * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    const double norm = static_cast<double>(k) * static_cast<double>(query_entities.size());
    double sum = 0.0;
    for (const auto& q : query_entities) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto& node = p.nodes[i];
            const double rel = relatedness(q, node.entity_id);
            double term = node.rho * rel;
            if (config.method == RelatedMethod::raer) {
                term *= scale(config.scaling, node.relevance);
            }
            sum += term;
            out.terms.push_back({q, node.entity_id, rel, term / norm});
        }
    }
    out.score = sum / norm;
    return out;
}

ScoreBreakdown ProfileSearcher::score(std::string_view author_id,
                                      std::span<const std::string> query_entities,
                                      const ProfileStrategy& strategy) const
{
    return std::visit(
        [&](const auto& cfg) -> ScoreBreakdown {
            if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, ExactMatchConfig>) {
                return exact_match_score(author_id, query_entities, cfg);
            } else {
                return related_match_score(author_id, query_entities, cfg);
            }
        },
        strategy);
}

RankedRun ProfileSearcher::rank(std::string query_id, std::span<const std::string> query_entities,
                                const ProfileStrategy& strategy) const
{
    std::vector<std::pair<std::string, double>> scores;
    for (auto& author : candidate_authors(query_entities)) {
        double s = score(author, query_entities, strategy).score;
        scores.emplace_back(std::move(author), s);
    }
    return RankedRun::from_scores(std::move(query_id), std::move(scores));
}

RankedRun rank_authors_profile_centric(std::string query_id, std::string_view query_text,
                                       const Linker& linker, double query_rho_filter,
                                       const ProfileSearcher& searcher,
                                       const ProfileStrategy& strategy)
{
    auto entities = annotate_query(query_text, linker, query_rho_filter);
    if (entities.empty()) {
        spdlog::info("query {}: no entities linked; profile-centric run is empty", query_id);
        return RankedRun{std::move(query_id), {}};
    }
    auto run = searcher.rank(std::move(query_id), entities, strategy);
    if (run.empty()) {
        spdlog::info("query {}: {} entities linked but no candidate authors", run.query_id,
                     entities.size());
    }
    return run;
}

}  // namespace expert
