#include "expert/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

void sort_unique(std::vector<EntityIndex>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<std::string> entity_ids,
                               const std::vector<std::pair<std::string, std::string>>& links)
    : m_ids(std::move(entity_ids))
{
    if (m_ids.empty()) {
        throw InvalidArgument("knowledge graph needs at least one entity");
    }
    std::sort(m_ids.begin(), m_ids.end());
    for (std::size_t i = 0; i < m_ids.size(); ++i) {
        if (!text::is_valid_id(m_ids[i])) {
            throw InvalidArgument("invalid entity id '" + m_ids[i] + "'");
        }
        if (!m_index.emplace(m_ids[i], static_cast<EntityIndex>(i)).second) {
            throw InvalidArgument("duplicate entity id '" + m_ids[i] + "'");
        }
    }
    m_in.resize(m_ids.size());
    m_undirected.resize(m_ids.size());
    for (const auto& [src, dst] : links) {
        auto s = find(src);
        auto t = find(dst);
        if (!s || !t) {
            throw InvalidArgument("link endpoint not in entity set: " + src + " -> " + dst);
        }
        m_in[*t].push_back(*s);
        if (*s != *t) {
            m_undirected[*s].push_back(*t);
            m_undirected[*t].push_back(*s);
        }
    }
    for (auto& v : m_in) {
        sort_unique(v);
        m_link_count += v.size();
    }
    for (auto& v : m_undirected) {
        sort_unique(v);
    }
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& path)
{
    auto lines = io::read_lines(path);
    std::optional<long long> declared;
    std::vector<std::string> ids;
    std::vector<std::pair<std::string, std::string>> links;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.empty()) {
            continue;
        }
        try {
            if (line.starts_with("#entities")) {
                auto rest = std::string_view(line).substr(9);
                while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) {
                    rest.remove_prefix(1);
                }
                declared = text::parse_int(rest);
                continue;
            }
            auto f = text::split(line, '\t');
            if (f[0] == "E" && f.size() == 2) {
                ids.emplace_back(f[1]);
            } else if (f[0] == "L" && f.size() == 3) {
                links.emplace_back(std::string(f[1]), std::string(f[2]));
            } else {
                throw InvalidArgument("unrecognized snapshot record");
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    if (!declared) {
        throw ParseError(path, 1, "missing `#entities N` header");
    }
    if (*declared != static_cast<long long>(ids.size())) {
        throw ParseError(path, 1,
                         "header declares " + std::to_string(*declared) + " entities but " +
                             std::to_string(ids.size()) + " are listed");
    }
    try {
        return KnowledgeGraph(std::move(ids), links);
    } catch (const InvalidArgument& e) {
        throw ParseError(path, 1, e.what());
    }
}

void KnowledgeGraph::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    out << "#entities " << m_ids.size() << '\n';
    for (const auto& id : m_ids) {
        out << "E\t" << id << '\n';
    }
    for (std::size_t t = 0; t < m_in.size(); ++t) {
        for (auto s : m_in[t]) {
            out << "L\t" << m_ids[s] << '\t' << m_ids[t] << '\n';
        }
    }
    io::write_file(path, out.str());
}

std::optional<EntityIndex> KnowledgeGraph::find(std::string_view id) const
{
    auto it = m_index.find(std::string(id));
    if (it == m_index.end()) {
        return std::nullopt;
    }
    return it->second;
}

EntityIndex KnowledgeGraph::index_of(std::string_view id) const
{
    auto e = find(id);
    if (!e) {
        throw NotFound("entity '" + std::string(id) + "' is not in the knowledge graph");
    }
    return *e;
}

std::span<const EntityIndex> KnowledgeGraph::in_links(EntityIndex e) const { return m_in.at(e); }

std::span<const EntityIndex> KnowledgeGraph::neighbors(EntityIndex e) const
{
    return m_undirected.at(e);
}

double milne_witten(std::span<const EntityIndex> a, std::span<const EntityIndex> b,
                    std::size_t total)
{
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    if (common == 0) {
        return 0.0;
    }
    const auto larger = static_cast<double>(std::max(a.size(), b.size()));
    const auto smaller = static_cast<double>(std::min(a.size(), b.size()));
    const double denom = std::log(static_cast<double>(total)) - std::log(smaller);
    if (denom <= 0.0) {
        // min in-degree equals W: limit of the formula with a shared in-link.
        return 1.0;
    }
    const double value = 1.0 - (std::log(larger) - std::log(static_cast<double>(common))) / denom;
    return std::clamp(value, 0.0, 1.0);
}

double MilneWitten::operator()(const KnowledgeGraph& graph, EntityIndex a, EntityIndex b) const
{
    return milne_witten(graph.in_links(a), graph.in_links(b), graph.size());
}

CacheStats RelatednessCache::stats() const
{
    std::shared_lock lock(m_mutex);
    return {m_hits.load(), m_misses.load(), m_values.size()};
}

void RelatednessCache::clear()
{
    std::unique_lock lock(m_mutex);
    m_values.clear();
    m_hits = 0;
    m_misses = 0;
}

Relatedness::Relatedness(const KnowledgeGraph& graph)
    : Relatedness(graph, std::make_shared<MilneWitten>())
{}

Relatedness::Relatedness(const KnowledgeGraph& graph,
                         std::shared_ptr<const RelatednessMeasure> measure)
    : m_graph(graph), m_measure(std::move(measure))
{}

double Relatedness::operator()(std::string_view a, std::string_view b)
{
    return (*this)(m_graph.index_of(a), m_graph.index_of(b));
}

double Relatedness::operator()(EntityIndex a, EntityIndex b)
{
    return m_cache.get_or_compute(a, b, [&] { return uncached(a, b); });
}

double Relatedness::uncached(EntityIndex a, EntityIndex b) const
{
    // Canonical argument order keeps custom measures symmetric bit-for-bit.
    if (a > b) {
        std::swap(a, b);
    }
    return (*m_measure)(m_graph, a, b);
}

}  // namespace expert
