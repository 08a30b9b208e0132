#include "expert/wem_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <sstream>

#include <spdlog/spdlog.h>

#include "expert/errors.hpp"
#include "expert/simd.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

double AuthorGraph::weight(std::size_t u, std::size_t v) const
{
    if (u > v) {
        std::swap(u, v);
    }
    for (const auto& e : edges) {
        if (e.u == u && e.v == v) {
            return e.weight;
        }
    }
    return 0.0;
}

AuthorGraph AuthorGraph::induced(std::span<const std::size_t> keep) const
{
    std::vector<std::size_t> remap(nodes.size(), nodes.size());
    AuthorGraph sub;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        remap.at(keep[i]) = i;
        sub.nodes.push_back(nodes[keep[i]]);
    }
    for (const auto& e : edges) {
        if (remap[e.u] < nodes.size() && remap[e.v] < nodes.size()) {
            auto u = remap[e.u];
            auto v = remap[e.v];
            sub.edges.push_back({std::min(u, v), std::max(u, v), e.weight});
        }
    }
    return sub;
}

AuthorGraph build_author_graph(std::span<const AuthorEntityEvidence> evidence,
                               Relatedness& relatedness)
{
    AuthorGraph graph;
    std::vector<std::optional<EntityIndex>> kb_index;
    for (const auto& ev : evidence) {
        graph.nodes.push_back(ev.entity_id);
        kb_index.push_back(relatedness.graph().find(ev.entity_id));
        if (!kb_index.back()) {
            spdlog::debug("entity {} of author {} is not in the knowledge graph", ev.entity_id,
                          ev.author_id);
        }
    }
    for (std::size_t u = 0; u < graph.nodes.size(); ++u) {
        if (!kb_index[u]) {
            continue;
        }
        for (std::size_t v = u + 1; v < graph.nodes.size(); ++v) {
            if (!kb_index[v]) {
                continue;
            }
            double w = relatedness(*kb_index[u], *kb_index[v]);
            if (w > 0.0) {
                graph.edges.push_back({u, v, w});
            }
        }
    }
    return graph;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

}  // namespace

OutlierResult remove_outliers(const AuthorGraph& graph, const OutlierConfig& config)
{
    const std::size_t n = graph.nodes.size();
    OutlierResult keep_all;
    keep_all.retained.resize(n);
    std::iota(keep_all.retained.begin(), keep_all.retained.end(), 0);
    if (n <= config.min_pts || config.min_pts < 2) {
        return keep_all;
    }

    std::vector<double> dist(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i * n + i] = 0.0;
    }
    for (const auto& e : graph.edges) {
        dist[e.u * n + e.v] = dist[e.v * n + e.u] = 1.0 - e.weight;
    }

    std::vector<double> core(n);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                row.push_back(dist[i * n + j]);
            }
        }
        auto kth = row.begin() + static_cast<std::ptrdiff_t>(config.min_pts - 2);
        std::nth_element(row.begin(), kth, row.end());
        core[i] = *kth;
    }
    auto reach = [&](std::size_t i, std::size_t j) {
        return std::max({core[i], core[j], dist[i * n + j]});
    };

    // Prim over the dense mutual-reachability graph; only cut-surviving tree
    // edges matter, so join them directly.
    DisjointSets sets(n);
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    best[0] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t next = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_tree[i] && (next == n || best[i] < best[next])) {
                next = i;
            }
        }
        in_tree[next] = true;
        if (step > 0 && best[next] <= config.cut_threshold) {
            sets.unite(next, from[next]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_tree[i]) {
                double d = reach(next, i);
                if (d < best[i]) {
                    best[i] = d;
                    from[i] = next;
                }
            }
        }
    }

    std::vector<std::size_t> component_size(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++component_size[sets.find(i)];
    }
    OutlierResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (component_size[sets.find(i)] < config.min_cluster_size) {
            result.noise.push_back(i);
        } else {
            result.retained.push_back(i);
        }
    }
    if (static_cast<double>(result.noise.size()) >
        config.max_noise_fraction * static_cast<double>(n) + 1e-9) {
        return keep_all;
    }
    result.clustering_applied = true;
    return result;
}

PprResult personalized_pagerank(const AuthorGraph& graph, std::span<const double> teleport,
                                 const PprConfig& config)
{
    const std::size_t n = graph.nodes.size();
    if (teleport.size() != n) {
        throw InvalidArgument("teleport vector does not match graph size");
    }
    PprResult result;
    if (n == 0) {
        return result;
    }
    std::vector<double> jump(teleport.begin(), teleport.end());
    double jump_mass = 0.0;
    for (double x : jump) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw InvalidArgument("teleport weights must be finite and non-negative");
        }
        jump_mass += x;
    }
    for (auto& x : jump) {
        x = jump_mass > 0.0 ? x / jump_mass : 1.0 / static_cast<double>(n);
    }

    struct Arc {
        std::size_t to;
        double weight;
    };
    std::vector<std::vector<Arc>> arcs(n);
    std::vector<double> out_weight(n, 0.0);
    for (const auto& e : graph.edges) {
        arcs[e.u].push_back({e.v, e.weight});
        arcs[e.v].push_back({e.u, e.weight});
        out_weight[e.u] += e.weight;
        out_weight[e.v] += e.weight;
    }

    const double d = config.damping;
    std::vector<double> rank = jump;
    std::vector<double> next(n);
    for (result.iterations = 1; result.iterations <= config.max_iterations; ++result.iterations) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = (1.0 - d) * jump[i];
            if (out_weight[i] <= 0.0) {
                dangling += rank[i];
            }
        }
        for (std::size_t u = 0; u < n; ++u) {
            if (out_weight[u] <= 0.0) {
                continue;
            }
            const double share = d * rank[u] / out_weight[u];
            for (const auto& arc : arcs[u]) {
                next[arc.to] += share * arc.weight;
            }
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] += d * dangling * jump[i];
            residual += std::abs(next[i] - rank[i]);
        }
        rank.swap(next);
        result.residual = residual;
        if (residual < config.tolerance) {
            break;
        }
    }
    result.iterations = std::min(result.iterations, config.max_iterations);
    const double mass = std::accumulate(rank.begin(), rank.end(), 0.0);
    for (auto& x : rank) {
        x /= mass;
    }
    result.scores = std::move(rank);
    return result;
}

std::vector<double> teleport_distribution(std::span<const AuthorEntityEvidence> evidence)
{
    std::vector<double> t;
    double total = 0.0;
    for (const auto& ev : evidence) {
        t.push_back(ev.rho * std::log(1.0 + static_cast<double>(ev.doc_count())));
        total += t.back();
    }
    for (auto& x : t) {
        x = total > 0.0 ? x / total : 1.0 / static_cast<double>(t.size());
    }
    return t;
}

std::vector<double> compute_relevance(const AuthorGraph& graph,
                                      std::span<const AuthorEntityEvidence> evidence,
                                      const PprConfig& config)
{
    if (evidence.size() != graph.nodes.size()) {
        throw InvalidArgument("evidence does not match graph nodes");
    }
    auto result = personalized_pagerank(graph, teleport_distribution(evidence), config);
    if (!graph.nodes.empty()) {
        spdlog::trace("ppr: {} nodes, {} iterations, residual {}", graph.nodes.size(),
                      result.iterations, result.residual);
    }
    return result.scores;
}

std::vector<float> build_author_vector(std::span<const std::string> ordered,
                                       std::span<const double> relevance,
                                       const EmbeddingModel& embeddings, std::size_t k,
                                       bool weighted)
{
    std::vector<float> sum(embeddings.dim(), 0.0F);
    const std::size_t top = std::min(k, ordered.size());
    if (weighted && relevance.size() < top) {
        throw InvalidArgument("relevance scores missing for weighted author vector");
    }
    for (std::size_t i = 0; i < top; ++i) {
        auto v = embeddings.find(ordered[i]);
        if (!v) {
            spdlog::debug("no embedding for {}; counted as zero vector", ordered[i]);
            continue;
        }
        if (weighted) {
            simd::axpy(static_cast<float>(relevance[i]), *v, sum);
        } else {
            simd::add(*v, sum);
        }
    }
    return sum;
}

const ProfileNode* WemProfile::find(std::string_view entity_id) const
{
    for (const auto& node : nodes) {
        if (node.entity_id == entity_id) {
            return &node;
        }
    }
    return nullptr;
}

std::vector<std::string> WemProfile::ordered_entities() const
{
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (const auto& node : nodes) {
        out.push_back(node.entity_id);
    }
    return out;
}

WemProfile build_profile(std::string_view author_id,
                         std::span<const AuthorEntityEvidence> evidence, Relatedness& relatedness,
                         const EmbeddingModel* embeddings, const WemConfig& config)
{
    WemProfile profile;
    profile.author_id = std::string(author_id);

    auto graph = build_author_graph(evidence, relatedness);
    auto outliers = remove_outliers(graph, config.outliers);
    if (!outliers.noise.empty()) {
        spdlog::debug("author {}: {} outlier entities removed", author_id, outliers.noise.size());
    }
    auto kept_graph = graph.induced(outliers.retained);
    std::vector<AuthorEntityEvidence> kept;
    for (auto i : outliers.retained) {
        kept.push_back(evidence[i]);
    }
    auto relevance = compute_relevance(kept_graph, kept, config.ppr);

    std::vector<std::size_t> order(kept.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (relevance[a] != relevance[b]) {
            return relevance[a] > relevance[b];
        }
        return kept[a].entity_id < kept[b].entity_id;
    });
    std::vector<std::string> ordered;
    std::vector<double> ordered_relevance;
    for (auto i : order) {
        profile.nodes.push_back(
            {kept[i].entity_id, relevance[i], kept[i].rho, kept[i].doc_count(), kept[i].doc_ids});
        ordered.push_back(kept[i].entity_id);
        ordered_relevance.push_back(relevance[i]);
    }
    for (const auto& e : kept_graph.edges) {
        const auto& a = kept_graph.nodes[e.u];
        const auto& b = kept_graph.nodes[e.v];
        profile.edges.push_back({std::min(a, b), std::max(a, b), e.weight});
    }
    std::sort(profile.edges.begin(), profile.edges.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });

    if (embeddings != nullptr) {
        profile.vector = build_author_vector(ordered, ordered_relevance, *embeddings,
                                             config.embed_k, config.weighted_author_vector);
    } else {
        profile.vector.assign(EmbeddingModel::default_dim, 0.0F);
    }
    return profile;
}

void save_profile(const WemProfile& profile, const std::filesystem::path& path)
{
    std::ostringstream out;
    for (const auto& n : profile.nodes) {
        out << "N " << n.entity_id << ' ' << text::format_double(n.relevance) << ' '
            << text::format_double(n.rho) << ' ' << n.doc_count << '\n';
    }
    for (const auto& e : profile.edges) {
        out << "E " << e.a << ' ' << e.b << ' ' << text::format_double(e.weight) << '\n';
    }
    out << 'V';
    for (float x : profile.vector) {
        out << ' ' << text::format_float(x);
    }
    out << '\n';
    io::write_file(path, out.str());
}

WemProfile load_profile(std::string author_id, const std::filesystem::path& path)
{
    WemProfile profile;
    profile.author_id = std::move(author_id);
    auto lines = io::read_lines(path);
    bool have_vector = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], ' ');
        try {
            if (f[0] == "N" && f.size() == 5) {
                profile.nodes.push_back({std::string(f[1]), text::parse_double(f[2]),
                                         text::parse_double(f[3]),
                                         static_cast<std::size_t>(text::parse_int(f[4])),
                                         {}});
            } else if (f[0] == "E" && f.size() == 4) {
                profile.edges.push_back(
                    {std::string(f[1]), std::string(f[2]), text::parse_double(f[3])});
            } else if (f[0] == "V" && !have_vector) {
                for (std::size_t j = 1; j < f.size(); ++j) {
                    profile.vector.push_back(text::parse_float(f[j]));
                }
                have_vector = true;
            } else {
                throw InvalidArgument("unrecognized profile record");
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    if (!have_vector) {
        throw ParseError(path, lines.size(), "profile has no vector line");
    }
    return profile;
}

DoubleIndex::PostingMap transpose(const DoubleIndex::PostingMap& postings)
{
    DoubleIndex::PostingMap out;
    for (const auto& [key, values] : postings) {
        for (const auto& v : values) {
            out[v].push_back(key);
        }
    }
    for (auto& [key, values] : out) {
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
    }
    return out;
}

DoubleIndex DoubleIndex::from_author_lists(PostingMap author_entities)
{
    DoubleIndex index;
    for (auto& [author, entities] : author_entities) {
        std::sort(entities.begin(), entities.end());
        entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
    }
    index.m_entity_authors = transpose(author_entities);
    index.m_author_entities = std::move(author_entities);
    return index;
}

DoubleIndex DoubleIndex::build(std::span<const WemProfile> profiles)
{
    PostingMap lists;
    for (const auto& p : profiles) {
        auto& entities = lists[p.author_id];
        for (const auto& n : p.nodes) {
            entities.push_back(n.entity_id);
        }
    }
    return from_author_lists(std::move(lists));
}

void DoubleIndex::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    auto write = [&](char tag, const PostingMap& map) {
        for (const auto& [key, values] : map) {
            out << tag << '\t' << key;
            for (const auto& v : values) {
                out << '\t' << v;
            }
            out << '\n';
        }
    };
    write('A', m_author_entities);
    write('E', m_entity_authors);
    io::write_file(path, out.str());
}

DoubleIndex DoubleIndex::load(const std::filesystem::path& path)
{
    PostingMap authors;
    PostingMap entities;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], '\t');
        if (f.size() < 2 || (f[0] != "A" && f[0] != "E")) {
            throw ParseError(path, i + 1, "unrecognized double-index record");
        }
        auto& list = (f[0] == "A" ? authors : entities)[std::string(f[1])];
        for (std::size_t j = 2; j < f.size(); ++j) {
            list.emplace_back(f[j]);
        }
    }
    auto index = from_author_lists(std::move(authors));
    if (index.m_entity_authors != entities) {
        throw ParseError(path, 1, "entity->authors lists are not the transpose of author->entities");
    }
    return index;
}

const std::vector<std::string>& DoubleIndex::authors_of(std::string_view entity_id) const
{
    static const std::vector<std::string> none;
    auto it = m_entity_authors.find(entity_id);
    return it == m_entity_authors.end() ? none : it->second;
}

const std::vector<std::string>& DoubleIndex::entities_of(std::string_view author_id) const
{
    static const std::vector<std::string> none;
    auto it = m_author_entities.find(author_id);
    return it == m_author_entities.end() ? none : it->second;
}

}  // namespace expert
