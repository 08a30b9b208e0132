#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expert/embeddings.hpp"
#include "expert/entity_linking.hpp"
#include "expert/knowledge_base.hpp"

namespace expert {

struct WeightedEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;

    bool operator==(const WeightedEdge&) const = default;
};

/// Undirected entity graph of one author. Node i is nodes[i]; edges have
/// u < v and weight in (0, 1].
struct AuthorGraph {
    std::vector<std::string> nodes;
    std::vector<WeightedEdge> edges;

    /// Weight of (u, v); 0 when there is no edge.
    double weight(std::size_t u, std::size_t v) const;
    /// Keeps only `keep` (node indices, ascending) and the edges between them.
    AuthorGraph induced(std::span<const std::size_t> keep) const;
};

/// One node per evidence record (same order); an edge for every pair whose
/// relatedness is positive. Entities unknown to the snapshot get no edges.
AuthorGraph build_author_graph(std::span<const AuthorEntityEvidence> evidence,
                               Relatedness& relatedness);

/// Parameters of the MST density clustering used to find off-topic entities.
struct OutlierConfig {
    /// Core distance is the distance to the (min_pts - 1)-th nearest other node.
    std::size_t min_pts = 3;
    /// MST edges with mutual-reachability distance above this are cut.
    double cut_threshold = 0.8;
    /// Components smaller than this are noise.
    std::size_t min_cluster_size = 2;
    /// If more than this fraction of nodes is noise, the clustering is discarded.
    double max_noise_fraction = 0.2;
};

struct OutlierResult {
    std::vector<std::size_t> retained;
    std::vector<std::size_t> noise;
    /// False when the clustering was skipped or rejected and every node kept.
    bool clustering_applied = false;
};

/// Density clustering over d(u,v) = 1 - weight(u,v) (1 without an edge):
/// mutual-reachability distances, their minimum spanning tree, cut at
/// `cut_threshold`. Members of small components are outliers.
OutlierResult remove_outliers(const AuthorGraph& graph, const OutlierConfig& config = {});

struct PprConfig {
    double damping = 0.85;
    double tolerance = 1e-9;
    std::size_t max_iterations = 200;
};

struct PprResult {
    std::vector<double> scores;
    std::size_t iterations = 0;
    /// L1 change of the last iteration.
    double residual = 0.0;
};

/// Power iteration of personalized PageRank. Transitions are proportional to
/// edge weight; dangling nodes jump by the teleport distribution, which also
/// seeds the iteration. `teleport` is normalized here (all-zero => uniform).
PprResult personalized_pagerank(const AuthorGraph& graph, std::span<const double> teleport,
                                 const PprConfig& config = {});

/// Pr(e) proportional to rho_{e,a} * ln(1 + |D_{a,e}|), normalized.
std::vector<double> teleport_distribution(std::span<const AuthorEntityEvidence> evidence);

/// r_{a,.} aligned with graph.nodes. `evidence` must be aligned with the nodes too.
std::vector<double> compute_relevance(const AuthorGraph& graph,
                                      std::span<const AuthorEntityEvidence> evidence,
                                      const PprConfig& config = {});

/// Sum of the vectors of the first min(k, n) entities of `ordered`
/// (relevance-weighted when `weighted`). Missing vectors count as zero.
std::vector<float> build_author_vector(std::span<const std::string> ordered,
                                       std::span<const double> relevance,
                                       const EmbeddingModel& embeddings, std::size_t k,
                                       bool weighted = false);

struct ProfileNode {
    std::string entity_id;
    double relevance = 0.0;
    double rho = 0.0;
    std::size_t doc_count = 0;
    /// D_{a,e}; not stored in the profile file.
    std::vector<std::string> doc_ids;

    bool operator==(const ProfileNode&) const = default;
};

struct ProfileEdge {
    std::string a;
    std::string b;
    double weight = 0.0;

    bool operator==(const ProfileEdge&) const = default;
};

/// The Wikipedia Expertise Model of one author.
struct WemProfile {
    std::string author_id;
    /// Retained entities ordered by relevance descending, ties by entity_id.
    std::vector<ProfileNode> nodes;
    /// a < b, sorted.
    std::vector<ProfileEdge> edges;
    std::vector<float> vector;

    const ProfileNode* find(std::string_view entity_id) const;
    /// Entity ids in relevance order.
    std::vector<std::string> ordered_entities() const;

    bool operator==(const WemProfile&) const = default;
};

struct WemConfig {
    OutlierConfig outliers;
    PprConfig ppr;
    std::size_t embed_k = 30;
    bool weighted_author_vector = false;
};

/// Graph, outlier removal, relevance and author vector for one author.
/// Without embeddings the author vector is all zeros of dimension 100.
WemProfile build_profile(std::string_view author_id,
                         std::span<const AuthorEntityEvidence> evidence, Relatedness& relatedness,
                         const EmbeddingModel* embeddings, const WemConfig& config = {});

/// Text profile format: `N entity_id relevance rho_ae doc_count`,
/// `E id1 id2 weight`, `V f1 ... fD`.
void save_profile(const WemProfile& profile, const std::filesystem::path& path);
WemProfile load_profile(std::string author_id, const std::filesystem::path& path);

/// Paired author->entities and entity->authors posting lists.
class DoubleIndex {
  public:
    using PostingMap = std::map<std::string, std::vector<std::string>, std::less<>>;

    DoubleIndex() = default;
    static DoubleIndex build(std::span<const WemProfile> profiles);
    /// From author->entities lists; the entity side is derived.
    static DoubleIndex from_author_lists(PostingMap author_entities);

    static DoubleIndex load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Empty when unknown.
    const std::vector<std::string>& authors_of(std::string_view entity_id) const;
    const std::vector<std::string>& entities_of(std::string_view author_id) const;

    const PostingMap& author_entities() const { return m_author_entities; }
    const PostingMap& entity_authors() const { return m_entity_authors; }

    bool operator==(const DoubleIndex&) const = default;

  private:
    PostingMap m_author_entities;
    PostingMap m_entity_authors;
};

/// Swaps keys and values of a posting map; lists come out sorted.
DoubleIndex::PostingMap transpose(const DoubleIndex::PostingMap& postings);

}  // namespace expert
