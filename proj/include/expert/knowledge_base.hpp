#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace expert {

using EntityIndex = std::uint32_t;

/// Entity set plus directed link structure. Entities are addressed by a
/// dense index assigned in id order.
class KnowledgeGraph {
  public:
    KnowledgeGraph() = default;
    KnowledgeGraph(std::vector<std::string> entity_ids,
                   const std::vector<std::pair<std::string, std::string>>& links);

    /// Lines: `#entities N`, `E TAB id`, `L TAB source TAB target`.
    static KnowledgeGraph load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// W
    std::size_t size() const { return m_ids.size(); }
    std::optional<EntityIndex> find(std::string_view id) const;
    /// Throws NotFound.
    EntityIndex index_of(std::string_view id) const;
    const std::string& id(EntityIndex e) const { return m_ids[e]; }

    /// Sorted, duplicate-free in-neighbours.
    std::span<const EntityIndex> in_links(EntityIndex e) const;
    /// Sorted, duplicate-free neighbours ignoring link direction and self loops.
    std::span<const EntityIndex> neighbors(EntityIndex e) const;
    std::size_t link_count() const { return m_link_count; }

  private:
    std::vector<std::string> m_ids;
    std::unordered_map<std::string, EntityIndex> m_index;
    std::vector<std::vector<EntityIndex>> m_in;
    std::vector<std::vector<EntityIndex>> m_undirected;
    std::size_t m_link_count = 0;
};

/// Milne & Witten link-overlap relatedness of two in-link sets (sorted)
/// in a graph of `total` entities. Symmetric, in [0,1]; 0 when either set is
/// empty or they are disjoint.
double milne_witten(std::span<const EntityIndex> a, std::span<const EntityIndex> b,
                    std::size_t total);

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t entries = 0;

    bool operator==(const CacheStats&) const = default;
};

/// Memo of pairwise scores keyed by the unordered pair. Unbounded. Safe for
/// concurrent use; racing misses on one key store the same value.
class RelatednessCache {
  public:
    template <typename Compute>
    double get_or_compute(EntityIndex a, EntityIndex b, Compute&& compute)
    {
        auto key = make_key(a, b);
        {
            std::shared_lock lock(m_mutex);
            auto it = m_values.find(key);
            if (it != m_values.end()) {
                m_hits.fetch_add(1, std::memory_order_relaxed);
                return it->second;
            }
        }
        m_misses.fetch_add(1, std::memory_order_relaxed);
        double value = compute();
        std::unique_lock lock(m_mutex);
        return m_values.try_emplace(key, value).first->second;
    }

    CacheStats stats() const;
    void clear();

  private:
    static std::uint64_t make_key(EntityIndex a, EntityIndex b)
    {
        if (a > b) {
            std::swap(a, b);
        }
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    mutable std::shared_mutex m_mutex;
    std::unordered_map<std::uint64_t, double> m_values;
    std::atomic<std::uint64_t> m_hits{0};
    std::atomic<std::uint64_t> m_misses{0};
};

/// Pluggable entity-entity relatedness.
class RelatednessMeasure {
  public:
    virtual ~RelatednessMeasure() = default;
    virtual double operator()(const KnowledgeGraph& graph, EntityIndex a, EntityIndex b) const = 0;
};

class MilneWitten final : public RelatednessMeasure {
  public:
    double operator()(const KnowledgeGraph& graph, EntityIndex a, EntityIndex b) const override;
};

/// Cached relatedness over one snapshot. The graph must outlive this object.
class Relatedness {
  public:
    explicit Relatedness(const KnowledgeGraph& graph);
    Relatedness(const KnowledgeGraph& graph, std::shared_ptr<const RelatednessMeasure> measure);

    /// Throws NotFound for ids missing from the snapshot.
    double operator()(std::string_view a, std::string_view b);
    double operator()(EntityIndex a, EntityIndex b);
    /// Same value without touching the cache.
    double uncached(EntityIndex a, EntityIndex b) const;

    const KnowledgeGraph& graph() const { return m_graph; }
    CacheStats cache_stats() const { return m_cache.stats(); }

  private:
    const KnowledgeGraph& m_graph;
    std::shared_ptr<const RelatednessMeasure> m_measure;
    RelatednessCache m_cache;
};

}  // namespace expert
