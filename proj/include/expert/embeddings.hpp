#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "expert/knowledge_base.hpp"

namespace expert {

/// Dense per-entity vectors of one fixed dimension.
class EmbeddingModel {
  public:
    static constexpr std::size_t default_dim = 100;

    explicit EmbeddingModel(std::size_t dim = default_dim);

    /// Header `#dim D #count N`, then `entity_id f1 ... fD` per line.
    static EmbeddingModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Throws InvalidArgument on wrong dimension, non-finite components or a
    /// duplicate id.
    void add(std::string entity_id, std::span<const float> vector);

    std::size_t dim() const { return m_dim; }
    std::size_t size() const { return m_ids.size(); }
    const std::vector<std::string>& ids() const { return m_ids; }
    std::span<const float> vector(std::size_t i) const
    {
        return {m_data.data() + i * m_dim, m_dim};
    }
    std::optional<std::span<const float>> find(std::string_view entity_id) const;

    bool operator==(const EmbeddingModel& other) const
    {
        return m_dim == other.m_dim && m_ids == other.m_ids && m_data == other.m_data;
    }

  private:
    std::size_t m_dim;
    std::vector<std::string> m_ids;
    std::vector<float> m_data;
    std::unordered_map<std::string, std::size_t> m_index;
};

/// Random-walk + CBOW training settings. Defaults follow common DeepWalk
/// practice.
struct WalkConfig {
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 40;
    std::size_t window = 5;
    std::size_t epochs = 5;
    double learning_rate = 0.025;
    std::size_t negative = 5;
    std::size_t dim = EmbeddingModel::default_dim;
    std::uint64_t seed = 1;
    /// Generate walks on several threads. Every walk has its own seed, so the
    /// output is identical either way.
    bool parallel_walks = false;
    std::size_t threads = 0;

    /// Throws InvalidArgument when a count is zero or the rate is not positive.
    void validate() const;
};

/// Truncated uniform random walks over the undirected link graph, in the
/// order they are fed to training.
std::vector<std::vector<EntityIndex>> generate_walks(const KnowledgeGraph& graph,
                                                     const WalkConfig& config);

/// One vector per entity. Isolated entities keep their initialization.
EmbeddingModel train_deepwalk(const KnowledgeGraph& graph, const WalkConfig& config);

/// Cosine similarity in [-1, 1]; 0 if either vector has zero norm.
double cosine(std::span<const float> a, std::span<const float> b);

}  // namespace expert
