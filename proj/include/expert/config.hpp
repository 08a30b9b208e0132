#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "expert/doc_retrieval.hpp"
#include "expert/embeddings.hpp"
#include "expert/fusion.hpp"
#include "expert/profile_retrieval.hpp"
#include "expert/wem_builder.hpp"

namespace expert {

/// Every tunable of the engine. Loaded from a flat `key = value` file and
/// overridable key by key; unknown keys and out-of-range values are rejected.
struct EngineConfig {
    // Inputs and the store directory.
    std::filesystem::path documents;
    std::filesystem::path authors;
    std::filesystem::path dictionary;
    std::filesystem::path snapshot;
    /// Optional pre-trained vectors; trained from the snapshot when empty.
    std::filesystem::path embeddings;
    std::filesystem::path store = "store";

    // Strategy defaults.
    std::string strategy = "ensemble";
    Scheme scheme = Scheme::bm25;
    DocFusion doc_fusion = DocFusion::rr;
    std::string profile_method = "rec_iaf";
    Scaling scaling = Scaling::sqrt;
    Aggregation agg = Aggregation::mean;
    FusionMethod fusion = FusionMethod::rrm;
    bool fusion_normalize = true;
    MissingRank missing_rank = MissingRank::after_last;
    /// Strategies fused by `ensemble`.
    std::vector<std::string> ensemble = {"doc", "rec_iaf"};
    /// Strategies run by batch-eval.
    std::vector<std::string> eval_strategies = {"doc", "profile", "ensemble"};

    // Document-centric knobs.
    double k1 = 1.2;
    double b = 0.75;
    double mu = 2000.0;
    double lambda = 0.1;
    std::size_t meank_k = 5;
    std::size_t max_docs = 1000;

    // Profile knobs.
    std::size_t embed_k = 30;
    double top_fraction = 0.1;
    double evidence_rho_threshold = 0.2;
    double query_rho_filter = 0.2;
    bool weighted_author_vector = false;
    std::size_t min_pts = 3;
    double cut_threshold = 0.8;
    std::size_t min_cluster_size = 2;
    double max_noise_fraction = 0.2;
    double damping = 0.85;
    double ppr_tolerance = 1e-9;
    std::size_t ppr_max_iter = 200;

    // Embedding training.
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 40;
    std::size_t window = 5;
    std::size_t epochs = 5;
    double learning_rate = 0.025;
    std::size_t negative = 5;
    std::size_t dim = 100;
    std::uint64_t seed = 1;

    // Service.
    std::string host = "127.0.0.1";
    int port = 8080;
    bool cors = true;
    /// Worker threads for profile building; 0 = hardware concurrency.
    std::size_t threads = 0;

    /// Defaults overlaid with the file's entries. Relative paths in the file
    /// are resolved against the file's directory.
    static EngineConfig load(const std::filesystem::path& path);

    /// Sets one key from its text form. Throws InvalidArgument for an unknown
    /// key or an invalid value.
    void set(std::string_view key, std::string_view value);
    /// Cross-field checks; throws InvalidArgument.
    void validate() const;

    /// Every accepted key, in file order.
    static const std::vector<std::string>& keys();
    /// Text form of one key's current value.
    std::string get(std::string_view key) const;
    /// `key = value` lines for every key; load(dump()) reproduces the config.
    std::string dump() const;

    ScoringScheme scoring_scheme() const;
    DocCentricConfig doc_centric() const;
    WemConfig wem() const;
    WalkConfig walks() const;
    FusionOptions fusion_options() const;
};

/// Names accepted wherever a strategy is chosen.
const std::vector<std::string>& strategy_names();
bool is_strategy(std::string_view name);

}  // namespace expert
