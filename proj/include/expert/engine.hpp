#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expert/config.hpp"
#include "expert/corpus_store.hpp"
#include "expert/doc_retrieval.hpp"
#include "expert/entity_linking.hpp"
#include "expert/evaluation.hpp"
#include "expert/fusion.hpp"
#include "expert/profile_retrieval.hpp"
#include "expert/wem_builder.hpp"

namespace expert {

/// One addend of a strategy sub-score. Document-centric addends name a
/// document; profile addends name a query entity and a profile entity.
struct ExplanationTerm {
    std::string doc_id;
    std::string query_entity;
    std::string profile_entity;
    double relatedness = 0.0;
    double value = 0.0;
};

struct SubScore {
    std::string strategy;
    double score = 0.0;
    /// Rank within that strategy's own run; absent when not retrieved.
    std::optional<std::size_t> rank;
    /// Values sum to `score`.
    std::vector<ExplanationTerm> terms;
};

struct RelatedEntity {
    std::string entity_id;
    double relatedness = 0.0;
    double relevance = 0.0;
};

/// A query entity as seen from one author's profile.
struct EntityMatch {
    std::string entity_id;
    /// Relevance in the author's profile; absent when the entity is not in it.
    std::optional<double> relevance;
    /// Profile entities most related to the query entity, best first.
    std::vector<RelatedEntity> related;
};

struct SearchResult {
    std::string author_id;
    std::string display_name;
    std::size_t rank = 0;
    double score = 0.0;
    std::vector<SubScore> sub_scores;
    std::vector<EntityMatch> entities;
};

struct SearchResponse {
    std::string query;
    std::string strategy;
    std::vector<std::string> query_entities;
    /// Some query term occurs in the collection.
    bool term_match = false;
    std::size_t total = 0;
    std::vector<SearchResult> results;

    /// Neither an entity nor a term matched: nothing can be retrieved.
    bool no_topical_match() const { return query_entities.empty() && !term_match; }
};

struct ProfileBuildReport {
    std::size_t authors = 0;
    std::size_t empty_profiles = 0;
    std::size_t entities = 0;
    bool trained_embeddings = false;
};

/// `index build`: ingest the corpus, copy the dictionary, annotate documents
/// and write the postings.
CorpusStats build_index(const EngineConfig& config);

/// `profile build`: evidence, snapshot, embeddings, one WEM per author and
/// the double index. Throws MissingStage when the index is absent.
ProfileBuildReport build_profiles(const EngineConfig& config);

/// The query-time engine over a built store. Immutable after load and safe to
/// query from several threads.
class Engine {
  public:
    /// Throws MissingStage naming the first stage that has not run.
    static Engine load(const EngineConfig& config);

    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;
    ~Engine();

    const EngineConfig& config() const;
    const Corpus& corpus() const;
    const ProfileSearcher& profiles() const;

    /// Ranked authors of one strategy (see strategy_names()).
    RankedRun run(std::string query_id, std::string_view text, std::string_view strategy) const;

    /// Ranked and explained results, at most `limit` of them (0 = all).
    SearchResponse search(std::string_view text, std::string_view strategy,
                          std::size_t limit = 0) const;

    /// Explanation for one author, whether retrieved or not. Throws NotFound
    /// for unknown authors.
    SearchResult explain(std::string_view text, std::string_view strategy,
                         std::string_view author_id) const;

    /// Loaded profile of an author. Throws NotFound.
    const WemProfile& profile(std::string_view author_id) const;
    /// Evidence of one entity in an author's profile: D_{a,e}.
    std::vector<std::string> supporting_documents(std::string_view author_id,
                                                  std::string_view entity_id) const;

  private:
    struct State;
    struct Plan;
    explicit Engine(std::unique_ptr<State> state);

    Plan plan(std::string query_id, std::string_view text, std::string_view strategy) const;
    SearchResult describe(const Plan& plan, std::string_view author_id) const;

    std::unique_ptr<State> m_state;
};

struct Query {
    std::string query_id;
    std::string text;
};

/// Lines `query_id TAB text`.
std::vector<Query> read_queries(const std::filesystem::path& path);

struct BatchReport {
    std::map<std::string, MetricReport> metrics;
    std::vector<std::string> strategies;
};

/// Runs every configured strategy over `queries`, writes `run_<strategy>.txt`,
/// `metrics.tsv`, `metrics_<strategy>.tsv` and `ttests.tsv` into `out_dir`.
BatchReport batch_evaluate(const Engine& engine, const std::vector<Query>& queries,
                           const Qrels& qrels, const std::filesystem::path& out_dir);

/// Evidence records of every author, persisted next to the profiles.
void save_evidence(const std::map<std::string, std::vector<AuthorEntityEvidence>>& evidence,
                   const std::filesystem::path& path);
std::map<std::string, std::vector<AuthorEntityEvidence>> load_evidence(
    const std::filesystem::path& path);

}  // namespace expert
