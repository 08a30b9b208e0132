#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expert/embeddings.hpp"
#include "expert/entity_linking.hpp"
#include "expert/fusion.hpp"
#include "expert/knowledge_base.hpp"
#include "expert/wem_builder.hpp"

namespace expert {

/// f(r_{a,e}) applied to relevance scores.
enum class Scaling { identity, sigmoid, sqrt, square };

std::string_view to_string(Scaling scaling);
Scaling parse_scaling(std::string_view s);
double scale(Scaling scaling, double r);

enum class ExactMethod { ec_iaf, ef_iaf, rec_iaf };
enum class Aggregation { max, mean };
enum class RelatedMethod { aer, raer, aes };

std::string_view to_string(ExactMethod m);
std::string_view to_string(Aggregation a);
std::string_view to_string(RelatedMethod m);
ExactMethod parse_exact_method(std::string_view s);
Aggregation parse_aggregation(std::string_view s);
RelatedMethod parse_related_method(std::string_view s);

struct ExactMatchConfig {
    ExactMethod method = ExactMethod::rec_iaf;
    /// Used by rec_iaf only.
    Scaling scaling = Scaling::sqrt;
    Aggregation aggregation = Aggregation::mean;
};

struct RelatedMatchConfig {
    RelatedMethod method = RelatedMethod::aer;
    /// Used by raer only.
    Scaling scaling = Scaling::identity;
    /// aer/raer use the top max(1, ceil(top_fraction * |E_a|)) entities.
    double top_fraction = 0.1;

    void validate() const;
};

using ProfileStrategy = std::variant<ExactMatchConfig, RelatedMatchConfig>;

/// One addend of a profile score. For exact match `profile_entity` equals
/// `query_entity`; for aer/raer it is the related author entity.
struct Contribution {
    std::string query_entity;
    std::string profile_entity;
    double relatedness = 0.0;
    double value = 0.0;
};

struct ScoreBreakdown {
    double score = 0.0;
    /// Sum of values equals score (for aes, a single term carries it).
    std::vector<Contribution> terms;
};

/// Scores authors against query entities through their WEM profiles.
class ProfileSearcher {
  public:
    /// `doc_counts` is |D_a| per author; `n_authors` is |A|. `relatedness`
    /// and `embeddings` may be null when the related-match methods needing
    /// them are not used.
    ProfileSearcher(std::vector<WemProfile> profiles, std::map<std::string, std::size_t> doc_counts,
                    std::size_t n_authors, Relatedness* relatedness,
                    const EmbeddingModel* embeddings);

    /// A^q: authors whose profile has at least one entity of E_q, sorted.
    std::vector<std::string> candidate_authors(std::span<const std::string> query_entities) const;

    /// ln(|A| / |A_e|). Throws InvalidArgument when no author mentions e.
    double iaf(std::string_view entity_id) const;

    ScoreBreakdown exact_match_score(std::string_view author_id,
                                     std::span<const std::string> query_entities,
                                     const ExactMatchConfig& config) const;
    ScoreBreakdown related_match_score(std::string_view author_id,
                                       std::span<const std::string> query_entities,
                                       const RelatedMatchConfig& config) const;
    ScoreBreakdown score(std::string_view author_id, std::span<const std::string> query_entities,
                         const ProfileStrategy& strategy) const;

    /// Candidates scored and sorted; empty for empty E_q.
    RankedRun rank(std::string query_id, std::span<const std::string> query_entities,
                   const ProfileStrategy& strategy) const;

    /// Throws NotFound.
    const WemProfile& profile(std::string_view author_id) const;
    bool has_profile(std::string_view author_id) const;
    const DoubleIndex& double_index() const { return m_index; }
    std::size_t author_count() const { return m_n_authors; }

  private:
    double relatedness(std::string_view a, std::string_view b) const;

    std::map<std::string, WemProfile, std::less<>> m_profiles;
    std::map<std::string, std::size_t, std::less<>> m_doc_counts;
    std::size_t m_n_authors;
    DoubleIndex m_index;
    Relatedness* m_relatedness;
    const EmbeddingModel* m_embeddings;
};

/// annotate_query -> candidate_authors -> score -> sort.
RankedRun rank_authors_profile_centric(std::string query_id, std::string_view query_text,
                                       const Linker& linker, double query_rho_filter,
                                       const ProfileSearcher& searcher,
                                       const ProfileStrategy& strategy);

}  // namespace expert
