#pragma once

// Random fixtures shared by the unit tests and the acceptance binary.

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "expert/embeddings.hpp"
#include "expert/knowledge_base.hpp"
#include "expert/wem_builder.hpp"
#include "oracles.hpp"

namespace expert::test {

ProfileNode make_node(std::string id, double relevance, double rho, std::size_t docs);

/// Profile with nodes in relevance order and a zero 4-d vector.
WemProfile make_profile(std::string author, std::vector<ProfileNode> nodes);

/// A handful of authors over a small random snapshot, with 4-d integer
/// embeddings and author vectors so that vector sums are exact.
struct RandomProfileFixture {
    std::vector<std::string> entity_ids;
    std::vector<std::set<int>> in_links;
    std::vector<WemProfile> profiles;
    std::map<std::string, std::size_t> docs;
    std::size_t n_authors = 0;
    KnowledgeGraph graph;
    /// Oracle relatedness of every ordered entity pair.
    std::map<std::pair<std::string, std::string>, double> rel;
    EmbeddingModel embeddings{4};

    explicit RandomProfileFixture(std::mt19937& rng);

    /// 1 to 4 distinct snapshot entities.
    std::vector<std::string> random_query(std::mt19937& rng) const;
    /// |A_e| per entity.
    std::map<std::string, std::size_t> author_freq() const;
};

std::map<std::string, oracle::ProfileEntry> oracle_entries(const WemProfile& p);
std::vector<std::pair<std::string, oracle::ProfileEntry>> oracle_ranked_entries(
    const WemProfile& p);

/// Up to 8 authors from a pool of 12, with coarse scores so ties occur.
std::map<std::string, double> random_score_map(std::mt19937& rng);

}  // namespace expert::test
