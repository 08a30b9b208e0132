#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace expert::test {

ProfileNode make_node(std::string id, double relevance, double rho, std::size_t docs)
{
    return {std::move(id), relevance, rho, docs, {}};
}

WemProfile make_profile(std::string author, std::vector<ProfileNode> nodes)
{
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) {
        return a.relevance != b.relevance ? a.relevance > b.relevance : a.entity_id < b.entity_id;
    });
    WemProfile p;
    p.author_id = std::move(author);
    p.nodes = std::move(nodes);
    p.vector.assign(4, 0.0F);
    return p;
}

RandomProfileFixture::RandomProfileFixture(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int w = 6 + static_cast<int>(rng() % 8);
    std::vector<std::pair<std::string, std::string>> links;
    in_links.resize(static_cast<std::size_t>(w));
    // Two-digit suffixes keep id order equal to numeric order.
    for (int i = 0; i < w; ++i) {
        entity_ids.push_back("e" + std::to_string(10 + i));
    }
    for (int s = 0; s < w; ++s) {
        for (int t = 0; t < w; ++t) {
            if (s != t && u(rng) < 0.3) {
                links.emplace_back(entity_ids[s], entity_ids[t]);
                in_links[static_cast<std::size_t>(t)].insert(s);
            }
        }
    }
    graph = KnowledgeGraph(entity_ids, links);
    for (int a = 0; a < w; ++a) {
        for (int b = 0; b < w; ++b) {
            rel[{entity_ids[a], entity_ids[b]}] =
                oracle::milne_witten(in_links[a], in_links[b], static_cast<std::size_t>(w));
        }
    }
    for (const auto& id : entity_ids) {
        std::vector<float> v(4);
        for (auto& x : v) {
            x = static_cast<float>(static_cast<int>(rng() % 7) - 3);
        }
        embeddings.add(id, v);
    }
    const std::size_t n = 2 + rng() % 7;
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<ProfileNode> nodes;
        for (const auto& id : entity_ids) {
            if (u(rng) < 0.4) {
                nodes.push_back(make_node(id, u(rng), 0.05 + 0.95 * u(rng), 1 + rng() % 6));
            }
        }
        auto p = make_profile("a" + std::to_string(a), std::move(nodes));
        for (auto& x : p.vector) {
            x = static_cast<float>(static_cast<int>(rng() % 9) - 4);
        }
        docs[p.author_id] = 6 + rng() % 10;
        profiles.push_back(std::move(p));
    }
    n_authors = n + rng() % 4;
}

std::vector<std::string> RandomProfileFixture::random_query(std::mt19937& rng) const
{
    std::vector<std::string> q;
    for (std::size_t i = 0, len = 1 + rng() % 4; i < len; ++i) {
        q.push_back(entity_ids[rng() % entity_ids.size()]);
    }
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end()), q.end());
    return q;
}

std::map<std::string, std::size_t> RandomProfileFixture::author_freq() const
{
    std::map<std::string, std::size_t> out;
    for (const auto& p : profiles) {
        for (const auto& n : p.nodes) {
            ++out[n.entity_id];
        }
    }
    return out;
}

std::map<std::string, oracle::ProfileEntry> oracle_entries(const WemProfile& p)
{
    std::map<std::string, oracle::ProfileEntry> out;
    for (const auto& n : p.nodes) {
        out[n.entity_id] = {n.relevance, n.rho, n.doc_count};
    }
    return out;
}

std::vector<std::pair<std::string, oracle::ProfileEntry>> oracle_ranked_entries(
    const WemProfile& p)
{
    std::vector<std::pair<std::string, oracle::ProfileEntry>> out;
    for (const auto& n : p.nodes) {
        out.push_back({n.entity_id, {n.relevance, n.rho, n.doc_count}});
    }
    return out;
}

std::map<std::string, double> random_score_map(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::map<std::string, double> out;
    for (std::size_t i = 0, n = rng() % 9; i < n; ++i) {
        out["a" + std::to_string(rng() % 12)] = std::round(u(rng) * 2.0) / 2.0;
    }
    return out;
}

}  // namespace expert::test
