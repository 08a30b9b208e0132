#include "expert/api.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "expert/errors.hpp"
#include "expert/text.hpp"

namespace expert {

namespace {

using nlohmann::json;

ApiResponse reply(int status, const json& body)
{
    return {status, body.dump()};
}

ApiResponse error(int status, std::string_view message)
{
    return reply(status, json{{"error", message}, {"status", status}});
}

std::optional<std::string> param(const ApiParams& params, std::string_view key)
{
    auto it = params.find(key);
    if (it == params.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string trimmed(std::string_view s)
{
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

json to_json(const ExplanationTerm& t)
{
    json j{{"value", t.value}};
    if (!t.doc_id.empty()) {
        j["doc_id"] = t.doc_id;
    } else {
        j["query_entity"] = t.query_entity;
        j["profile_entity"] = t.profile_entity;
        j["relatedness"] = t.relatedness;
    }
    return j;
}

json to_json(const SearchResult& r)
{
    json subs = json::array();
    for (const auto& s : r.sub_scores) {
        json terms = json::array();
        for (const auto& t : s.terms) {
            terms.push_back(to_json(t));
        }
        subs.push_back({{"strategy", s.strategy},
                        {"score", s.score},
                        {"rank", s.rank ? json(*s.rank) : json(nullptr)},
                        {"terms", std::move(terms)}});
    }
    json entities = json::array();
    for (const auto& e : r.entities) {
        json related = json::array();
        for (const auto& rel : e.related) {
            related.push_back({{"entity_id", rel.entity_id},
                               {"relatedness", rel.relatedness},
                               {"relevance", rel.relevance}});
        }
        entities.push_back({{"entity_id", e.entity_id},
                            {"relevance", e.relevance ? json(*e.relevance) : json(nullptr)},
                            {"related", std::move(related)}});
    }
    return {{"author_id", r.author_id},
            {"display_name", r.display_name},
            {"rank", r.rank == 0 ? json(nullptr) : json(r.rank)},
            {"score", r.score},
            {"sub_scores", std::move(subs)},
            {"entities", std::move(entities)}};
}

/// Resolves `strategy`, defaulting to the configured one; nullopt if invalid.
std::optional<std::string> strategy_param(const ApiParams& params, const EngineConfig& config)
{
    auto s = param(params, "strategy");
    if (!s || s->empty()) {
        return config.strategy;
    }
    if (!is_strategy(*s)) {
        return std::nullopt;
    }
    return s;
}

}  // namespace

ApiResponse Api::get(std::string_view path, const ApiParams& params) const
{
    try {
        if (path == "/api/search") {
            return search(params);
        }
        if (path == "/api/explain") {
            return explain(params);
        }
        if (path == "/api/strategies") {
            return strategies();
        }
        constexpr std::string_view prefix = "/api/authors/";
        if (path.starts_with(prefix)) {
            auto rest = path.substr(prefix.size());
            auto slash = rest.find('/');
            auto id = rest.substr(0, slash);
            auto view = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
            if (!id.empty() && (view.empty() || view == "profile" || view == "documents")) {
                return author(id, view);
            }
        }
        return error(404, "no such endpoint");
    } catch (const NotFound& e) {
        return error(404, e.what());
    } catch (const InvalidArgument& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        spdlog::error("{} failed: {}", path, e.what());
        return error(500, "internal error");
    }
}

ApiResponse Api::search(const ApiParams& params) const
{
    auto q = trimmed(param(params, "q").value_or(""));
    if (q.empty()) {
        return error(400, "parameter 'q' is required");
    }
    auto strategy = strategy_param(params, m_engine.config());
    if (!strategy) {
        return error(400, "unknown strategy");
    }
    std::size_t limit = 10;
    if (auto l = param(params, "limit")) {
        try {
            auto n = text::parse_int(*l);
            if (n < 0) {
                throw InvalidArgument("negative");
            }
            limit = static_cast<std::size_t>(n);
        } catch (const InvalidArgument&) {
            return error(400, "parameter 'limit' must be a non-negative integer");
        }
    }
    auto response = m_engine.search(q, *strategy, limit);
    if (response.no_topical_match()) {
        return reply(422, {{"error", "no topical match"},
                           {"status", 422},
                           {"query", response.query},
                           {"strategy", response.strategy}});
    }
    json results = json::array();
    for (const auto& r : response.results) {
        results.push_back(to_json(r));
    }
    return reply(200, {{"query", response.query},
                       {"strategy", response.strategy},
                       {"query_entities", response.query_entities},
                       {"total", response.total},
                       {"results", std::move(results)}});
}

ApiResponse Api::explain(const ApiParams& params) const
{
    auto q = trimmed(param(params, "q").value_or(""));
    auto author_id = param(params, "author").value_or("");
    if (q.empty() || author_id.empty()) {
        return error(400, "parameters 'q' and 'author' are required");
    }
    auto strategy = strategy_param(params, m_engine.config());
    if (!strategy) {
        return error(400, "unknown strategy");
    }
    if (!m_engine.corpus().has_author(author_id)) {
        return error(404, "unknown author '" + author_id + "'");
    }
    auto result = m_engine.explain(q, *strategy, author_id);
    auto body = to_json(result);
    body["query"] = q;
    body["strategy"] = *strategy;
    return reply(200, body);
}

ApiResponse Api::strategies() const
{
    const auto& c = m_engine.config();
    return reply(200, {{"strategies", strategy_names()},
                       {"default", c.strategy},
                       {"ensemble", c.ensemble},
                       {"fusion", to_string(c.fusion)},
                       {"scheme", to_string(c.scheme)},
                       {"doc_fusion", to_string(c.doc_fusion)},
                       {"profile_method", c.profile_method},
                       {"scaling", to_string(c.scaling)},
                       {"agg", to_string(c.agg)}});
}

ApiResponse Api::author(std::string_view id, std::string_view view) const
{
    const auto& corpus = m_engine.corpus();
    if (!corpus.has_author(id)) {
        return error(404, "unknown author '" + std::string(id) + "'");
    }
    const auto& a = corpus.author(id);
    const auto& profile = m_engine.profile(id);
    if (view.empty()) {
        return reply(200, {{"author_id", a.author_id},
                           {"display_name", a.display_name},
                           {"document_count", corpus.document_count(id)},
                           {"entity_count", profile.nodes.size()}});
    }
    if (view == "profile") {
        json nodes = json::array();
        for (const auto& n : profile.nodes) {
            nodes.push_back({{"entity_id", n.entity_id},
                             {"relevance", n.relevance},
                             {"rho", n.rho},
                             {"doc_count", n.doc_count},
                             {"doc_ids", n.doc_ids}});
        }
        json edges = json::array();
        for (const auto& e : profile.edges) {
            edges.push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
        }
        return reply(200, {{"author_id", a.author_id},
                           {"display_name", a.display_name},
                           {"nodes", std::move(nodes)},
                           {"edges", std::move(edges)}});
    }
    json docs = json::array();
    for (const auto* d : corpus.documents_of(id)) {
        docs.push_back({{"doc_id", d->doc_id},
                        {"title", d->title},
                        {"kind", to_string(d->kind)},
                        {"author_ids", d->author_ids}});
    }
    return reply(200, {{"author_id", a.author_id}, {"documents", std::move(docs)}});
}

void serve(const Api& api, const ServeOptions& options)
{
    httplib::Server server;
    auto add_cors = [&](httplib::Response& res) {
        if (options.cors) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        }
    };
    server.Get(R"(/api/.*)", [&](const httplib::Request& req, httplib::Response& res) {
        ApiParams params(req.params.begin(), req.params.end());
        auto out = api.get(req.path, params);
        res.status = out.status;
        add_cors(res);
        res.set_content(out.body, "application/json");
    });
    server.Options(R"(.*)", [&](const httplib::Request&, httplib::Response& res) {
        add_cors(res);
        res.status = 204;
    });
    if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir.string())) {
        throw NotFound("static directory '" + options.static_dir.string() + "' does not exist");
    }
    spdlog::info("listening on http://{}:{}", options.host, options.port);
    if (!server.listen(options.host, options.port)) {
        throw Error("cannot listen on " + options.host + ":" + std::to_string(options.port));
    }
}

}  // namespace expert
