// Command-line driver: builds the store, answers queries, evaluates runs and
// serves the HTTP API.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "expert/api.hpp"
#include "expert/config.hpp"
#include "expert/engine.hpp"
#include "expert/errors.hpp"
#include "expert/evaluation.hpp"
#include "expert/fusion.hpp"

namespace {

using namespace expert;

enum ExitCode {
    ok = 0,
    failure = 1,
    usage = 2,
    bad_input = 3,
    not_found = 4,
    missing_stage = 5,
};

void print_explanation(const SearchResult& r)
{
    for (const auto& s : r.sub_scores) {
        std::printf("  %s = %.6f", s.strategy.c_str(), s.score);
        if (s.rank) {
            std::printf(" (rank %zu)", *s.rank);
        }
        std::printf("\n");
        for (const auto& t : s.terms) {
            if (!t.doc_id.empty()) {
                std::printf("    doc %s: %.6f\n", t.doc_id.c_str(), t.value);
            } else {
                std::printf("    %s ~ %s (rel %.4f): %.6f\n", t.query_entity.c_str(),
                            t.profile_entity.c_str(), t.relatedness, t.value);
            }
        }
    }
}

void show_profile(const Engine& engine, const std::string& author_id)
{
    const auto& profile = engine.profile(author_id);
    std::printf("author\t%s\t%s\n", author_id.c_str(),
                engine.corpus().author(author_id).display_name.c_str());
    std::printf("entities\t%zu\nedges\t%zu\n", profile.nodes.size(), profile.edges.size());
    for (const auto& n : profile.nodes) {
        std::printf("N\t%s\t%.6f\t%.4f\t%zu\n", n.entity_id.c_str(), n.relevance, n.rho,
                    n.doc_count);
    }
    for (const auto& e : profile.edges) {
        std::printf("E\t%s\t%s\t%.6f\n", e.a.c_str(), e.b.c_str(), e.weight);
    }
}

int run_fuse(const std::vector<std::string>& paths, const EngineConfig& config,
             const std::string& out)
{
    std::vector<RunSet> inputs;
    std::set<std::string> queries;
    for (const auto& p : paths) {
        inputs.push_back(read_run_file(p));
        for (const auto& [q, run] : inputs.back()) {
            queries.insert(q);
        }
    }
    RunSet fused;
    for (const auto& q : queries) {
        std::vector<RankedRun> runs;
        for (const auto& in : inputs) {
            auto it = in.find(q);
            runs.push_back(it == in.end() ? RankedRun{q, {}} : it->second);
        }
        fused.emplace(q, fuse(runs, config.fusion, config.fusion_options()));
    }
    auto text = format_run(fused, std::string(to_string(config.fusion)));
    if (out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_run_file(out, fused, to_string(config.fusion));
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("expertfind"));
    spdlog::set_level(spdlog::level::warn);

    CLI::App app{"Expert finding over entity profiles"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    int verbosity = 0;
    std::map<std::string, std::string> overrides;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_flag("-v,--verbose", verbosity, "Log stage timings (repeat for per-query detail)");
    for (const auto& key : EngineConfig::keys()) {
        std::string names = "--" + key;
        if (key.find('_') != std::string::npos) {
            auto dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            names += ",--" + dashed;
        }
        app.add_option_function<std::string>(
               names, [&overrides, key](const std::string& v) { overrides[key] = v; },
               "Override config key '" + key + "'")
            ->group("Config overrides");
    }

    auto* index_cmd = app.add_subcommand("index", "Corpus indexing");
    index_cmd->require_subcommand(1);
    auto* index_build = index_cmd->add_subcommand("build", "Ingest, annotate and index the corpus");

    auto* profile_cmd = app.add_subcommand("profile", "Expertise profiles");
    profile_cmd->require_subcommand(1);
    auto* profile_build = profile_cmd->add_subcommand("build", "Build every author's profile");
    auto* profile_show = profile_cmd->add_subcommand("show", "Print one author's profile");
    std::string show_author;
    profile_show->add_option("author", show_author)->required();

    auto* query_cmd = app.add_subcommand("query", "Rank authors for a query");
    std::string query_text;
    std::size_t limit = 10;
    bool explain = false;
    bool as_json = false;
    query_cmd->add_option("text", query_text)->required();
    query_cmd->add_option("--limit", limit, "Results to print (0 = all)");
    query_cmd->add_flag("--explain", explain, "Print the score breakdown of each result");
    query_cmd->add_flag("--json", as_json, "Print the /api/search payload");

    auto* batch_cmd = app.add_subcommand("batch-eval", "Run and evaluate every eval strategy");
    std::string queries_path, qrels_path, out_dir = "eval";
    batch_cmd->add_option("queries", queries_path)->required();
    batch_cmd->add_option("qrels", qrels_path)->required();
    batch_cmd->add_option("--out", out_dir, "Output directory");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a TREC run file");
    std::string run_path, eval_qrels;
    eval_cmd->add_option("run", run_path)->required();
    eval_cmd->add_option("qrels", eval_qrels)->required();

    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse TREC run files");
    std::vector<std::string> fuse_runs;
    std::string fuse_out;
    fuse_cmd->add_option("--run", fuse_runs, "Input run file")->required();
    fuse_cmd->add_option("--out", fuse_out, "Output run file (stdout when absent)");

    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    std::string static_dir;
    serve_cmd->add_option("--static", static_dir, "Built UI assets to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    if (verbosity == 1) {
        spdlog::set_level(spdlog::level::info);
    } else if (verbosity > 1) {
        spdlog::set_level(spdlog::level::debug);
    }

    try {
        EngineConfig config = config_path.empty() ? EngineConfig{} : EngineConfig::load(config_path);
        for (const auto& [key, value] : overrides) {
            config.set(key, value);
        }
        config.validate();

        if (*index_build) {
            auto stats = build_index(config);
            std::printf("documents\t%zu\nauthors\t%zu\nassociations\t%zu\n", stats.n_documents,
                        stats.n_authors, stats.n_associations);
        } else if (*profile_build) {
            auto report = build_profiles(config);
            std::printf("profiles\t%zu\nempty\t%zu\nentities\t%zu\n", report.authors,
                        report.empty_profiles, report.entities);
        } else if (*profile_show) {
            show_profile(Engine::load(config), show_author);
        } else if (*query_cmd) {
            auto engine = Engine::load(config);
            if (as_json) {
                Api api(engine);
                ApiParams params{{"q", query_text},
                                 {"strategy", config.strategy},
                                 {"limit", std::to_string(limit)}};
                auto out = api.get("/api/search", params);
                std::printf("%s\n", out.body.c_str());
                return out.status == 200 ? ok : out.status == 422 ? ok : usage;
            }
            auto response = engine.search(query_text, config.strategy, limit);
            if (response.no_topical_match()) {
                std::fprintf(stderr, "no topical match: no entity linked and no term matched\n");
                return ok;
            }
            for (const auto& r : response.results) {
                std::printf("%zu\t%s\t%.6f\t%s\n", r.rank, r.author_id.c_str(), r.score,
                            r.display_name.c_str());
                if (explain) {
                    print_explanation(r);
                }
            }
        } else if (*batch_cmd) {
            auto engine = Engine::load(config);
            auto report = batch_evaluate(engine, read_queries(queries_path), Qrels::load(qrels_path),
                                         out_dir);
            std::printf("strategy\tP@5\tP@10\tMAP\tMRR\tNDCG@100\n");
            for (const auto& s : report.strategies) {
                const auto& m = report.metrics.at(s).mean;
                std::printf("%s\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", s.c_str(), m.p5, m.p10, m.ap,
                            m.rr, m.ndcg100);
            }
        } else if (*eval_cmd) {
            auto report = evaluate(read_run_file(run_path), Qrels::load(eval_qrels));
            std::fputs(format_report(report).c_str(), stdout);
        } else if (*fuse_cmd) {
            return run_fuse(fuse_runs, config, fuse_out);
        } else if (*serve_cmd) {
            auto engine = Engine::load(config);
            Api api(engine);
            spdlog::set_level(std::min(spdlog::get_level(), spdlog::level::info));
            serve(api, {config.host, config.port, config.cors, static_dir});
        }
    } catch (const MissingStage& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return missing_stage;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_input;
    } catch (const NotFound& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return not_found;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return failure;
    }
    return ok;
}
