#include "expert/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

class StageTimer {
  public:
    explicit StageTimer(std::string stage) : m_stage(std::move(stage)) {}

    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - m_start)
            .count();
    }

    void done(spdlog::level::level_enum level = spdlog::level::info) const
    {
        spdlog::log(level, "{}: {:.3f} ms", m_stage, elapsed_ms());
    }

  private:
    std::string m_stage;
    std::chrono::steady_clock::time_point m_start = std::chrono::steady_clock::now();
};

void require_file(const std::filesystem::path& path, const char* stage)
{
    if (!std::filesystem::exists(path)) {
        throw MissingStage(stage);
    }
}

void require_index(const StoreLayout& store)
{
    store.require_corpus();
    require_file(store.dictionary(), "index build");
    require_file(store.annotations(), "index build");
    require_file(store.postings(), "index build");
}

void require_profiles(const StoreLayout& store)
{
    require_file(store.snapshot(), "profile build");
    require_file(store.evidence(), "profile build");
    require_file(store.embeddings(), "profile build");
    require_file(store.double_index(), "profile build");
}

const std::filesystem::path& required_path(const std::filesystem::path& p, const char* key)
{
    if (p.empty()) {
        throw InvalidArgument(std::string("config key '") + key + "' is required");
    }
    return p;
}

std::size_t worker_count(std::size_t configured)
{
    if (configured > 0) {
        return configured;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

bool is_exact(std::string_view s)
{
    return s == "ec_iaf" || s == "ef_iaf" || s == "rec_iaf";
}

}  // namespace

void save_evidence(const std::map<std::string, std::vector<AuthorEntityEvidence>>& evidence,
                   const std::filesystem::path& path)
{
    std::ostringstream out;
    for (const auto& [author, records] : evidence) {
        for (const auto& ev : records) {
            out << author << '\t' << ev.entity_id << '\t' << text::format_double(ev.rho) << '\t';
            for (std::size_t i = 0; i < ev.doc_ids.size(); ++i) {
                out << (i ? ";" : "") << ev.doc_ids[i];
            }
            out << '\n';
        }
    }
    io::write_file(path, out.str());
}

std::map<std::string, std::vector<AuthorEntityEvidence>> load_evidence(
    const std::filesystem::path& path)
{
    std::map<std::string, std::vector<AuthorEntityEvidence>> out;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], '\t');
        if (f.size() != 4) {
            throw ParseError(path, i + 1, "expected 4 tab-separated fields");
        }
        AuthorEntityEvidence ev;
        ev.author_id = f[0];
        ev.entity_id = f[1];
        try {
            ev.rho = text::parse_double(f[2]);
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
        for (auto d : text::split(f[3], ';')) {
            if (!d.empty()) {
                ev.doc_ids.emplace_back(d);
            }
        }
        out[ev.author_id].push_back(std::move(ev));
    }
    return out;
}

CorpusStats build_index(const EngineConfig& config)
{
    StoreLayout store(config.store);
    StageTimer total("index build");
    auto dict_path = required_path(config.dictionary, "dictionary");

    StageTimer ingest("ingest");
    auto stats = ingest_corpus(required_path(config.documents, "documents"),
                               required_path(config.authors, "authors"), store);
    ingest.done();

    StageTimer annotate("annotate");
    DictionaryLinker linker(LinkerDictionary::load(dict_path));
    std::filesystem::copy_file(dict_path, store.dictionary(),
                               std::filesystem::copy_options::overwrite_existing);
    auto corpus = Corpus::load(store);
    AnnotationStore::build(corpus, linker).save(store.annotations());
    annotate.done();

    StageTimer postings("postings");
    InvertedIndex::build(corpus).save(store.postings());
    postings.done();

    total.done();
    return stats;
}

ProfileBuildReport build_profiles(const EngineConfig& config)
{
    StoreLayout store(config.store);
    require_index(store);
    StageTimer total("profile build");
    ProfileBuildReport report;

    auto corpus = Corpus::load(store);
    auto annotations = AnnotationStore::load(store.annotations());

    StageTimer kb("snapshot");
    auto graph = KnowledgeGraph::load(required_path(config.snapshot, "snapshot"));
    graph.save(store.snapshot());
    kb.done();

    StageTimer emb("embeddings");
    EmbeddingModel model;
    if (!config.embeddings.empty()) {
        model = EmbeddingModel::load(config.embeddings);
    } else {
        auto walks = config.walks();
        walks.parallel_walks = walks.threads != 1;
        model = train_deepwalk(graph, walks);
        report.trained_embeddings = true;
    }
    model.save(store.embeddings());
    emb.done();

    StageTimer evidence_timer("evidence");
    std::map<std::string, std::vector<AuthorEntityEvidence>> evidence;
    for (const auto& a : corpus.authors()) {
        evidence[a.author_id] = build_author_evidence(a.author_id, corpus, annotations,
                                                      config.evidence_rho_threshold);
    }
    save_evidence(evidence, store.evidence());
    evidence_timer.done();

    StageTimer wem("profiles");
    const auto& authors = corpus.authors();
    std::vector<WemProfile> profiles(authors.size());
    Relatedness relatedness(graph);
    const auto wem_config = config.wem();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < authors.size(); i = next.fetch_add(1)) {
            const auto& id = authors[i].author_id;
            profiles[i] = build_profile(id, evidence.at(id), relatedness, &model, wem_config);
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(worker_count(config.threads), authors.size()); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();

    std::filesystem::remove_all(store.profiles_dir());
    std::filesystem::create_directories(store.profiles_dir());
    for (const auto& p : profiles) {
        save_profile(p, store.profile(p.author_id));
        report.entities += p.nodes.size();
        report.empty_profiles += p.nodes.empty() ? 1 : 0;
    }
    DoubleIndex::build(profiles).save(store.double_index());
    report.authors = profiles.size();
    auto cache = relatedness.cache_stats();
    spdlog::info("relatedness cache: {} hits, {} misses, {} entries", cache.hits, cache.misses,
                 cache.entries);
    wem.done();

    total.done();
    return report;
}

struct Engine::State {
    EngineConfig config;
    Corpus corpus;
    InvertedIndex index;
    std::unique_ptr<DictionaryLinker> linker;
    std::unique_ptr<KnowledgeGraph> graph;
    std::unique_ptr<Relatedness> relatedness;
    std::unique_ptr<EmbeddingModel> embeddings;
    std::unique_ptr<ProfileSearcher> searcher;
    std::map<std::string, std::vector<AuthorEntityEvidence>, std::less<>> evidence;
};

struct Engine::Plan {
    std::string query_id;
    std::string text;
    std::string strategy;
    std::vector<std::string> entities;
    std::vector<DocScore> docs;
    std::map<std::string, std::vector<DocScore>> docs_by_author;
    bool term_match = false;
    /// Run of every component strategy.
    std::map<std::string, RankedRun> runs;
    RankedRun final_run;
};

Engine::Engine(std::unique_ptr<State> state) : m_state(std::move(state)) {}
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;
Engine::~Engine() = default;

Engine Engine::load(const EngineConfig& config)
{
    StoreLayout store(config.store);
    require_index(store);
    require_profiles(store);
    StageTimer total("engine load");

    auto state = std::make_unique<State>();
    state->config = config;
    state->corpus = Corpus::load(store);
    state->index = InvertedIndex::load(store.postings());
    state->linker = std::make_unique<DictionaryLinker>(LinkerDictionary::load(store.dictionary()));
    state->graph = std::make_unique<KnowledgeGraph>(KnowledgeGraph::load(store.snapshot()));
    state->relatedness = std::make_unique<Relatedness>(*state->graph);
    state->embeddings = std::make_unique<EmbeddingModel>(EmbeddingModel::load(store.embeddings()));
    for (auto& [author, records] : load_evidence(store.evidence())) {
        state->evidence.emplace(author, std::move(records));
    }

    std::vector<WemProfile> profiles;
    std::map<std::string, std::size_t> doc_counts;
    for (const auto& a : state->corpus.authors()) {
        auto path = store.profile(a.author_id);
        if (!std::filesystem::exists(path)) {
            throw MissingStage("profile build");
        }
        auto profile = load_profile(a.author_id, path);
        auto ev = state->evidence.find(a.author_id);
        for (auto& node : profile.nodes) {
            if (ev == state->evidence.end()) {
                continue;
            }
            for (const auto& rec : ev->second) {
                if (rec.entity_id == node.entity_id) {
                    node.doc_ids = rec.doc_ids;
                }
            }
        }
        profiles.push_back(std::move(profile));
        doc_counts[a.author_id] = state->corpus.document_count(a.author_id);
    }
    state->searcher = std::make_unique<ProfileSearcher>(
        std::move(profiles), std::move(doc_counts), state->corpus.authors().size(),
        state->relatedness.get(), state->embeddings.get());
    total.done();
    return Engine(std::move(state));
}

const EngineConfig& Engine::config() const
{
    return m_state->config;
}

const Corpus& Engine::corpus() const
{
    return m_state->corpus;
}

const ProfileSearcher& Engine::profiles() const
{
    return *m_state->searcher;
}

const WemProfile& Engine::profile(std::string_view author_id) const
{
    if (!m_state->corpus.has_author(author_id)) {
        throw NotFound("unknown author '" + std::string(author_id) + "'");
    }
    return m_state->searcher->profile(author_id);
}

std::vector<std::string> Engine::supporting_documents(std::string_view author_id,
                                                      std::string_view entity_id) const
{
    const auto* node = profile(author_id).find(entity_id);
    return node ? node->doc_ids : std::vector<std::string>{};
}

namespace {

ProfileStrategy profile_strategy(const EngineConfig& config, std::string_view name)
{
    if (name == "profile") {
        name = config.profile_method;
    }
    if (is_exact(name)) {
        ExactMatchConfig c;
        c.method = parse_exact_method(name);
        c.scaling = config.scaling;
        c.aggregation = config.agg;
        return c;
    }
    RelatedMatchConfig c;
    c.method = parse_related_method(name);
    c.scaling = config.scaling;
    c.top_fraction = config.top_fraction;
    return c;
}

}  // namespace

Engine::Plan Engine::plan(std::string query_id, std::string_view text,
                          std::string_view strategy) const
{
    if (!is_strategy(strategy)) {
        throw InvalidArgument("unknown strategy '" + std::string(strategy) + "'");
    }
    const auto& cfg = m_state->config;
    Plan p;
    p.query_id = std::move(query_id);
    p.text = std::string(text);
    p.strategy = std::string(strategy);

    std::vector<std::string> components;
    if (strategy == "ensemble") {
        components = cfg.ensemble;
    } else {
        components.emplace_back(strategy);
    }

    StageTimer link("query " + p.query_id + " linking");
    p.entities = annotate_query(text, *m_state->linker, cfg.query_rho_filter);
    link.done(spdlog::level::debug);
    p.term_match = m_state->index.matches_any(text);

    for (const auto& c : components) {
        if (p.runs.count(c)) {
            continue;
        }
        StageTimer stage("query " + p.query_id + " " + c);
        if (c == "doc") {
            const auto dc = cfg.doc_centric();
            p.docs = m_state->index.score(text, dc.scheme, dc.max_docs);
            p.docs_by_author = group_by_author(p.docs, m_state->corpus);
            std::vector<std::pair<std::string, double>> scores;
            for (const auto& [author, docs] : p.docs_by_author) {
                scores.emplace_back(author,
                                    fuse_doc_scores(docs, m_state->corpus.document_count(author),
                                                    dc.fusion, dc.meank_k));
            }
            p.runs.emplace(c, RankedRun::from_scores(p.query_id, std::move(scores)));
        } else {
            p.runs.emplace(c, m_state->searcher->rank(p.query_id, p.entities,
                                                      profile_strategy(cfg, c)));
        }
        stage.done(spdlog::level::debug);
    }

    if (strategy == "ensemble") {
        std::vector<RankedRun> inputs;
        for (const auto& c : components) {
            inputs.push_back(p.runs.at(c));
        }
        p.final_run = fuse(inputs, cfg.fusion, cfg.fusion_options());
        p.final_run.query_id = p.query_id;
    } else {
        p.final_run = p.runs.at(components.front());
    }
    return p;
}

RankedRun Engine::run(std::string query_id, std::string_view text, std::string_view strategy) const
{
    return plan(std::move(query_id), text, strategy).final_run;
}

SearchResult Engine::describe(const Plan& plan, std::string_view author_id) const
{
    const auto& cfg = m_state->config;
    SearchResult r;
    r.author_id = std::string(author_id);
    r.display_name = m_state->corpus.author(author_id).display_name;
    if (const auto* e = plan.final_run.find(author_id)) {
        r.rank = e->rank;
        r.score = e->score;
    }

    for (const auto& [name, run] : plan.runs) {
        SubScore sub;
        sub.strategy = name;
        if (const auto* e = run.find(author_id)) {
            sub.rank = e->rank;
        }
        if (name == "doc") {
            auto it = plan.docs_by_author.find(r.author_id);
            if (it != plan.docs_by_author.end()) {
                const auto dc = cfg.doc_centric();
                const auto n = m_state->corpus.document_count(author_id);
                sub.score = fuse_doc_scores(it->second, n, dc.fusion, dc.meank_k);
                auto values = doc_fusion_terms(it->second, n, dc.fusion, dc.meank_k);
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (values[i] != 0.0) {
                        ExplanationTerm t;
                        t.doc_id = it->second[i].doc_id;
                        t.value = values[i];
                        sub.terms.push_back(std::move(t));
                    }
                }
            }
        } else if (!plan.entities.empty()) {
            auto breakdown =
                m_state->searcher->score(author_id, plan.entities, profile_strategy(cfg, name));
            sub.score = breakdown.score;
            for (auto& c : breakdown.terms) {
                ExplanationTerm t;
                t.query_entity = std::move(c.query_entity);
                t.profile_entity = std::move(c.profile_entity);
                t.relatedness = c.relatedness;
                t.value = c.value;
                sub.terms.push_back(std::move(t));
            }
        }
        r.sub_scores.push_back(std::move(sub));
    }

    const auto& profile = m_state->searcher->profile(author_id);
    const auto& graph = *m_state->graph;
    for (const auto& q : plan.entities) {
        EntityMatch m;
        m.entity_id = q;
        if (const auto* node = profile.find(q)) {
            m.relevance = node->relevance;
        }
        if (graph.find(q)) {
            for (const auto& node : profile.nodes) {
                if (node.entity_id == q || !graph.find(node.entity_id)) {
                    continue;
                }
                double rel = (*m_state->relatedness)(q, node.entity_id);
                if (rel > 0.0) {
                    m.related.push_back({node.entity_id, rel, node.relevance});
                }
            }
            std::sort(m.related.begin(), m.related.end(), [](const auto& x, const auto& y) {
                if (x.relatedness != y.relatedness) {
                    return x.relatedness > y.relatedness;
                }
                return x.entity_id < y.entity_id;
            });
            if (m.related.size() > 3) {
                m.related.resize(3);
            }
        }
        r.entities.push_back(std::move(m));
    }
    return r;
}

SearchResponse Engine::search(std::string_view text, std::string_view strategy,
                              std::size_t limit) const
{
    StageTimer timer("search");
    auto p = plan("q", text, strategy);
    SearchResponse response;
    response.query = std::string(text);
    response.strategy = std::string(strategy);
    response.query_entities = p.entities;
    response.term_match = p.term_match;
    response.total = p.final_run.size();
    const auto n = limit == 0 ? p.final_run.size() : std::min(limit, p.final_run.size());
    for (std::size_t i = 0; i < n; ++i) {
        response.results.push_back(describe(p, p.final_run.entries[i].author_id));
    }
    timer.done(spdlog::level::debug);
    return response;
}

SearchResult Engine::explain(std::string_view text, std::string_view strategy,
                             std::string_view author_id) const
{
    if (!m_state->corpus.has_author(author_id)) {
        throw NotFound("unknown author '" + std::string(author_id) + "'");
    }
    return describe(plan("q", text, strategy), author_id);
}

std::vector<Query> read_queries(const std::filesystem::path& path)
{
    std::vector<Query> out;
    std::set<std::string, std::less<>> seen;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], '\t');
        if (f.size() != 2 || f[0].empty()) {
            throw ParseError(path, i + 1, "expected `query_id TAB text`");
        }
        if (!seen.emplace(f[0]).second) {
            throw ParseError(path, i + 1, "duplicate query id '" + std::string(f[0]) + "'");
        }
        out.push_back({std::string(f[0]), text::normalize(text::unescape_field(f[1]))});
    }
    return out;
}

namespace {

std::string fixed6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

BatchReport batch_evaluate(const Engine& engine, const std::vector<Query>& queries,
                           const Qrels& qrels, const std::filesystem::path& out_dir)
{
    BatchReport report;
    report.strategies = engine.config().eval_strategies;
    std::filesystem::create_directories(out_dir);

    std::ostringstream summary;
    summary << "strategy\tP@5\tP@10\tMAP\tMRR\tNDCG@100\n";
    for (const auto& s : report.strategies) {
        StageTimer timer("batch-eval " + s);
        RunSet runs;
        for (const auto& q : queries) {
            runs.emplace(q.query_id, engine.run(q.query_id, q.text, s));
        }
        write_run_file(out_dir / ("run_" + s + ".txt"), runs, s);
        auto metrics = evaluate(runs, qrels);
        io::write_file(out_dir / ("metrics_" + s + ".tsv"), format_report(metrics));
        const auto& m = metrics.mean;
        summary << s << '\t' << fixed6(m.p5) << '\t' << fixed6(m.p10) << '\t' << fixed6(m.ap)
                << '\t' << fixed6(m.rr) << '\t' << fixed6(m.ndcg100) << '\n';
        report.metrics.emplace(s, std::move(metrics));
        timer.done();
    }
    io::write_file(out_dir / "metrics.tsv", summary.str());

    std::ostringstream tt;
    tt << "strategy_a\tstrategy_b\tmetric\tn\tmean_diff\tt\tp_two_tailed\n";
    for (std::size_t i = 0; i < report.strategies.size(); ++i) {
        for (std::size_t j = i + 1; j < report.strategies.size(); ++j) {
            const auto& a = report.metrics.at(report.strategies[i]).per_query;
            const auto& b = report.metrics.at(report.strategies[j]).per_query;
            for (const char* metric : {"AP", "NDCG@100"}) {
                std::vector<double> xa, xb;
                for (std::size_t q = 0; q < a.size(); ++q) {
                    xa.push_back(metric[0] == 'A' ? a[q].ap : a[q].ndcg100);
                    xb.push_back(metric[0] == 'A' ? b[q].ap : b[q].ndcg100);
                }
                tt << report.strategies[i] << '\t' << report.strategies[j] << '\t' << metric << '\t'
                   << xa.size() << '\t';
                if (xa.size() < 2) {
                    tt << "n/a\tn/a\tn/a\n";
                    continue;
                }
                double diff = 0.0;
                for (std::size_t q = 0; q < xa.size(); ++q) {
                    diff += xa[q] - xb[q];
                }
                diff /= static_cast<double>(xa.size());
                tt << fixed6(diff) << '\t' << fixed6(paired_t_statistic(xa, xb)) << '\t'
                   << fixed6(paired_t_test(xa, xb, Tails::two)) << '\n';
            }
        }
    }
    io::write_file(out_dir / "ttests.tsv", tt.str());
    return report;
}

}  // namespace expert
