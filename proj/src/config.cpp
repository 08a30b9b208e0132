#include "expert/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

using Setter = std::function<void(EngineConfig&, std::string_view)>;
using Getter = std::function<std::string(const EngineConfig&)>;

struct Field {
    std::string name;
    Setter set;
    Getter get;
    bool is_path = false;
};

bool parse_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw InvalidArgument("expected a boolean, got '" + std::string(v) + "'");
}

std::size_t parse_count(std::string_view v)
{
    auto n = text::parse_int(v);
    if (n < 0) {
        throw InvalidArgument("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return static_cast<std::size_t>(n);
}

std::vector<std::string> parse_list(std::string_view v)
{
    std::vector<std::string> out;
    for (auto part : text::split(v, ',')) {
        auto first = part.find_first_not_of(" \t");
        auto last = part.find_last_not_of(" \t");
        if (first != std::string_view::npos) {
            out.emplace_back(part.substr(first, last - first + 1));
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) {
            out += ',';
        }
        out += s;
    }
    return out;
}

MissingRank parse_missing_rank(std::string_view v)
{
    if (v == "after_last") {
        return MissingRank::after_last;
    }
    if (v == "skip_run") {
        return MissingRank::skip_run;
    }
    throw InvalidArgument("unknown missing_rank '" + std::string(v) + "'");
}

std::string_view to_string(MissingRank m)
{
    return m == MissingRank::after_last ? "after_last" : "skip_run";
}

template <typename T>
Field path_field(std::string name, T EngineConfig::*member)
{
    return {name,
            [member](EngineConfig& c, std::string_view v) { c.*member = std::filesystem::path(v); },
            [member](const EngineConfig& c) { return (c.*member).string(); }, true};
}

Field real_field(std::string name, double EngineConfig::*member)
{
    return {name, [member](EngineConfig& c, std::string_view v) { c.*member = text::parse_double(v); },
            [member](const EngineConfig& c) { return text::format_double(c.*member); }};
}

Field count_field(std::string name, std::size_t EngineConfig::*member)
{
    return {name, [member](EngineConfig& c, std::string_view v) { c.*member = parse_count(v); },
            [member](const EngineConfig& c) { return std::to_string(c.*member); }};
}

Field bool_field(std::string name, bool EngineConfig::*member)
{
    return {name, [member](EngineConfig& c, std::string_view v) { c.*member = parse_bool(v); },
            [member](const EngineConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <typename E, typename Parse>
Field enum_field(std::string name, E EngineConfig::*member, Parse parse)
{
    return {name, [member, parse](EngineConfig& c, std::string_view v) { c.*member = parse(v); },
            [member](const EngineConfig& c) { return std::string(to_string(c.*member)); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        using C = EngineConfig;
        std::vector<Field> f;
        f.push_back(path_field("documents", &C::documents));
        f.push_back(path_field("authors", &C::authors));
        f.push_back(path_field("dictionary", &C::dictionary));
        f.push_back(path_field("snapshot", &C::snapshot));
        f.push_back(path_field("embeddings", &C::embeddings));
        f.push_back(path_field("store", &C::store));
        f.push_back({"strategy",
                     [](C& c, std::string_view v) {
                         if (!is_strategy(v)) {
                             throw InvalidArgument("unknown strategy '" + std::string(v) + "'");
                         }
                         c.strategy = v;
                     },
                     [](const C& c) { return c.strategy; }});
        f.push_back(enum_field("scheme", &C::scheme, parse_scheme));
        f.push_back(enum_field("doc_fusion", &C::doc_fusion, parse_doc_fusion));
        f.push_back({"profile_method",
                     [](C& c, std::string_view v) {
                         if (!is_strategy(v) || v == "doc" || v == "profile" || v == "ensemble") {
                             throw InvalidArgument("unknown profile method '" + std::string(v) + "'");
                         }
                         c.profile_method = v;
                     },
                     [](const C& c) { return c.profile_method; }});
        f.push_back(enum_field("scaling", &C::scaling, parse_scaling));
        f.push_back(enum_field("agg", &C::agg, parse_aggregation));
        f.push_back(enum_field("fusion", &C::fusion, parse_fusion_method));
        f.push_back(bool_field("fusion_normalize", &C::fusion_normalize));
        f.push_back(enum_field("missing_rank", &C::missing_rank, parse_missing_rank));
        auto list_setter = [](std::vector<std::string> C::*member, bool allow_ensemble) {
            return [member, allow_ensemble](C& c, std::string_view v) {
                auto items = parse_list(v);
                if (items.empty()) {
                    throw InvalidArgument("strategy list must not be empty");
                }
                for (const auto& s : items) {
                    if (!is_strategy(s) || (!allow_ensemble && s == "ensemble")) {
                        throw InvalidArgument("unknown strategy '" + s + "' in list");
                    }
                }
                c.*member = std::move(items);
            };
        };
        f.push_back({"ensemble", list_setter(&C::ensemble, false),
                     [](const C& c) { return join(c.ensemble); }});
        f.push_back({"eval_strategies", list_setter(&C::eval_strategies, true),
                     [](const C& c) { return join(c.eval_strategies); }});
        f.push_back(real_field("k1", &C::k1));
        f.push_back(real_field("b", &C::b));
        f.push_back(real_field("mu", &C::mu));
        f.push_back(real_field("lambda", &C::lambda));
        f.push_back(count_field("meank_k", &C::meank_k));
        f.push_back(count_field("max_docs", &C::max_docs));
        f.push_back(count_field("embed_k", &C::embed_k));
        f.push_back(real_field("top_fraction", &C::top_fraction));
        f.push_back(real_field("evidence_rho_threshold", &C::evidence_rho_threshold));
        f.push_back(real_field("query_rho_filter", &C::query_rho_filter));
        f.push_back(bool_field("weighted_author_vector", &C::weighted_author_vector));
        f.push_back(count_field("min_pts", &C::min_pts));
        f.push_back(real_field("cut_threshold", &C::cut_threshold));
        f.push_back(count_field("min_cluster_size", &C::min_cluster_size));
        f.push_back(real_field("max_noise_fraction", &C::max_noise_fraction));
        f.push_back(real_field("damping", &C::damping));
        f.push_back(real_field("ppr_tolerance", &C::ppr_tolerance));
        f.push_back(count_field("ppr_max_iter", &C::ppr_max_iter));
        f.push_back(count_field("walks_per_node", &C::walks_per_node));
        f.push_back(count_field("walk_length", &C::walk_length));
        f.push_back(count_field("window", &C::window));
        f.push_back(count_field("epochs", &C::epochs));
        f.push_back(real_field("learning_rate", &C::learning_rate));
        f.push_back(count_field("negative", &C::negative));
        f.push_back(count_field("dim", &C::dim));
        f.push_back({"seed",
                     [](C& c, std::string_view v) {
                         std::uint64_t n = 0;
                         auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
                         if (ec != std::errc{} || end != v.data() + v.size()) {
                             throw InvalidArgument("seed must be an unsigned 64-bit integer, got '" +
                                                   std::string(v) + "'");
                         }
                         c.seed = n;
                     },
                     [](const C& c) { return std::to_string(c.seed); }});
        f.push_back({"host", [](C& c, std::string_view v) { c.host = v; },
                     [](const C& c) { return c.host; }});
        f.push_back({"port", [](C& c, std::string_view v) { c.port = static_cast<int>(text::parse_int(v)); },
                     [](const C& c) { return std::to_string(c.port); }});
        f.push_back(bool_field("cors", &C::cors));
        f.push_back(count_field("threads", &C::threads));
        return f;
    }();
    return table;
}

const Field& field(std::string_view key)
{
    for (const auto& f : fields()) {
        if (f.name == key) {
            return f;
        }
    }
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

void require(bool ok, std::string_view key, std::string_view range)
{
    if (!ok) {
        throw InvalidArgument("config key '" + std::string(key) + "' must be " + std::string(range));
    }
}

std::string trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

const std::vector<std::string>& strategy_names()
{
    static const std::vector<std::string> names = {"doc",    "profile", "ec_iaf", "ef_iaf", "rec_iaf",
                                                   "aer",    "raer",    "aes",    "ensemble"};
    return names;
}

bool is_strategy(std::string_view name)
{
    const auto& names = strategy_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

EngineConfig EngineConfig::load(const std::filesystem::path& path)
{
    EngineConfig config;
    auto base = path.parent_path();
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = trim(lines[i]);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path, i + 1, "expected `key = value`");
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        try {
            const auto& f = field(key);
            if (f.is_path && !value.empty() && std::filesystem::path(value).is_relative()) {
                value = (base / value).lexically_normal().string();
            }
            f.set(config, value);
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    config.validate();
    return config;
}

void EngineConfig::set(std::string_view key, std::string_view value)
{
    field(key).set(*this, value);
}

std::string EngineConfig::get(std::string_view key) const
{
    return field(key).get(*this);
}

const std::vector<std::string>& EngineConfig::keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) {
            out.push_back(f.name);
        }
        return out;
    }();
    return names;
}

std::string EngineConfig::dump() const
{
    std::ostringstream out;
    for (const auto& f : fields()) {
        out << f.name << " = " << f.get(*this) << '\n';
    }
    return out.str();
}

void EngineConfig::validate() const
{
    require(k1 >= 0.0, "k1", ">= 0");
    require(b >= 0.0 && b <= 1.0, "b", "in [0, 1]");
    require(mu > 0.0, "mu", "> 0");
    require(lambda > 0.0 && lambda < 1.0, "lambda", "in (0, 1)");
    require(meank_k >= 1, "meank_k", ">= 1");
    require(max_docs >= 1, "max_docs", ">= 1");
    require(embed_k >= 1, "embed_k", ">= 1");
    require(top_fraction > 0.0 && top_fraction <= 1.0, "top_fraction", "in (0, 1]");
    require(evidence_rho_threshold >= 0.0 && evidence_rho_threshold <= 1.0,
            "evidence_rho_threshold", "in [0, 1]");
    require(query_rho_filter >= 0.0 && query_rho_filter <= 1.0, "query_rho_filter", "in [0, 1]");
    require(min_pts >= 2, "min_pts", ">= 2");
    require(cut_threshold >= 0.0 && cut_threshold <= 1.0, "cut_threshold", "in [0, 1]");
    require(min_cluster_size >= 1, "min_cluster_size", ">= 1");
    require(max_noise_fraction >= 0.0 && max_noise_fraction <= 1.0, "max_noise_fraction",
            "in [0, 1]");
    require(damping > 0.0 && damping < 1.0, "damping", "in (0, 1)");
    require(ppr_tolerance > 0.0, "ppr_tolerance", "> 0");
    require(ppr_max_iter >= 1, "ppr_max_iter", ">= 1");
    require(walks_per_node >= 1, "walks_per_node", ">= 1");
    require(walk_length >= 2, "walk_length", ">= 2");
    require(window >= 1, "window", ">= 1");
    require(epochs >= 1, "epochs", ">= 1");
    require(learning_rate > 0.0, "learning_rate", "> 0");
    require(negative >= 1, "negative", ">= 1");
    require(dim >= 1, "dim", ">= 1");
    require(port >= 1 && port <= 65535, "port", "in [1, 65535]");
    require(!store.empty(), "store", "non-empty");
}

ScoringScheme EngineConfig::scoring_scheme() const
{
    ScoringScheme s;
    s.kind = scheme;
    s.k1 = k1;
    s.b = b;
    s.mu = mu;
    s.lambda = lambda;
    return s;
}

DocCentricConfig EngineConfig::doc_centric() const
{
    DocCentricConfig c;
    c.scheme = scoring_scheme();
    c.fusion = doc_fusion;
    c.meank_k = meank_k;
    c.max_docs = max_docs;
    return c;
}

WemConfig EngineConfig::wem() const
{
    WemConfig c;
    c.outliers.min_pts = min_pts;
    c.outliers.cut_threshold = cut_threshold;
    c.outliers.min_cluster_size = min_cluster_size;
    c.outliers.max_noise_fraction = max_noise_fraction;
    c.ppr.damping = damping;
    c.ppr.tolerance = ppr_tolerance;
    c.ppr.max_iterations = ppr_max_iter;
    c.embed_k = embed_k;
    c.weighted_author_vector = weighted_author_vector;
    return c;
}

WalkConfig EngineConfig::walks() const
{
    WalkConfig c;
    c.walks_per_node = walks_per_node;
    c.walk_length = walk_length;
    c.window = window;
    c.epochs = epochs;
    c.learning_rate = learning_rate;
    c.negative = negative;
    c.dim = dim;
    c.seed = seed;
    c.threads = threads;
    return c;
}

FusionOptions EngineConfig::fusion_options() const
{
    return {fusion_normalize, missing_rank};
}

}  // namespace expert
