#include "expert/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "expert/errors.hpp"
#include "expert/simd.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

// Implementation-independent uniform draws; std::uniform_*_distribution
// output differs between standard libraries.
double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n)
{
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

constexpr std::uint64_t round_stream = 0x726f756e64ULL;
constexpr std::uint64_t walk_stream = 0x77616c6bULL;
constexpr std::uint64_t init_stream = 0x696e6974ULL;
constexpr std::uint64_t train_stream = 0x747261696eULL;

}  // namespace

EmbeddingModel::EmbeddingModel(std::size_t dim) : m_dim(dim)
{
    if (dim == 0) {
        throw InvalidArgument("embedding dimension must be positive");
    }
}

void EmbeddingModel::add(std::string entity_id, std::span<const float> vector)
{
    if (vector.size() != m_dim) {
        throw InvalidArgument("dimension mismatch for '" + entity_id + "': expected " +
                              std::to_string(m_dim) + ", got " + std::to_string(vector.size()));
    }
    for (float x : vector) {
        if (!std::isfinite(x)) {
            throw InvalidArgument("non-finite component in vector of '" + entity_id + "'");
        }
    }
    if (!m_index.emplace(entity_id, m_ids.size()).second) {
        throw InvalidArgument("duplicate embedding for '" + entity_id + "'");
    }
    m_ids.push_back(std::move(entity_id));
    m_data.insert(m_data.end(), vector.begin(), vector.end());
}

std::optional<std::span<const float>> EmbeddingModel::find(std::string_view entity_id) const
{
    auto it = m_index.find(std::string(entity_id));
    if (it == m_index.end()) {
        return std::nullopt;
    }
    return vector(it->second);
}

void EmbeddingModel::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    out << "#dim " << m_dim << " #count " << m_ids.size() << '\n';
    for (std::size_t i = 0; i < m_ids.size(); ++i) {
        out << m_ids[i];
        for (float x : vector(i)) {
            out << ' ' << text::format_float(x);
        }
        out << '\n';
    }
    io::write_file(path, out.str());
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path)
{
    auto lines = io::read_lines(path);
    if (lines.empty()) {
        throw ParseError(path, 1, "missing `#dim D #count N` header");
    }
    auto header = text::split(lines.front(), ' ');
    if (header.size() != 4 || header[0] != "#dim" || header[2] != "#count") {
        throw ParseError(path, 1, "malformed header, expected `#dim D #count N`");
    }
    std::size_t dim = 0;
    std::size_t count = 0;
    try {
        dim = static_cast<std::size_t>(text::parse_int(header[1]));
        count = static_cast<std::size_t>(text::parse_int(header[3]));
    } catch (const InvalidArgument& e) {
        throw ParseError(path, 1, e.what());
    }
    if (dim == 0) {
        throw ParseError(path, 1, "dimension must be positive");
    }
    EmbeddingModel model(dim);
    std::vector<float> buf;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        auto f = text::split(lines[i], ' ');
        buf.clear();
        try {
            for (std::size_t j = 1; j < f.size(); ++j) {
                buf.push_back(text::parse_float(f[j]));
            }
            model.add(std::string(f[0]), buf);
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    if (model.size() != count) {
        throw ParseError(path, 1,
                         "header declares " + std::to_string(count) + " vectors, file has " +
                             std::to_string(model.size()));
    }
    return model;
}

void WalkConfig::validate() const
{
    if (walks_per_node == 0 || walk_length == 0 || window == 0 || epochs == 0 || dim == 0) {
        throw InvalidArgument("walk config counts must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw InvalidArgument("learning_rate must be positive");
    }
}

std::vector<std::vector<EntityIndex>> generate_walks(const KnowledgeGraph& graph,
                                                     const WalkConfig& config)
{
    config.validate();
    const std::size_t n = graph.size();
    std::vector<std::vector<EntityIndex>> walks(n * config.walks_per_node);

    // Start orders are fixed up front so walk slots do not depend on threading.
    std::vector<EntityIndex> starts(walks.size());
    for (std::size_t r = 0; r < config.walks_per_node; ++r) {
        std::vector<EntityIndex> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = static_cast<EntityIndex>(i);
        }
        std::mt19937_64 rng(stream_seed(config.seed, round_stream, r));
        for (std::size_t i = n; i > 1; --i) {
            std::swap(order[i - 1], order[uniform_index(rng, i)]);
        }
        std::copy(order.begin(), order.end(), starts.begin() + static_cast<std::ptrdiff_t>(r * n));
    }

    auto walk_range = [&](std::size_t from, std::size_t to) {
        for (std::size_t w = from; w < to; ++w) {
            std::mt19937_64 rng(stream_seed(config.seed, walk_stream, w));
            auto& walk = walks[w];
            walk.reserve(config.walk_length);
            EntityIndex cur = starts[w];
            walk.push_back(cur);
            while (walk.size() < config.walk_length) {
                auto nb = graph.neighbors(cur);
                if (nb.empty()) {
                    break;
                }
                cur = nb[uniform_index(rng, nb.size())];
                walk.push_back(cur);
            }
        }
    };

    std::size_t threads = config.parallel_walks
                              ? (config.threads ? config.threads
                                                : std::max(1U, std::thread::hardware_concurrency()))
                              : 1;
    if (threads <= 1 || walks.size() < 2 * threads) {
        walk_range(0, walks.size());
    } else {
        std::vector<std::jthread> pool;
        std::size_t chunk = (walks.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t from = t * chunk;
            std::size_t to = std::min(walks.size(), from + chunk);
            if (from < to) {
                pool.emplace_back(walk_range, from, to);
            }
        }
    }
    return walks;
}

EmbeddingModel train_deepwalk(const KnowledgeGraph& graph, const WalkConfig& config)
{
    config.validate();
    const std::size_t n = graph.size();
    const std::size_t dim = config.dim;

    std::size_t isolated = 0;
    for (std::size_t i = 0; i < n; ++i) {
        isolated += graph.neighbors(static_cast<EntityIndex>(i)).empty() ? 1 : 0;
    }
    if (isolated > 0) {
        spdlog::warn("deepwalk: {} isolated entities keep their initial vectors", isolated);
    }

    auto walks = generate_walks(graph, config);

    // Negative sampling from the unigram^0.75 distribution of walk tokens.
    std::vector<double> freq(n, 0.0);
    std::size_t total_tokens = 0;
    for (const auto& w : walks) {
        for (auto e : w) {
            freq[e] += 1.0;
        }
        total_tokens += w.size();
    }
    std::vector<double> cumulative(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::pow(freq[i], 0.75);
        cumulative[i] = acc;
    }
    auto sample_negative = [&](std::mt19937_64& rng) {
        double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return static_cast<EntityIndex>(std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), n - 1));
    };

    std::vector<float> input(n * dim);
    std::vector<float> output(n * dim, 0.0F);
    {
        std::mt19937_64 rng(stream_seed(config.seed, init_stream, 0));
        for (auto& x : input) {
            x = static_cast<float>((uniform01(rng) - 0.5) / static_cast<double>(dim));
        }
    }
    auto in_vec = [&](EntityIndex e) { return std::span<float>(input.data() + e * dim, dim); };
    auto out_vec = [&](EntityIndex e) { return std::span<float>(output.data() + e * dim, dim); };

    std::mt19937_64 rng(stream_seed(config.seed, train_stream, 0));
    std::vector<float> hidden(dim);
    std::vector<float> grad(dim);
    std::vector<EntityIndex> context;
    const double total_steps = static_cast<double>(config.epochs * total_tokens) + 1.0;
    std::size_t processed = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& walk : walks) {
            for (std::size_t pos = 0; pos < walk.size(); ++pos, ++processed) {
                const float lr = static_cast<float>(
                    config.learning_rate *
                    std::max(1e-4, 1.0 - static_cast<double>(processed) / total_steps));
                // Shrunk window, as in word2vec.
                std::size_t reach = config.window - uniform_index(rng, config.window);
                context.clear();
                std::size_t lo = pos >= reach ? pos - reach : 0;
                std::size_t hi = std::min(walk.size() - 1, pos + reach);
                for (std::size_t c = lo; c <= hi; ++c) {
                    if (c != pos) {
                        context.push_back(walk[c]);
                    }
                }
                if (context.empty()) {
                    continue;
                }
                std::fill(hidden.begin(), hidden.end(), 0.0F);
                for (auto c : context) {
                    simd::add(in_vec(c), hidden);
                }
                const float inv = 1.0F / static_cast<float>(context.size());
                for (auto& h : hidden) {
                    h *= inv;
                }
                std::fill(grad.begin(), grad.end(), 0.0F);
                const EntityIndex focus = walk[pos];
                for (std::size_t d = 0; d <= config.negative; ++d) {
                    EntityIndex target = focus;
                    float label = 1.0F;
                    if (d > 0) {
                        target = sample_negative(rng);
                        if (target == focus) {
                            continue;
                        }
                        label = 0.0F;
                    }
                    float f = simd::dot(hidden, out_vec(target));
                    float g = 0.0F;
                    if (f > 6.0F) {
                        g = (label - 1.0F) * lr;
                    } else if (f < -6.0F) {
                        g = label * lr;
                    } else {
                        g = (label - 1.0F / (1.0F + std::exp(-f))) * lr;
                    }
                    simd::axpy(g, out_vec(target), grad);
                    simd::axpy(g, hidden, out_vec(target));
                }
                for (auto c : context) {
                    simd::add(grad, in_vec(c));
                }
            }
        }
    }

    EmbeddingModel model(dim);
    for (std::size_t i = 0; i < n; ++i) {
        model.add(graph.id(static_cast<EntityIndex>(i)), in_vec(static_cast<EntityIndex>(i)));
    }
    return model;
}

double cosine(std::span<const float> a, std::span<const float> b)
{
    if (a.size() != b.size()) {
        throw InvalidArgument("cosine of vectors with different dimensions");
    }
    const double na = simd::dot_wide(a, a);
    const double nb = simd::dot_wide(b, b);
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(simd::dot_wide(a, b) / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace expert
