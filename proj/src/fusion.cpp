#include "expert/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "expert/errors.hpp"

namespace expert {

RankedRun RankedRun::from_scores(std::string query_id,
                                 std::vector<std::pair<std::string, double>> scores)
{
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    RankedRun run;
    run.query_id = std::move(query_id);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (std::isnan(scores[i].second)) {
            throw InvalidArgument("NaN score for author '" + scores[i].first + "'");
        }
        if (i > 0 && scores[i].first == scores[i - 1].first) {
            throw InvalidArgument("duplicate author '" + scores[i].first + "' in run");
        }
        run.entries.push_back({std::move(scores[i].first), scores[i].second, i + 1});
    }
    // Equal ids need not be adjacent after the score sort.
    run.validate();
    return run;
}

void RankedRun::validate() const
{
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.rank != i + 1) {
            throw InvalidArgument("ranks are not consecutive from 1");
        }
        if (!seen.insert(e.author_id).second) {
            throw InvalidArgument("duplicate author '" + e.author_id + "' in run");
        }
        if (i > 0) {
            const auto& prev = entries[i - 1];
            if (prev.score < e.score || (prev.score == e.score && prev.author_id > e.author_id)) {
                throw InvalidArgument("run is not sorted by score, then author_id");
            }
        }
    }
}

std::optional<std::size_t> RankedRun::rank_of(std::string_view author_id) const
{
    const auto* e = find(author_id);
    return e ? std::optional<std::size_t>(e->rank) : std::nullopt;
}

const RunEntry* RankedRun::find(std::string_view author_id) const
{
    for (const auto& e : entries) {
        if (e.author_id == author_id) {
            return &e;
        }
    }
    return nullptr;
}

std::string_view to_string(FusionMethod method)
{
    switch (method) {
    case FusionMethod::combsum: return "combsum";
    case FusionMethod::combmin: return "combmin";
    case FusionMethod::combmax: return "combmax";
    case FusionMethod::rrm: return "rrm";
    case FusionMethod::rrs: return "rrs";
    }
    return "combsum";
}

FusionMethod parse_fusion_method(std::string_view s)
{
    for (auto m : {FusionMethod::combsum, FusionMethod::combmin, FusionMethod::combmax,
                   FusionMethod::rrm, FusionMethod::rrs}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw InvalidArgument("unknown fusion method '" + std::string(s) + "'");
}

RankedRun fuse(std::span<const RankedRun> runs, FusionMethod method, const FusionOptions& options)
{
    if (runs.empty()) {
        throw InvalidArgument("fusion needs at least one run");
    }
    for (const auto& r : runs) {
        if (r.query_id != runs.front().query_id) {
            throw InvalidArgument("cannot fuse runs of different queries ('" +
                                  runs.front().query_id + "' vs '" + r.query_id + "')");
        }
    }

    std::map<std::string, std::vector<const RunEntry*>> by_author;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (const auto& e : runs[i].entries) {
            by_author[e.author_id].resize(runs.size(), nullptr);
            by_author[e.author_id][i] = &e;
        }
    }

    // Per-run normalization bounds.
    std::vector<double> lo(runs.size(), 0.0);
    std::vector<double> hi(runs.size(), 0.0);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].empty()) {
            continue;
        }
        auto [mn, mx] = std::minmax_element(
            runs[i].entries.begin(), runs[i].entries.end(),
            [](const auto& a, const auto& b) { return a.score < b.score; });
        lo[i] = mn->score;
        hi[i] = mx->score;
    }
    auto score_in = [&](std::size_t i, const RunEntry* e) {
        if (e == nullptr) {
            return 0.0;
        }
        if (!options.normalize) {
            return e->score;
        }
        return hi[i] > lo[i] ? (e->score - lo[i]) / (hi[i] - lo[i]) : 1.0;
    };

    std::vector<std::pair<std::string, double>> fused;
    for (const auto& [author, entries] : by_author) {
        double value = 0.0;
        switch (method) {
        case FusionMethod::combsum:
            for (std::size_t i = 0; i < runs.size(); ++i) {
                value += score_in(i, entries[i]);
            }
            break;
        case FusionMethod::combmin:
            value = score_in(0, entries[0]);
            for (std::size_t i = 1; i < runs.size(); ++i) {
                value = std::min(value, score_in(i, entries[i]));
            }
            break;
        case FusionMethod::combmax:
            value = score_in(0, entries[0]);
            for (std::size_t i = 1; i < runs.size(); ++i) {
                value = std::max(value, score_in(i, entries[i]));
            }
            break;
        case FusionMethod::rrm: {
            // The rank product is exact, so equal products tie exactly
            // whatever the run order.
            double rank_product = 1.0;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (entries[i]) {
                    rank_product *= static_cast<double>(entries[i]->rank);
                } else if (options.missing == MissingRank::after_last) {
                    rank_product *= static_cast<double>(runs[i].size() + 1);
                }
            }
            value = 1.0 / rank_product;
            break;
        }
        case FusionMethod::rrs: {
            double rank_sum = 0.0;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (entries[i]) {
                    rank_sum += static_cast<double>(entries[i]->rank);
                } else if (options.missing == MissingRank::after_last) {
                    rank_sum += static_cast<double>(runs[i].size() + 1);
                }
            }
            value = 1.0 / rank_sum;
            break;
        }
        }
        fused.emplace_back(author, value);
    }
    return RankedRun::from_scores(runs.front().query_id, std::move(fused));
}

}  // namespace expert
