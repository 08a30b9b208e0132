#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace expert {

struct RunEntry {
    std::string author_id;
    double score = 0.0;
    /// 1-based.
    std::size_t rank = 0;

    bool operator==(const RunEntry&) const = default;
};

/// Authors ranked for one query: scores non-increasing, ties by author_id
/// ascending, ranks 1..n, ids distinct.
struct RankedRun {
    std::string query_id;
    std::vector<RunEntry> entries;

    /// Sorts and ranks. Throws InvalidArgument on duplicate ids or NaN scores.
    static RankedRun from_scores(std::string query_id,
                                 std::vector<std::pair<std::string, double>> scores);

    /// Throws InvalidArgument when an invariant does not hold.
    void validate() const;
    std::optional<std::size_t> rank_of(std::string_view author_id) const;
    const RunEntry* find(std::string_view author_id) const;
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    bool operator==(const RankedRun&) const = default;
};

enum class FusionMethod { combsum, combmin, combmax, rrm, rrs };

std::string_view to_string(FusionMethod method);
FusionMethod parse_fusion_method(std::string_view s);

/// Rank assumed for an author missing from a run (rank-based methods).
enum class MissingRank {
    /// length of that run + 1
    after_last,
    /// the run is left out of that author's product/sum
    skip_run,
};

struct FusionOptions {
    /// Min-max normalize each run before combsum/combmin/combmax.
    bool normalize = true;
    MissingRank missing = MissingRank::after_last;
};

/// Combines runs for one query. Score-based methods count a missing author
/// as score 0. Throws InvalidArgument for an empty list or mixed query ids.
RankedRun fuse(std::span<const RankedRun> runs, FusionMethod method,
               const FusionOptions& options = {});

}  // namespace expert
