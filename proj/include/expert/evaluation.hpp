#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expert/fusion.hpp"

namespace expert {

/// Graded judgments; grade > 0 means relevant.
class Qrels {
  public:
    /// TREC format: `query_id 0 author_id grade`.
    static Qrels load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    void set(const std::string& query_id, const std::string& author_id, int grade);
    int grade(std::string_view query_id, std::string_view author_id) const;
    std::size_t relevant_count(std::string_view query_id) const;
    /// Positive grades of a query, highest first.
    std::vector<int> relevant_grades(std::string_view query_id) const;
    std::vector<std::string> query_ids() const;

  private:
    std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>> m_grades;
};

/// Runs of many queries keyed by query id.
using RunSet = std::map<std::string, RankedRun, std::less<>>;

/// TREC run format: `query_id Q0 author_id rank score tag`. Entries are
/// re-sorted by score then author_id; the file's rank column is ignored.
RunSet read_run_file(const std::filesystem::path& path);
std::string format_run(const RunSet& runs, std::string_view tag);
void write_run_file(const std::filesystem::path& path, const RunSet& runs, std::string_view tag);

/// |relevant within top k| / k.
double precision_at_k(const RankedRun& run, const Qrels& qrels, std::size_t k);
/// Sum of P@i at relevant ranks / total relevant; nullopt when the query has
/// no relevant author.
std::optional<double> average_precision(const RankedRun& run, const Qrels& qrels);
/// 1 / rank of the first relevant author, 0 when none is retrieved.
double reciprocal_rank(const RankedRun& run, const Qrels& qrels);
double mrr(std::span<const RankedRun> runs, const Qrels& qrels);
/// DCG_k = rel(1) + sum_{i=2..k} rel(i)/log2(i), over the ideal DCG_k of the
/// judged grades; nullopt when the query has no relevant author.
std::optional<double> ndcg_at_k(const RankedRun& run, const Qrels& qrels, std::size_t k);

struct QueryMetrics {
    std::string query_id;
    double p5 = 0.0;
    double p10 = 0.0;
    double ap = 0.0;
    double rr = 0.0;
    double ndcg100 = 0.0;
};

struct MetricReport {
    /// Sorted by query_id; only queries with a relevant author.
    std::vector<QueryMetrics> per_query;
    /// Means over per_query, with query_id "all".
    QueryMetrics mean;
};

/// Evaluates every judged query that has a relevant author. A query missing
/// from `runs` scores 0 everywhere.
MetricReport evaluate(const RunSet& runs, const Qrels& qrels);

/// Tab-separated table: header, one row per query, then the `all` row.
std::string format_report(const MetricReport& report);

enum class Tails { one, two };

/// Paired t-test of a against b (one-tailed alternative: mean(a - b) > 0).
/// With zero variance in the differences, p is 1 for a zero mean difference;
/// otherwise 0 (two-tailed or positive difference) or 1 (one-tailed,
/// negative difference). Throws InvalidArgument for n < 2 or unequal lengths.
double paired_t_test(std::span<const double> a, std::span<const double> b, Tails tails);

/// The t statistic alone (0 when the differences have zero variance).
double paired_t_statistic(std::span<const double> a, std::span<const double> b);

}  // namespace expert
