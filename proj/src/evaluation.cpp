#include "expert/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "expert/errors.hpp"
#include "expert/text.hpp"
#include "io.hpp"

namespace expert {

namespace {

std::vector<std::string_view> fields_of(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

}  // namespace

Qrels Qrels::load(const std::filesystem::path& path)
{
    Qrels qrels;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto f = fields_of(lines[i]);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 4) {
            throw ParseError(path, i + 1, "expected `query_id 0 author_id grade`");
        }
        try {
            auto grade = text::parse_int(f[3]);
            if (grade < 0) {
                throw InvalidArgument("negative relevance grade");
            }
            qrels.set(std::string(f[0]), std::string(f[2]), static_cast<int>(grade));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    return qrels;
}

void Qrels::save(const std::filesystem::path& path) const
{
    std::ostringstream out;
    for (const auto& [q, grades] : m_grades) {
        for (const auto& [a, g] : grades) {
            out << q << " 0 " << a << ' ' << g << '\n';
        }
    }
    io::write_file(path, out.str());
}

void Qrels::set(const std::string& query_id, const std::string& author_id, int grade)
{
    if (grade < 0) {
        throw InvalidArgument("negative relevance grade");
    }
    m_grades[query_id][author_id] = grade;
}

int Qrels::grade(std::string_view query_id, std::string_view author_id) const
{
    auto q = m_grades.find(query_id);
    if (q == m_grades.end()) {
        return 0;
    }
    auto a = q->second.find(author_id);
    return a == q->second.end() ? 0 : a->second;
}

std::size_t Qrels::relevant_count(std::string_view query_id) const
{
    return relevant_grades(query_id).size();
}

std::vector<int> Qrels::relevant_grades(std::string_view query_id) const
{
    std::vector<int> out;
    auto q = m_grades.find(query_id);
    if (q != m_grades.end()) {
        for (const auto& [a, g] : q->second) {
            if (g > 0) {
                out.push_back(g);
            }
        }
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

std::vector<std::string> Qrels::query_ids() const
{
    std::vector<std::string> out;
    for (const auto& [q, grades] : m_grades) {
        out.push_back(q);
    }
    return out;
}

RunSet read_run_file(const std::filesystem::path& path)
{
    std::map<std::string, std::vector<std::pair<std::string, double>>> raw;
    auto lines = io::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto f = fields_of(lines[i]);
        if (f.empty()) {
            continue;
        }
        if (f.size() != 6) {
            throw ParseError(path, i + 1, "expected `query_id Q0 author_id rank score tag`");
        }
        try {
            text::parse_int(f[3]);
            raw[std::string(f[0])].emplace_back(std::string(f[2]), text::parse_double(f[4]));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, i + 1, e.what());
        }
    }
    RunSet runs;
    for (auto& [q, scores] : raw) {
        try {
            runs.emplace(q, RankedRun::from_scores(q, std::move(scores)));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, 1, "query " + q + ": " + e.what());
        }
    }
    return runs;
}

std::string format_run(const RunSet& runs, std::string_view tag)
{
    std::ostringstream out;
    for (const auto& [q, run] : runs) {
        for (const auto& e : run.entries) {
            out << q << " Q0 " << e.author_id << ' ' << e.rank << ' '
                << text::format_double(e.score) << ' ' << tag << '\n';
        }
    }
    return out.str();
}

void write_run_file(const std::filesystem::path& path, const RunSet& runs, std::string_view tag)
{
    io::write_file(path, format_run(runs, tag));
}

double precision_at_k(const RankedRun& run, const Qrels& qrels, std::size_t k)
{
    if (k == 0) {
        throw InvalidArgument("P@k needs k >= 1");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, run.entries.size()); ++i) {
        hits += qrels.grade(run.query_id, run.entries[i].author_id) > 0 ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> average_precision(const RankedRun& run, const Qrels& qrels)
{
    const auto total = qrels.relevant_count(run.query_id);
    if (total == 0) {
        return std::nullopt;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < run.entries.size(); ++i) {
        if (qrels.grade(run.query_id, run.entries[i].author_id) > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total);
}

double reciprocal_rank(const RankedRun& run, const Qrels& qrels)
{
    for (std::size_t i = 0; i < run.entries.size(); ++i) {
        if (qrels.grade(run.query_id, run.entries[i].author_id) > 0) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

double mrr(std::span<const RankedRun> runs, const Qrels& qrels)
{
    if (runs.empty()) {
        throw InvalidArgument("MRR needs at least one query");
    }
    double sum = 0.0;
    for (const auto& run : runs) {
        sum += reciprocal_rank(run, qrels);
    }
    return sum / static_cast<double>(runs.size());
}

namespace {

double dcg(std::span<const int> gains, std::size_t k)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < std::min(k, gains.size()); ++i) {
        const auto g = static_cast<double>(gains[i]);
        sum += i == 0 ? g : g / std::log2(static_cast<double>(i + 1));
    }
    return sum;
}

}  // namespace

std::optional<double> ndcg_at_k(const RankedRun& run, const Qrels& qrels, std::size_t k)
{
    auto ideal = qrels.relevant_grades(run.query_id);
    if (ideal.empty()) {
        return std::nullopt;
    }
    std::vector<int> gains;
    for (const auto& e : run.entries) {
        gains.push_back(qrels.grade(run.query_id, e.author_id));
    }
    return dcg(gains, k) / dcg(ideal, k);
}

MetricReport evaluate(const RunSet& runs, const Qrels& qrels)
{
    MetricReport report;
    report.mean.query_id = "all";
    for (const auto& q : qrels.query_ids()) {
        if (qrels.relevant_count(q) == 0) {
            continue;
        }
        auto it = runs.find(q);
        RankedRun empty{q, {}};
        const RankedRun& run = it == runs.end() ? empty : it->second;
        QueryMetrics m;
        m.query_id = q;
        m.p5 = precision_at_k(run, qrels, 5);
        m.p10 = precision_at_k(run, qrels, 10);
        m.ap = *average_precision(run, qrels);
        m.rr = reciprocal_rank(run, qrels);
        m.ndcg100 = *ndcg_at_k(run, qrels, 100);
        report.per_query.push_back(m);
    }
    if (!report.per_query.empty()) {
        for (const auto& m : report.per_query) {
            report.mean.p5 += m.p5;
            report.mean.p10 += m.p10;
            report.mean.ap += m.ap;
            report.mean.rr += m.rr;
            report.mean.ndcg100 += m.ndcg100;
        }
        const auto n = static_cast<double>(report.per_query.size());
        report.mean.p5 /= n;
        report.mean.p10 /= n;
        report.mean.ap /= n;
        report.mean.rr /= n;
        report.mean.ndcg100 /= n;
    }
    return report;
}

std::string format_report(const MetricReport& report)
{
    std::ostringstream out;
    out << "query_id\tP@5\tP@10\tMAP\tMRR\tNDCG@100\n";
    auto row = [&](const QueryMetrics& m) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f\t%.6f\t%.6f\t%.6f\n", m.query_id.c_str(),
                      m.p5, m.p10, m.ap, m.rr, m.ndcg100);
        out << buf;
    };
    for (const auto& m : report.per_query) {
        row(m);
    }
    row(report.mean);
    return out.str();
}

namespace {

struct DiffStats {
    double mean;
    double variance;
    std::size_t n;
};

DiffStats diff_stats(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw InvalidArgument("paired t-test needs samples of equal length");
    }
    if (a.size() < 2) {
        throw InvalidArgument("paired t-test needs at least 2 pairs");
    }
    const auto n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    return {mean, ss / static_cast<double>(n - 1), n};
}

}  // namespace

double paired_t_statistic(std::span<const double> a, std::span<const double> b)
{
    auto s = diff_stats(a, b);
    if (s.variance <= 0.0) {
        return 0.0;
    }
    return s.mean / std::sqrt(s.variance / static_cast<double>(s.n));
}

double paired_t_test(std::span<const double> a, std::span<const double> b, Tails tails)
{
    auto s = diff_stats(a, b);
    if (s.variance <= 0.0) {
        if (s.mean == 0.0) {
            return 1.0;
        }
        if (tails == Tails::two) {
            return 0.0;
        }
        return s.mean > 0.0 ? 0.0 : 1.0;
    }
    const double t = s.mean / std::sqrt(s.variance / static_cast<double>(s.n));
    boost::math::students_t dist(static_cast<double>(s.n - 1));
    if (tails == Tails::two) {
        return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    return boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace expert
