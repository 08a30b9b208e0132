#pragma once

// Direct, deliberately naive evaluations of the scoring equations. They share
// no code with the library and are the reference the library is checked
// against.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace expert::oracle {

using TokenDocs = std::vector<std::vector<std::string>>;

/// Per-document score; 0 for documents matching no query term.
std::vector<double> tfidf(const TokenDocs& docs, const std::vector<std::string>& query);
std::vector<double> bm25(const TokenDocs& docs, const std::vector<std::string>& query, double k1,
                         double b);
std::vector<double> lm_dirichlet(const TokenDocs& docs, const std::vector<std::string>& query,
                                 double mu);
std::vector<double> lm_jelinek_mercer(const TokenDocs& docs,
                                      const std::vector<std::string>& query, double lambda);

double milne_witten(const std::set<int>& a, const std::set<int>& b, std::size_t total);

/// Dense power iteration on the full transition matrix until the update is
/// below 1e-15 in every component. `w` is a symmetric weight matrix.
std::vector<double> dense_ppr(const std::vector<std::vector<double>>& w,
                              std::vector<double> teleport, double damping);

// Document-to-author fusion over one author's retrieved documents.
double meank(std::vector<double> scores, std::size_t k);
double max_of(const std::vector<double>& scores);
double reciprocal_rank_sum(const std::vector<std::size_t>& ranks);
double combnz(const std::vector<double>& scores, std::size_t author_docs);

/// Run fusion. Runs are maps author -> score (rank order derived by score
/// descending, then author id). `method` is combsum, combmin, combmax, rrm or
/// rrs.
std::map<std::string, double> fuse(const std::vector<std::map<std::string, double>>& runs,
                                   const std::string& method, bool normalize, bool skip_missing);

/// Ordered author ids: score descending, id ascending.
std::vector<std::string> order(const std::map<std::string, double>& scores);

struct ProfileEntry {
    double relevance = 0.0;
    double rho = 0.0;
    std::size_t docs = 0;
};

/// Exact-match author score. `profile` maps entity -> entry; `author_freq`
/// maps entity -> |A_e|. method: ec_iaf, ef_iaf, rec_iaf; scaling: identity,
/// sigmoid, sqrt, square; agg: max or mean.
double exact_match(const std::map<std::string, ProfileEntry>& profile,
                   const std::vector<std::string>& query, std::size_t n_authors,
                   const std::map<std::string, std::size_t>& author_freq,
                   std::size_t author_docs, const std::string& method,
                   const std::string& scaling, const std::string& agg);

/// aer or raer. `ranked` lists (entity, entry) in profile order and `rel`
/// gives the relatedness of (query entity, profile entity).
double related_match(const std::vector<std::pair<std::string, ProfileEntry>>& ranked,
                     const std::vector<std::string>& query,
                     const std::map<std::pair<std::string, std::string>, double>& rel,
                     const std::string& method, const std::string& scaling,
                     double top_fraction);

/// Cosine of two vectors; 0 when either is zero.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Student t CDF by Simpson integration of the density.
double student_t_cdf(double t, double dof);

}  // namespace expert::oracle
