#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Independent reference implementations used to check the library. They work
// on plain token lists and recompute everything from scratch on every call.
namespace ragdesk::oracle {

/// Lowercased runs of ASCII letters and digits.
std::vector<std::string> ascii_tokens(const std::string& text);

/// Collapses whitespace runs to one space and trims, one character at a time.
std::string collapse_whitespace(const std::string& text);

struct Bm25 {
    double k1 = 1.5;
    double b = 0.75;
};

/// Brute-force BM25 with the +1 IDF variant and natural log.
double bm25_idf(const std::vector<std::vector<std::string>>& docs, const std::string& term);
double bm25(const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& query,
            std::size_t doc, Bm25 params = {});

/// Cosine between the query and document rows of a dense TF-IDF matrix
/// (tf = count / length, idf = ln(N / n)).
std::vector<double> tfidf_cosines(const std::vector<std::vector<std::string>>& docs,
                                  const std::vector<std::string>& query);

/// Indices of the k largest scores among those > 0, ties by lower index.
std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k);

/// Exact top-k by cosine over raw (not necessarily unit) vectors.
std::vector<std::size_t> exact_cosine_top_k(const std::vector<std::vector<float>>& vectors,
                                            const std::vector<float>& query, std::size_t k);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace ragdesk::oracle
