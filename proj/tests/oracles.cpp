#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

namespace ragdesk::oracle {

std::vector<std::string> ascii_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string collapse_whitespace(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

namespace {

std::size_t count_of(const std::vector<std::string>& doc, const std::string& term) {
    return static_cast<std::size_t>(std::count(doc.begin(), doc.end(), term));
}

std::size_t docs_with(const std::vector<std::vector<std::string>>& docs, const std::string& term) {
    std::size_t n = 0;
    for (const auto& d : docs) n += count_of(d, term) > 0 ? 1 : 0;
    return n;
}

}  // namespace

double bm25_idf(const std::vector<std::vector<std::string>>& docs, const std::string& term) {
    const double N = static_cast<double>(docs.size());
    const double n = static_cast<double>(docs_with(docs, term));
    return std::log((N - n + 0.5) / (n + 0.5) + 1.0);
}

double bm25(const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& query,
            std::size_t doc, Bm25 params) {
    double total_len = 0.0;
    for (const auto& d : docs) total_len += static_cast<double>(d.size());
    const double avgdl = total_len / static_cast<double>(docs.size());
    const double len = static_cast<double>(docs[doc].size());
    double score = 0.0;
    for (const std::string& q : query) {
        const double f = static_cast<double>(count_of(docs[doc], q));
        if (f == 0.0) continue;
        score += bm25_idf(docs, q) * f * (params.k1 + 1.0) /
                 (f + params.k1 * (1.0 - params.b + params.b * len / avgdl));
    }
    return score;
}

std::vector<double> tfidf_cosines(const std::vector<std::vector<std::string>>& docs,
                                  const std::vector<std::string>& query) {
    std::set<std::string> vocab_set;
    for (const auto& d : docs) vocab_set.insert(d.begin(), d.end());
    const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
    const double N = static_cast<double>(docs.size());

    std::vector<double> idf(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j) {
        idf[j] = std::log(N / static_cast<double>(docs_with(docs, vocab[j])));
    }
    auto row = [&](const std::vector<std::string>& tokens) {
        std::vector<double> r(vocab.size(), 0.0);
        if (tokens.empty()) return r;
        for (std::size_t j = 0; j < vocab.size(); ++j) {
            r[j] = static_cast<double>(count_of(tokens, vocab[j])) / static_cast<double>(tokens.size()) * idf[j];
        }
        return r;
    };
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
        const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
        const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
        const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
        return na == 0.0 || nb == 0.0 ? 0.0 : dot / (na * nb);
    };
    const std::vector<double> q = row(query);
    std::vector<double> out;
    for (const auto& d : docs) out.push_back(cosine(q, row(d)));
    return out;
}

std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

std::vector<std::size_t> exact_cosine_top_k(const std::vector<std::vector<float>>& vectors,
                                            const std::vector<float>& query, std::size_t k) {
    auto norm = [](const std::vector<float>& v) {
        double s = 0.0;
        for (float x : v) s += static_cast<double>(x) * x;
        return std::sqrt(s);
    };
    const double qn = norm(query);
    std::vector<double> scores;
    for (const auto& v : vectors) {
        double dot = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += static_cast<double>(v[i]) * query[i];
        scores.push_back(dot / (norm(v) * qn));
    }
    std::vector<std::size_t> idx(vectors.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::set<std::string> sa(a.begin(), a.end());
    const std::set<std::string> sb(b.begin(), b.end());
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ragdesk::oracle
