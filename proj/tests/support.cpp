#include "support.hpp"

#include <cmath>

namespace ragdesk::testing {

Clock stepping_clock(Timestamp start, std::chrono::milliseconds step) {
    auto next = std::make_shared<std::atomic<std::int64_t>>(start.time_since_epoch().count());
    return [next, step] { return Timestamp{std::chrono::milliseconds(next->fetch_add(step.count()))}; };
}

ServiceOptions memory_options() {
    ServiceOptions o;
    o.database = ":memory:";
    o.clock = stepping_clock();
    o.retry.sleep = [](std::chrono::milliseconds) {};
    return o;
}

Providers mock_providers(std::size_t dimension, std::unordered_map<std::string, std::string> synonyms) {
    HashingEmbedder::Options e;
    e.dimension = dimension;
    e.synonyms = std::move(synonyms);
    Providers p;
    p.embedder = std::make_shared<HashingEmbedder>(std::move(e));
    p.llm = std::make_shared<MockLlmClient>();
    return p;
}

std::string random_words(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t n) {
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out.push_back(' ');
        out += vocab[pick(rng)];
    }
    return out;
}

std::vector<std::string> make_vocab(std::size_t n, const std::string& prefix) {
    std::vector<std::string> vocab;
    for (std::size_t i = 0; i < n; ++i) vocab.push_back(prefix + std::to_string(i));
    return vocab;
}

std::vector<float> random_unit_vector(std::mt19937_64& rng, std::size_t dimension) {
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    std::vector<float> v(dimension);
    double sum = 0.0;
    for (float& x : v) {
        x = gauss(rng);
        sum += static_cast<double>(x) * x;
    }
    const auto norm = static_cast<float>(std::sqrt(sum));
    for (float& x : v) x /= norm;
    return v;
}

}  // namespace ragdesk::testing
