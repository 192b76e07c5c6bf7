#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragdesk/service.hpp"

namespace ragdesk {

/// A labeled query. Relevant ids name a corpus file ("notes.md", any of its
/// chunks counts) or one chunk of it ("notes.md#2", 0-based ordinal).
struct BenchQuery {
    std::size_t line = 0;
    std::string query;
    std::vector<std::string> relevant;
};

/// CSV with columns (query, relevant_ids); relevant ids are separated by ';'.
/// A first row reading "query,relevant_ids" is treated as a header. Errors
/// name the file and line.
std::vector<BenchQuery> parse_bench_queries(std::string_view csv, std::string_view file_name);

struct ModeReport {
    RetrievalMode mode = RetrievalMode::hybrid;
    double recall_at_k = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
};

struct BenchReport {
    std::size_t documents = 0;
    std::size_t corpus_size = 0;  // chunks
    std::size_t queries_run = 0;
    std::size_t k = 5;
    std::vector<ModeReport> modes;
};

struct BenchOptions {
    std::vector<RetrievalMode> modes = {RetrievalMode::sparse, RetrievalMode::dense, RetrievalMode::hybrid,
                                        RetrievalMode::hybrid_rerank};
    std::size_t k = 5;
    std::size_t concurrency = 1;
};

/// Runs every query through each mode against an already populated bot.
BenchReport run_bench(const Service& service, const std::string& bot_id, std::span<const BenchQuery> queries,
                      const BenchOptions& options);

/// Nearest-rank percentile of an unsorted sample, p in [0, 100].
double percentile(std::vector<double> sample, double p);

std::string format_bench_table(const BenchReport& report);
nlohmann::json bench_to_json(const BenchReport& report);

}  // namespace ragdesk
