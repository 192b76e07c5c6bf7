#include "ragdesk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace ragdesk {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<BenchQuery> parse_bench_queries(std::string_view csv, std::string_view file_name) {
    const std::string where(file_name);
    std::vector<CsvRow> rows;
    try {
        rows = parse_csv(csv);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_argument, where + ": " + e.what());
    }
    std::vector<BenchQuery> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const CsvRow& row = rows[i];
        const std::string line = where + ":" + std::to_string(row.line) + ": ";
        if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;
        if (row.fields.size() != 2) {
            throw Error(ErrorCode::invalid_argument,
                        line + "expected 2 fields (query, relevant_ids), found " + std::to_string(row.fields.size()));
        }
        if (i == 0 && trim(row.fields[0]) == "query" && trim(row.fields[1]) == "relevant_ids") continue;

        BenchQuery q;
        q.line = row.line;
        q.query = trim(row.fields[0]);
        if (q.query.empty()) throw Error(ErrorCode::invalid_argument, line + "query is empty");
        std::string_view ids = row.fields[1];
        while (!ids.empty()) {
            const auto cut = ids.find(';');
            std::string id = trim(ids.substr(0, cut));
            if (!id.empty()) q.relevant.push_back(std::move(id));
            ids = cut == std::string_view::npos ? std::string_view{} : ids.substr(cut + 1);
        }
        if (q.relevant.empty()) throw Error(ErrorCode::invalid_argument, line + "relevant_ids is empty");
        out.push_back(std::move(q));
    }
    if (out.empty()) throw Error(ErrorCode::invalid_argument, where + ": no queries");
    return out;
}

double percentile(std::vector<double> sample, double p) {
    if (sample.empty()) return 0.0;
    std::sort(sample.begin(), sample.end());
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sample.size())));
    return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

BenchReport run_bench(const Service& service, const std::string& bot_id, std::span<const BenchQuery> queries,
                      const BenchOptions& options) {
    if (options.k == 0) throw Error(ErrorCode::invalid_argument, "k must be at least 1");
    if (options.modes.empty()) throw Error(ErrorCode::invalid_argument, "at least one mode is required");

    const BotStats stats = service.stats(bot_id);
    BenchReport report;
    report.documents = stats.documents;
    report.corpus_size = stats.chunks;
    report.queries_run = queries.size();
    report.k = options.k;

    std::map<DocId, std::string> source_of;
    for (const Document& d : service.documents(bot_id)) source_of[d.doc_id] = d.source_name;
    std::map<ChunkId, std::pair<std::string, std::string>> labels;  // file, file#ordinal
    for (const Chunk& c : service.chunks(bot_id)) {
        const std::string& file = source_of[c.doc_id];
        labels[c.chunk_id] = {file, file + "#" + std::to_string(c.ordinal)};
    }

    std::set<std::string> known;
    for (const auto& [id, label] : labels) {
        known.insert(label.first);
        known.insert(label.second);
    }
    for (const BenchQuery& q : queries) {
        for (const std::string& r : q.relevant) {
            if (!known.contains(r)) {
                throw Error(ErrorCode::invalid_argument, "queries line " + std::to_string(q.line) +
                                                             ": relevant id '" + r +
                                                             "' names no corpus file or chunk");
            }
        }
    }

    for (const RetrievalMode mode : options.modes) {
        std::vector<double> recall(queries.size());
        std::vector<double> latency(queries.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;

        const auto worker = [&] {
            for (std::size_t i = next++; i < queries.size(); i = next++) {
                try {
                    const auto started = std::chrono::steady_clock::now();
                    const std::vector<ChunkId> ids = service.retrieve_ids(bot_id, mode, queries[i].query, options.k);
                    latency[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                                     .count();
                    std::set<std::string> found;
                    for (ChunkId id : ids) {
                        const auto it = labels.find(id);
                        if (it == labels.end()) continue;
                        found.insert(it->second.first);
                        found.insert(it->second.second);
                    }
                    std::size_t hits = 0;
                    for (const std::string& r : queries[i].relevant) hits += found.contains(r) ? 1 : 0;
                    recall[i] = static_cast<double>(hits) / static_cast<double>(queries[i].relevant.size());
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        const std::size_t threads = std::clamp<std::size_t>(options.concurrency, 1, queries.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);

        ModeReport m;
        m.mode = mode;
        double total = 0.0;
        for (double r : recall) total += r;
        m.recall_at_k = queries.empty() ? 0.0 : total / static_cast<double>(queries.size());
        m.p50_ms = percentile(latency, 50);
        m.p95_ms = percentile(latency, 95);
        report.modes.push_back(m);
    }
    return report;
}

std::string format_bench_table(const BenchReport& report) {
    std::string out = "corpus: " + std::to_string(report.documents) + " documents, " +
                      std::to_string(report.corpus_size) + " chunks; queries: " +
                      std::to_string(report.queries_run) + "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %10s %10s %10s\n", "mode",
                  ("recall@" + std::to_string(report.k)).c_str(), "p50_ms", "p95_ms");
    out += line;
    for (const ModeReport& m : report.modes) {
        std::snprintf(line, sizeof line, "%-14s %10.4f %10.3f %10.3f\n", std::string(to_string(m.mode)).c_str(),
                      m.recall_at_k, m.p50_ms, m.p95_ms);
        out += line;
    }
    return out;
}

nlohmann::json bench_to_json(const BenchReport& report) {
    nlohmann::json modes = nlohmann::json::object();
    for (const ModeReport& m : report.modes) {
        modes[std::string(to_string(m.mode))] = {
            {"recall_at_k", m.recall_at_k}, {"p50_ms", m.p50_ms}, {"p95_ms", m.p95_ms}};
    }
    return {{"documents", report.documents},
            {"corpus_size", report.corpus_size},
            {"queries_run", report.queries_run},
            {"k", report.k},
            {"modes", std::move(modes)}};
}

}  // namespace ragdesk
