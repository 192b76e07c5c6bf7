#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragdesk/common.hpp"
#include "ragdesk/tokenizer.hpp"

namespace ragdesk {

enum class DocumentFormat { plain, markdown, csv };

std::string_view to_string(DocumentFormat format) noexcept;

/// Parses a declared format name ("plain"/"text"/"txt", "markdown"/"md", "csv").
/// PDF and anything else is rejected with ErrorCode::unsupported_format.
DocumentFormat parse_format(std::string_view name);

/// Picks a format from a file extension; same rejection rules as parse_format.
DocumentFormat format_from_filename(std::string_view filename);

struct Document {
    DocId doc_id;
    std::string source_name;
    std::string raw_text;
    DocumentFormat format = DocumentFormat::plain;
    Timestamp ingested_at;
};

struct Chunk {
    ChunkId chunk_id;
    DocId doc_id;
    std::string heading;
    std::string body;
    std::size_t token_count = 0;
    std::size_t ordinal = 0;

    /// Heading-prefixed body; the text both indexes see.
    std::string indexed_text() const;

    bool operator==(const Chunk&) const = default;
};

enum class HeadingMode { none, prefix };

struct ChunkerConfig {
    std::size_t max_chunk_tokens = 384;
    HeadingMode heading_mode = HeadingMode::prefix;
};

inline constexpr std::size_t kMinChunkTokens = 16;

/// Collapses every run of whitespace (line breaks included) to one space and
/// trims both ends.
std::string clean_text(std::string_view raw);

/// Rejects bytes that are not ingestible: PDF signatures, invalid UTF-8, and
/// text that is empty after cleaning.
void validate_document(const Document& doc);

/// Splits a plain or Markdown document into budgeted chunks. CSV documents are
/// forwarded to ingest_csv. Chunk ids are left zero for the caller to assign.
std::vector<Chunk> chunk_document(const Document& doc, const ChunkerConfig& config = {});

/// One chunk per data row, body "header1: value1; header2: value2", with
/// oversize rows hard-split.
std::vector<Chunk> ingest_csv(const Document& doc, const ChunkerConfig& config = {});

struct CsvRow {
    std::size_t line = 0;  // 1-based line where the row starts
    std::vector<std::string> fields;
};

/// RFC-4180 reader. Throws ErrorCode::ingestion naming the offending line.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);

/// Documents and chunks of one bot, keyed by id. Not internally synchronized.
class Corpus {
public:
    void add_document(Document doc, std::vector<Chunk> chunks);

    const Chunk* find_chunk(ChunkId id) const;
    const Document* find_document(DocId id) const;
    std::vector<const Chunk*> chunks_of(DocId id) const;

    std::size_t document_count() const noexcept { return documents_.size(); }
    std::size_t chunk_count() const noexcept { return chunks_.size(); }

    const std::map<DocId, Document>& documents() const noexcept { return documents_; }
    const std::map<ChunkId, Chunk>& chunks() const noexcept { return chunks_; }

private:
    std::map<DocId, Document> documents_;
    std::map<ChunkId, Chunk> chunks_;
};

}  // namespace ragdesk
