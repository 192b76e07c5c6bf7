#include "ragdesk/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace ragdesk {
namespace {

constexpr std::string_view kPdfGuidance =
    "PDF input is not supported; convert the file to plain text or Markdown "
    "before uploading";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Markdown ATX heading: up to three leading spaces, 1-6 '#', then a space or
// end of line. Returns the heading text with any closing '#' run removed.
std::optional<std::string> markdown_heading(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    std::size_t hashes = 0;
    while (i < line.size() && line[i] == '#') {
        ++hashes;
        ++i;
    }
    if (hashes == 0 || hashes > 6) return std::nullopt;
    if (i < line.size() && line[i] != ' ' && line[i] != '\t') return std::nullopt;

    std::string_view text = trim(line.substr(i));
    std::size_t end = text.size();
    while (end > 0 && text[end - 1] == '#') --end;
    if (end == 0 || is_space(text[end - 1])) {
        text = trim(text.substr(0, end));
    }
    return std::string(text);
}

bool is_fence(std::string_view line) {
    line = trim(line);
    return line.starts_with("```") || line.starts_with("~~~");
}

struct Section {
    std::string heading;
    std::vector<std::string> paragraphs;  // cleaned, non-empty
};

std::vector<Section> split_sections(std::string_view raw, bool markdown) {
    std::vector<Section> sections(1);
    std::string paragraph;
    bool in_fence = false;

    auto flush_paragraph = [&] {
        std::string cleaned = clean_text(paragraph);
        if (!cleaned.empty()) {
            sections.back().paragraphs.push_back(std::move(cleaned));
        }
        paragraph.clear();
    };

    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const std::size_t nl = raw.find('\n', pos);
        const std::string_view line =
            raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;

        if (markdown && is_fence(line)) {
            in_fence = !in_fence;
        }
        std::optional<std::string> heading;
        if (markdown && !in_fence) {
            heading = markdown_heading(line);
        }

        if (heading) {
            flush_paragraph();
            if (!sections.back().paragraphs.empty() || !sections.back().heading.empty()) {
                sections.emplace_back();
            }
            sections.back().heading = std::move(*heading);
            paragraph.assign(line);
            flush_paragraph();
        } else if (trim(line).empty()) {
            flush_paragraph();
        } else {
            if (!paragraph.empty()) paragraph.push_back(' ');
            paragraph.append(line);
        }
    }
    flush_paragraph();
    return sections;
}

// Splits a cleaned paragraph at spaces that follow a sentence terminator
// (optionally wrapped in closing quotes or brackets).
std::vector<std::string_view> split_sentences(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t j = 0; j < text.size(); ++j) {
        if (text[j] != ' ') continue;
        std::size_t k = j;
        while (k > start) {
            const char c = text[k - 1];
            if (c == ')' || c == ']' || c == '"' || c == '\'') {
                --k;
            } else {
                break;
            }
        }
        if (k > start && (text[k - 1] == '.' || text[k - 1] == '!' || text[k - 1] == '?')) {
            out.push_back(text.substr(start, j - start));
            start = j + 1;
        }
    }
    if (start < text.size()) out.push_back(text.substr(start));
    return out;
}

// Greedy packer: accumulates space-joined pieces while the running token count
// stays within budget. Token counts are additive because pieces are joined by
// whitespace, which never sits inside a token.
class Packer {
public:
    explicit Packer(std::size_t budget) : budget_(budget) {}

    void add_paragraph(std::string_view paragraph) {
        const std::size_t n = count_tokens(paragraph);
        if (n <= budget_) {
            add_piece(paragraph, n);
            return;
        }
        for (std::string_view sentence : split_sentences(paragraph)) {
            const std::size_t ns = count_tokens(sentence);
            if (ns <= budget_) {
                add_piece(sentence, ns);
            } else {
                add_words(sentence);
            }
        }
    }

    void add_words(std::string_view text) {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find(' ', start);
            if (end == std::string_view::npos) end = text.size();
            const std::string_view word = text.substr(start, end - start);
            if (!word.empty()) add_word(word);
            start = end + 1;
        }
    }

    void flush() {
        if (!current_.empty()) {
            bodies_.push_back(std::move(current_));
        }
        current_.clear();
        current_tokens_ = 0;
    }

    std::vector<std::string> take() {
        flush();
        return std::move(bodies_);
    }

private:
    void add_word(std::string_view word) {
        const auto spans = token_spans(word);
        if (spans.size() <= budget_) {
            add_piece(word, spans.size());
            return;
        }
        // A single whitespace-free run longer than the budget: cut it at
        // token boundaries.
        std::size_t begin = 0;
        for (std::size_t taken = 0; taken < spans.size(); taken += budget_) {
            const std::size_t last = std::min(taken + budget_, spans.size()) - 1;
            const std::size_t end = last + 1 == spans.size() ? word.size() : spans[last].end;
            add_piece(word.substr(begin, end - begin), last + 1 - taken);
            begin = end;
        }
    }

    void add_piece(std::string_view piece, std::size_t tokens) {
        if (!current_.empty() && current_tokens_ + tokens > budget_) {
            flush();
        }
        if (!current_.empty()) current_.push_back(' ');
        current_.append(piece);
        current_tokens_ += tokens;
    }

    std::size_t budget_;
    std::string current_;
    std::size_t current_tokens_ = 0;
    std::vector<std::string> bodies_;
};

std::string cap_heading(std::string heading, std::size_t max_tokens) {
    const std::size_t cap = max_tokens / 2;
    const auto spans = token_spans(heading);
    if (spans.size() > cap) {
        heading.resize(spans[cap - 1].end);
    }
    return heading;
}

void check_budget(const ChunkerConfig& config) {
    if (config.max_chunk_tokens < kMinChunkTokens) {
        throw Error(ErrorCode::invalid_argument,
                    "max_chunk_tokens must be at least " + std::to_string(kMinChunkTokens));
    }
}

Chunk make_chunk(const Document& doc, std::string heading, std::string body, std::size_t ordinal) {
    Chunk chunk;
    chunk.doc_id = doc.doc_id;
    chunk.heading = std::move(heading);
    chunk.body = std::move(body);
    chunk.ordinal = ordinal;
    chunk.token_count = count_tokens(chunk.indexed_text());
    return chunk;
}

}  // namespace

std::string_view to_string(DocumentFormat format) noexcept {
    switch (format) {
        case DocumentFormat::plain: return "plain";
        case DocumentFormat::markdown: return "markdown";
        case DocumentFormat::csv: return "csv";
    }
    return "plain";
}

DocumentFormat parse_format(std::string_view name) {
    const std::string n = lower_ascii(trim(name));
    if (n == "plain" || n == "text" || n == "txt") return DocumentFormat::plain;
    if (n == "markdown" || n == "md") return DocumentFormat::markdown;
    if (n == "csv") return DocumentFormat::csv;
    if (n == "pdf") throw Error(ErrorCode::unsupported_format, std::string(kPdfGuidance));
    throw Error(ErrorCode::unsupported_format,
                "unsupported document format '" + std::string(name) +
                    "'; accepted formats are plain, markdown and csv");
}

DocumentFormat format_from_filename(std::string_view filename) {
    const auto dot = filename.rfind('.');
    if (dot == std::string_view::npos) return DocumentFormat::plain;
    const std::string ext = lower_ascii(filename.substr(dot + 1));
    if (ext == "markdown") return DocumentFormat::markdown;
    return parse_format(ext);
}

std::string Chunk::indexed_text() const {
    if (heading.empty()) return body;
    return heading + "\n" + body;
}

std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

void validate_document(const Document& doc) {
    if (doc.raw_text.starts_with("%PDF-")) {
        throw Error(ErrorCode::unsupported_format, std::string(kPdfGuidance));
    }
    if (!is_valid_utf8(doc.raw_text)) {
        throw Error(ErrorCode::ingestion, "document '" + doc.source_name + "' is not valid UTF-8");
    }
    if (clean_text(doc.raw_text).empty()) {
        throw Error(ErrorCode::ingestion,
                    "document '" + doc.source_name + "' is empty after normalization");
    }
}

std::vector<Chunk> chunk_document(const Document& doc, const ChunkerConfig& config) {
    check_budget(config);
    if (doc.format == DocumentFormat::csv) {
        return ingest_csv(doc, config);
    }

    const bool markdown = doc.format == DocumentFormat::markdown;
    std::vector<Chunk> chunks;
    for (Section& section : split_sections(doc.raw_text, markdown)) {
        if (section.paragraphs.empty()) continue;

        std::string heading;
        if (config.heading_mode == HeadingMode::prefix) {
            heading = cap_heading(std::move(section.heading), config.max_chunk_tokens);
        }
        const std::size_t budget = config.max_chunk_tokens - count_tokens(heading);

        Packer packer(budget);
        for (const std::string& paragraph : section.paragraphs) {
            packer.add_paragraph(paragraph);
        }
        for (std::string& body : packer.take()) {
            chunks.push_back(make_chunk(doc, heading, std::move(body), chunks.size()));
        }
    }
    return chunks;
}

std::vector<Chunk> ingest_csv(const Document& doc, const ChunkerConfig& config) {
    check_budget(config);
    const std::vector<CsvRow> rows = parse_csv(doc.raw_text);
    std::vector<Chunk> chunks;
    if (rows.empty()) return chunks;

    std::vector<std::string> header;
    for (const auto& field : rows.front().fields) header.push_back(clean_text(field));

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const CsvRow& row = rows[r];
        const bool blank = std::all_of(row.fields.begin(), row.fields.end(),
                                       [](const std::string& f) { return trim(f).empty(); });
        if (blank) continue;
        if (row.fields.size() != header.size()) {
            throw Error(ErrorCode::ingestion,
                        "CSV line " + std::to_string(row.line) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(row.fields.size()));
        }

        std::string body;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c > 0) body.append("; ");
            body.append(header[c]).append(": ").append(clean_text(row.fields[c]));
        }

        if (count_tokens(body) <= config.max_chunk_tokens) {
            chunks.push_back(make_chunk(doc, {}, std::move(body), chunks.size()));
        } else {
            Packer packer(config.max_chunk_tokens);
            packer.add_words(body);
            for (std::string& part : packer.take()) {
                chunks.push_back(make_chunk(doc, {}, std::move(part), chunks.size()));
            }
        }
    }
    return chunks;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (text.empty()) return rows;

    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto fail = [](std::size_t at, const std::string& what) -> Error {
        return Error(ErrorCode::ingestion, "CSV line " + std::to_string(at) + ": " + what);
    };

    while (i < n) {
        CsvRow row;
        row.line = line;
        bool row_done = false;
        while (!row_done) {
            std::string field;
            if (i < n && text[i] == '"') {
                const std::size_t quote_line = line;
                ++i;
                bool closed = false;
                while (i < n) {
                    const char c = text[i];
                    if (c == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                if (!closed) throw fail(quote_line, "unterminated quoted field");
                if (i < n && text[i] == '\r') ++i;
                if (i < n && text[i] != ',' && text[i] != '\n') {
                    throw fail(line, "unexpected character after closing quote");
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n') {
                    if (text[i] == '"') throw fail(line, "quote inside unquoted field");
                    field.push_back(text[i]);
                    ++i;
                }
                if (!field.empty() && field.back() == '\r') field.pop_back();
            }
            row.fields.push_back(std::move(field));

            if (i >= n) {
                row_done = true;
            } else if (text[i] == ',') {
                ++i;
            } else {  // '\n'
                ++i;
                ++line;
                row_done = true;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void Corpus::add_document(Document doc, std::vector<Chunk> chunks) {
    if (documents_.contains(doc.doc_id)) {
        throw Error(ErrorCode::conflict, "duplicate document id " + std::to_string(doc.doc_id.value));
    }
    for (const Chunk& chunk : chunks) {
        if (chunks_.contains(chunk.chunk_id)) {
            throw Error(ErrorCode::conflict,
                        "duplicate chunk id " + std::to_string(chunk.chunk_id.value));
        }
    }
    const DocId id = doc.doc_id;
    documents_.emplace(id, std::move(doc));
    for (Chunk& chunk : chunks) {
        const ChunkId cid = chunk.chunk_id;
        chunks_.emplace(cid, std::move(chunk));
    }
}

const Chunk* Corpus::find_chunk(ChunkId id) const {
    const auto it = chunks_.find(id);
    return it == chunks_.end() ? nullptr : &it->second;
}

const Document* Corpus::find_document(DocId id) const {
    const auto it = documents_.find(id);
    return it == documents_.end() ? nullptr : &it->second;
}

std::vector<const Chunk*> Corpus::chunks_of(DocId id) const {
    std::vector<const Chunk*> out;
    for (const auto& [cid, chunk] : chunks_) {
        if (chunk.doc_id == id) out.push_back(&chunk);
    }
    std::sort(out.begin(), out.end(),
              [](const Chunk* a, const Chunk* b) { return a->ordinal < b->ordinal; });
    return out;
}

}  // namespace ragdesk
