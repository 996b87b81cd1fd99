// jsonl.hpp - JSON-Lines corpus and groundtruth file formats
//
// Corpus record: {"id": string, "language": string, "code": string,
//                 "path": optional string, "line_begin"/"line_end": optional}
// Groundtruth pair: {"question_id": string, "snippet_id": string}
#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "senatus/snippet.hpp"

namespace senatus {

// Re-iterable snippet source; the index build makes two passes.
class CorpusReader {
public:
    virtual ~CorpusReader() = default;
    virtual void reset() = 0;
    virtual bool next(CodeSnippet& out) = 0;  // false at end of stream
};

class VectorCorpusReader final : public CorpusReader {
public:
    explicit VectorCorpusReader(std::vector<CodeSnippet> snippets)
        : snippets_(std::move(snippets)) {}

    void reset() override { pos_ = 0; }
    bool next(CodeSnippet& out) override {
        if (pos_ >= snippets_.size()) return false;
        out = snippets_[pos_++];
        return true;
    }

private:
    std::vector<CodeSnippet> snippets_;
    std::size_t pos_ = 0;
};

class JsonlCorpusReader final : public CorpusReader {
public:
    explicit JsonlCorpusReader(std::string path);
    ~JsonlCorpusReader() override;

    void reset() override;
    bool next(CodeSnippet& out) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Throws IoError on unreadable files or malformed records.
CodeSnippet parse_corpus_record(const std::string& json_line, std::size_t line_no);
std::string corpus_record_json(const CodeSnippet& snippet);

std::vector<CodeSnippet> read_corpus_jsonl(const std::string& path);
void write_corpus_jsonl(const std::string& path, const std::vector<CodeSnippet>& snippets);

std::unordered_map<std::string, CodeSnippet> corpus_by_id(
    const std::vector<CodeSnippet>& snippets);

struct QuestionPair {
    std::string question_id;
    std::string snippet_id;
};

std::vector<QuestionPair> read_groundtruth_jsonl(const std::string& path);
void write_groundtruth_jsonl(const std::string& path,
                             const std::vector<QuestionPair>& pairs);

} // namespace senatus
