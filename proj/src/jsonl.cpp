#include "senatus/jsonl.hpp"

#include <fstream>

#include <json.hpp>

#include "senatus/errors.hpp"

namespace senatus {

using nlohmann::json;

struct JsonlCorpusReader::Impl {
    std::string path;
    std::ifstream stream;
    std::size_t line_no = 0;
};

JsonlCorpusReader::JsonlCorpusReader(std::string path) : impl_(new Impl) {
    impl_->path = std::move(path);
    reset();
}

JsonlCorpusReader::~JsonlCorpusReader() = default;

void JsonlCorpusReader::reset() {
    impl_->stream = std::ifstream(impl_->path);
    impl_->line_no = 0;
    if (!impl_->stream) throw IoError("cannot open corpus file: " + impl_->path);
}

bool JsonlCorpusReader::next(CodeSnippet& out) {
    std::string line;
    while (std::getline(impl_->stream, line)) {
        ++impl_->line_no;
        if (line.empty()) continue;
        out = parse_corpus_record(line, impl_->line_no);
        return true;
    }
    return false;
}

CodeSnippet parse_corpus_record(const std::string& json_line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::exception& e) {
        throw IoError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("language") ||
        !j.contains("code") || !j["id"].is_string() || !j["language"].is_string() ||
        !j["code"].is_string()) {
        throw IoError("corpus line " + std::to_string(line_no) +
                      ": expected {id, language, code}");
    }
    CodeSnippet s;
    s.id = j["id"].get<std::string>();
    s.language = j["language"].get<std::string>();
    s.text = j["code"].get<std::string>();
    if (s.id.empty() || s.text.empty()) {
        throw IoError("corpus line " + std::to_string(line_no) + ": empty id or code");
    }
    if (j.contains("path") && j["path"].is_string()) {
        SnippetOrigin origin;
        origin.path = j["path"].get<std::string>();
        if (j.contains("line_begin") && j["line_begin"].is_number_unsigned()) {
            origin.line_begin = j["line_begin"].get<std::uint32_t>();
        }
        if (j.contains("line_end") && j["line_end"].is_number_unsigned()) {
            origin.line_end = j["line_end"].get<std::uint32_t>();
        }
        s.origin = std::move(origin);
    }
    return s;
}

std::string corpus_record_json(const CodeSnippet& snippet) {
    json j;
    j["id"] = snippet.id;
    j["language"] = snippet.language;
    j["code"] = snippet.text;
    if (snippet.origin) {
        j["path"] = snippet.origin->path;
        if (snippet.origin->line_begin != 0) j["line_begin"] = snippet.origin->line_begin;
        if (snippet.origin->line_end != 0) j["line_end"] = snippet.origin->line_end;
    }
    return j.dump();
}

std::vector<CodeSnippet> read_corpus_jsonl(const std::string& path) {
    JsonlCorpusReader reader(path);
    std::vector<CodeSnippet> out;
    CodeSnippet s;
    while (reader.next(s)) out.push_back(s);
    return out;
}

void write_corpus_jsonl(const std::string& path, const std::vector<CodeSnippet>& snippets) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write corpus file: " + path);
    for (const auto& s : snippets) f << corpus_record_json(s) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

std::unordered_map<std::string, CodeSnippet> corpus_by_id(
    const std::vector<CodeSnippet>& snippets) {
    std::unordered_map<std::string, CodeSnippet> out;
    out.reserve(snippets.size());
    for (const auto& s : snippets) out.emplace(s.id, s);
    return out;
}

std::vector<QuestionPair> read_groundtruth_jsonl(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open groundtruth file: " + path);
    std::vector<QuestionPair> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("groundtruth line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("question_id") || !j.contains("snippet_id") ||
            !j["question_id"].is_string() || !j["snippet_id"].is_string()) {
            throw IoError("groundtruth line " + std::to_string(line_no) +
                          ": expected {question_id, snippet_id}");
        }
        out.push_back({j["question_id"].get<std::string>(),
                       j["snippet_id"].get<std::string>()});
    }
    return out;
}

void write_groundtruth_jsonl(const std::string& path,
                             const std::vector<QuestionPair>& pairs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write groundtruth file: " + path);
    for (const auto& p : pairs) {
        json j;
        j["question_id"] = p.question_id;
        j["snippet_id"] = p.snippet_id;
        f << j.dump() << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace senatus
