// ingest.hpp - directory walker emitting one corpus record per parsed method
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "senatus/snippet.hpp"

namespace senatus::ingest {

struct IngestReport {
    std::uint64_t files_scanned = 0;
    std::uint64_t methods_found = 0;
    std::uint64_t parse_failures = 0;  // per-method or per-file warnings
};

struct ExtractedMethod {
    std::string name;
    std::string text;  // raw source, signature through closing brace
    std::uint32_t line_begin = 0;
    std::uint32_t line_end = 0;
};

// Token-level scan for method and constructor bodies. Nested methods (e.g. in
// anonymous classes) stay part of their enclosing method.
std::vector<ExtractedMethod> extract_java_methods(std::string_view source);

// Walks a source tree: .java files yield one record per parsed method, .mini
// files one record each. Every emitted record is parse-checked; failures are
// warned and skipped.
std::vector<CodeSnippet> ingest_directory(const std::string& directory,
                                          IngestReport* report = nullptr);

// Re-validates an existing corpus file, dropping records that do not parse.
std::vector<CodeSnippet> ingest_jsonl(const std::string& path,
                                      IngestReport* report = nullptr);

} // namespace senatus::ingest
