// snippet.hpp - corpus record: one method/function body with identity
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace senatus {

struct SnippetOrigin {
    std::string path;
    std::uint32_t line_begin = 0;
    std::uint32_t line_end = 0;
};

struct CodeSnippet {
    std::string id;        // unique within a corpus
    std::string language;  // grammar tag, e.g. "java", "mini"
    std::string text;      // raw source of one method or statement sequence
    std::optional<SnippetOrigin> origin;
};

} // namespace senatus
