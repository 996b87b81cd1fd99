// parser.hpp - grammar frontends producing simplified parse trees
#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "senatus/snippet.hpp"
#include "senatus/spt.hpp"

namespace senatus::frontend {

// Parses a snippet with the grammar registered for its language tag.
// Local variables (declared in the body or parameter list) are rewritten to
// #VAR; fields, type names, member and method names are preserved.
// Throws ParseError on invalid input, UnsupportedLanguage on unknown tags.
SimplifiedParseTree parse(const CodeSnippet& snippet);

SimplifiedParseTree parse_source(std::string_view source, const std::string& language);

using FrontendFn = std::function<SimplifiedParseTree(std::string_view)>;

// Frontends are pluggable; "java" and "mini" are built in.
void register_frontend(const std::string& language, FrontendFn fn);
bool language_supported(const std::string& language);
std::vector<std::string> supported_languages();

} // namespace senatus::frontend
