#include "senatus/ingest.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <fstream>
#include <unordered_set>

#include "senatus/errors.hpp"
#include "senatus/features.hpp"
#include "senatus/jsonl.hpp"
#include "senatus/lexer.hpp"
#include "senatus/logging.hpp"
#include "senatus/parser.hpp"

namespace senatus::ingest {

namespace fs = std::filesystem;
using frontend::Token;
using frontend::TokenKind;

namespace {

const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert",     "boolean",  "break",      "byte",     "case",
        "catch",    "char",       "class",    "const",      "continue", "default",
        "do",       "double",     "else",     "enum",       "extends",  "final",
        "finally",  "float",      "for",      "goto",       "if",       "implements",
        "import",   "instanceof", "int",      "interface",  "long",     "native",
        "new",      "package",    "private",  "protected",  "public",   "return",
        "short",    "static",     "strictfp", "super",      "switch",   "synchronized",
        "this",     "throw",      "throws",   "transient",  "try",      "void",
        "volatile", "while",      "true",     "false",      "null",
    };
    return kw;
}

const std::unordered_set<std::string>& java_modifiers() {
    static const std::unordered_set<std::string> mods = {
        "public", "private",  "protected", "static",       "final",   "abstract",
        "native", "strictfp", "default",   "synchronized", "transient", "volatile",
    };
    return mods;
}

const std::unordered_set<std::string>& java_primitives() {
    static const std::unordered_set<std::string> prim = {
        "boolean", "byte", "char", "double", "float", "int", "long", "short", "void",
    };
    return prim;
}

constexpr std::size_t kNoMatch = static_cast<std::size_t>(-1);

bool is_ident(const Token& t) { return t.kind == TokenKind::kIdentifier; }
bool is_sym(const Token& t, const char* s) { return t.is_symbol(s); }

std::size_t skip_annotation(const std::vector<Token>& toks, std::size_t p) {
    if (!is_sym(toks[p], "@")) return kNoMatch;
    ++p;
    if (p >= toks.size() || !is_ident(toks[p])) return kNoMatch;
    ++p;
    while (p + 1 < toks.size() && is_sym(toks[p], ".") && is_ident(toks[p + 1])) p += 2;
    if (p < toks.size() && is_sym(toks[p], "(")) {
        int depth = 0;
        while (p < toks.size() && toks[p].kind != TokenKind::kEndOfInput) {
            if (is_sym(toks[p], "(")) ++depth;
            if (is_sym(toks[p], ")") && --depth == 0) return p + 1;
            ++p;
        }
        return kNoMatch;
    }
    return p;
}

std::size_t skip_type_args(const std::vector<Token>& toks, std::size_t p) {
    if (!is_sym(toks[p], "<")) return kNoMatch;
    int depth = 0;
    while (p < toks.size() && toks[p].kind != TokenKind::kEndOfInput) {
        const Token& t = toks[p];
        if (is_sym(t, "<")) ++depth;
        else if (is_sym(t, ">") || is_sym(t, ">>") || is_sym(t, ">>>")) {
            depth -= static_cast<int>(t.text.size());
            if (depth <= 0) return p + 1;
        } else if (!(is_ident(t) || java_primitives().count(t.text) || is_sym(t, ",") ||
                   is_sym(t, ".") || is_sym(t, "?") || is_sym(t, "[") || is_sym(t, "]") ||
                   is_sym(t, "&") || t.is_keyword("extends") || t.is_keyword("super") ||
                   is_sym(t, "@"))) {
            return kNoMatch;
        }
        ++p;
    }
    return kNoMatch;
}

std::size_t skip_type_shape(const std::vector<Token>& toks, std::size_t p) {
    if (p >= toks.size()) return kNoMatch;
    if (toks[p].kind == TokenKind::kKeyword && java_primitives().count(toks[p].text)) {
        ++p;
    } else if (is_ident(toks[p])) {
        ++p;
        std::size_t q = skip_type_args(toks, p);
        if (q != kNoMatch) p = q;
        while (p + 1 < toks.size() && is_sym(toks[p], ".") && is_ident(toks[p + 1])) {
            p += 2;
            q = skip_type_args(toks, p);
            if (q != kNoMatch) p = q;
        }
    } else {
        return kNoMatch;
    }
    while (p + 1 < toks.size() && is_sym(toks[p], "[") && is_sym(toks[p + 1], "]")) p += 2;
    return p;
}

std::size_t skip_balanced(const std::vector<Token>& toks, std::size_t p, const char* open,
                          const char* close) {
    if (!is_sym(toks[p], open)) return kNoMatch;
    int depth = 0;
    while (p < toks.size() && toks[p].kind != TokenKind::kEndOfInput) {
        if (is_sym(toks[p], open)) ++depth;
        if (is_sym(toks[p], close) && --depth == 0) return p + 1;
        ++p;
    }
    return kNoMatch;
}

struct HeadMatch {
    std::size_t start;        // first token of the declaration
    std::size_t body_open;    // '{'
    std::string name;
};

// Matches (annotations|modifiers)* typeparams? (Type)? Name ( params )
// (throws ...)? '{'. Returns nullopt when the window is not a method head.
std::optional<HeadMatch> match_method_head(const std::vector<Token>& toks, std::size_t i) {
    std::size_t p = i;
    while (p < toks.size()) {
        if (toks[p].kind == TokenKind::kKeyword && java_modifiers().count(toks[p].text)) {
            ++p;
            continue;
        }
        std::size_t q = skip_annotation(toks, p);
        if (q != kNoMatch) { p = q; continue; }
        break;
    }
    if (p < toks.size() && is_sym(toks[p], "<")) {
        std::size_t q = skip_type_args(toks, p);
        if (q == kNoMatch) return std::nullopt;
        p = q;
    }

    auto finish = [&](std::size_t name_pos, std::size_t after_params) -> std::optional<HeadMatch> {
        std::size_t q = after_params;
        if (q < toks.size() && toks[q].is_keyword("throws")) {
            ++q;
            while (true) {
                std::size_t t = skip_type_shape(toks, q);
                if (t == kNoMatch) return std::nullopt;
                q = t;
                if (q < toks.size() && is_sym(toks[q], ",")) { ++q; continue; }
                break;
            }
        }
        if (q >= toks.size() || !is_sym(toks[q], "{")) return std::nullopt;
        return HeadMatch{i, q, toks[name_pos].text};
    };

    // Constructor: Name ( ... ) then { or throws.
    if (p + 1 < toks.size() && is_ident(toks[p]) && is_sym(toks[p + 1], "(")) {
        std::size_t after = skip_balanced(toks, p + 1, "(", ")");
        if (after != kNoMatch) {
            if (auto m = finish(p, after)) return m;
        }
    }
    std::size_t after_type = skip_type_shape(toks, p);
    if (after_type == kNoMatch || after_type >= toks.size()) return std::nullopt;
    if (!is_ident(toks[after_type])) return std::nullopt;
    if (after_type + 1 >= toks.size() || !is_sym(toks[after_type + 1], "(")) {
        return std::nullopt;
    }
    std::size_t after = skip_balanced(toks, after_type + 1, "(", ")");
    if (after == kNoMatch) return std::nullopt;
    return finish(after_type, after);
}

} // namespace

std::vector<ExtractedMethod> extract_java_methods(std::string_view source) {
    std::vector<Token> toks = frontend::tokenize(source, java_keywords());
    std::vector<ExtractedMethod> out;
    std::size_t i = 0;
    while (i < toks.size() && toks[i].kind != TokenKind::kEndOfInput) {
        auto head = match_method_head(toks, i);
        if (!head) {
            ++i;
            continue;
        }
        std::size_t end = skip_balanced(toks, head->body_open, "{", "}");
        if (end == kNoMatch) {
            ++i;
            continue;
        }
        ExtractedMethod m;
        m.name = head->name;
        m.line_begin = static_cast<std::uint32_t>(toks[head->start].line);
        m.line_end = static_cast<std::uint32_t>(toks[end - 1].line);
        m.text = std::string(
            source.substr(toks[head->start].offset,
                          toks[end - 1].end_offset - toks[head->start].offset));
        out.push_back(std::move(m));
        i = end;  // nested declarations stay inside the enclosing method
    }
    return out;
}

namespace {

bool parses(const CodeSnippet& snippet) {
    try {
        return !frontend::extract_features(frontend::parse(snippet)).empty();
    } catch (const ParseError&) {
        return false;
    } catch (const UnsupportedLanguage&) {
        return false;
    }
}

} // namespace

std::vector<CodeSnippet> ingest_directory(const std::string& directory,
                                          IngestReport* report) {
    fs::path root(directory);
    if (!fs::exists(root) || !fs::is_directory(root)) {
        throw IoError("not a readable directory: " + directory);
    }
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext == ".java" || ext == ".mini") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<CodeSnippet> out;
    for (const auto& file : files) {
        ++rep.files_scanned;
        std::ifstream f(file, std::ios::binary);
        if (!f) {
            ++rep.parse_failures;
            log_warn("cannot read " + file.string());
            continue;
        }
        std::string text((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
        std::string rel = fs::relative(file, root).generic_string();

        if (file.extension() == ".mini") {
            CodeSnippet s;
            s.id = rel;
            s.language = "mini";
            s.text = text;
            s.origin = SnippetOrigin{rel, 1, 0};
            if (parses(s)) {
                ++rep.methods_found;
                out.push_back(std::move(s));
            } else {
                ++rep.parse_failures;
                log_warn("skipping " + rel + ": does not parse");
            }
            continue;
        }

        std::vector<ExtractedMethod> methods;
        try {
            methods = extract_java_methods(text);
        } catch (const ParseError& e) {
            ++rep.parse_failures;
            log_warn("skipping " + rel + ": " + e.what());
            continue;
        }
        for (auto& m : methods) {
            CodeSnippet s;
            s.id = rel + ":" + std::to_string(m.line_begin) + ":" + m.name;
            s.language = "java";
            s.text = std::move(m.text);
            s.origin = SnippetOrigin{rel, m.line_begin, m.line_end};
            if (parses(s)) {
                ++rep.methods_found;
                out.push_back(std::move(s));
            } else {
                ++rep.parse_failures;
                log_warn("skipping " + s.id + ": does not parse");
            }
        }
    }
    return out;
}

std::vector<CodeSnippet> ingest_jsonl(const std::string& path, IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};
    std::vector<CodeSnippet> out;
    for (auto& s : read_corpus_jsonl(path)) {
        ++rep.files_scanned;
        if (parses(s)) {
            ++rep.methods_found;
            out.push_back(std::move(s));
        } else {
            ++rep.parse_failures;
            log_warn("skipping " + s.id + ": does not parse");
        }
    }
    return out;
}

} // namespace senatus::ingest
