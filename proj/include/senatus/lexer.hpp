// lexer.hpp - C-family tokenizer shared by the grammar frontends
//
// Comments and docstrings are stripped here, before any tree is built, so two
// snippets differing only in comments or whitespace tokenize identically.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "senatus/errors.hpp"

namespace senatus::frontend {

enum class TokenKind {
    kIdentifier,
    kKeyword,
    kNumber,
    kString,  // string or char literal, quotes kept, control chars escaped
    kSymbol,  // operators and punctuation
    kEndOfInput,
};

struct Token {
    TokenKind kind = TokenKind::kEndOfInput;
    std::string text;
    std::size_t line = 1;    // 1-based
    std::size_t column = 1;  // 1-based
    std::size_t offset = 0;  // byte range in the source
    std::size_t end_offset = 0;

    bool is(TokenKind k) const { return kind == k; }
    bool is_symbol(std::string_view s) const {
        return kind == TokenKind::kSymbol && text == s;
    }
    bool is_keyword(std::string_view s) const {
        return kind == TokenKind::kKeyword && text == s;
    }
};

// Tokenizes source text. Keywords are supplied by the dialect; everything the
// keyword set does not claim lexes as an identifier.
std::vector<Token> tokenize(std::string_view source,
                            const std::unordered_set<std::string>& keywords);

} // namespace senatus::frontend
