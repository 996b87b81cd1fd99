#include "senatus/lexer.hpp"

#include <array>
#include <cctype>

namespace senatus::frontend {

namespace {

// Multi-character operators, longest first within each leading character.
const char* kMultiCharSymbols[] = {
    ">>>=", ">>>", ">>=", ">>", ">=", "<<=", "<<", "<=", "->", "::", "==", "!=",
    "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "...",
};

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_char(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Escapes raw control characters so token texts (and therefore feature
// strings) never contain tabs or newlines. Escape sequences written in the
// source are kept verbatim.
void append_escaped(std::string& out, char c) {
    switch (c) {
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\n': out += "\\n"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                static const char* hex = "0123456789abcdef";
                out += "\\x";
                out.push_back(hex[(c >> 4) & 0xf]);
                out.push_back(hex[c & 0xf]);
            } else {
                out.push_back(c);
            }
    }
}

class Cursor {
public:
    explicit Cursor(std::string_view src) : src_(src) {}

    bool done() const { return pos_ >= src_.size(); }
    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    bool starts_with(std::string_view s) const {
        return src_.compare(pos_, s.size(), s) == 0;
    }

    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }
    std::size_t pos() const { return pos_; }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view source,
                            const std::unordered_set<std::string>& keywords) {
    std::vector<Token> tokens;
    Cursor cur(source);

    while (!cur.done()) {
        char c = cur.peek();

        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.advance();
            continue;
        }

        // Comments.
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        if (c == '/' && cur.peek(1) == '*') {
            std::size_t line = cur.line(), col = cur.column();
            cur.advance();
            cur.advance();
            bool closed = false;
            while (!cur.done()) {
                if (cur.peek() == '*' && cur.peek(1) == '/') {
                    cur.advance();
                    cur.advance();
                    closed = true;
                    break;
                }
                cur.advance();
            }
            if (!closed) throw ParseError("unterminated block comment", line, col);
            continue;
        }

        Token tok;
        tok.line = cur.line();
        tok.column = cur.column();
        tok.offset = cur.pos();

        if (is_ident_start(c)) {
            std::string text;
            while (!cur.done() && is_ident_char(cur.peek())) text.push_back(cur.advance());
            tok.kind = keywords.count(text) ? TokenKind::kKeyword : TokenKind::kIdentifier;
            tok.text = std::move(text);
            tok.end_offset = cur.pos();
            tokens.push_back(std::move(tok));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(cur.peek(1))))) {
            std::string text;
            bool is_hex = false;
            if (c == '0' && (cur.peek(1) == 'x' || cur.peek(1) == 'X')) {
                text.push_back(cur.advance());
                text.push_back(cur.advance());
                is_hex = true;
            }
            while (!cur.done()) {
                char d = cur.peek();
                bool take = std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == '_';
                if (is_hex) take = take || std::isxdigit(static_cast<unsigned char>(d));
                // exponent and type suffixes
                if (!take && (d == 'e' || d == 'E') && !is_hex) {
                    take = true;
                } else if (!take && (d == '+' || d == '-') && !text.empty() &&
                           (text.back() == 'e' || text.back() == 'E')) {
                    take = true;
                } else if (!take && (d == 'l' || d == 'L' || d == 'f' || d == 'F' || d == 'd' ||
                                     d == 'D')) {
                    take = true;
                }
                if (!take) break;
                text.push_back(cur.advance());
            }
            tok.kind = TokenKind::kNumber;
            tok.text = std::move(text);
            tok.end_offset = cur.pos();
            tokens.push_back(std::move(tok));
            continue;
        }

        if (c == '"' || c == '\'') {
            char quote = c;
            std::size_t line = cur.line(), col = cur.column();
            std::string text;
            text.push_back(cur.advance());
            bool closed = false;
            while (!cur.done()) {
                char d = cur.advance();
                if (d == '\\') {
                    append_escaped(text, d);
                    if (cur.done()) break;
                    append_escaped(text, cur.advance());
                    continue;
                }
                if (d == '\n') throw ParseError("unterminated literal", line, col);
                append_escaped(text, d);
                if (d == quote) {
                    closed = true;
                    break;
                }
            }
            if (!closed) throw ParseError("unterminated literal", line, col);
            tok.kind = TokenKind::kString;
            tok.text = std::move(text);
            tok.end_offset = cur.pos();
            tokens.push_back(std::move(tok));
            continue;
        }

        // Operators / punctuation, longest match first.
        bool matched = false;
        for (const char* sym : kMultiCharSymbols) {
            if (cur.starts_with(sym)) {
                std::string text;
                for (std::size_t i = 0; sym[i]; ++i) text.push_back(cur.advance());
                tok.kind = TokenKind::kSymbol;
                tok.text = std::move(text);
                tok.end_offset = cur.pos();
                tokens.push_back(std::move(tok));
                matched = true;
                break;
            }
        }
        if (matched) continue;

        static const std::string kSingles = "(){}[]<>;,.?:=+-*/%!~&|^@";
        if (kSingles.find(c) != std::string::npos) {
            tok.kind = TokenKind::kSymbol;
            tok.text = std::string(1, cur.advance());
            tok.end_offset = cur.pos();
            tokens.push_back(std::move(tok));
            continue;
        }

        throw ParseError(std::string("unexpected character '") + c + "'", cur.line(),
                         cur.column());
    }

    Token eof;
    eof.kind = TokenKind::kEndOfInput;
    eof.line = cur.line();
    eof.column = cur.column();
    eof.offset = cur.pos();
    eof.end_offset = cur.pos();
    tokens.push_back(std::move(eof));
    return tokens;
}

} // namespace senatus::frontend
