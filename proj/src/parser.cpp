#include "senatus/parser.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <unordered_set>

#include "senatus/errors.hpp"
#include "senatus/lexer.hpp"

namespace senatus::frontend {

namespace {

struct Dialect {
    std::unordered_set<std::string> keywords;
    std::unordered_set<std::string> modifiers;
    std::unordered_set<std::string> primitives;
    bool generics = false;
    bool annotations = false;
    bool enhanced_for = false;
    bool lambdas = false;
};

const Dialect& java_dialect() {
    static const Dialect d = [] {
        Dialect j;
        j.keywords = {
            "abstract", "assert",     "boolean",  "break",      "byte",   "case",
            "catch",    "char",       "class",    "const",      "continue", "default",
            "do",       "double",     "else",     "enum",       "extends", "final",
            "finally",  "float",      "for",      "goto",       "if",      "implements",
            "import",   "instanceof", "int",      "interface",  "long",    "native",
            "new",      "package",    "private",  "protected",  "public",  "return",
            "short",    "static",     "strictfp", "super",      "switch",  "synchronized",
            "this",     "throw",      "throws",   "transient",  "try",     "void",
            "volatile", "while",      "true",     "false",      "null",
        };
        j.modifiers = {"public", "private", "protected", "static",   "final",
                       "abstract", "native", "strictfp",  "synchronized", "default",
                       "transient", "volatile"};
        j.primitives = {"boolean", "byte", "char", "double", "float",
                        "int",     "long", "short", "void"};
        j.generics = true;
        j.annotations = true;
        j.enhanced_for = true;
        j.lambdas = true;
        return j;
    }();
    return d;
}

const Dialect& mini_dialect() {
    static const Dialect d = [] {
        Dialect m;
        m.keywords = {"bool",  "break", "char",  "const",    "continue", "do",
                      "else",  "float", "for",   "if",       "int",      "long",
                      "return", "void", "while", "true",     "false",    "null"};
        m.modifiers = {"const"};
        m.primitives = {"bool", "char", "float", "int", "long", "void"};
        return m;
    }();
    return d;
}

// Leaf roles drive #VAR abstraction after the tree is built.
enum class Role {
    kKeywordSym,  // keyword or operator symbol
    kLiteral,
    kExprIdent,   // identifier in expression position
    kTypeName,
    kMemberName,  // after '.', or '::' target
    kMethodName,  // declared method name in a signature
    kDeclName,    // declared variable/parameter name: always local
    kLabelName,   // statement label, break/continue target
};

constexpr std::size_t kNoMatch = static_cast<std::size_t>(-1);

class StructuralParser {
public:
    StructuralParser(std::string_view source, const Dialect& dialect)
        : dialect_(dialect), tokens_(tokenize(source, dialect.keywords)) {}

    SimplifiedParseTree run() {
        std::vector<int> top;
        skip_annotations();
        while (!at_end()) {
            if (looks_like_method_decl()) {
                top.push_back(parse_method());
            } else {
                top.push_back(parse_statement());
            }
            skip_annotations();
        }
        if (top.empty()) throw ParseError("empty input", 1, 1);

        if (top.size() == 1) {
            tree_.root = top[0];
        } else {
            tree_.root = make_internal(top);
        }
        abstract_locals();
        return std::move(tree_);
    }

private:
    // ---- token stream -----------------------------------------------------

    const Token& peek(std::size_t off = 0) const {
        std::size_t i = pos_ + off;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().is(TokenKind::kEndOfInput); }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw ParseError(msg + (t.text.empty() ? "" : " near '" + t.text + "'"), t.line,
                         t.column);
    }

    const Token& expect_symbol(std::string_view s) {
        if (!peek().is_symbol(s)) fail("expected '" + std::string(s) + "'");
        return advance();
    }

    // ---- tree building ----------------------------------------------------

    int make_leaf(const Token& t, Role role) {
        SptNode n;
        n.is_leaf = true;
        n.text = t.text;
        n.is_keyword = (role == Role::kKeywordSym);
        n.in_signature = in_signature_;
        tree_.nodes.push_back(std::move(n));
        roles_.push_back(role);
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    int leaf_here(Role role) { return make_leaf(advance(), role); }

    int make_internal(const std::vector<int>& children, NodeTag tag = NodeTag::kPlain) {
        SptNode n;
        n.is_leaf = false;
        n.tag = tag;
        // Skeleton label: keyword text per keyword child, '#' otherwise.
        // Placeholder runs longer than three collapse to "###+" so list arity
        // (block statement counts) does not mint a fresh label per length.
        std::string label;
        int run = 0;
        auto flush_run = [&] {
            if (run > 3) {
                label += "###+";
            } else {
                label.append(static_cast<std::size_t>(run), '#');
            }
            run = 0;
        };
        for (int c : children) {
            const SptNode& ch = tree_.nodes[c];
            if (ch.is_leaf && ch.is_keyword) {
                flush_run();
                label += ch.text;
            } else {
                ++run;
            }
        }
        flush_run();
        n.text = std::move(label);
        n.children = children;
        tree_.nodes.push_back(std::move(n));
        roles_.push_back(Role::kKeywordSym);  // placeholder; internal nodes have no role
        int idx = static_cast<int>(tree_.nodes.size()) - 1;
        for (std::size_t i = 0; i < children.size(); ++i) {
            tree_.nodes[children[i]].parent = idx;
            tree_.nodes[children[i]].child_pos = static_cast<int>(i) + 1;
        }
        return idx;
    }

    // ---- lookahead scanners (no tree mutation) -----------------------------

    bool is_modifier(const Token& t) const {
        return t.kind == TokenKind::kKeyword && dialect_.modifiers.count(t.text);
    }
    bool is_primitive(const Token& t) const {
        return t.kind == TokenKind::kKeyword && dialect_.primitives.count(t.text);
    }

    // Skips a balanced <...> region containing only type-ish tokens.
    // Returns position after '>' or kNoMatch.
    std::size_t scan_type_args(std::size_t p) const {
        if (!tokens_[p].is_symbol("<")) return kNoMatch;
        int depth = 0;
        while (p < tokens_.size()) {
            const Token& t = tokens_[p];
            if (t.is_symbol("<")) {
                ++depth;
            } else if (t.is_symbol(">") || t.is_symbol(">>") || t.is_symbol(">>>")) {
                // A multi-'>' token may close this level plus enclosing ones;
                // the parser splits it during consumption.
                depth -= static_cast<int>(t.text.size());
                if (depth <= 0) return p + 1;
            } else if (t.kind == TokenKind::kIdentifier || is_primitive(t) ||
                       t.is_symbol(",") || t.is_symbol(".") || t.is_symbol("?") ||
                       t.is_symbol("[") || t.is_symbol("]") || t.is_symbol("&") ||
                       t.is_keyword("extends") || t.is_keyword("super") ||
                       t.is_symbol("@")) {
                // type-ish; keep scanning
            } else {
                return kNoMatch;
            }
            ++p;
        }
        return kNoMatch;
    }

    // Scans a type shape starting at p; returns the position just after it,
    // or kNoMatch. Does not consume array brackets on the declarator side.
    std::size_t scan_type_shape(std::size_t p) const {
        if (p >= tokens_.size()) return kNoMatch;
        if (is_primitive(tokens_[p])) {
            ++p;
        } else if (tokens_[p].kind == TokenKind::kIdentifier) {
            ++p;
            if (dialect_.generics) {
                std::size_t q = scan_type_args(p);
                if (q != kNoMatch) p = q;
            }
            while (p + 1 < tokens_.size() && tokens_[p].is_symbol(".") &&
                   tokens_[p + 1].kind == TokenKind::kIdentifier) {
                p += 2;
                if (dialect_.generics) {
                    std::size_t q = scan_type_args(p);
                    if (q != kNoMatch) p = q;
                }
            }
        } else {
            return kNoMatch;
        }
        while (p + 1 < tokens_.size() && tokens_[p].is_symbol("[") &&
               tokens_[p + 1].is_symbol("]")) {
            p += 2;
        }
        return p;
    }

    std::size_t scan_annotation(std::size_t p) const {
        if (!dialect_.annotations || !tokens_[p].is_symbol("@")) return kNoMatch;
        ++p;
        if (p >= tokens_.size() || tokens_[p].kind != TokenKind::kIdentifier) return kNoMatch;
        ++p;
        while (p + 1 < tokens_.size() && tokens_[p].is_symbol(".") &&
               tokens_[p + 1].kind == TokenKind::kIdentifier) {
            p += 2;
        }
        if (p < tokens_.size() && tokens_[p].is_symbol("(")) {
            int depth = 0;
            while (p < tokens_.size() && !tokens_[p].is(TokenKind::kEndOfInput)) {
                if (tokens_[p].is_symbol("(")) ++depth;
                if (tokens_[p].is_symbol(")")) {
                    if (--depth == 0) return p + 1;
                }
                ++p;
            }
            return kNoMatch;
        }
        return p;
    }

    void skip_annotations() {
        while (true) {
            std::size_t q = scan_annotation(pos_);
            if (q == kNoMatch) return;
            pos_ = q;
        }
    }

    // Method (or constructor) declaration lookahead.
    bool looks_like_method_decl() const {
        std::size_t p = pos_;
        while (p < tokens_.size()) {
            if (is_modifier(tokens_[p])) {
                ++p;
                continue;
            }
            std::size_t q = scan_annotation(p);
            if (q != kNoMatch) {
                p = q;
                continue;
            }
            break;
        }
        if (p < tokens_.size() && tokens_[p].is_symbol("<")) {
            std::size_t q = scan_type_args(p);
            if (q == kNoMatch) return false;
            p = q;
        }
        // Constructor: Name ( ... ) { | throws
        if (p + 1 < tokens_.size() && tokens_[p].kind == TokenKind::kIdentifier &&
            tokens_[p + 1].is_symbol("(")) {
            std::size_t q = scan_balanced_parens(p + 1);
            if (q != kNoMatch && q < tokens_.size() &&
                (tokens_[q].is_symbol("{") || tokens_[q].is_keyword("throws"))) {
                return true;
            }
        }
        std::size_t q = scan_type_shape(p);
        if (q == kNoMatch || q >= tokens_.size()) return false;
        return tokens_[q].kind == TokenKind::kIdentifier && q + 1 < tokens_.size() &&
               tokens_[q + 1].is_symbol("(");
    }

    std::size_t scan_balanced_parens(std::size_t p) const {
        if (!tokens_[p].is_symbol("(")) return kNoMatch;
        int depth = 0;
        while (p < tokens_.size() && !tokens_[p].is(TokenKind::kEndOfInput)) {
            if (tokens_[p].is_symbol("(")) ++depth;
            if (tokens_[p].is_symbol(")") && --depth == 0) return p + 1;
            ++p;
        }
        return kNoMatch;
    }

    // Local declaration lookahead: [final] Type Identifier (= , ; [) ...
    bool looks_like_local_decl() const {
        std::size_t p = pos_;
        while (p < tokens_.size()) {
            if (tokens_[p].is_keyword("final") || tokens_[p].is_keyword("const")) {
                ++p;
                continue;
            }
            std::size_t q = scan_annotation(p);
            if (q != kNoMatch) {
                p = q;
                continue;
            }
            break;
        }
        std::size_t q = scan_type_shape(p);
        if (q == kNoMatch || q >= tokens_.size()) return false;
        if (tokens_[q].kind != TokenKind::kIdentifier) return false;
        if (q + 1 >= tokens_.size()) return false;
        const Token& next = tokens_[q + 1];
        return next.is_symbol("=") || next.is_symbol(";") || next.is_symbol(",") ||
               next.is_symbol("[") || next.is_symbol(":");
    }

    // ---- declarations -----------------------------------------------------

    int parse_method() {
        bool outer_sig = in_signature_;
        in_signature_ = true;
        std::vector<int> children;

        skip_annotations();
        while (is_modifier(peek())) {
            children.push_back(leaf_here(Role::kKeywordSym));
            skip_annotations();
        }
        if (peek().is_symbol("<")) {
            std::size_t q = scan_type_args(pos_);
            if (q == kNoMatch) fail("malformed type parameters");
            pos_ = q;  // type parameters carry no structural features
        }

        // Distinguish constructor (no return type) from method.
        bool ctor = false;
        {
            std::size_t q = kNoMatch;
            if (peek().kind == TokenKind::kIdentifier && peek(1).is_symbol("(")) {
                q = scan_balanced_parens(pos_ + 1);
            }
            ctor = q != kNoMatch && q < tokens_.size() &&
                   (tokens_[q].is_symbol("{") || tokens_[q].is_keyword("throws"));
        }
        if (!ctor) children.push_back(parse_type());

        if (peek().kind != TokenKind::kIdentifier) fail("expected method name");
        children.push_back(leaf_here(Role::kMethodName));

        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        if (!peek().is_symbol(")")) {
            std::vector<int> params;
            params.push_back(parse_parameter());
            std::vector<int> list;
            list.push_back(params[0]);
            while (peek().is_symbol(",")) {
                list.push_back(make_leaf(advance(), Role::kKeywordSym));
                list.push_back(parse_parameter());
            }
            children.push_back(list.size() == 1 ? list[0] : make_internal(list));
        }
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));

        if (peek().is_keyword("throws")) {
            children.push_back(leaf_here(Role::kKeywordSym));
            children.push_back(parse_type());
            while (peek().is_symbol(",")) {
                children.push_back(make_leaf(advance(), Role::kKeywordSym));
                children.push_back(parse_type());
            }
        }

        in_signature_ = outer_sig;
        if (peek().is_symbol("{")) {
            children.push_back(parse_block());
        } else {
            children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        }
        return make_internal(children);
    }

    int parse_parameter() {
        std::vector<int> children;
        skip_annotations();
        while (peek().is_keyword("final") || peek().is_keyword("const")) {
            children.push_back(leaf_here(Role::kKeywordSym));
            skip_annotations();
        }
        children.push_back(parse_type());
        if (peek().is_symbol("...")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
        }
        if (peek().kind != TokenKind::kIdentifier) fail("expected parameter name");
        children.push_back(leaf_here(Role::kDeclName));
        while (peek().is_symbol("[") && peek(1).is_symbol("]")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
        }
        return make_internal(children);
    }

    // Type reference. Single identifiers and primitives stay bare leaves.
    int parse_type(bool allow_array_suffix = true) {
        std::vector<int> parts;
        if (is_primitive(peek())) {
            parts.push_back(leaf_here(Role::kKeywordSym));
        } else if (peek().kind == TokenKind::kIdentifier) {
            int base = leaf_here(Role::kTypeName);
            int args = parse_type_args_node();
            if (args >= 0) base = make_internal({base, args});
            parts.push_back(base);
            while (peek().is_symbol(".") && peek(1).kind == TokenKind::kIdentifier) {
                parts.push_back(make_leaf(advance(), Role::kKeywordSym));
                int seg = leaf_here(Role::kTypeName);
                int seg_args = parse_type_args_node();
                if (seg_args >= 0) seg = make_internal({seg, seg_args});
                parts.push_back(seg);
            }
        } else {
            fail("expected type");
        }
        int node = parts.size() == 1 ? parts[0] : make_internal(parts);
        while (allow_array_suffix && peek().is_symbol("[") && peek(1).is_symbol("]")) {
            int lb = make_leaf(advance(), Role::kKeywordSym);
            int rb = make_leaf(advance(), Role::kKeywordSym);
            node = make_internal({node, lb, rb});
        }
        return node;
    }

    // Returns -1 when the next tokens are not type arguments.
    int parse_type_args_node() {
        if (!dialect_.generics || !peek().is_symbol("<")) return -1;
        if (scan_type_args(pos_) == kNoMatch) return -1;
        std::vector<int> children;
        children.push_back(make_leaf(advance(), Role::kKeywordSym));  // '<'
        if (!peek().is_symbol(">")) {
            children.push_back(parse_type_arg());
            while (peek().is_symbol(",")) {
                children.push_back(make_leaf(advance(), Role::kKeywordSym));
                children.push_back(parse_type_arg());
            }
        }
        // The closer may be merged into '>>' by the lexer inside nested
        // generics; scan_type_args() pre-validated, so a plain '>' is
        // guaranteed at this level only when depth is 1. For nested closers
        // split the token.
        if (peek().is_symbol(">")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
        } else if (peek().is_symbol(">>") || peek().is_symbol(">>>")) {
            Token t = peek();
            Token closer = t;
            closer.text = ">";
            children.push_back(make_leaf(closer, Role::kKeywordSym));
            // shrink the original token
            tokens_[pos_].text = t.text.substr(1);
        } else {
            fail("expected '>'");
        }
        return make_internal(children);
    }

    int parse_type_arg() {
        std::vector<int> children;
        if (peek().is_symbol("?")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            if (peek().is_keyword("extends") || peek().is_keyword("super")) {
                children.push_back(make_leaf(advance(), Role::kKeywordSym));
                children.push_back(parse_type());
            }
            return children.size() == 1 ? children[0] : make_internal(children);
        }
        return parse_type();
    }

    // ---- statements ---------------------------------------------------------

    int parse_block() {
        std::vector<int> children;
        children.push_back(make_leaf(expect_symbol("{"), Role::kKeywordSym));
        while (!peek().is_symbol("}")) {
            if (at_end()) fail("unterminated block");
            children.push_back(parse_statement());
        }
        children.push_back(make_leaf(advance(), Role::kKeywordSym));
        return make_internal(children);
    }

    int parse_statement() {
        skip_annotations();
        const Token& t = peek();

        if (t.is_symbol("{")) return parse_block();
        if (t.is_symbol(";")) {
            return make_internal({make_leaf(advance(), Role::kKeywordSym)});
        }
        if (t.is_keyword("if")) return parse_if();
        if (t.is_keyword("while")) return parse_while();
        if (t.is_keyword("do")) return parse_do();
        if (t.is_keyword("for")) return parse_for();
        if (t.is_keyword("return")) return parse_return();
        if (t.is_keyword("throw")) return parse_throw();
        if (t.is_keyword("break") || t.is_keyword("continue")) return parse_jump();
        if (t.is_keyword("try")) return parse_try();
        if (t.is_keyword("switch")) {
            int sw = parse_switch();
            if (peek().is_symbol(";")) {
                // switch expression used as a statement
                int semi = make_leaf(advance(), Role::kKeywordSym);
                return make_internal({sw, semi});
            }
            return sw;
        }
        if (t.is_keyword("synchronized")) return parse_synchronized();
        if (t.is_keyword("assert")) return parse_assert();

        // Labeled statement.
        if (t.kind == TokenKind::kIdentifier && peek(1).is_symbol(":") &&
            !peek(1).is_symbol("::")) {
            int name = leaf_here(Role::kLabelName);
            int colon = make_leaf(advance(), Role::kKeywordSym);
            int stmt = parse_statement();
            return make_internal({name, colon, stmt});
        }

        if (looks_like_local_decl()) {
            int decl = parse_local_decl();
            int semi = make_leaf(expect_symbol(";"), Role::kKeywordSym);
            return make_internal({decl, semi});
        }

        int expr = parse_expression();
        if (peek().is_symbol(";")) {
            int semi = make_leaf(advance(), Role::kKeywordSym);
            return make_internal({expr, semi});
        }
        if (at_end() || peek().is_symbol("}")) {
            // Semi-complete snippet: trailing expression without ';'.
            return expr;
        }
        fail("expected ';'");
    }

    // Declaration without the trailing ';' (shared with for-init).
    int parse_local_decl() {
        std::vector<int> children;
        skip_annotations();
        while (peek().is_keyword("final") || peek().is_keyword("const")) {
            children.push_back(leaf_here(Role::kKeywordSym));
            skip_annotations();
        }
        children.push_back(parse_type());
        children.push_back(parse_declarator());
        while (peek().is_symbol(",")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            children.push_back(parse_declarator());
        }
        return make_internal(children);
    }

    int parse_declarator() {
        if (peek().kind != TokenKind::kIdentifier) fail("expected variable name");
        int name = leaf_here(Role::kDeclName);
        std::vector<int> children{name};
        while (peek().is_symbol("[") && peek(1).is_symbol("]")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
        }
        if (peek().is_symbol("=")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            children.push_back(parse_initializer());
        }
        return children.size() == 1 ? name : make_internal(children);
    }

    int parse_initializer() {
        if (peek().is_symbol("{")) return parse_array_init();
        return parse_expression();
    }

    int parse_array_init() {
        std::vector<int> children;
        children.push_back(make_leaf(expect_symbol("{"), Role::kKeywordSym));
        if (!peek().is_symbol("}")) {
            std::vector<int> items;
            items.push_back(parse_initializer());
            while (peek().is_symbol(",")) {
                if (peek(1).is_symbol("}")) {  // trailing comma
                    advance();
                    break;
                }
                items.push_back(make_leaf(advance(), Role::kKeywordSym));
                items.push_back(parse_initializer());
            }
            children.push_back(items.size() == 1 ? items[0] : make_internal(items));
        }
        children.push_back(make_leaf(expect_symbol("}"), Role::kKeywordSym));
        return make_internal(children);
    }

    int parse_if() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // if
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        children.push_back(parse_statement());
        if (peek().is_keyword("else")) {
            children.push_back(leaf_here(Role::kKeywordSym));
            children.push_back(parse_statement());
        }
        return make_internal(children);
    }

    int parse_while() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        children.push_back(parse_statement());
        return make_internal(children);
    }

    int parse_do() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // do
        children.push_back(parse_statement());
        if (!peek().is_keyword("while")) fail("expected 'while'");
        children.push_back(leaf_here(Role::kKeywordSym));
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        return make_internal(children);
    }

    // Scans inside for-parens for a ':' before any ';' at depth 1.
    bool enhanced_for_ahead() const {
        if (!dialect_.enhanced_for) return false;
        std::size_t p = pos_;
        if (!tokens_[p].is_symbol("(")) return false;
        int depth = 0;
        while (p < tokens_.size() && !tokens_[p].is(TokenKind::kEndOfInput)) {
            const Token& t = tokens_[p];
            if (t.is_symbol("(")) ++depth;
            if (t.is_symbol(")")) {
                if (--depth == 0) return false;
            }
            if (depth == 1) {
                if (t.is_symbol(";")) return false;
                if (t.is_symbol(":")) return true;
                if (t.is_symbol("?")) return false;  // ternary in condition
            }
            ++p;
        }
        return false;
    }

    int parse_for() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // for
        bool enhanced = enhanced_for_ahead();
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        if (enhanced) {
            std::vector<int> control;
            skip_annotations();
            while (peek().is_keyword("final")) {
                control.push_back(leaf_here(Role::kKeywordSym));
                skip_annotations();
            }
            control.push_back(parse_type());
            if (peek().kind != TokenKind::kIdentifier) fail("expected loop variable");
            control.push_back(leaf_here(Role::kDeclName));
            control.push_back(make_leaf(expect_symbol(":"), Role::kKeywordSym));
            control.push_back(parse_expression());
            children.push_back(make_internal(control));
        } else {
            if (!peek().is_symbol(";")) {
                if (looks_like_local_decl()) {
                    children.push_back(parse_local_decl());
                } else {
                    children.push_back(parse_expr_list());
                }
            }
            children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
            if (!peek().is_symbol(";")) children.push_back(parse_expression());
            children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
            if (!peek().is_symbol(")")) children.push_back(parse_expr_list());
        }
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        children.push_back(parse_statement());
        return make_internal(children);
    }

    int parse_expr_list() {
        std::vector<int> items;
        items.push_back(parse_expression());
        while (peek().is_symbol(",")) {
            items.push_back(make_leaf(advance(), Role::kKeywordSym));
            items.push_back(parse_expression());
        }
        return items.size() == 1 ? items[0] : make_internal(items);
    }

    int parse_return() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // return
        if (!peek().is_symbol(";")) children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        return make_internal(children);
    }

    int parse_throw() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        return make_internal(children);
    }

    int parse_jump() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // break / continue
        if (peek().kind == TokenKind::kIdentifier) {
            children.push_back(leaf_here(Role::kLabelName));
        }
        children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        return make_internal(children);
    }

    int parse_try() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // try
        if (peek().is_symbol("(")) {
            std::vector<int> res;
            res.push_back(make_leaf(advance(), Role::kKeywordSym));
            res.push_back(parse_local_decl());
            while (peek().is_symbol(";")) {
                res.push_back(make_leaf(advance(), Role::kKeywordSym));
                if (peek().is_symbol(")")) break;
                res.push_back(parse_local_decl());
            }
            res.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
            children.push_back(make_internal(res));
        }
        children.push_back(parse_block());
        while (peek().is_keyword("catch")) {
            std::vector<int> cc;
            cc.push_back(leaf_here(Role::kKeywordSym));
            cc.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
            std::vector<int> param;
            while (peek().is_keyword("final")) {
                param.push_back(leaf_here(Role::kKeywordSym));
            }
            param.push_back(parse_type());
            while (peek().is_symbol("|")) {
                param.push_back(make_leaf(advance(), Role::kKeywordSym));
                param.push_back(parse_type());
            }
            if (peek().kind != TokenKind::kIdentifier) fail("expected exception name");
            param.push_back(leaf_here(Role::kDeclName));
            cc.push_back(make_internal(param));
            cc.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
            cc.push_back(parse_block());
            children.push_back(make_internal(cc));
        }
        if (peek().is_keyword("finally")) {
            children.push_back(leaf_here(Role::kKeywordSym));
            children.push_back(parse_block());
        }
        return make_internal(children);
    }

    int parse_switch() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // switch
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));

        std::vector<int> body;
        body.push_back(make_leaf(expect_symbol("{"), Role::kKeywordSym));
        while (!peek().is_symbol("}")) {
            if (at_end()) fail("unterminated switch");
            std::vector<int> group;
            if (peek().is_keyword("case")) {
                group.push_back(leaf_here(Role::kKeywordSym));
                group.push_back(parse_expression());
                while (peek().is_symbol(",")) {
                    group.push_back(make_leaf(advance(), Role::kKeywordSym));
                    group.push_back(parse_expression());
                }
            } else if (peek().is_keyword("default")) {
                group.push_back(leaf_here(Role::kKeywordSym));
            } else {
                fail("expected 'case' or 'default'");
            }
            if (peek().is_symbol(":")) {
                group.push_back(make_leaf(advance(), Role::kKeywordSym));
                while (!peek().is_keyword("case") && !peek().is_keyword("default") &&
                       !peek().is_symbol("}")) {
                    if (at_end()) fail("unterminated switch");
                    group.push_back(parse_statement());
                }
            } else if (peek().is_symbol("->")) {
                group.push_back(make_leaf(advance(), Role::kKeywordSym));
                group.push_back(parse_statement());
            } else {
                fail("expected ':' or '->'");
            }
            body.push_back(make_internal(group));
        }
        body.push_back(make_leaf(advance(), Role::kKeywordSym));
        children.push_back(make_internal(body));
        return make_internal(children);
    }

    int parse_synchronized() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        children.push_back(parse_expression());
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        children.push_back(parse_block());
        return make_internal(children);
    }

    int parse_assert() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));
        children.push_back(parse_expression());
        if (peek().is_symbol(":")) {
            children.push_back(make_leaf(advance(), Role::kKeywordSym));
            children.push_back(parse_expression());
        }
        children.push_back(make_leaf(expect_symbol(";"), Role::kKeywordSym));
        return make_internal(children);
    }

    // ---- expressions --------------------------------------------------------

    bool is_assign_op(const Token& t) const {
        static const std::unordered_set<std::string> ops = {
            "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};
        return t.kind == TokenKind::kSymbol && ops.count(t.text);
    }

    int parse_expression() { return parse_assignment(); }

    int parse_assignment() {
        int lhs = parse_ternary();
        if (is_assign_op(peek())) {
            int op = make_leaf(advance(), Role::kKeywordSym);
            int rhs = parse_assignment();
            return make_internal({lhs, op, rhs});
        }
        return lhs;
    }

    int parse_ternary() {
        int cond = parse_binary(0);
        if (peek().is_symbol("?")) {
            int q = make_leaf(advance(), Role::kKeywordSym);
            int then_e = parse_expression();
            int colon = make_leaf(expect_symbol(":"), Role::kKeywordSym);
            int else_e = parse_ternary();
            return make_internal({cond, q, then_e, colon, else_e});
        }
        return cond;
    }

    static constexpr int kBinaryLevels = 10;

    bool binary_op_at(int level, const Token& t) const {
        if (t.is_keyword("instanceof")) return level == 6;
        if (t.kind != TokenKind::kSymbol) return false;
        switch (level) {
            case 0: return t.text == "||";
            case 1: return t.text == "&&";
            case 2: return t.text == "|";
            case 3: return t.text == "^";
            case 4: return t.text == "&";
            case 5: return t.text == "==" || t.text == "!=";
            case 6: return t.text == "<" || t.text == ">" || t.text == "<=" || t.text == ">=";
            case 7: return t.text == "<<" || t.text == ">>" || t.text == ">>>";
            case 8: return t.text == "+" || t.text == "-";
            case 9: return t.text == "*" || t.text == "/" || t.text == "%";
        }
        return false;
    }

    int parse_binary(int level) {
        if (level >= kBinaryLevels) return parse_unary();
        int lhs = parse_binary(level + 1);
        while (binary_op_at(level, peek())) {
            bool inst = peek().is_keyword("instanceof");
            int op = make_leaf(advance(), Role::kKeywordSym);
            if (inst) {
                int ty = parse_type();
                std::vector<int> children{lhs, op, ty};
                if (peek().kind == TokenKind::kIdentifier) {
                    children.push_back(leaf_here(Role::kDeclName));  // pattern variable
                }
                lhs = make_internal(children);
                continue;
            }
            int rhs = parse_binary(level + 1);
            lhs = make_internal({lhs, op, rhs});
        }
        return lhs;
    }

    bool cast_ahead() const {
        if (!peek().is_symbol("(")) return false;
        std::size_t q = scan_type_shape(pos_ + 1);
        if (q == kNoMatch || q >= tokens_.size() || !tokens_[q].is_symbol(")")) return false;
        bool primitive_inside = is_primitive(tokens_[pos_ + 1]);
        if (q != pos_ + 2 && !primitive_inside) {
            // multi-token type shape (generics, dots, arrays): trust it
        } else if (!primitive_inside) {
            // single bare identifier: require an unambiguous operand after ')'
            if (q + 1 >= tokens_.size()) return false;
            const Token& after = tokens_[q + 1];
            bool operand = after.kind == TokenKind::kIdentifier ||
                           after.kind == TokenKind::kNumber ||
                           after.kind == TokenKind::kString || after.is_keyword("new") ||
                           after.is_keyword("this") || after.is_keyword("super") ||
                           after.is_symbol("!") || after.is_symbol("~");
            if (!operand) return false;
        }
        if (q + 1 >= tokens_.size()) return false;
        const Token& after = tokens_[q + 1];
        if (after.kind == TokenKind::kSymbol &&
            !(after.is_symbol("(") || after.is_symbol("!") || after.is_symbol("~"))) {
            return false;
        }
        return true;
    }

    int parse_unary() {
        const Token& t = peek();
        if (t.is_symbol("!") || t.is_symbol("~") || t.is_symbol("+") || t.is_symbol("-") ||
            t.is_symbol("++") || t.is_symbol("--")) {
            int op = make_leaf(advance(), Role::kKeywordSym);
            int operand = parse_unary();
            return make_internal({op, operand});
        }
        if (cast_ahead()) {
            int lp = make_leaf(advance(), Role::kKeywordSym);
            int ty = parse_type();
            int rp = make_leaf(expect_symbol(")"), Role::kKeywordSym);
            int operand = parse_unary();
            return make_internal({lp, ty, rp, operand});
        }
        return parse_postfix();
    }

    int parse_postfix() {
        int node = parse_primary();
        while (true) {
            const Token& t = peek();
            if (t.is_symbol(".")) {
                int dot = make_leaf(advance(), Role::kKeywordSym);
                if (peek().is_symbol("<")) {
                    std::size_t q = scan_type_args(pos_);
                    if (q == kNoMatch) fail("malformed type arguments");
                    pos_ = q;  // explicit type arguments carry no features
                }
                int name;
                if (peek().kind == TokenKind::kIdentifier) {
                    name = leaf_here(Role::kMemberName);
                } else if (peek().is_keyword("this") || peek().is_keyword("class") ||
                           peek().is_keyword("super") || peek().is_keyword("new")) {
                    name = leaf_here(Role::kKeywordSym);
                } else {
                    fail("expected member name");
                }
                node = make_internal({node, dot, name}, NodeTag::kMemberAccess);
                continue;
            }
            if (t.is_symbol("(")) {
                node = parse_call(node);
                continue;
            }
            if (t.is_symbol("[")) {
                int lb = make_leaf(advance(), Role::kKeywordSym);
                int idx = parse_expression();
                int rb = make_leaf(expect_symbol("]"), Role::kKeywordSym);
                node = make_internal({node, lb, idx, rb});
                continue;
            }
            if (t.is_symbol("++") || t.is_symbol("--")) {
                int op = make_leaf(advance(), Role::kKeywordSym);
                node = make_internal({node, op});
                continue;
            }
            if (t.is_symbol("::")) {
                int cc = make_leaf(advance(), Role::kKeywordSym);
                int name;
                if (peek().kind == TokenKind::kIdentifier) {
                    name = leaf_here(Role::kMemberName);
                } else if (peek().is_keyword("new")) {
                    name = leaf_here(Role::kKeywordSym);
                } else {
                    fail("expected method reference target");
                }
                node = make_internal({node, cc, name});
                continue;
            }
            break;
        }
        return node;
    }

    int parse_call(int callee) {
        std::vector<int> children{callee};
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        if (!peek().is_symbol(")")) {
            std::vector<int> args;
            args.push_back(parse_expression());
            while (peek().is_symbol(",")) {
                args.push_back(make_leaf(advance(), Role::kKeywordSym));
                args.push_back(parse_expression());
            }
            children.push_back(args.size() == 1 ? args[0] : make_internal(args));
        }
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        return make_internal(children);
    }

    bool paren_lambda_ahead() const {
        if (!dialect_.lambdas || !peek().is_symbol("(")) return false;
        std::size_t q = scan_balanced_parens(pos_);
        return q != kNoMatch && q < tokens_.size() && tokens_[q].is_symbol("->");
    }

    int parse_lambda_body() {
        if (peek().is_symbol("{")) return parse_block();
        return parse_expression();
    }

    int parse_primary() {
        const Token& t = peek();

        if (dialect_.lambdas && t.kind == TokenKind::kIdentifier && peek(1).is_symbol("->")) {
            int param = leaf_here(Role::kDeclName);
            int arrow = make_leaf(advance(), Role::kKeywordSym);
            int body = parse_lambda_body();
            return make_internal({param, arrow, body});
        }
        if (t.kind == TokenKind::kIdentifier) return leaf_here(Role::kExprIdent);
        if (t.kind == TokenKind::kNumber || t.kind == TokenKind::kString) {
            return leaf_here(Role::kLiteral);
        }
        if (t.is_keyword("true") || t.is_keyword("false") || t.is_keyword("null") ||
            t.is_keyword("this") || t.is_keyword("super")) {
            return leaf_here(Role::kKeywordSym);
        }
        if (is_primitive(t) && peek(1).is_symbol(".")) {
            // e.g. int.class
            return leaf_here(Role::kKeywordSym);
        }
        if (t.is_keyword("new")) return parse_new();
        if (t.is_keyword("switch")) return parse_switch();
        if (t.is_symbol("(")) {
            if (paren_lambda_ahead()) {
                std::vector<int> children;
                children.push_back(make_leaf(advance(), Role::kKeywordSym));  // (
                if (!peek().is_symbol(")")) {
                    std::vector<int> params;
                    params.push_back(parse_lambda_param());
                    while (peek().is_symbol(",")) {
                        params.push_back(make_leaf(advance(), Role::kKeywordSym));
                        params.push_back(parse_lambda_param());
                    }
                    children.push_back(params.size() == 1 ? params[0]
                                                          : make_internal(params));
                }
                children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
                children.push_back(make_leaf(expect_symbol("->"), Role::kKeywordSym));
                children.push_back(parse_lambda_body());
                return make_internal(children);
            }
            int lp = make_leaf(advance(), Role::kKeywordSym);
            int e = parse_expression();
            int rp = make_leaf(expect_symbol(")"), Role::kKeywordSym);
            return make_internal({lp, e, rp});
        }
        if (t.is_symbol("{")) return parse_array_init();
        fail("expected expression");
    }

    int parse_lambda_param() {
        // Either a bare name or Type name.
        if (peek().kind == TokenKind::kIdentifier &&
            (peek(1).is_symbol(",") || peek(1).is_symbol(")"))) {
            return leaf_here(Role::kDeclName);
        }
        std::vector<int> children;
        while (peek().is_keyword("final")) {
            children.push_back(leaf_here(Role::kKeywordSym));
        }
        children.push_back(parse_type());
        if (peek().kind != TokenKind::kIdentifier) fail("expected lambda parameter");
        children.push_back(leaf_here(Role::kDeclName));
        return make_internal(children);
    }

    int parse_new() {
        std::vector<int> children;
        children.push_back(leaf_here(Role::kKeywordSym));  // new
        children.push_back(parse_type(/*allow_array_suffix=*/false));
        if (peek().is_symbol("[")) {
            while (peek().is_symbol("[")) {
                children.push_back(make_leaf(advance(), Role::kKeywordSym));
                if (!peek().is_symbol("]")) children.push_back(parse_expression());
                children.push_back(make_leaf(expect_symbol("]"), Role::kKeywordSym));
            }
            if (peek().is_symbol("{")) children.push_back(parse_array_init());
            return make_internal(children);
        }
        children.push_back(make_leaf(expect_symbol("("), Role::kKeywordSym));
        if (!peek().is_symbol(")")) {
            std::vector<int> args;
            args.push_back(parse_expression());
            while (peek().is_symbol(",")) {
                args.push_back(make_leaf(advance(), Role::kKeywordSym));
                args.push_back(parse_expression());
            }
            children.push_back(args.size() == 1 ? args[0] : make_internal(args));
        }
        children.push_back(make_leaf(expect_symbol(")"), Role::kKeywordSym));
        if (peek().is_symbol("{")) {
            children.push_back(parse_anon_body());
        }
        return make_internal(children);
    }

    int parse_anon_body() {
        std::vector<int> children;
        children.push_back(make_leaf(expect_symbol("{"), Role::kKeywordSym));
        while (!peek().is_symbol("}")) {
            if (at_end()) fail("unterminated class body");
            skip_annotations();
            if (peek().is_symbol("}")) break;
            if (looks_like_method_decl()) {
                children.push_back(parse_method());
            } else if (looks_like_local_decl()) {
                int decl = parse_local_decl();
                int semi = make_leaf(expect_symbol(";"), Role::kKeywordSym);
                children.push_back(make_internal({decl, semi}));
            } else if (peek().is_symbol("{")) {
                children.push_back(parse_block());
            } else {
                fail("unsupported class member");
            }
        }
        children.push_back(make_leaf(expect_symbol("}"), Role::kKeywordSym));
        return make_internal(children);
    }

    // ---- #VAR abstraction ---------------------------------------------------

    void abstract_locals() {
        std::set<std::string> locals;
        for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
            if (tree_.nodes[i].is_leaf && roles_[i] == Role::kDeclName) {
                locals.insert(tree_.nodes[i].text);
            }
        }
        for (std::size_t i = 0; i < tree_.nodes.size(); ++i) {
            SptNode& n = tree_.nodes[i];
            if (!n.is_leaf) continue;
            bool local = roles_[i] == Role::kDeclName ||
                         (roles_[i] == Role::kExprIdent && locals.count(n.text));
            if (local) {
                n.original_name = n.text;
                n.text = kVarToken;
                n.is_local_var = true;
            }
        }
    }

    const Dialect& dialect_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool in_signature_ = false;
    SimplifiedParseTree tree_;
    std::vector<Role> roles_;
};

struct Registry {
    std::map<std::string, FrontendFn> frontends;
    std::mutex mutex;
};

Registry& registry() {
    static Registry* r = [] {
        auto* reg = new Registry();
        reg->frontends["java"] = [](std::string_view src) {
            return StructuralParser(src, java_dialect()).run();
        };
        reg->frontends["mini"] = [](std::string_view src) {
            return StructuralParser(src, mini_dialect()).run();
        };
        return reg;
    }();
    return *r;
}

} // namespace

SimplifiedParseTree parse_source(std::string_view source, const std::string& language) {
    FrontendFn fn;
    {
        Registry& r = registry();
        std::lock_guard<std::mutex> lock(r.mutex);
        auto it = r.frontends.find(language);
        if (it == r.frontends.end()) throw UnsupportedLanguage(language);
        fn = it->second;
    }
    return fn(source);
}

SimplifiedParseTree parse(const CodeSnippet& snippet) {
    return parse_source(snippet.text, snippet.language);
}

void register_frontend(const std::string& language, FrontendFn fn) {
    Registry& r = registry();
    std::lock_guard<std::mutex> lock(r.mutex);
    r.frontends[language] = std::move(fn);
}

bool language_supported(const std::string& language) {
    Registry& r = registry();
    std::lock_guard<std::mutex> lock(r.mutex);
    return r.frontends.count(language) > 0;
}

std::vector<std::string> supported_languages() {
    Registry& r = registry();
    std::lock_guard<std::mutex> lock(r.mutex);
    std::vector<std::string> out;
    for (const auto& [name, fn] : r.frontends) out.push_back(name);
    return out;
}

} // namespace senatus::frontend
