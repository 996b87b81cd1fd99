#include "senatus/features.hpp"

#include <cctype>
#include <vector>

namespace senatus::frontend {

namespace {

constexpr int kAncestorLevels = 3;

void add_term(FeatureSet& fs, std::string term) { ++fs.terms[std::move(term)]; }

// Context of a variable usage: the called member name when the variable is
// the receiver of a member access, otherwise parent label + child position.
std::string usage_context(const SimplifiedParseTree& t, int leaf) {
    int parent = t.nodes[leaf].parent;
    if (parent < 0) return t.nodes[leaf].text;
    const SptNode& p = t.nodes[parent];
    if (p.tag == NodeTag::kMemberAccess && t.nodes[leaf].child_pos == 1 &&
        p.children.size() == 3 && t.nodes[p.children[2]].is_leaf) {
        return t.nodes[p.children[2]].text;
    }
    return p.text + std::to_string(t.nodes[leaf].child_pos);
}

} // namespace

std::uint64_t FeatureSet::total_count() const {
    std::uint64_t n = 0;
    for (const auto& [term, count] : terms) n += count;
    return n;
}

FeatureSet extract_features(const SimplifiedParseTree& spt) {
    FeatureSet fs;
    if (spt.empty()) return fs;

    std::vector<int> leaves = spt.leaves_in_order();

    int prev_body_leaf = -1;
    // variable name -> usage leaves in order (body occurrences only)
    std::map<std::string, std::vector<int>> usages;

    for (int idx : leaves) {
        const SptNode& leaf = spt.nodes[idx];
        if (leaf.is_keyword) continue;

        add_term(fs, leaf.text);

        if (leaf.in_signature) continue;

        // Parent features: ancestor label + leaf position in its own parent.
        int ancestor = leaf.parent;
        int pos = leaf.child_pos;
        for (int level = 0; level < kAncestorLevels && ancestor >= 0; ++level) {
            add_term(fs, spt.nodes[ancestor].text + std::to_string(pos) + ">" + leaf.text);
            ancestor = spt.nodes[ancestor].parent;
        }

        // Sibling features: consecutive non-keyword leaves.
        if (prev_body_leaf >= 0) {
            add_term(fs, spt.nodes[prev_body_leaf].text + ">>" + leaf.text);
        }
        prev_body_leaf = idx;

        if (leaf.is_local_var) usages[leaf.original_name].push_back(idx);
    }

    // Variable usage features: contexts of every ordered usage pair.
    for (const auto& [name, occ] : usages) {
        if (occ.size() < 2) continue;
        std::vector<std::string> contexts;
        contexts.reserve(occ.size());
        for (int idx : occ) contexts.push_back(usage_context(spt, idx));
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            for (std::size_t j = i + 1; j < contexts.size(); ++j) {
                add_term(fs, contexts[i] + ">>>" + contexts[j]);
            }
        }
    }

    return fs;
}

namespace {

bool is_plain_leaf(std::string_view s) {
    return !s.empty() && s.find('>') == std::string_view::npos;
}

// label followed by at least one digit; labels never end in a digit.
bool is_label_pos(std::string_view s, std::string_view* label = nullptr, int* pos = nullptr) {
    std::size_t end = s.size();
    std::size_t digits = end;
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(s[digits - 1]))) --digits;
    if (digits == end || digits == 0) return false;
    if (label) *label = s.substr(0, digits);
    if (pos) *pos = std::stoi(std::string(s.substr(digits)));
    return true;
}

bool is_context(std::string_view s) { return is_plain_leaf(s) || is_label_pos(s); }

} // namespace

std::optional<ParsedTerm> parse_term(std::string_view term) {
    if (term.empty()) return std::nullopt;

    // Variable usage: first ">>>" split whose sides are both valid contexts.
    for (std::size_t i = 0; i + 3 <= term.size(); ++i) {
        if (term.compare(i, 3, ">>>") != 0) continue;
        std::string_view l = term.substr(0, i);
        std::string_view r = term.substr(i + 3);
        if (is_context(l) && is_context(r)) {
            return ParsedTerm{TermKind::kVarUsage, std::string(l), std::string(r), 0};
        }
    }

    // Sibling: a single ">>" between two plain leaves.
    for (std::size_t i = 0; i + 2 <= term.size(); ++i) {
        if (term.compare(i, 2, ">>") != 0) continue;
        std::string_view l = term.substr(0, i);
        std::string_view r = term.substr(i + 2);
        if (is_plain_leaf(l) && is_plain_leaf(r)) {
            return ParsedTerm{TermKind::kSibling, std::string(l), std::string(r), 0};
        }
    }

    // Parent: rightmost '>' with label+digits on the left, a leaf on the right.
    std::size_t cut = term.rfind('>');
    if (cut != std::string_view::npos) {
        std::string_view l = term.substr(0, cut);
        std::string_view r = term.substr(cut + 1);
        std::string_view label;
        int pos = 0;
        if (is_plain_leaf(r) && is_label_pos(l, &label, &pos)) {
            return ParsedTerm{TermKind::kParent, std::string(label), std::string(r), pos};
        }
        return std::nullopt;
    }

    return ParsedTerm{TermKind::kToken, std::string(term), "", 0};
}

std::string anchor_leaf(std::string_view term) {
    auto parsed = parse_term(term);
    if (!parsed) return std::string(term);
    switch (parsed->kind) {
        case TermKind::kToken: return parsed->left;
        case TermKind::kParent: return parsed->right;
        case TermKind::kSibling: return parsed->left;
        case TermKind::kVarUsage: return kVarToken;
    }
    return std::string(term);
}

} // namespace senatus::frontend
