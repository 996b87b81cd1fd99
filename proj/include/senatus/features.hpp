// features.hpp - structural term extraction from simplified parse trees
//
// Four term families, relation syntax:
//   token       the leaf itself                      "vertex"
//   parent      label + child-position + ">" + leaf  "#.#1>#VAR"
//   sibling     leaf + ">>" + next leaf               "get>>0"
//   variable    usage-context + ">>>" + context       "#=#1>>>return#;2"
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "senatus/spt.hpp"

namespace senatus::frontend {

struct FeatureSet {
    std::map<std::string, std::uint32_t> terms;  // term -> occurrence count
    std::string source_id;

    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }  // distinct terms
    std::uint64_t total_count() const;
    bool contains(const std::string& term) const { return terms.count(term) > 0; }
};

// Extracts all four feature families. Deterministic: identical trees produce
// identical sets. Signature leaves contribute token features only; relation
// features are drawn from the body. Ancestor distance for parent features is
// capped at three levels.
FeatureSet extract_features(const SimplifiedParseTree& spt);

// ---- term grammar ----------------------------------------------------------

enum class TermKind { kToken, kParent, kSibling, kVarUsage };

struct ParsedTerm {
    TermKind kind;
    std::string left;   // token / ancestor label / left leaf / first context
    std::string right;  // parent+sibling+usage right-hand part
    int position = 0;   // parent features: 1-based child position
};

// Parses an emitted term back into its relation structure. Every term
// produced by extract_features round-trips; returns nullopt otherwise.
std::optional<ParsedTerm> parse_term(std::string_view term);

// The leaf whose in-tree frequency drives ILF scoring: the first leaf of the
// feature in traversal order (variable-usage features anchor on #VAR).
std::string anchor_leaf(std::string_view term);

} // namespace senatus::frontend
