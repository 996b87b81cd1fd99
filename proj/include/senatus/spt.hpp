// spt.hpp - simplified parse tree: the featurization substrate
//
// The tree is stored as a flat list of nodes. Leaves carry the surface token
// (local variables already rewritten to #VAR) plus is-keyword / is-local
// flags; internal nodes carry a skeleton label formed by concatenating child
// keyword tokens and a '#' placeholder per non-keyword child.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace senatus::frontend {

inline constexpr const char* kVarToken = "#VAR";

enum class NodeTag : std::uint8_t {
    kPlain = 0,
    kMemberAccess,  // [object '.' member]; drives variable-usage contexts
};

struct SptNode {
    bool is_leaf = true;
    std::string text;  // leaf: surface token; internal: skeleton label

    // Leaf-only attributes.
    bool is_keyword = false;    // keywords and operator symbols
    bool is_local_var = false;  // surface token was rewritten to #VAR
    bool in_signature = false;  // part of a method signature (token features only)
    std::string original_name;  // pre-abstraction identifier, for usage chains

    int parent = -1;
    int child_pos = 0;  // 1-based position within the parent's child list

    // Internal-only attributes.
    NodeTag tag = NodeTag::kPlain;
    std::vector<int> children;
};

struct SimplifiedParseTree {
    std::vector<SptNode> nodes;
    int root = -1;

    bool empty() const { return root < 0; }

    // Leaves in pre-order (source order).
    std::vector<int> leaves_in_order() const;

    // Occurrence count of each non-keyword leaf token.
    std::map<std::string, std::uint32_t> leaf_counts() const;

    // Checks parent/child consistency and acyclicity (the list representation
    // must reconstruct to a rooted tree).
    bool is_well_formed() const;
};

} // namespace senatus::frontend
