#include "senatus/spt.hpp"

namespace senatus::frontend {

namespace {

void collect_leaves(const SimplifiedParseTree& t, int node, std::vector<int>& out) {
    const SptNode& n = t.nodes[node];
    if (n.is_leaf) {
        out.push_back(node);
        return;
    }
    for (int c : n.children) collect_leaves(t, c, out);
}

} // namespace

std::vector<int> SimplifiedParseTree::leaves_in_order() const {
    std::vector<int> out;
    if (root >= 0) collect_leaves(*this, root, out);
    return out;
}

std::map<std::string, std::uint32_t> SimplifiedParseTree::leaf_counts() const {
    std::map<std::string, std::uint32_t> counts;
    for (const SptNode& n : nodes) {
        if (n.is_leaf && !n.is_keyword) ++counts[n.text];
    }
    return counts;
}

bool SimplifiedParseTree::is_well_formed() const {
    if (root < 0) return nodes.empty();
    if (root >= static_cast<int>(nodes.size())) return false;
    if (nodes[root].parent != -1) return false;

    std::vector<int> seen(nodes.size(), 0);
    std::vector<int> stack{root};
    std::size_t visited = 0;
    while (!stack.empty()) {
        int idx = stack.back();
        stack.pop_back();
        if (idx < 0 || idx >= static_cast<int>(nodes.size())) return false;
        if (seen[idx]++) return false;  // reached twice: not a tree
        ++visited;
        const SptNode& n = nodes[idx];
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            int c = n.children[i];
            if (c < 0 || c >= static_cast<int>(nodes.size())) return false;
            if (nodes[c].parent != idx) return false;
            if (nodes[c].child_pos != static_cast<int>(i) + 1) return false;
            stack.push_back(c);
        }
        if (n.is_leaf && !n.children.empty()) return false;
    }
    return visited == nodes.size();
}

} // namespace senatus::frontend
