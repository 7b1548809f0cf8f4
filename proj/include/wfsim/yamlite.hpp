#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wfsim::yamlite {

// Document tree for the YAML subset that run traces use: block maps, flow
// maps, flow lists and block lists of inline values. Map entries keep the
// order they had in the file.
struct Node {
    enum class Kind { null, scalar, map, list };

    Kind kind = Kind::null;
    std::string scalar;
    std::vector<std::pair<std::string, Node>> entries;
    std::vector<Node> items;

    bool is_null() const { return kind == Kind::null; }
    bool is_scalar() const { return kind == Kind::scalar; }
    bool is_map() const { return kind == Kind::map; }
    bool is_list() const { return kind == Kind::list; }

    // Map lookup; nullptr when the key is absent or this is not a map.
    const Node* find(const std::string& key) const;
};

// Parses a document. Throws ParseError with a line number on malformed
// input. An empty document parses as an empty map.
Node parse(const std::string& text);

} // namespace wfsim::yamlite
