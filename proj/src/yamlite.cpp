#include "wfsim/yamlite.hpp"

#include "wfsim/error.hpp"

#include <string_view>

namespace wfsim::yamlite {

const Node* Node::find(const std::string& key) const {
    for (const auto& [name, value] : entries) {
        if (name == key) {
            return &value;
        }
    }
    return nullptr;
}

namespace {

struct Line {
    int number = 0;
    int indent = 0;
    std::string text;
};

std::string_view trim(std::string_view text) {
    while (!text.empty() && text.front() == ' ') {
        text.remove_prefix(1);
    }
    while (!text.empty() && text.back() == ' ') {
        text.remove_suffix(1);
    }
    return text;
}

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    size_t begin = 0;
    int number = 1;
    while (begin < text.size()) {
        size_t end = text.find('\n', begin);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string_view raw(text.data() + begin, end - begin);
        if (!raw.empty() && raw.back() == '\r') {
            raw.remove_suffix(1);
        }
        size_t indent = 0;
        while (indent < raw.size() && raw[indent] == ' ') {
            ++indent;
        }
        if (indent < raw.size() && raw[indent] == '\t') {
            throw ParseError("tab character in indentation", number);
        }
        std::string_view body = trim(raw.substr(indent));
        if (!body.empty() && body.front() != '#') {
            lines.push_back({number, static_cast<int>(indent), std::string(body)});
        }
        begin = end + 1;
        ++number;
    }
    return lines;
}

// The key separator is the first ':' followed by a space or the line end, so
// keys like 'a->b' and values like '{start: 1}' split correctly.
size_t find_key_colon(std::string_view text) {
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == ':' && (i + 1 == text.size() || text[i + 1] == ' ')) {
            return i;
        }
    }
    return std::string_view::npos;
}

// Splits flow content on commas that sit outside nested braces and brackets.
std::vector<std::string_view> split_flow_items(std::string_view body, int line) {
    std::vector<std::string_view> parts;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c == '{' || c == '[') {
            ++depth;
        } else if (c == '}' || c == ']') {
            --depth;
            if (depth < 0) {
                throw ParseError("unbalanced flow delimiter", line);
            }
        } else if (c == ',' && depth == 0) {
            parts.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    if (depth != 0) {
        throw ParseError("unbalanced flow delimiter", line);
    }
    parts.push_back(body.substr(start));
    return parts;
}

Node parse_flow(std::string_view body, int line);

Node parse_flow_map(std::string_view inner, int line) {
    Node node;
    node.kind = Node::Kind::map;
    inner = trim(inner);
    if (inner.empty()) {
        return node;
    }
    for (std::string_view part : split_flow_items(inner, line)) {
        part = trim(part);
        size_t colon = find_key_colon(part);
        if (colon == std::string_view::npos) {
            throw ParseError("expected 'key: value' in flow map", line);
        }
        std::string key(trim(part.substr(0, colon)));
        if (key.empty()) {
            throw ParseError("empty key in flow map", line);
        }
        if (node.find(key)) {
            throw ParseError("duplicate key '" + key + "'", line);
        }
        node.entries.emplace_back(std::move(key), parse_flow(trim(part.substr(colon + 1)), line));
    }
    return node;
}

Node parse_flow_list(std::string_view inner, int line) {
    Node node;
    node.kind = Node::Kind::list;
    inner = trim(inner);
    if (inner.empty()) {
        return node;
    }
    for (std::string_view part : split_flow_items(inner, line)) {
        node.items.push_back(parse_flow(trim(part), line));
    }
    return node;
}

Node parse_flow(std::string_view body, int line) {
    if (body.empty()) {
        return {};
    }
    if (body.front() == '{') {
        if (body.back() != '}') {
            throw ParseError("unterminated flow map", line);
        }
        return parse_flow_map(body.substr(1, body.size() - 2), line);
    }
    if (body.front() == '[') {
        if (body.back() != ']') {
            throw ParseError("unterminated flow list", line);
        }
        return parse_flow_list(body.substr(1, body.size() - 2), line);
    }
    Node node;
    node.kind = Node::Kind::scalar;
    node.scalar = std::string(body);
    return node;
}

bool is_list_entry(const std::string& text) {
    return text == "-" || text.rfind("- ", 0) == 0;
}

class BlockParser {
public:
    explicit BlockParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    Node parse_document() {
        if (lines_.empty()) {
            Node node;
            node.kind = Node::Kind::map;
            return node;
        }
        Node root = parse_block(lines_.front().indent);
        if (pos_ < lines_.size()) {
            throw ParseError("indentation does not match any open block", current().number);
        }
        return root;
    }

private:
    std::vector<Line> lines_;
    size_t pos_ = 0;

    bool done() const { return pos_ >= lines_.size(); }
    const Line& current() const { return lines_[pos_]; }

    void reject_deeper(int indent) const {
        if (!done() && current().indent > indent) {
            throw ParseError("unexpected indent under an inline value", current().number);
        }
    }

    Node parse_block(int indent) {
        return is_list_entry(current().text) ? parse_block_list(indent) : parse_block_map(indent);
    }

    Node parse_block_list(int indent) {
        Node node;
        node.kind = Node::Kind::list;
        while (!done() && current().indent == indent) {
            const Line line = current();
            if (!is_list_entry(line.text)) {
                throw ParseError("expected a '-' list entry", line.number);
            }
            std::string_view rest = trim(std::string_view(line.text).substr(1));
            if (rest.empty()) {
                throw ParseError("expected a value after '-'", line.number);
            }
            ++pos_;
            reject_deeper(indent);
            node.items.push_back(parse_flow(rest, line.number));
        }
        return node;
    }

    Node parse_block_map(int indent) {
        Node node;
        node.kind = Node::Kind::map;
        while (!done() && current().indent == indent) {
            const Line line = current();
            if (is_list_entry(line.text)) {
                throw ParseError("list entry inside a map block", line.number);
            }
            size_t colon = find_key_colon(line.text);
            if (colon == std::string_view::npos) {
                throw ParseError("expected ':' after a map key", line.number);
            }
            std::string key(trim(std::string_view(line.text).substr(0, colon)));
            if (key.empty()) {
                throw ParseError("empty map key", line.number);
            }
            if (node.find(key)) {
                throw ParseError("duplicate key '" + key + "'", line.number);
            }
            std::string_view rest = trim(std::string_view(line.text).substr(colon + 1));
            ++pos_;
            if (!rest.empty()) {
                reject_deeper(indent);
                node.entries.emplace_back(std::move(key), parse_flow(rest, line.number));
            } else if (!done() && current().indent > indent) {
                node.entries.emplace_back(std::move(key), parse_block(current().indent));
            } else {
                node.entries.emplace_back(std::move(key), Node{});
            }
        }
        return node;
    }
};

} // namespace

Node parse(const std::string& text) {
    BlockParser parser(split_lines(text));
    return parser.parse_document();
}

} // namespace wfsim::yamlite
