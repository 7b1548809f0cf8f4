#include "wfsim/workflow.hpp"

#include "wfsim/error.hpp"
#include "wfsim/text_util.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace wfsim {

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_valid_name(const std::string& text) {
    if (text.empty() || !is_name_start(text[0])) {
        return false;
    }
    return std::all_of(text.begin(), text.end(), is_name_char);
}

bool is_boundary_name(const std::string& name) {
    return name == kBoundaryEntryName || name == kBoundaryExitName;
}

struct Token {
    std::string text;
    int line = 0;
};

// Splits the input into words, numbers and the punctuation of the dialect.
// "//" comments run to end of line. "->" is a single token; words may
// contain the sign and exponent characters of numeric literals.
std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    int line = 1;
    size_t i = 0;
    auto word_char = [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
               c == '+' || c == '-';
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
            }
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tokens.push_back({"->", line});
            i += 2;
            continue;
        }
        if (c == '{' || c == '}' || c == '[' || c == ']' || c == '=' || c == ';') {
            tokens.push_back({std::string(1, c), line});
            ++i;
            continue;
        }
        if (word_char(c)) {
            size_t begin = i;
            while (i < text.size() && word_char(text[i])) {
                if (text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>') {
                    break;
                }
                ++i;
            }
            tokens.push_back({text.substr(begin, i - begin), line});
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line);
    }
    return tokens;
}

class DotParser {
public:
    explicit DotParser(const std::string& text) : tokens_(tokenize(text)) {}

    WorkflowGraph parse() {
        expect_word("strict");
        expect_word("digraph");
        expect_punct("{");
        while (!peek_is("}")) {
            parse_statement();
        }
        expect_punct("}");
        if (pos_ < tokens_.size()) {
            fail("trailing content after graph body", tokens_[pos_].line);
        }
        validate_graph();
        return std::move(graph_);
    }

private:
    void parse_statement() {
        Token name_tok = next("vertex or edge statement");
        if (!is_valid_name(name_tok.text)) {
            fail("invalid name '" + name_tok.text + "'", name_tok.line);
        }
        if (peek_is("->")) {
            ++pos_;
            Token target_tok = next("edge target");
            if (!is_valid_name(target_tok.text)) {
                fail("invalid name '" + target_tok.text + "'", target_tok.line);
            }
            double bytes = parse_size_attribute();
            add_edge(name_tok.text, target_tok.text, bytes, name_tok.line);
        } else {
            double flops = parse_size_attribute();
            add_vertex(name_tok.text, flops, name_tok.line);
        }
        if (peek_is(";")) {
            ++pos_;
        }
    }

    double parse_size_attribute() {
        Token open = next("'['");
        if (open.text != "[") {
            fail("expected '[' with size attribute", open.line);
        }
        Token key = next("attribute name");
        if (key.text != "size") {
            fail("expected size attribute, got '" + key.text + "'", key.line);
        }
        expect_punct("=");
        Token value = next("size value");
        auto parsed = try_parse_number(value.text);
        if (!parsed) {
            fail("invalid size value '" + value.text + "'", value.line);
        }
        expect_punct("]");
        return *parsed;
    }

    void add_vertex(const std::string& name, double flops, int line) {
        if (graph_.has_task(name)) {
            fail("duplicate vertex '" + name + "'", line);
        }
        if (flops < 0.0) {
            fail("negative size on vertex '" + name + "'", line);
        }
        if (flops == 0.0 && !is_boundary_name(name)) {
            fail("zero size on vertex '" + name + "'", line);
        }
        graph_.add_task(name, flops);
    }

    void add_edge(const std::string& producer, const std::string& consumer, double bytes,
                  int line) {
        for (const std::string* endpoint : {&producer, &consumer}) {
            if (!graph_.has_task(*endpoint)) {
                fail("edge references undeclared vertex '" + *endpoint + "'", line);
            }
        }
        if (producer == consumer) {
            fail("self edge on vertex '" + producer + "'", line);
        }
        if (graph_.has_item(producer, consumer)) {
            fail("duplicate edge '" + producer + " -> " + consumer + "'", line);
        }
        if (bytes < 0.0) {
            fail("negative size on edge '" + producer + " -> " + consumer + "'", line);
        }
        if (bytes == 0.0 && !is_boundary_name(producer) && !is_boundary_name(consumer)) {
            fail("zero size on edge '" + producer + " -> " + consumer + "'", line);
        }
        graph_.add_item(producer, consumer, bytes);
    }

    void validate_graph() const {
        for (const char* boundary : {kBoundaryEntryName, kBoundaryExitName}) {
            if (!graph_.has_task(boundary)) {
                throw ParseError(std::string("missing boundary vertex '") + boundary + "'");
            }
        }
        // Kahn's algorithm over the full graph; leftover vertices mean a cycle.
        std::vector<int> indegree(graph_.task_count(), 0);
        for (int t = 0; t < graph_.task_count(); ++t) {
            indegree[t] = static_cast<int>(graph_.predecessors(t).size());
        }
        std::deque<int> frontier;
        for (int t = 0; t < graph_.task_count(); ++t) {
            if (indegree[t] == 0) {
                frontier.push_back(t);
            }
        }
        int processed = 0;
        while (!frontier.empty()) {
            int t = frontier.front();
            frontier.pop_front();
            ++processed;
            for (int s : graph_.successors(t)) {
                if (--indegree[s] == 0) {
                    frontier.push_back(s);
                }
            }
        }
        if (processed < graph_.task_count()) {
            for (int t = 0; t < graph_.task_count(); ++t) {
                if (indegree[t] > 0) {
                    throw ParseError("cycle detected involving vertex '" + graph_.task(t).name +
                                     "'");
                }
            }
        }
    }

    Token next(const std::string& what) {
        if (pos_ >= tokens_.size()) {
            int line = tokens_.empty() ? 1 : tokens_.back().line;
            fail("unexpected end of input, expected " + what, line);
        }
        return tokens_[pos_++];
    }

    void expect_word(const std::string& word) {
        Token tok = next("'" + word + "'");
        if (tok.text != word) {
            fail("expected '" + word + "', got '" + tok.text + "'", tok.line);
        }
    }

    void expect_punct(const std::string& punct) {
        Token tok = next("'" + punct + "'");
        if (tok.text != punct) {
            fail("expected '" + punct + "', got '" + tok.text + "'", tok.line);
        }
    }

    bool peek_is(const std::string& text) const {
        return pos_ < tokens_.size() && tokens_[pos_].text == text;
    }

    [[noreturn]] static void fail(const std::string& message, int line) {
        throw ParseError(message, line);
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
    WorkflowGraph graph_;
};

} // namespace

int WorkflowGraph::add_task(const std::string& name, double flops) {
    if (!is_valid_name(name)) {
        throw ParseError("invalid task name '" + name + "'");
    }
    if (has_task(name)) {
        throw ParseError("duplicate task '" + name + "'");
    }
    tasks_.push_back({name, flops});
    in_items_.emplace_back();
    out_items_.emplace_back();
    pred_tasks_.emplace_back();
    succ_tasks_.emplace_back();
    return task_count() - 1;
}

int WorkflowGraph::add_item(const std::string& producer, const std::string& consumer,
                            double bytes) {
    if (producer == consumer) {
        throw ParseError("self edge on task '" + producer + "'");
    }
    if (has_item(producer, consumer)) {
        throw ParseError("duplicate edge '" + producer + " -> " + consumer + "'");
    }
    int p = task_index(producer);
    int c = task_index(consumer);
    items_.push_back({producer, consumer, bytes});
    int item = item_count() - 1;
    producer_task_.push_back(p);
    consumer_task_.push_back(c);
    out_items_[p].push_back(item);
    in_items_[c].push_back(item);
    succ_tasks_[p].push_back(c);
    pred_tasks_[c].push_back(p);
    return item;
}

bool WorkflowGraph::has_task(const std::string& name) const {
    return std::any_of(tasks_.begin(), tasks_.end(),
                       [&](const TaskSpec& t) { return t.name == name; });
}

bool WorkflowGraph::has_item(const std::string& producer, const std::string& consumer) const {
    return std::any_of(items_.begin(), items_.end(), [&](const DataItemSpec& i) {
        return i.producer == producer && i.consumer == consumer;
    });
}

int WorkflowGraph::task_index(const std::string& name) const {
    for (int t = 0; t < task_count(); ++t) {
        if (tasks_[t].name == name) {
            return t;
        }
    }
    throw ParseError("unknown task '" + name + "'");
}

WorkflowGraph parse_workflow_dot(const std::string& text) {
    return DotParser(text).parse();
}

std::string serialize_workflow_dot(const WorkflowGraph& graph) {
    std::ostringstream out;
    out << "strict digraph {\n";
    for (const TaskSpec& task : graph.tasks()) {
        out << "    " << task.name << " [size=" << format_number(task.flops) << "];\n";
    }
    for (const DataItemSpec& item : graph.items()) {
        out << "    " << item.producer << " -> " << item.consumer << " [size="
            << format_number(item.bytes) << "];\n";
    }
    out << "}\n";
    return out.str();
}

WorkflowGraph strip_boundary(const WorkflowGraph& graph) {
    if (!graph.has_task(kBoundaryEntryName) || !graph.has_task(kBoundaryExitName)) {
        throw std::logic_error("strip_boundary: graph lacks boundary vertices");
    }
    WorkflowGraph stripped;
    for (const TaskSpec& task : graph.tasks()) {
        if (!is_boundary_name(task.name)) {
            stripped.add_task(task.name, task.flops);
        }
    }
    for (const DataItemSpec& item : graph.items()) {
        if (!is_boundary_name(item.producer) && !is_boundary_name(item.consumer)) {
            stripped.add_item(item.producer, item.consumer, item.bytes);
        }
    }
    return stripped;
}

std::vector<LevelRank> level_order_ranks(const WorkflowGraph& graph) {
    int count = graph.task_count();
    std::vector<int> indegree(count, 0);
    std::vector<int> level(count, 0);
    std::deque<int> frontier;
    for (int t = 0; t < count; ++t) {
        indegree[t] = static_cast<int>(graph.predecessors(t).size());
        if (indegree[t] == 0) {
            frontier.push_back(t);
        }
    }
    int processed = 0;
    while (!frontier.empty()) {
        int t = frontier.front();
        frontier.pop_front();
        ++processed;
        for (int s : graph.successors(t)) {
            level[s] = std::max(level[s], level[t] + 1);
            if (--indegree[s] == 0) {
                frontier.push_back(s);
            }
        }
    }
    if (processed < count) {
        throw ParseError("cycle detected in workflow graph");
    }
    // Sibling indices follow task declaration order within each level.
    std::vector<LevelRank> ranks(count);
    std::unordered_map<int, int> next_sibling;
    for (int t = 0; t < count; ++t) {
        ranks[t].level = level[t];
        ranks[t].sibling = next_sibling[level[t]]++;
    }
    return ranks;
}

} // namespace wfsim
