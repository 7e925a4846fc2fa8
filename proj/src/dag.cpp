#include "causumx/dag.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "causumx/common.hpp"

namespace causumx {

namespace {

// Finds one directed cycle for the error message (graph known cyclic).
std::vector<std::string> findCycle(const std::vector<std::string>& nodes,
                                   const std::map<std::string, std::vector<std::string>>& children) {
    std::unordered_map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::vector<std::string> cycle;

    std::function<bool(const std::string&)> dfs = [&](const std::string& u) -> bool {
        state[u] = 1;
        stack.push_back(u);
        auto it = children.find(u);
        if (it != children.end()) {
            for (const auto& v : it->second) {
                if (state[v] == 1) {
                    auto pos = std::find(stack.begin(), stack.end(), v);
                    cycle.assign(pos, stack.end());
                    cycle.push_back(v);
                    return true;
                }
                if (state[v] == 0 && dfs(v)) return true;
            }
        }
        stack.pop_back();
        state[u] = 2;
        return false;
    };
    for (const auto& n : nodes) {
        if (state[n] == 0 && dfs(n)) break;
    }
    return cycle;
}

}  // namespace

CausalDag CausalDag::create(std::vector<std::string> nodes,
                            std::set<std::pair<std::string, std::string>> edges) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::unordered_set<std::string> known(nodes.begin(), nodes.end());
    std::map<std::string, std::vector<std::string>> children;
    std::map<std::string, std::size_t> indegree;
    for (const auto& [a, b] : edges) {
        if (!known.count(a) || !known.count(b)) {
            throw DataError("edge endpoint '" + (known.count(a) ? b : a) + "' is not a declared node");
        }
        children[a].push_back(b);
        indegree[b] += 1;
    }
    // Kahn toposort as the acyclicity check.
    std::deque<std::string> ready;
    for (const auto& n : nodes) {
        if (indegree.find(n) == indegree.end()) ready.push_back(n);
    }
    std::size_t visited = 0;
    std::map<std::string, std::size_t> remaining(indegree.begin(), indegree.end());
    while (!ready.empty()) {
        const std::string u = ready.front();
        ready.pop_front();
        ++visited;
        auto it = children.find(u);
        if (it == children.end()) continue;
        for (const auto& v : it->second) {
            if (--remaining[v] == 0) ready.push_back(v);
        }
    }
    if (visited != nodes.size()) {
        auto cycle = findCycle(nodes, children);
        throw DataError("graph contains a cycle: " + joinStrings(cycle, " -> "));
    }
    CausalDag g;
    g.nodes_ = std::move(nodes);
    g.edges_ = std::move(edges);
    return g;
}

bool CausalDag::hasNode(const std::string& name) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), name);
}

std::vector<std::string> CausalDag::parents(const std::string& node) const {
    if (!hasNode(node)) throw DataError("unknown graph node '" + node + "'");
    return parentsOrEmpty(node);
}

std::vector<std::string> CausalDag::parentsOrEmpty(const std::string& node) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : edges_) {
        if (b == node) out.push_back(a);
    }
    return out;  // edges_ is ordered, so parents come out sorted
}

namespace {

struct DotLexer {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line = 1;

    void skip() {
        while (pos < text.size()) {
            const char c = text[pos];
            if (c == '\n') {
                ++line;
                ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == '#') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else {
                return;
            }
        }
    }

    bool done() {
        skip();
        return pos >= text.size();
    }

    [[noreturn]] void fail(const std::string& what) {
        throw DataError("DOT syntax error at line " + std::to_string(line) + ": " + what);
    }

    // Token kinds: identifier, "->", "{", "}", ";"
    std::string next() {
        skip();
        if (pos >= text.size()) fail("unexpected end of input");
        const char c = text[pos];
        if (c == '{' || c == '}' || c == ';') {
            ++pos;
            return std::string(1, c);
        }
        if (c == '-') {
            if (pos + 1 < text.size() && text[pos + 1] == '>') {
                pos += 2;
                return "->";
            }
            fail("expected '->'");
        }
        if (c == '"') {
            ++pos;
            std::string out;
            while (pos < text.size() && text[pos] != '"') {
                if (text[pos] == '\n') ++line;
                out += text[pos++];
            }
            if (pos >= text.size()) fail("unterminated quoted identifier");
            ++pos;
            if (out.empty()) fail("empty quoted identifier");
            return out;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            std::size_t start = pos;
            while (pos < text.size()) {
                const char d = text[pos];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') ++pos;
                else break;
            }
            return text.substr(start, pos - start);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string peek() {
        const std::size_t savedPos = pos;
        const std::size_t savedLine = line;
        std::string tok = next();
        pos = savedPos;
        line = savedLine;
        return tok;
    }
};

bool isPunct(const std::string& tok) { return tok == "{" || tok == "}" || tok == ";" || tok == "->"; }

}  // namespace

CausalDag parseDot(const std::string& text) {
    DotLexer lex{text};
    std::string tok = lex.next();
    if (tok != "digraph") lex.fail("expected 'digraph', got '" + tok + "'");
    tok = lex.next();
    if (tok != "{") {
        if (isPunct(tok)) lex.fail("expected graph name or '{'");
        tok = lex.next();  // optional name consumed
        if (tok != "{") lex.fail("expected '{'");
    }

    std::vector<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;
    auto declare = [&nodes](const std::string& n) { nodes.push_back(n); };

    while (true) {
        if (lex.done()) lex.fail("missing closing '}'");
        tok = lex.next();
        if (tok == "}") break;
        if (tok == ";") continue;
        if (isPunct(tok)) lex.fail("expected node identifier, got '" + tok + "'");
        std::string current = tok;
        declare(current);
        while (!lex.done() && lex.peek() == "->") {
            lex.next();
            const std::string target = lex.next();
            if (isPunct(target)) lex.fail("expected node identifier after '->'");
            declare(target);
            edges.emplace(current, target);
            current = target;
        }
    }
    if (!lex.done()) lex.fail("content after closing '}'");
    return CausalDag::create(std::move(nodes), std::move(edges));
}

std::string serializeDot(const CausalDag& g) {
    std::string out = "digraph g {\n";
    std::set<std::string> withEdges;
    for (const auto& [a, b] : g.edges()) {
        withEdges.insert(a);
        withEdges.insert(b);
    }
    for (const auto& n : g.nodes()) {
        if (!withEdges.count(n)) {
            out += "  " + n + ";\n";
        }
    }
    for (const auto& [a, b] : g.edges()) {
        out += "  " + a + " -> " + b + ";\n";
    }
    out += "}\n";
    return out;
}

std::vector<std::string> adjustmentSet(const CausalDag& g,
                                       const std::vector<std::string>& treatmentAttrs,
                                       const std::string& outcome) {
    if (treatmentAttrs.empty()) throw DataError("adjustment set needs at least one treatment attribute");
    if (!g.hasNode(outcome)) throw DataError("unknown graph node '" + outcome + "'");
    std::set<std::string> z;
    for (const auto& t : treatmentAttrs) {
        for (auto& p : g.parents(t)) z.insert(std::move(p));
    }
    for (const auto& t : treatmentAttrs) z.erase(t);
    z.erase(outcome);
    return {z.begin(), z.end()};
}

std::set<std::string> causalAncestors(const CausalDag& g, const std::string& node) {
    if (!g.hasNode(node)) throw DataError("unknown graph node '" + node + "'");
    std::map<std::string, std::vector<std::string>> parentsOf;
    for (const auto& [a, b] : g.edges()) parentsOf[b].push_back(a);
    std::set<std::string> seen;
    std::deque<std::string> frontier{node};
    while (!frontier.empty()) {
        const std::string u = frontier.front();
        frontier.pop_front();
        auto it = parentsOf.find(u);
        if (it == parentsOf.end()) continue;
        for (const auto& p : it->second) {
            if (seen.insert(p).second) frontier.push_back(p);
        }
    }
    seen.erase(node);
    return seen;
}

}  // namespace causumx
