#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "astlab/error.hpp"
#include "astlab/model.hpp"

namespace astlab {

enum class DotLevel { Elementary, Cascade };

namespace dot {

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\"";
  return out;
}

/// Accumulates node and edge statements, deduplicating nodes.
class Builder {
 public:
  explicit Builder(std::string graph_name) : name_(std::move(graph_name)) {}

  void box(const std::string& id) { node(id, "box"); }
  void plain(const std::string& id) { node(id, "plaintext"); }

  void edge(const std::string& from, const std::string& to,
            const std::string& label = "") {
    std::string stmt = "  " + quoted(from) + " -> " + quoted(to);
    if (!label.empty()) stmt += " [label=" + quoted(label) + "]";
    stmt += ";\n";
    edges_ += stmt;
  }

  std::string str() const {
    return "digraph " + quoted(name_) + " {\n" + nodes_ + edges_ + "}\n";
  }

 private:
  void node(const std::string& id, const char* shape) {
    if (!seen_.insert(id).second) return;
    nodes_ += "  " + quoted(id) + " [shape=" + shape + ", label=" +
              quoted(id) + "];\n";
  }

  std::string name_;
  std::set<std::string> seen_;
  std::string nodes_, edges_;
};

/// The algorithm-to-hypotheses chain every learning structure is drawn from:
/// data -> A -> params -> H and input -> H -> output.
inline void learning_chain(Builder& b, const std::string& algorithm,
                           const std::string& hypotheses,
                           const std::string& data, const std::string& params,
                           const std::string& input,
                           const std::string& output) {
  b.box(algorithm);
  b.box(hypotheses);
  b.plain(data);
  b.plain(params);
  b.plain(input);
  b.plain(output);
  b.edge(data, algorithm, data);
  b.edge(algorithm, params, params);
  b.edge(params, hypotheses, params);
  b.edge(input, hypotheses, input);
  b.edge(hypotheses, output, output);
}

}  // namespace dot

/// Renders the named system or learning structure as a DOT digraph. The
/// elementary level draws one input-output block; the cascade level draws
/// the algorithm/hypotheses chain, and the structured declarations
/// (transfer, multi-task, meta) draw their full topology.
inline std::string export_dot(const Model& m, const std::string& target,
                              DotLevel level) {
  dot::Builder b(target);

  if (auto it = m.learnings.find(target); it != m.learnings.end()) {
    const LearningDecl& d = it->second;
    if (level == DotLevel::Elementary) {
      b.box(target);
      b.plain(d.input);
      b.plain(d.output);
      b.edge(d.input, target, d.input);
      b.edge(target, d.output, d.output);
    } else {
      dot::learning_chain(b, d.algorithm, d.hypotheses, d.data, d.params,
                          d.input, d.output);
    }
    return b.str();
  }

  if (auto it = m.transfers.find(target); it != m.transfers.end()) {
    const TransferDecl& d = it->second;
    if (level == DotLevel::Elementary) {
      b.box(target);
      const LearningDecl& tgt = m.learnings.at(d.target);
      b.plain(tgt.input);
      b.plain(tgt.output);
      b.edge(tgt.input, target, tgt.input);
      b.edge(target, tgt.output, tgt.output);
      return b.str();
    }
    const LearningDecl& src = m.learnings.at(d.source);
    const LearningDecl& tgt = m.learnings.at(d.target);
    dot::learning_chain(b, src.algorithm, src.hypotheses, src.data,
                        src.params, src.input, src.output);
    dot::learning_chain(b, tgt.algorithm, tgt.hypotheses, tgt.data,
                        tgt.params, tgt.input, tgt.output);
    // Knowledge drawn from the source feeds the transfer algorithm's data.
    b.plain(d.knowledge);
    b.box(d.algorithm);
    b.box(d.hypotheses);
    b.edge(src.data, d.knowledge, d.knowledge);
    b.edge(src.params, d.knowledge, d.knowledge);
    b.edge(d.knowledge, d.algorithm, d.knowledge);
    b.edge(tgt.data, d.algorithm, tgt.data);
    b.edge(d.algorithm, d.hypotheses, target);
    b.edge(tgt.input, d.hypotheses, tgt.input);
    b.edge(d.hypotheses, tgt.output, tgt.output);
    return b.str();
  }

  if (auto it = m.multitasks.find(target); it != m.multitasks.end()) {
    const MultitaskDecl& d = it->second;
    b.box(d.algorithm);
    for (const std::string& task : d.tasks) {
      const LearningDecl& t = m.learnings.at(task);
      b.plain(t.data);
      b.plain(t.params);
      b.box(t.hypotheses);
      b.plain(t.input);
      b.plain(t.output);
      b.edge(t.data, d.algorithm, t.data);
      b.edge(d.algorithm, t.params, t.params);
      b.edge(t.params, t.hypotheses, t.params);
      b.edge(t.input, t.hypotheses, t.input);
      b.edge(t.hypotheses, t.output, t.output);
    }
    return b.str();
  }

  if (auto it = m.metas.find(target); it != m.metas.end()) {
    const MetaDecl& d = it->second;
    const LearningDecl& obj = m.learnings.at(d.object);
    // Meta level: its hypotheses select the object-level algorithm.
    b.box(d.algorithm);
    b.box(d.hypotheses);
    b.plain(obj.data);
    b.plain(obj.params);
    b.edge(d.algorithm, d.hypotheses, target);
    b.edge(obj.data, d.hypotheses, obj.data);
    b.edge(d.hypotheses, obj.params, obj.params);
    // Object level.
    b.box(obj.hypotheses);
    b.plain(obj.input);
    b.plain(obj.output);
    b.edge(obj.params, obj.hypotheses, obj.params);
    b.edge(obj.input, obj.hypotheses, obj.input);
    b.edge(obj.hypotheses, obj.output, obj.output);
    return b.str();
  }

  if (auto it = m.systems.find(target); it != m.systems.end()) {
    const StoredSystem& s = it->second;
    b.box(target);
    if (s.io) {
      for (std::size_t k : s.io->inputs) {
        const std::string& n = s.base.component(k).name();
        b.plain(n);
        b.edge(n, target, n);
      }
      for (std::size_t k : s.io->outputs) {
        const std::string& n = s.base.component(k).name();
        b.plain(n);
        b.edge(target, n, n);
      }
    } else {
      for (std::size_t k = 0; k < s.base.arity(); ++k) {
        const std::string& n = s.base.component(k).name();
        b.plain(n);
        b.edge(n, target, n);
      }
    }
    return b.str();
  }

  throw UsageError("unknown diagram target: " + target);
}

/// Minimal well-formedness check for the DOT this module emits: a digraph
/// with quoted identifiers, node and edge statements, and attributes limited
/// to label and shape. Returns an empty string when valid, else the problem.
inline std::string validate_dot(std::string_view text) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto literal = [&](std::string_view want) {
    skip_ws();
    if (text.substr(pos, want.size()) != want) return false;
    pos += want.size();
    return true;
  };
  auto identifier = [&]() -> bool {
    skip_ws();
    if (pos < text.size() && text[pos] == '"') {
      ++pos;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\') ++pos;
        ++pos;
      }
      if (pos >= text.size()) return false;
      ++pos;  // closing quote
      return true;
    }
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    return pos > start;
  };

  if (!literal("digraph")) return "missing digraph header";
  if (!identifier()) return "missing graph name";
  if (!literal("{")) return "missing opening brace";
  for (;;) {
    skip_ws();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      break;
    }
    if (!identifier()) return "expected a node or edge statement";
    skip_ws();
    if (text.substr(pos, 2) == "->") {
      pos += 2;
      if (!identifier()) return "edge without target";
    }
    skip_ws();
    if (pos < text.size() && text[pos] == '[') {
      ++pos;
      for (;;) {
        skip_ws();
        std::size_t key_start = pos;
        while (pos < text.size() &&
               std::isalpha(static_cast<unsigned char>(text[pos])))
          ++pos;
        std::string key(text.substr(key_start, pos - key_start));
        if (key != "label" && key != "shape")
          return "attribute '" + key + "' is not label or shape";
        if (!literal("=")) return "attribute without value";
        if (!identifier()) return "attribute without value";
        skip_ws();
        if (pos < text.size() && text[pos] == ',') {
          ++pos;
          continue;
        }
        break;
      }
      if (!literal("]")) return "unterminated attribute list";
    }
    if (!literal(";")) return "statement without ';'";
  }
  skip_ws();
  if (pos != text.size()) return "trailing content after the graph";
  return "";
}

}  // namespace astlab
