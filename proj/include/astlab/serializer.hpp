#pragma once

#include <string>

#include "astlab/model.hpp"

namespace astlab {

namespace dsl {

inline void append_member_list(std::string& out, const ElementSet& members) {
  out += "{ ";
  bool first = true;
  for (const Element& e : members) {
    if (!first) out += ", ";
    first = false;
    out += e.text();
  }
  out += " }";
}

inline void append_row(std::string& out, const Row& row) {
  out += "(";
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out += ", ";
    out += row[k].text();
  }
  out += ")";
}

}  // namespace dsl

/// Canonical serialization: declarations sorted by name within each kind,
/// set members and relation tuples in element order, one declaration per
/// line, LF line endings, a single space after commas. Directives keep their
/// source order at the end. Parsing the output reproduces the model, and a
/// second serialization is byte-identical.
inline std::string serialize_model(const Model& m) {
  std::string out;

  for (const auto& [name, set] : m.sets) {
    out += "set " + name + " = ";
    dsl::append_member_list(out, set.members());
    out += "\n";
  }

  for (const auto& [name, sys] : m.systems) {
    if (!sys.declared) continue;  // recreated by its directive
    out += "system " + name + " : ";
    const std::size_t n_inputs =
        sys.io ? sys.io->inputs.size() : sys.base.arity();
    for (std::size_t k = 0; k < n_inputs; ++k) {
      if (k) out += ", ";
      out += sys.base.component(k).name();
    }
    if (sys.io) {
      out += " -> ";
      for (std::size_t k = n_inputs; k < sys.base.arity(); ++k) {
        if (k > n_inputs) out += ", ";
        out += sys.base.component(k).name();
      }
    }
    out += " = { ";
    bool first = true;
    for (const Row& row : sys.base.relation()) {
      if (!first) out += ", ";
      first = false;
      dsl::append_row(out, row);
    }
    out += first ? "}" : " }";
    out += "\n";
  }

  for (const auto& [name, decl] : m.learnings) {
    out += "learning " + name + " {\n";
    out += "  algorithm = " + decl.algorithm + "\n";
    out += "  data = " + decl.data + "\n";
    out += "  params = " + decl.params + "\n";
    out += "  hypotheses = " + decl.hypotheses + "\n";
    out += "  input = " + decl.input + "\n";
    out += "  output = " + decl.output + "\n";
    out += "}\n";
  }

  for (const auto& [name, decl] : m.transfers) {
    out += "transfer " + name + " {\n";
    out += "  source = " + decl.source + "\n";
    out += "  target = " + decl.target + "\n";
    out += "  knowledge = " + decl.knowledge + "\n";
    out += "  algorithm = " + decl.algorithm + "\n";
    out += "  hypotheses = " + decl.hypotheses + "\n";
    out += "}\n";
  }

  for (const auto& [name, decl] : m.multitasks) {
    out += "multitask " + name + " {\n";
    out += "  tasks = ";
    for (std::size_t i = 0; i < decl.tasks.size(); ++i) {
      if (i) out += ", ";
      out += decl.tasks[i];
    }
    out += "\n  algorithm = " + decl.algorithm + "\n";
    out += "}\n";
  }

  for (const auto& [name, decl] : m.metas) {
    out += "meta " + name + " {\n";
    out += "  algorithm = " + decl.algorithm + "\n";
    out += "  hypotheses = " + decl.hypotheses + "\n";
    out += "  object = " + decl.object + "\n";
    out += "}\n";
  }

  for (const Directive& d : m.directives) {
    switch (d.kind) {
      case Directive::Kind::Parallel:
        out += "parallel " + d.name + " = " + d.operands[0] + ", " +
               d.operands[1] + "\n";
        break;
      case Directive::Kind::Cascade:
        out += "cascade " + d.name + " = " + d.operands[0] + ", " +
               d.operands[1] + " zleft " + std::to_string(d.z_left) +
               " zright " + std::to_string(d.z_right) + "\n";
        break;
      case Directive::Kind::Homo: {
        const HomoDecl& h = m.homos.at(d.name);
        out += "homo " + d.name + " : " + h.from + " -> " + h.to + " {\n";
        for (const auto& [pos, map] : h.maps) {
          out += "  map " + std::to_string(pos) + " { ";
          bool first = true;
          for (const auto& [from, to] : map) {
            if (!first) out += ", ";
            first = false;
            out += from.text() + " -> " + to.text();
          }
          out += " }\n";
        }
        out += "}\n";
        break;
      }
      case Directive::Kind::Check:
        out += "check " + d.name + "\n";
        break;
    }
  }
  return out;
}

}  // namespace astlab
