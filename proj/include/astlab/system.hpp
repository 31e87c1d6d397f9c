#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "astlab/element.hpp"
#include "astlab/error.hpp"

namespace astlab {

/// A named, non-empty finite set of elements.
class ComponentSet {
 public:
  ComponentSet(std::string name, ElementSet members)
      : name_(std::move(name)), members_(std::move(members)) {
    if (members_.empty())
      throw ConstructionError("empty component set: " + name_);
  }

  const std::string& name() const { return name_; }
  const ElementSet& members() const { return members_; }
  bool contains(const Element& e) const { return members_.contains(e); }
  std::size_t size() const { return members_.size(); }

  bool same_members(const ComponentSet& rhs) const {
    return members_ == rhs.members_;
  }

 private:
  std::string name_;
  ElementSet members_;
};

/// One tuple of a relation, aligned with the system's component list.
using Row = std::vector<Element>;

inline bool row_less(const Row& a, const Row& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Sorted, duplicate-free set of rows.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::vector<Row> rows) : rows_(std::move(rows)) {
    std::sort(rows_.begin(), rows_.end(), row_less);
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
  }

  bool insert(Row r) {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), r, row_less);
    if (it != rows_.end() && *it == r) return false;
    rows_.insert(it, std::move(r));
    return true;
  }

  bool contains(const Row& r) const {
    return std::binary_search(rows_.begin(), rows_.end(), r, row_less);
  }

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  auto begin() const { return rows_.begin(); }
  auto end() const { return rows_.end(); }
  const std::vector<Row>& rows() const { return rows_; }

  bool operator==(const Relation& rhs) const = default;

 private:
  std::vector<Row> rows_;
};

/// An abstract system: a relation over an ordered list of component sets.
/// Rows are not validated at construction; validate_system reports the
/// membership and arity violations, and checked factories wrap it.
class AbstractSystem {
 public:
  AbstractSystem(std::string name, std::vector<ComponentSet> components,
                 Relation relation)
      : name_(std::move(name)),
        components_(std::move(components)),
        relation_(std::move(relation)) {
    if (components_.empty())
      throw ConstructionError("system without components: " + name_);
  }

  const std::string& name() const { return name_; }
  const std::vector<ComponentSet>& components() const { return components_; }
  const ComponentSet& component(std::size_t i) const { return components_[i]; }
  std::size_t arity() const { return components_.size(); }
  const Relation& relation() const { return relation_; }

 private:
  std::string name_;
  std::vector<ComponentSet> components_;
  Relation relation_;
};

struct ValidationIssue {
  enum class Kind { Arity, Membership, DanglingReference };
  Kind kind;
  std::string detail;
  std::optional<Row> row;        // offending tuple, when applicable
  std::optional<std::size_t> position;
};

/// Names of component sets the enclosing model declares; used to detect
/// dangling references when a system is validated in a model context.
using SetDirectory = std::map<std::string, const ComponentSet*>;

/// Checks every relation tuple for arity and componentwise membership.
/// With a directory, also checks that each component resolves to a declared
/// set with the same members.
inline std::vector<ValidationIssue> validate_system(
    const AbstractSystem& s, const SetDirectory* directory = nullptr) {
  std::vector<ValidationIssue> issues;
  if (directory) {
    for (std::size_t i = 0; i < s.arity(); ++i) {
      auto it = directory->find(s.component(i).name());
      if (it == directory->end() || !it->second->same_members(s.component(i)))
        issues.push_back({ValidationIssue::Kind::DanglingReference,
                          "component set '" + s.component(i).name() +
                              "' does not resolve in the enclosing model",
                          std::nullopt, i});
    }
  }
  for (const Row& row : s.relation()) {
    if (row.size() != s.arity()) {
      issues.push_back({ValidationIssue::Kind::Arity,
                        "tuple arity " + std::to_string(row.size()) +
                            " in a " + std::to_string(s.arity()) +
                            "-component system",
                        row, std::nullopt});
      continue;
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!s.component(i).contains(row[i]))
        issues.push_back({ValidationIssue::Kind::Membership,
                          row[i].text() + " is not a member of " +
                              s.component(i).name(),
                          row, i});
    }
  }
  return issues;
}

inline bool is_valid(const AbstractSystem& s) {
  return validate_system(s).empty();
}

/// Restriction of the relation (and component list) to the given positions,
/// with duplicate rows collapsed.
inline AbstractSystem project(const AbstractSystem& s,
                              const std::vector<std::size_t>& positions,
                              std::string name = "") {
  if (positions.empty())
    throw UsageError("project: empty position list");
  for (std::size_t p : positions)
    if (p >= s.arity())
      throw UsageError("project: position " + std::to_string(p) +
                       " out of range for " + s.name());
  std::vector<ComponentSet> comps;
  comps.reserve(positions.size());
  for (std::size_t p : positions) comps.push_back(s.component(p));
  Relation rel;
  for (const Row& row : s.relation()) {
    Row out;
    out.reserve(positions.size());
    for (std::size_t p : positions) out.push_back(row[p]);
    rel.insert(std::move(out));
  }
  return AbstractSystem(name.empty() ? s.name() + "_proj" : std::move(name),
                        std::move(comps), std::move(rel));
}

/// Cartesian product as a component set: all pairs (x, y), x from a, y from b.
inline ComponentSet product_set(const ComponentSet& a, const ComponentSet& b,
                                std::string name) {
  ElementSet members;
  for (const Element& x : a.members())
    for (const Element& y : b.members()) members.insert(Element::pair(x, y));
  return ComponentSet(std::move(name), std::move(members));
}

/// Partition of a system's positions into inputs and outputs.
struct IoPartition {
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
};

/// An abstract system whose positions are partitioned into disjoint input
/// and output coordinates covering every position.
class InputOutputSystem {
 public:
  InputOutputSystem(AbstractSystem base, IoPartition io)
      : base_(std::move(base)), io_(std::move(io)) {
    std::sort(io_.inputs.begin(), io_.inputs.end());
    std::sort(io_.outputs.begin(), io_.outputs.end());
    std::vector<char> seen(base_.arity(), 0);
    for (std::size_t p : io_.inputs) mark(seen, p);
    for (std::size_t p : io_.outputs) mark(seen, p);
    if (io_.inputs.empty() || io_.outputs.empty() ||
        !std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }))
      throw ConstructionError(
          "input/output positions must partition all components of " +
          base_.name());
  }

  const AbstractSystem& base() const { return base_; }
  const std::string& name() const { return base_.name(); }
  std::size_t arity() const { return base_.arity(); }
  const Relation& relation() const { return base_.relation(); }
  const std::vector<std::size_t>& input_positions() const {
    return io_.inputs;
  }
  const std::vector<std::size_t>& output_positions() const {
    return io_.outputs;
  }

  Row input_of(const Row& row) const { return pick(row, io_.inputs); }
  Row output_of(const Row& row) const { return pick(row, io_.outputs); }

 private:
  static void mark(std::vector<char>& seen, std::size_t p) {
    if (p >= seen.size() || seen[p])
      throw ConstructionError("bad input/output position " +
                              std::to_string(p));
    seen[p] = 1;
  }
  static Row pick(const Row& row, const std::vector<std::size_t>& ps) {
    Row out;
    out.reserve(ps.size());
    for (std::size_t p : ps) out.push_back(row[p]);
    return out;
  }

  AbstractSystem base_;
  IoPartition io_;
};

/// True iff every input tuple appearing in the relation is related to exactly
/// one output tuple. Vacuously true on the empty relation.
inline bool is_functional(const InputOutputSystem& s) {
  // Rows are deduplicated, so a repeated input implies a second output.
  std::set<Row> seen;
  for (const Row& row : s.relation())
    if (!seen.insert(s.input_of(row)).second) return false;
  return true;
}

/// An input-output system that is a function from inputs to outputs.
class FunctionalSystem {
 public:
  static FunctionalSystem make(InputOutputSystem io) {
    if (!validate_system(io.base()).empty())
      throw ConstructionError("functional system " + io.name() +
                              " fails component validation");
    if (!is_functional(io))
      throw ConstructionError("not a function: " + io.name());
    return FunctionalSystem(std::move(io));
  }

  const InputOutputSystem& io() const { return io_; }
  const AbstractSystem& base() const { return io_.base(); }
  const std::string& name() const { return io_.name(); }
  const Relation& relation() const { return io_.relation(); }

  /// The unique output row for an input row, if the input appears at all.
  std::optional<Row> apply(const Row& input) const {
    for (const Row& row : io_.relation())
      if (io_.input_of(row) == input) return io_.output_of(row);
    return std::nullopt;
  }

  /// Total on a given input space: every combination of members of the input
  /// components appears in the relation.
  bool total() const {
    std::size_t space = 1;
    for (std::size_t p : io_.input_positions())
      space *= base().component(p).size();
    return io_.relation().size() == space;
  }

 private:
  explicit FunctionalSystem(InputOutputSystem io) : io_(std::move(io)) {}
  InputOutputSystem io_;
};

}  // namespace astlab
