#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "astlab/element.hpp"
#include "astlab/error.hpp"
#include "astlab/limits.hpp"
#include "astlab/system.hpp"

namespace astlab {

/// A total map between two element carriers, kept sorted by source element.
class ElementMap {
 public:
  ElementMap() = default;

  void set(Element from, Element to) {
    entries_.insert_or_assign(std::move(from), std::move(to));
  }

  const Element* find(const Element& from) const {
    auto it = entries_.find(from);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  static ElementMap identity(const ComponentSet& carrier) {
    ElementMap m;
    for (const Element& e : carrier.members()) m.set(e, e);
    return m;
  }

  bool operator==(const ElementMap& rhs) const = default;

 private:
  std::map<Element, Element> entries_;
};

/// A family of componentwise maps between two systems of equal arity; the
/// maps at input positions are the rho family, those at output positions the
/// theta family.
struct Morphism {
  std::vector<ElementMap> maps;  // one per component position

  bool operator==(const Morphism& rhs) const = default;
};

inline Morphism identity_morphism(const AbstractSystem& s) {
  Morphism m;
  m.maps.reserve(s.arity());
  for (const ComponentSet& c : s.components())
    m.maps.push_back(ElementMap::identity(c));
  return m;
}

/// Componentwise composition: first apply m12, then m23.
inline Morphism compose_morphisms(const Morphism& m12, const Morphism& m23) {
  if (m12.maps.size() != m23.maps.size())
    throw UsageError("compose_morphisms: arity mismatch");
  Morphism out;
  out.maps.resize(m12.maps.size());
  for (std::size_t k = 0; k < m12.maps.size(); ++k)
    for (const auto& [from, mid] : m12.maps[k]) {
      const Element* to = m23.maps[k].find(mid);
      if (!to)
        throw UsageError("compose_morphisms: intermediate element " +
                         mid.text() + " unmapped");
      out.maps[k].set(from, *to);
    }
  return out;
}

struct HomomorphismCheck {
  bool holds = false;
  std::string witness;  // violating tuple or unreached target, when failing
};

/// Checks whether the map family is a homomorphism: every map onto its
/// target component, and every source tuple carried into the target
/// relation. Totality and codomain containment are preconditions; their
/// violation raises a usage error rather than a verdict.
inline HomomorphismCheck verify_homomorphism(const AbstractSystem& s1,
                                             const AbstractSystem& s2,
                                             const Morphism& m) {
  if (s1.arity() != s2.arity() || m.maps.size() != s1.arity())
    throw UsageError("verify_homomorphism: arity mismatch");
  for (std::size_t k = 0; k < s1.arity(); ++k) {
    for (const Element& e : s1.component(k).members())
      if (!m.maps[k].find(e))
        throw UsageError("morphism not total: " + e.text() +
                         " unmapped at position " + std::to_string(k));
    for (const auto& [from, to] : m.maps[k])
      if (!s2.component(k).contains(to))
        throw UsageError("codomain violation: " + to.text() +
                         " is outside target component " +
                         std::to_string(k));
  }
  // Onto.
  for (std::size_t k = 0; k < s1.arity(); ++k) {
    ElementSet reached;
    for (const auto& [from, to] : m.maps[k]) reached.insert(to);
    for (const Element& target : s2.component(k).members())
      if (!reached.contains(target))
        return {false, "target element " + target.text() +
                           " at position " + std::to_string(k) +
                           " is unreached"};
  }
  // Relation preservation.
  for (const Row& row : s1.relation()) {
    Row image;
    image.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k)
      image.push_back(*m.maps[k].find(row[k]));
    if (!s2.relation().contains(image)) {
      std::string w = "tuple (";
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) w += ", ";
        w += row[k].text();
      }
      return {false, w + ") maps outside the target relation"};
    }
  }
  return {true, ""};
}

namespace detail {
inline void expect_matching_io(const InputOutputSystem& s1,
                               const InputOutputSystem& s2) {
  if (s1.input_positions() != s2.input_positions() ||
      s1.output_positions() != s2.output_positions())
    throw UsageError(
        "input/output partitions of " + s1.name() + " and " + s2.name() +
        " differ; componentwise maps would not respect the rho/theta split");
}
}  // namespace detail

inline HomomorphismCheck verify_homomorphism(const InputOutputSystem& s1,
                                             const InputOutputSystem& s2,
                                             const Morphism& m) {
  detail::expect_matching_io(s1, s2);
  return verify_homomorphism(s1.base(), s2.base(), m);
}

/// Caps on the backtracking search. Budget exhaustion is a result, not an
/// error.
struct SearchBudget {
  std::uint64_t max_assignments = 1'000'000;
  double max_seconds = 30.0;
};

enum class SearchOutcome { Found, None, BudgetExhausted };

struct SearchResult {
  SearchOutcome outcome;
  std::optional<Morphism> morphism;
  std::uint64_t assignments_explored = 0;
};

namespace detail {

/// Relation rows re-encoded as carrier indices, position by position.
inline std::vector<std::vector<std::size_t>> index_rows(
    const AbstractSystem& s) {
  std::vector<std::map<Element, std::size_t>> idx(s.arity());
  for (std::size_t k = 0; k < s.arity(); ++k)
    for (std::size_t i = 0; i < s.component(k).size(); ++i)
      idx[k].emplace(s.component(k).members()[i], i);
  std::vector<std::vector<std::size_t>> rows;
  rows.reserve(s.relation().size());
  for (const Row& row : s.relation()) {
    if (row.size() != s.arity())
      throw UsageError("system " + s.name() + " fails component validation");
    std::vector<std::size_t> r(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      auto it = idx[k].find(row[k]);
      if (it == idx[k].end())
        throw UsageError("system " + s.name() +
                         " fails component validation");
      r[k] = it->second;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// Backtracking over map assignments in position-major, lexicographic element
// order; candidates tried in lexicographic order, so the first-found
// morphism is canonical. Two prunes: a partial map must leave every source
// row some compatible target row, and unassigned sources must still be able
// to cover unreached targets.
class HomomorphismSearch {
 public:
  HomomorphismSearch(const AbstractSystem& s1, const AbstractSystem& s2,
                     const SearchBudget& budget)
      : s1_(s1), s2_(s2), budget_(budget) {}

  SearchResult run() {
    const std::size_t arity = s1_.arity();
    start_ = std::chrono::steady_clock::now();

    for (std::size_t k = 0; k < arity; ++k)
      if (s2_.component(k).size() > s1_.component(k).size())
        return {SearchOutcome::None, std::nullopt, 0};  // pigeonhole

    // Index the relations by carrier position.
    rows1_ = index_rows(s1_);
    rows2_ = index_rows(s2_);
    words_ = (rows2_.size() + 63) / 64;
    target_index_.resize(arity);
    rows_with_.resize(arity);
    assigned_.resize(arity);
    reach_count_.resize(arity);
    unreached_.resize(arity);
    remaining_.resize(arity);
    for (std::size_t k = 0; k < arity; ++k) {
      const std::size_t n2 = s2_.component(k).size();
      target_index_[k].assign(n2, std::vector<std::uint64_t>(words_, 0));
      for (std::size_t r = 0; r < rows2_.size(); ++r)
        set_bit(target_index_[k][rows2_[r][k]], r);
      rows_with_[k].assign(s1_.component(k).size(), {});
      for (std::size_t r = 0; r < rows1_.size(); ++r)
        rows_with_[k][rows1_[r][k]].push_back(r);
      assigned_[k].assign(s1_.component(k).size(), kUnassigned);
      reach_count_[k].assign(n2, 0);
      unreached_[k] = n2;
      remaining_[k] = s1_.component(k).size();
    }
    compat_.assign(rows1_.size(), std::vector<std::uint64_t>(words_, 0));
    for (auto& bits : compat_) {
      for (std::size_t r = 0; r < rows2_.size(); ++r) set_bit(bits, r);
    }

    switch (extend(0, 0)) {
      case Step::Found: {
        Morphism m;
        m.maps.resize(arity);
        for (std::size_t k = 0; k < arity; ++k)
          for (std::size_t i = 0; i < assigned_[k].size(); ++i)
            m.maps[k].set(s1_.component(k).members()[i],
                          s2_.component(k).members()[assigned_[k][i]]);
        return {SearchOutcome::Found, std::move(m), tries_};
      }
      case Step::Exhausted:
        return {SearchOutcome::None, std::nullopt, tries_};
      case Step::OutOfBudget:
        return {SearchOutcome::BudgetExhausted, std::nullopt, tries_};
    }
    return {SearchOutcome::None, std::nullopt, tries_};
  }

 private:
  enum class Step { Found, Exhausted, OutOfBudget };
  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

  static void set_bit(std::vector<std::uint64_t>& bits, std::size_t i) {
    bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  static bool all_zero(const std::vector<std::uint64_t>& bits) {
    for (std::uint64_t w : bits)
      if (w) return false;
    return true;
  }

  bool out_of_budget() {
    if (tries_ > budget_.max_assignments) return true;
    if ((tries_ & 0x3ff) == 0) {
      const auto elapsed = std::chrono::duration<double>(
          std::chrono::steady_clock::now() - start_);
      if (elapsed.count() > budget_.max_seconds) return true;
    }
    return false;
  }

  Step extend(std::size_t k, std::size_t i) {
    // Advance to the next unassigned variable in position-major order.
    while (k < assigned_.size() && i >= assigned_[k].size()) {
      ++k;
      i = 0;
    }
    if (k == assigned_.size()) return Step::Found;

    for (std::size_t j = 0; j < reach_count_[k].size(); ++j) {
      ++tries_;
      if (out_of_budget()) return Step::OutOfBudget;

      // Surjectivity: after this assignment, unassigned sources at k must
      // still be able to cover the unreached targets at k.
      const std::size_t unreached_after =
          unreached_[k] - (reach_count_[k][j] == 0 ? 1 : 0);
      if (unreached_after > remaining_[k] - 1) continue;

      // Preservation: narrow the compatible target rows of every source row
      // carrying element i at position k.
      std::vector<std::pair<std::size_t, std::vector<std::uint64_t>>> trail;
      bool dead = false;
      for (std::size_t r : rows_with_[k][i]) {
        trail.emplace_back(r, compat_[r]);
        auto& bits = compat_[r];
        const auto& mask = target_index_[k][j];
        for (std::size_t w = 0; w < words_; ++w) bits[w] &= mask[w];
        if (all_zero(bits)) {
          dead = true;
          break;
        }
      }
      if (!dead) {
        assigned_[k][i] = j;
        if (reach_count_[k][j]++ == 0) --unreached_[k];
        --remaining_[k];

        Step step = extend(k, i + 1);
        if (step != Step::Exhausted) return step;

        ++remaining_[k];
        if (--reach_count_[k][j] == 0) ++unreached_[k];
        assigned_[k][i] = kUnassigned;
      }
      for (auto it = trail.rbegin(); it != trail.rend(); ++it)
        compat_[it->first] = std::move(it->second);
    }
    return Step::Exhausted;
  }

  const AbstractSystem& s1_;
  const AbstractSystem& s2_;
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t tries_ = 0;
  std::size_t words_ = 0;
  std::vector<std::vector<std::size_t>> rows1_, rows2_;
  std::vector<std::vector<std::vector<std::uint64_t>>> target_index_;
  std::vector<std::vector<std::vector<std::size_t>>> rows_with_;
  std::vector<std::vector<std::size_t>> assigned_;
  std::vector<std::vector<std::size_t>> reach_count_;
  std::vector<std::size_t> unreached_, remaining_;
  std::vector<std::vector<std::uint64_t>> compat_;
};

}  // namespace detail

/// Deterministic backtracking search for a homomorphism. The first morphism
/// under the canonical (position-major, lexicographic) order is returned;
/// exhausting the search space yields None, exceeding the budget yields
/// BudgetExhausted.
inline SearchResult find_homomorphism(const AbstractSystem& s1,
                                      const AbstractSystem& s2,
                                      const SearchBudget& budget = {},
                                      const Limits& limits =
                                          Limits::defaults()) {
  if (budget.max_assignments == 0 || budget.max_seconds <= 0)
    throw UsageError("search budget must be positive");
  if (s1.arity() != s2.arity())
    throw UsageError("find_homomorphism: arity mismatch");
  for (const AbstractSystem* s : {&s1, &s2})
    for (const ComponentSet& c : s->components())
      if (c.size() > limits.max_set_size)
        throw UsageError("carrier " + c.name() +
                         " exceeds the configured size bound");
  return detail::HomomorphismSearch(s1, s2, budget).run();
}

inline SearchResult find_homomorphism(const InputOutputSystem& s1,
                                      const InputOutputSystem& s2,
                                      const SearchBudget& budget = {},
                                      const Limits& limits =
                                          Limits::defaults()) {
  detail::expect_matching_io(s1, s2);
  return find_homomorphism(s1.base(), s2.base(), budget, limits);
}

/// Unpruned exhaustive oracle: enumerates every componentwise map family and
/// keeps those satisfying the onto and preservation clauses. Carriers are
/// capped at five members each.
inline std::vector<Morphism> enumerate_all(const AbstractSystem& s1,
                                           const AbstractSystem& s2) {
  constexpr std::size_t kCap = 5;
  if (s1.arity() != s2.arity())
    throw UsageError("enumerate_all: arity mismatch");
  for (const AbstractSystem* s : {&s1, &s2})
    for (const ComponentSet& c : s->components())
      if (c.size() > kCap)
        throw UsageError("enumerate_all: carrier " + c.name() +
                         " exceeds the hard cap of 5");

  const std::size_t arity = s1.arity();
  std::vector<std::size_t> sizes1(arity), sizes2(arity);
  std::vector<std::size_t> var_pos;  // position owning each variable
  for (std::size_t k = 0; k < arity; ++k) {
    sizes1[k] = s1.component(k).size();
    sizes2[k] = s2.component(k).size();
    for (std::size_t i = 0; i < sizes1[k]; ++i) var_pos.push_back(k);
  }
  const std::size_t vars = var_pos.size();

  const auto rows1 = detail::index_rows(s1);
  const auto rows2 = detail::index_rows(s2);
  std::set<std::vector<std::size_t>> targets(rows2.begin(), rows2.end());

  // assignment[k][i]: image index of the i-th source element at position k.
  std::vector<std::vector<std::size_t>> assignment(arity);
  for (std::size_t k = 0; k < arity; ++k) assignment[k].assign(sizes1[k], 0);

  std::vector<Morphism> out;
  std::vector<std::size_t> odometer(vars, 0);
  std::vector<std::size_t> mapped(arity);
  for (;;) {
    std::size_t v = 0;
    for (std::size_t k = 0; k < arity; ++k)
      for (std::size_t i = 0; i < sizes1[k]; ++i, ++v)
        assignment[k][i] = odometer[v];

    bool ok = true;
    for (std::size_t k = 0; ok && k < arity; ++k) {
      std::uint32_t reached = 0;
      for (std::size_t j : assignment[k]) reached |= std::uint32_t{1} << j;
      ok = reached == (std::uint32_t{1} << sizes2[k]) - 1;  // onto
    }
    for (std::size_t r = 0; ok && r < rows1.size(); ++r) {
      for (std::size_t k = 0; k < arity; ++k)
        mapped[k] = assignment[k][rows1[r][k]];
      ok = targets.count(mapped) != 0;
    }
    if (ok) {
      Morphism m;
      m.maps.resize(arity);
      for (std::size_t k = 0; k < arity; ++k)
        for (std::size_t i = 0; i < sizes1[k]; ++i)
          m.maps[k].set(s1.component(k).members()[i],
                        s2.component(k).members()[assignment[k][i]]);
      out.push_back(std::move(m));
    }

    // Advance the odometer (last variable fastest).
    std::size_t v2 = vars;
    bool wrapped = true;
    while (v2 > 0) {
      --v2;
      if (++odometer[v2] < sizes2[var_pos[v2]]) {
        wrapped = false;
        break;
      }
      odometer[v2] = 0;
    }
    if (wrapped) break;
  }
  return out;
}

inline std::vector<Morphism> enumerate_all(const InputOutputSystem& s1,
                                           const InputOutputSystem& s2) {
  detail::expect_matching_io(s1, s2);
  return enumerate_all(s1.base(), s2.base());
}

}  // namespace astlab
