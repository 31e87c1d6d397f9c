#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "astlab/element.hpp"
#include "astlab/error.hpp"
#include "astlab/learning.hpp"
#include "astlab/system.hpp"

namespace astlab {

/// Deterministic 64-bit generator (splitmix64). Results do not depend on the
/// standard library's distribution implementations, so identical seeds give
/// identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n); rejection sampling keeps it bias-free.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below(0)");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform in the inclusive range [lo, hi].
  std::size_t range(std::size_t lo, std::size_t hi) {
    if (lo > hi) throw UsageError("Rng::range: empty range");
    return lo + static_cast<std::size_t>(below(hi - lo + 1));
  }

  bool coin() { return below(2) == 1; }

 private:
  std::uint64_t state_;
};

namespace gen {

/// Carrier of fresh atoms prefix1..prefixN.
inline ComponentSet atom_carrier(const std::string& name,
                                 const std::string& prefix, std::size_t n) {
  ElementSet members;
  for (std::size_t i = 1; i <= n; ++i)
    members.insert(Element::atom(prefix + std::to_string(i)));
  return ComponentSet(name, std::move(members));
}

inline ComponentSet atom_carrier(Rng& rng, const std::string& name,
                                 const std::string& prefix, std::size_t min,
                                 std::size_t max) {
  return atom_carrier(name, prefix, rng.range(min, max));
}

/// A uniformly drawn subset of the pool with exactly `count` members.
inline ElementSet pick_subset(Rng& rng, const std::vector<Element>& pool,
                              std::size_t count) {
  if (count > pool.size())
    throw UsageError("pick_subset: count exceeds pool size");
  ElementSet out;
  while (out.size() < count) out.insert(pool[rng.below(pool.size())]);
  return out;
}

inline InputOutputSystem binary_io(std::string name, ComponentSet in,
                                   ComponentSet out, Relation rel) {
  std::vector<ComponentSet> comps{std::move(in), std::move(out)};
  return InputOutputSystem(
      AbstractSystem(std::move(name), std::move(comps), std::move(rel)),
      IoPartition{{0}, {1}});
}

inline InputOutputSystem ternary_io(std::string name, ComponentSet in1,
                                    ComponentSet in2, ComponentSet out,
                                    Relation rel) {
  std::vector<ComponentSet> comps{std::move(in1), std::move(in2),
                                  std::move(out)};
  return InputOutputSystem(
      AbstractSystem(std::move(name), std::move(comps), std::move(rel)),
      IoPartition{{0, 1}, {2}});
}

/// A total function domain -> codomain drawn uniformly among all such
/// functions.
inline InputOutputSystem total_function(Rng& rng, std::string name,
                                        const ComponentSet& domain,
                                        const ComponentSet& codomain) {
  Relation rel;
  for (const Element& d : domain.members()) {
    const Element& out = codomain.members()[rng.below(codomain.size())];
    rel.insert(Row{d, out});
  }
  return binary_io(std::move(name), domain, codomain, std::move(rel));
}

/// A total function (a, b) -> codomain over two input components.
inline InputOutputSystem total_function2(Rng& rng, std::string name,
                                         const ComponentSet& in1,
                                         const ComponentSet& in2,
                                         const ComponentSet& codomain) {
  Relation rel;
  for (const Element& a : in1.members())
    for (const Element& b : in2.members()) {
      const Element& out = codomain.members()[rng.below(codomain.size())];
      rel.insert(Row{a, b, out});
    }
  return ternary_io(std::move(name), in1, in2, codomain, std::move(rel));
}

/// A random learning system: carriers of drawn sizes, data a non-empty
/// subset of input x output, algorithm and hypotheses uniform total
/// functions on the drawn carriers.
inline LearningSystem learning_system(Rng& rng, const std::string& name,
                                      std::size_t min_size,
                                      std::size_t max_size) {
  ComponentSet x = atom_carrier(rng, name + "_X", name + "x", min_size,
                                max_size);
  ComponentSet y = atom_carrier(rng, name + "_Y", name + "y", min_size,
                                max_size);
  ComponentSet t = atom_carrier(rng, name + "_P", name + "t", min_size,
                                max_size);
  std::vector<Element> pool;
  for (const Element& xe : x.members())
    for (const Element& ye : y.members()) pool.push_back(Element::pair(xe, ye));
  const std::size_t nd = rng.range(1, std::min(max_size, pool.size()));
  ComponentSet d(name + "_D", pick_subset(rng, pool, nd));
  InputOutputSystem a = total_function(rng, name + "_A", d, t);
  InputOutputSystem h = total_function2(rng, name + "_H", t, x, y);
  return build_learning_system(name, a, h, LearningRoles{d, t, x, y});
}

/// A random input-output system over two atom carriers: each (x, y) pair is
/// independently kept with probability 1/2.
inline InputOutputSystem io_system(Rng& rng, const std::string& name,
                                   std::size_t min_size,
                                   std::size_t max_size) {
  ComponentSet x = atom_carrier(rng, name + "_X", name + "x", min_size,
                                max_size);
  ComponentSet y = atom_carrier(rng, name + "_Y", name + "y", min_size,
                                max_size);
  Relation rel;
  for (const Element& xe : x.members())
    for (const Element& ye : y.members())
      if (rng.coin()) rel.insert(Row{xe, ye});
  return binary_io(name, std::move(x), std::move(y), std::move(rel));
}

/// A quotient of the given system: onto maps to smaller carriers and the
/// image relation, so a homomorphism exists by construction.
inline InputOutputSystem quotient_of(Rng& rng, const InputOutputSystem& s,
                                     const std::string& name) {
  std::vector<std::vector<std::size_t>> maps(s.arity());
  std::vector<ComponentSet> comps;
  for (std::size_t k = 0; k < s.arity(); ++k) {
    const std::size_t n1 = s.base().component(k).size();
    const std::size_t n2 = rng.range(1, n1);
    // Force the first n2 sources onto distinct targets, then fill freely.
    maps[k].resize(n1);
    for (std::size_t i = 0; i < n1; ++i)
      maps[k][i] = i < n2 ? i : rng.below(n2);
    comps.push_back(atom_carrier(name + "_c" + std::to_string(k),
                                 name + "q" + std::to_string(k), n2));
  }
  Relation rel;
  for (const Row& row : s.relation()) {
    Row image;
    image.reserve(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& members = s.base().component(k).members();
      const std::size_t i =
          std::lower_bound(members.begin(), members.end(), row[k]) -
          members.begin();
      image.push_back(comps[k].members()[maps[k][i]]);
    }
    rel.insert(std::move(image));
  }
  return InputOutputSystem(
      AbstractSystem(name, std::move(comps), std::move(rel)),
      IoPartition{s.input_positions(), s.output_positions()});
}

}  // namespace gen
}  // namespace astlab
