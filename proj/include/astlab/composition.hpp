#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "astlab/element.hpp"
#include "astlab/error.hpp"
#include "astlab/limits.hpp"
#include "astlab/system.hpp"

namespace astlab {

inline constexpr std::size_t kUnlimitedDepth =
    std::numeric_limits<std::size_t>::max();

/// Flattens nested tuples left-to-right up to the given depth; atoms are
/// unchanged. Unlimited-depth flattening is idempotent.
inline Element flatten(const Element& e, std::size_t depth = kUnlimitedDepth) {
  if (e.is_atom() || depth == 0) return e;
  std::vector<Element> out;
  for (const Element& child : e.parts()) {
    Element f = flatten(child, depth - 1);
    if (f.is_tuple())
      for (const Element& p : f.parts()) out.push_back(p);
    else
      out.push_back(std::move(f));
  }
  return Element::tuple(std::move(out));
}

/// Rebuilds a left-nested pair spine ((..(u1, u2)..), un) as the flat
/// n-tuple (u1, ..., un) without touching the components themselves.
/// This is the "redefinition of sets" used when a folded binary composition
/// is compared against an n-ary tuple carrier.
inline Element unnest_left(const Element& e, std::size_t arity) {
  if (arity == 0) throw UsageError("unnest_left: zero arity");
  if (arity == 1) return e;
  if (!e.is_tuple() || e.parts().size() != 2)
    throw UsageError("unnest_left: element " + e.text() +
                     " is not a left-nested pair spine");
  Element left = unnest_left(e.parts()[0], arity - 1);
  std::vector<Element> out;
  if (arity == 2) {
    out.push_back(std::move(left));
  } else {
    for (const Element& p : left.parts()) out.push_back(p);
  }
  out.push_back(e.parts()[1]);
  return Element::tuple(std::move(out));
}

namespace detail {

inline void check_relation_cap(std::size_t size, const Limits& limits) {
  if (size > limits.max_relation_size)
    throw UsageError("relation size cap exceeded (" + std::to_string(size) +
                     " > " + std::to_string(limits.max_relation_size) + ")");
}

inline IoPartition shared_partition(const InputOutputSystem& s1,
                                    const InputOutputSystem& s2,
                                    const char* op) {
  if (s1.arity() != s2.arity() ||
      s1.input_positions() != s2.input_positions() ||
      s1.output_positions() != s2.output_positions())
    throw UsageError(std::string(op) +
                     ": operands must have matching component shape");
  return IoPartition{s1.input_positions(), s2.output_positions()};
}

}  // namespace detail

/// Parallel connection: the componentwise product system. Each component of
/// the result is the product of the operands' components at that position,
/// and a result row pairs one row of each operand, so
/// |result| = |s1.relation| * |s2.relation|.
inline InputOutputSystem parallel_connect(
    const InputOutputSystem& s1, const InputOutputSystem& s2,
    std::string name = "", const Limits& limits = Limits::defaults()) {
  IoPartition io = detail::shared_partition(s1, s2, "parallel_connect");
  if (name.empty()) name = s1.name() + "_par_" + s2.name();
  detail::check_relation_cap(s1.relation().size() * s2.relation().size(),
                             limits);
  std::vector<ComponentSet> comps;
  for (std::size_t k = 0; k < s1.arity(); ++k)
    comps.push_back(product_set(s1.base().component(k), s2.base().component(k),
                                name + "_c" + std::to_string(k)));
  Relation rel;
  for (const Row& r1 : s1.relation())
    for (const Row& r2 : s2.relation()) {
      Row row;
      row.reserve(r1.size());
      for (std::size_t k = 0; k < r1.size(); ++k)
        row.push_back(Element::pair(r1[k], r2[k]));
      rel.insert(std::move(row));
    }
  return InputOutputSystem(
      AbstractSystem(std::move(name), std::move(comps), std::move(rel)),
      std::move(io));
}

/// N-way parallel connection with flat tuple carriers: component k of the
/// result holds the n-tuples of the operands' members at position k. Used
/// where a joint system is defined directly over n-tuple component sets.
inline FunctionalSystem parallel_product(
    std::span<const FunctionalSystem> systems, std::string name,
    const Limits& limits = Limits::defaults()) {
  if (systems.size() < 2)
    throw UsageError("parallel_product: need at least two systems");
  const std::size_t arity = systems[0].base().arity();
  for (const FunctionalSystem& s : systems)
    detail::shared_partition(systems[0].io(), s.io(), "parallel_product");

  std::vector<ComponentSet> comps;
  for (std::size_t k = 0; k < arity; ++k) {
    // All member combinations at position k, as flat n-tuples.
    ElementSet members;
    std::vector<Element> acc;
    auto emit = [&](auto&& self) -> void {
      if (acc.size() == systems.size()) {
        members.insert(Element::tuple(acc));
        return;
      }
      for (const Element& e :
           systems[acc.size()].base().component(k).members()) {
        acc.push_back(e);
        self(self);
        acc.pop_back();
      }
    };
    emit(emit);
    comps.emplace_back(name + "_c" + std::to_string(k), std::move(members));
  }

  std::size_t count = 1;
  for (const FunctionalSystem& s : systems) count *= s.relation().size();
  detail::check_relation_cap(count, limits);

  Relation rel;
  std::vector<const Row*> pick(systems.size());
  auto emit_rows = [&](auto&& self, std::size_t i) -> void {
    if (i == systems.size()) {
      Row row;
      row.reserve(arity);
      for (std::size_t k = 0; k < arity; ++k) {
        std::vector<Element> entry;
        entry.reserve(systems.size());
        for (const Row* r : pick) entry.push_back((*r)[k]);
        row.push_back(Element::tuple(std::move(entry)));
      }
      rel.insert(std::move(row));
      return;
    }
    for (const Row& r : systems[i].relation()) {
      pick[i] = &r;
      self(self, i + 1);
    }
  };
  emit_rows(emit_rows, 0);

  return FunctionalSystem::make(InputOutputSystem(
      AbstractSystem(std::move(name), std::move(comps), std::move(rel)),
      IoPartition{systems[0].io().input_positions(),
                  systems[0].io().output_positions()}));
}

/// Designates the shared coordinate Z of a cascade: an output position of the
/// left operand and an input position of the right operand carrying equal
/// component sets.
struct CascadeBinding {
  std::size_t left_z_position;
  std::size_t right_z_position;
};

/// Cascade connection: joins rows of s1 and s2 that agree on the shared Z
/// coordinate and eliminates it. A result row exists iff some z witnesses
/// the join; distinct witnesses yielding the same row collapse.
///
/// Result component order is input-major: s1 inputs, s2 inputs (minus Z),
/// then s1 outputs (minus Z), s2 outputs.
inline InputOutputSystem cascade_connect(
    const InputOutputSystem& s1, const InputOutputSystem& s2,
    const CascadeBinding& binding, std::string name = "",
    const Limits& limits = Limits::defaults()) {
  const auto& louts = s1.output_positions();
  const auto& rins = s2.input_positions();
  if (std::find(louts.begin(), louts.end(), binding.left_z_position) ==
      louts.end())
    throw UsageError("cascade: left Z position " +
                     std::to_string(binding.left_z_position) +
                     " is not an output of " + s1.name());
  if (std::find(rins.begin(), rins.end(), binding.right_z_position) ==
      rins.end())
    throw UsageError("cascade: right Z position " +
                     std::to_string(binding.right_z_position) +
                     " is not an input of " + s2.name());
  const ComponentSet& z1 = s1.base().component(binding.left_z_position);
  const ComponentSet& z2 = s2.base().component(binding.right_z_position);
  if (!z1.same_members(z2))
    throw ConstructionError("cascade binding failure: " + z1.name() +
                            " and " + z2.name() + " differ as sets");
  if (name.empty()) name = s1.name() + "_casc_" + s2.name();

  // Positions of the result, in input-major order.
  std::vector<std::pair<int, std::size_t>> layout;  // (operand, position)
  for (std::size_t p : s1.input_positions()) layout.emplace_back(0, p);
  for (std::size_t p : rins)
    if (p != binding.right_z_position) layout.emplace_back(1, p);
  const std::size_t n_inputs = layout.size();
  for (std::size_t p : louts)
    if (p != binding.left_z_position) layout.emplace_back(0, p);
  for (std::size_t p : s2.output_positions()) layout.emplace_back(1, p);

  std::vector<ComponentSet> comps;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto& [side, p] = layout[k];
    const ComponentSet& c =
        side == 0 ? s1.base().component(p) : s2.base().component(p);
    comps.emplace_back(name + "_c" + std::to_string(k), c.members());
  }

  Relation rel;
  for (const Row& r1 : s1.relation())
    for (const Row& r2 : s2.relation()) {
      if (r1[binding.left_z_position] != r2[binding.right_z_position])
        continue;
      Row row;
      row.reserve(layout.size());
      for (const auto& [side, p] : layout)
        row.push_back(side == 0 ? r1[p] : r2[p]);
      rel.insert(std::move(row));
      detail::check_relation_cap(rel.size(), limits);
    }

  IoPartition io;
  for (std::size_t k = 0; k < n_inputs; ++k) io.inputs.push_back(k);
  for (std::size_t k = n_inputs; k < layout.size(); ++k)
    io.outputs.push_back(k);
  return InputOutputSystem(
      AbstractSystem(std::move(name), std::move(comps), std::move(rel)),
      std::move(io));
}

}  // namespace astlab
