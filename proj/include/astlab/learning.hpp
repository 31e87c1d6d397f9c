#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "astlab/composition.hpp"
#include "astlab/element.hpp"
#include "astlab/error.hpp"
#include "astlab/system.hpp"

namespace astlab {

/// The four plain component-set roles of a learning system. The algorithm
/// and hypothesis edge sets are derived from the functional relations.
struct LearningRoles {
  ComponentSet data;    // D
  ComponentSet params;  // parameters
  ComponentSet input;   // X
  ComponentSet output;  // Y
};

/// How the data carrier is constrained. Plain learning systems require every
/// data point to be an (input, output) pair; constructions that override the
/// carrier (transfer, meta, joint multi-task) validate their own membership
/// rule before assembly.
enum class DataCarrier { PairsOfInputOutput, Composite };

// Positions within the induced six-component relation.
inline constexpr std::size_t kPosAlgorithm = 0;
inline constexpr std::size_t kPosData = 1;
inline constexpr std::size_t kPosParams = 2;
inline constexpr std::size_t kPosHypotheses = 3;
inline constexpr std::size_t kPosInput = 4;
inline constexpr std::size_t kPosOutput = 5;

/// A learning system: an algorithm (data -> parameters), a hypothesis
/// relation (parameters x input -> output), the four carrier sets, and the
/// induced six-component relation tying them together. Every value is
/// immutable after construction.
class LearningSystem {
 public:
  /// Assembles the value without invariant checks. Checked construction goes
  /// through build_learning_system; this entry point exists so tests and
  /// negative controls can build deliberately broken systems.
  static LearningSystem assemble_unchecked(std::string name,
                                           FunctionalSystem algorithm,
                                           FunctionalSystem hypotheses,
                                           LearningRoles roles,
                                           AbstractSystem induced,
                                           DataCarrier carrier) {
    return LearningSystem(std::move(name), std::move(algorithm),
                          std::move(hypotheses), std::move(roles),
                          std::move(induced), carrier);
  }

  const std::string& name() const { return name_; }
  const FunctionalSystem& algorithm() const { return algorithm_; }
  const FunctionalSystem& hypotheses() const { return hypotheses_; }
  const ComponentSet& data() const { return roles_.data; }
  const ComponentSet& params() const { return roles_.params; }
  const ComponentSet& input() const { return roles_.input; }
  const ComponentSet& output() const { return roles_.output; }
  const AbstractSystem& induced() const { return induced_; }
  DataCarrier data_carrier() const { return carrier_; }

  /// The per-system atom standing in for "no parameter" when data-only
  /// knowledge is encoded as (data, parameter) pairs.
  Element designated_null_param() const {
    return Element::atom("__null_" + name_);
  }

  /// The system at the elementary level of abstraction: (data, input) as
  /// input coordinates, output as the output coordinate.
  InputOutputSystem elementary_view() const {
    AbstractSystem p = project(induced_, {kPosData, kPosInput, kPosOutput},
                               name_ + "_elem");
    return InputOutputSystem(std::move(p), IoPartition{{0, 1}, {2}});
  }

 private:
  LearningSystem(std::string name, FunctionalSystem algorithm,
                 FunctionalSystem hypotheses, LearningRoles roles,
                 AbstractSystem induced, DataCarrier carrier)
      : name_(std::move(name)),
        algorithm_(std::move(algorithm)),
        hypotheses_(std::move(hypotheses)),
        roles_(std::move(roles)),
        induced_(std::move(induced)),
        carrier_(carrier) {}

  std::string name_;
  FunctionalSystem algorithm_;
  FunctionalSystem hypotheses_;
  LearningRoles roles_;
  AbstractSystem induced_;
  DataCarrier carrier_;
};

namespace detail {

inline void expect_shape(const InputOutputSystem& s, std::size_t arity,
                         std::size_t n_inputs, const std::string& what) {
  if (s.arity() != arity || s.input_positions().size() != n_inputs)
    throw ConstructionError(what + " has the wrong component shape: " +
                            s.name());
  for (std::size_t i = 0; i < n_inputs; ++i)
    if (s.input_positions()[i] != i)
      throw ConstructionError(what + " must list input positions first: " +
                              s.name());
}

inline void expect_carrier(const InputOutputSystem& s, std::size_t pos,
                           const ComponentSet& want, const std::string& what) {
  if (!s.base().component(pos).same_members(want))
    throw ConstructionError(what + ": component " + std::to_string(pos) +
                            " of " + s.name() + " does not equal " +
                            want.name());
}

inline FunctionalSystem make_functional(const InputOutputSystem& s,
                                        const std::string& not_a_function) {
  auto issues = validate_system(s.base());
  if (!issues.empty())
    throw ConstructionError(s.name() + ": " + issues.front().detail);
  if (!is_functional(s)) throw ConstructionError(not_a_function);
  return FunctionalSystem::make(s);
}

/// Edge elements of a binary functional relation, e.g. A's (d, theta) pairs.
inline ComponentSet edge_set(const FunctionalSystem& s, std::string name) {
  ElementSet members;
  for (const Row& row : s.relation()) {
    if (row.size() == 2)
      members.insert(Element::pair(row[0], row[1]));
    else
      members.insert(Element::tuple(std::vector<Element>(row.begin(),
                                                         row.end())));
  }
  if (members.empty())
    throw ConstructionError("empty relation cannot serve as a component set: " +
                            name);
  return ComponentSet(std::move(name), std::move(members));
}

}  // namespace detail

/// Builds a learning system from its algorithm and hypothesis relations,
/// validating carriers and assembling the induced relation: one row
/// ((d, theta), d, theta, (theta, x, y), x, y) per pair of an algorithm edge
/// and a hypothesis edge sharing theta. The defining biconditional holds on
/// the result by construction.
inline LearningSystem build_learning_system(
    std::string name, const InputOutputSystem& algorithm,
    const InputOutputSystem& hypotheses, LearningRoles roles,
    DataCarrier carrier = DataCarrier::PairsOfInputOutput) {
  detail::expect_shape(algorithm, 2, 1, "algorithm");
  detail::expect_shape(hypotheses, 3, 2, "hypotheses");
  detail::expect_carrier(algorithm, 0, roles.data, "algorithm carrier mismatch");
  detail::expect_carrier(algorithm, 1, roles.params,
                         "algorithm carrier mismatch");
  detail::expect_carrier(hypotheses, 0, roles.params,
                         "hypotheses carrier mismatch");
  detail::expect_carrier(hypotheses, 1, roles.input,
                         "hypotheses carrier mismatch");
  detail::expect_carrier(hypotheses, 2, roles.output,
                         "hypotheses carrier mismatch");

  if (carrier == DataCarrier::PairsOfInputOutput) {
    for (const Element& d : roles.data.members()) {
      const bool ok = d.is_tuple() && d.parts().size() == 2 &&
                      roles.input.contains(d.parts()[0]) &&
                      roles.output.contains(d.parts()[1]);
      if (!ok)
        throw ConstructionError("data carrier violation: " + d.text() +
                                " is not an (input, output) pair");
    }
  }

  FunctionalSystem a =
      detail::make_functional(algorithm, "algorithm not a function: " + name);
  FunctionalSystem h =
      detail::make_functional(hypotheses, "hypotheses not a function: " + name);

  ComponentSet a_edges = detail::edge_set(a, algorithm.name());
  ComponentSet h_edges = detail::edge_set(h, hypotheses.name());

  // Index hypothesis edges by theta.
  std::map<Element, std::vector<const Row*>> by_theta;
  for (const Row& row : h.relation()) by_theta[row[0]].push_back(&row);

  Relation induced;
  for (const Row& edge : a.relation()) {
    const Element& d = edge[0];
    const Element& theta = edge[1];
    auto it = by_theta.find(theta);
    if (it == by_theta.end()) continue;
    for (const Row* hrow : it->second) {
      induced.insert(Row{Element::pair(d, theta), d, theta,
                         Element::tuple({(*hrow)[0], (*hrow)[1], (*hrow)[2]}),
                         (*hrow)[1], (*hrow)[2]});
    }
  }

  std::vector<ComponentSet> comps{std::move(a_edges), roles.data, roles.params,
                                  std::move(h_edges), roles.input,
                                  roles.output};
  AbstractSystem ind(name + "_S", std::move(comps), std::move(induced));
  return LearningSystem::assemble_unchecked(std::move(name), std::move(a),
                                            std::move(h), std::move(roles),
                                            std::move(ind), carrier);
}

namespace detail {
inline std::string row_text(const Row& row) {
  std::string out = "(";
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out += ", ";
    out += row[k].text();
  }
  return out + ")";
}
}  // namespace detail

/// The defining biconditional, with a witness: (d, x, y) is in the (data,
/// input, output) projection of the induced relation iff some theta
/// witnesses it through the hypothesis and algorithm relations. Returns the
/// first violating (d, x, y) tuple, or nothing when the biconditional holds.
/// Works on hand-assembled systems as well as built ones.
inline std::optional<std::string> biconditional_violation(
    const LearningSystem& s) {
  std::set<Row> projected;
  for (const Row& row : s.induced().relation()) {
    if (row.size() != 6)
      return "induced tuple " + detail::row_text(row) +
             " does not have six components";
    projected.insert(Row{row[kPosData], row[kPosInput], row[kPosOutput]});
  }
  std::set<Row> witnessed;
  std::map<Element, std::vector<const Row*>> by_theta;
  for (const Row& row : s.hypotheses().relation())
    by_theta[row[0]].push_back(&row);
  for (const Row& edge : s.algorithm().relation()) {
    auto it = by_theta.find(edge[1]);
    if (it == by_theta.end()) continue;
    for (const Row* hrow : it->second)
      witnessed.insert(Row{edge[0], (*hrow)[1], (*hrow)[2]});
  }
  for (const Row& row : projected)
    if (!witnessed.count(row))
      return "tuple " + detail::row_text(row) +
             " is in the projection but has no theta witness";
  for (const Row& row : witnessed)
    if (!projected.count(row))
      return "tuple " + detail::row_text(row) +
             " has a theta witness but is missing from the projection";
  return std::nullopt;
}

inline bool check_biconditional(const LearningSystem& s) {
  return !biconditional_violation(s).has_value();
}

// ---------------------------------------------------------------------------
// Transfer learning
// ---------------------------------------------------------------------------

/// A transfer learning system: knowledge pairs drawn from the source's data
/// and parameters feed, together with target data, a transfer algorithm whose
/// hypotheses range over the target input and output.
class TransferLearningSystem {
 public:
  TransferLearningSystem(LearningSystem source, LearningSystem target,
                         ComponentSet knowledge, LearningSystem view)
      : source_(std::move(source)),
        target_(std::move(target)),
        knowledge_(std::move(knowledge)),
        view_(std::move(view)) {}

  const LearningSystem& source() const { return source_; }
  const LearningSystem& target() const { return target_; }
  const ComponentSet& knowledge() const { return knowledge_; }

  /// The transfer system as a learning system over (transfer data,
  /// transfer params, target input, target output).
  const LearningSystem& as_learning_system() const { return view_; }

  const ComponentSet& transfer_data() const { return view_.data(); }
  const ComponentSet& transfer_params() const { return view_.params(); }
  const FunctionalSystem& transfer_algorithm() const {
    return view_.algorithm();
  }
  const FunctionalSystem& transfer_hypotheses() const {
    return view_.hypotheses();
  }

 private:
  LearningSystem source_;
  LearningSystem target_;
  ComponentSet knowledge_;
  LearningSystem view_;
};

/// Builds knowledge pairs (d, null) from a data-only subset of the source's
/// data, using the source's designated null parameter atom.
inline ComponentSet knowledge_from_data(const LearningSystem& source,
                                        const ElementSet& data_subset,
                                        std::string name) {
  ElementSet members;
  for (const Element& d : data_subset) {
    if (!source.data().contains(d))
      throw UsageError("knowledge_from_data: " + d.text() +
                       " is not source data");
    members.insert(Element::pair(d, source.designated_null_param()));
  }
  if (members.empty()) throw ConstructionError("empty K_S");
  return ComponentSet(std::move(name), std::move(members));
}

/// Builds a transfer learning system. The transfer data carrier is the
/// declared domain of the transfer algorithm and must consist of
/// (target data, knowledge) pairs; the transfer algorithm must be total on
/// it. Knowledge members are (source data, source parameter) pairs, where
/// the designated null parameter is accepted alongside real parameters.
inline TransferLearningSystem build_transfer(
    const LearningSystem& source, const LearningSystem& target,
    const ComponentSet& knowledge, const InputOutputSystem& transfer_algorithm,
    const InputOutputSystem& transfer_hypotheses, std::string name) {
  if (knowledge.members().empty()) throw ConstructionError("empty K_S");
  const Element null_param = source.designated_null_param();
  for (const Element& k : knowledge.members()) {
    const bool pair_shape = k.is_tuple() && k.parts().size() == 2;
    const bool ok = pair_shape && source.data().contains(k.parts()[0]) &&
                    (source.params().contains(k.parts()[1]) ||
                     k.parts()[1] == null_param);
    if (!ok)
      throw ConstructionError("knowledge carrier violation: " + k.text() +
                              " is not a (source data, source parameter) pair");
  }

  detail::expect_shape(transfer_algorithm, 2, 1, "transfer algorithm");
  const ComponentSet& transfer_data = transfer_algorithm.base().component(0);
  for (const Element& d : transfer_data.members()) {
    const bool ok = d.is_tuple() && d.parts().size() == 2 &&
                    target.data().contains(d.parts()[0]) &&
                    knowledge.contains(d.parts()[1]);
    if (!ok)
      throw ConstructionError("transfer algorithm carrier mismatch: " +
                              d.text() +
                              " is not a (target data, knowledge) pair");
  }

  LearningRoles roles{transfer_data,
                      transfer_algorithm.base().component(1),
                      target.input(), target.output()};
  LearningSystem view =
      build_learning_system(name, transfer_algorithm, transfer_hypotheses,
                            roles, DataCarrier::Composite);
  if (!view.algorithm().total())
    throw ConstructionError("transfer algorithm not total on D: " + name);
  return TransferLearningSystem(source, target, knowledge, std::move(view));
}

// ---------------------------------------------------------------------------
// Multi-task learning
// ---------------------------------------------------------------------------

enum class Triviality { Trivial, Nontrivial };

/// N learning tasks joined into one learning system over flat tuple
/// carriers. The joint hypotheses are always the componentwise product; only
/// the joint algorithm distinguishes the trivial grouping from a genuinely
/// coupled one.
class MultiTaskLearningSystem {
 public:
  MultiTaskLearningSystem(std::vector<LearningSystem> tasks,
                          LearningSystem joint, Triviality triviality)
      : tasks_(std::move(tasks)),
        joint_(std::move(joint)),
        triviality_(triviality) {}

  const std::vector<LearningSystem>& tasks() const { return tasks_; }
  const LearningSystem& joint() const { return joint_; }
  Triviality triviality() const { return triviality_; }

 private:
  std::vector<LearningSystem> tasks_;
  LearningSystem joint_;
  Triviality triviality_;
};

/// The componentwise product of the tasks' algorithms (the "superficial
/// grouping"), over flat tuple carriers.
inline FunctionalSystem product_algorithm(
    std::span<const LearningSystem> tasks, std::string name,
    const Limits& limits = Limits::unbounded()) {
  std::vector<FunctionalSystem> algos;
  algos.reserve(tasks.size());
  for (const LearningSystem& t : tasks) algos.push_back(t.algorithm());
  return parallel_product(algos, std::move(name), limits);
}

/// Extensional comparison of a joint algorithm against the componentwise
/// product of the given tasks' algorithms.
inline Triviality classify_triviality_against(
    const FunctionalSystem& joint_algorithm,
    std::span<const LearningSystem> tasks) {
  FunctionalSystem product = product_algorithm(tasks, "product_reference");
  return joint_algorithm.relation() == product.relation()
             ? Triviality::Trivial
             : Triviality::Nontrivial;
}

inline Triviality classify_triviality(const MultiTaskLearningSystem& m) {
  return classify_triviality_against(m.joint().algorithm(), m.tasks());
}

/// Builds a multi-task learning system over N >= 2 tasks. Joint carriers are
/// the flat tuple products of the per-task carriers; the joint algorithm is
/// supplied and must map data tuples to parameter tuples.
inline MultiTaskLearningSystem build_multitask(
    std::vector<LearningSystem> tasks, const InputOutputSystem& joint_algorithm,
    std::string name, const Limits& limits = Limits::unbounded()) {
  if (tasks.size() < 2)
    throw UsageError("multi-task construction requires at least two tasks");

  auto tuple_carrier = [&](auto&& role, const char* suffix) {
    ElementSet members;
    std::vector<Element> acc;
    auto emit = [&](auto&& self) -> void {
      if (acc.size() == tasks.size()) {
        members.insert(Element::tuple(acc));
        return;
      }
      for (const Element& e : role(tasks[acc.size()]).members()) {
        acc.push_back(e);
        self(self);
        acc.pop_back();
      }
    };
    emit(emit);
    return ComponentSet(name + suffix, std::move(members));
  };
  ComponentSet joint_data = tuple_carrier(
      [](const LearningSystem& t) -> const ComponentSet& { return t.data(); },
      "_D");
  ComponentSet joint_params = tuple_carrier(
      [](const LearningSystem& t) -> const ComponentSet& {
        return t.params();
      },
      "_P");

  detail::expect_shape(joint_algorithm, 2, 1, "joint algorithm");
  if (!joint_algorithm.base().component(0).same_members(joint_data) ||
      !joint_algorithm.base().component(1).same_members(joint_params))
    throw ConstructionError(
        "task arity mismatch: joint algorithm carriers do not match the "
        "task data/parameter tuples");

  std::vector<FunctionalSystem> hyps;
  hyps.reserve(tasks.size());
  for (const LearningSystem& t : tasks) hyps.push_back(t.hypotheses());
  FunctionalSystem joint_h = parallel_product(hyps, name + "_H", limits);

  LearningRoles roles{joint_data, joint_params,
                      joint_h.base().component(1),
                      joint_h.base().component(2)};
  LearningSystem joint = build_learning_system(
      name, joint_algorithm, joint_h.io(), roles, DataCarrier::Composite);
  Triviality triv =
      classify_triviality_against(joint.algorithm(), tasks);
  return MultiTaskLearningSystem(std::move(tasks), std::move(joint), triv);
}

// ---------------------------------------------------------------------------
// Meta-learning
// ---------------------------------------------------------------------------

/// A meta-learning system: a learning system whose hypotheses are algorithms
/// for an object-level system, whose inputs are the object's data, and whose
/// outputs are the object's parameters.
class MetaLearningSystem {
 public:
  MetaLearningSystem(LearningSystem meta, LearningSystem object_level)
      : meta_(std::move(meta)), object_(std::move(object_level)) {}

  const LearningSystem& meta() const { return meta_; }
  const LearningSystem& object_level() const { return object_; }

  /// The algorithm selected by one meta parameter: the slice
  /// { (d, theta) | (theta_m, d, theta) in H_m }.
  Relation hypothesis_slice(const Element& meta_param) const {
    Relation slice;
    for (const Row& row : meta_.hypotheses().relation())
      if (row[0] == meta_param) slice.insert(Row{row[1], row[2]});
    return slice;
  }

 private:
  LearningSystem meta_;
  LearningSystem object_;
};

/// Checks every meta-learning invariant, returning the first violation.
/// Usable on corrupted systems (negative controls), not just built ones.
inline std::optional<std::string> meta_invariant_violation(
    const MetaLearningSystem& m) {
  const LearningSystem& meta = m.meta();
  const LearningSystem& obj = m.object_level();
  if (!meta.input().same_members(obj.data()))
    return "meta input is not the object-level data";
  if (!meta.output().same_members(obj.params()))
    return "meta output is not the object-level parameters";
  std::set<Element> emitted;
  for (const Row& edge : meta.algorithm().relation()) emitted.insert(edge[1]);
  for (const Element& theta_m : meta.params().members()) {
    Relation slice = m.hypothesis_slice(theta_m);
    if (slice.empty()) {
      if (emitted.count(theta_m))
        return "dangling meta-parameter: " + theta_m.text() +
               " selects no hypothesis slice";
      continue;
    }
    std::set<Element> domain;
    for (const Row& row : slice) {
      if (!obj.data().contains(row[0]) || !obj.params().contains(row[1]))
        return "hypothesis slice at " + theta_m.text() +
               " leaves the object carriers";
      if (!domain.insert(row[0]).second)
        return "hypothesis slice at " + theta_m.text() + " is not a function";
    }
    if (domain.size() != obj.data().size())
      return "hypothesis slice at " + theta_m.text() +
             " is not total on the object data";
  }
  if (!check_biconditional(meta)) return "meta biconditional fails";
  return std::nullopt;
}

/// Builds a meta-learning system from an outer algorithm (meta data -> meta
/// parameters) and a hypothesis family relating (meta parameter, object
/// data, object parameter). Every meta parameter the outer algorithm emits
/// must select a total functional slice.
inline MetaLearningSystem build_meta(const InputOutputSystem& outer_algorithm,
                                     const InputOutputSystem& hypothesis_family,
                                     const LearningSystem& object_level,
                                     std::string name) {
  detail::expect_shape(outer_algorithm, 2, 1, "outer algorithm");
  detail::expect_shape(hypothesis_family, 3, 2, "hypothesis family");
  const ComponentSet& meta_params = outer_algorithm.base().component(1);
  if (!hypothesis_family.base().component(0).same_members(meta_params))
    throw ConstructionError(
        "cascade binding failure: outer algorithm parameters and hypothesis "
        "family index differ as sets");
  detail::expect_carrier(hypothesis_family, 1, object_level.data(),
                         "meta input carrier mismatch");
  detail::expect_carrier(hypothesis_family, 2, object_level.params(),
                         "meta output carrier mismatch");

  // Each emitted meta parameter must select an algorithm: a total
  // functional slice over the object data.
  std::map<Element, std::set<Element>> slice_domains;
  for (const Row& row : hypothesis_family.relation())
    slice_domains[row[0]].insert(row[1]);
  for (const Row& edge : outer_algorithm.relation()) {
    auto it = slice_domains.find(edge[1]);
    if (it == slice_domains.end())
      throw ConstructionError("dangling meta-parameter: " + edge[1].text() +
                              " selects no hypothesis slice");
    if (it->second.size() != object_level.data().size())
      throw ConstructionError("meta hypothesis slice at " + edge[1].text() +
                              " is not total on the object data");
  }

  LearningRoles roles{outer_algorithm.base().component(0), meta_params,
                      object_level.data(), object_level.params()};
  LearningSystem meta =
      build_learning_system(std::move(name), outer_algorithm,
                            hypothesis_family, roles, DataCarrier::Composite);
  MetaLearningSystem result(std::move(meta), object_level);
  if (auto violation = meta_invariant_violation(result))
    throw ConstructionError("meta invariant violation: " + *violation);
  return result;
}

}  // namespace astlab
