#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "astlab/composition.hpp"
#include "astlab/element.hpp"
#include "astlab/error.hpp"
#include "astlab/generator.hpp"
#include "astlab/homomorphism.hpp"
#include "astlab/learning.hpp"
#include "astlab/system.hpp"

namespace astlab {

/// Parameters of a randomized theorem check.
struct InstanceSpec {
  std::uint64_t seed = 42;
  std::size_t min_size = 1;  // per-carrier size range
  std::size_t max_size = 4;
  std::size_t task_count = 2;  // N for the multi-task theorem
  std::size_t trials = 100;
  bool mutate = false;  // single-tuple corruption negative control

  void validate() const {
    if (min_size < 1 || max_size > 6 || min_size > max_size)
      throw UsageError("carrier size range must satisfy 1 <= min <= max <= 6");
    if (trials < 1) throw UsageError("at least one trial required");
    if (task_count < 2 || task_count > 4)
      throw UsageError("task count must be between 2 and 4");
  }
};

enum class TheoremId { T1, T2, T3, Fig5 };

inline const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::Fig5: return "FIG5";
  }
  return "?";
}

struct TrialFailure {
  std::size_t trial;
  std::uint64_t seed;  // per-trial sub-seed, for replay
  std::string stage;
  std::string witness;
};

struct TheoremReport {
  TheoremId theorem;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::vector<TrialFailure> failures;
  // T2 only: trials whose non-product joint control broke the fold equality.
  std::size_t control_detections = 0;

  bool all_passed() const { return passes == trials; }
};

/// Canonical text rendering; byte-identical for identical specs.
inline std::string render_report(const TheoremReport& r) {
  std::string out = "[";
  out += to_string(r.theorem);
  out += "] trials=" + std::to_string(r.trials) +
         " passes=" + std::to_string(r.passes) +
         " failures=" + std::to_string(r.failures.size());
  if (r.theorem == TheoremId::T2)
    out += " controls=" + std::to_string(r.control_detections);
  out += "\n";
  for (const TrialFailure& f : r.failures) {
    out += "  trial=" + std::to_string(f.trial) +
           " seed=" + std::to_string(f.seed) + " stage=" + f.stage +
           " witness=" + f.witness + "\n";
  }
  return out;
}

namespace detail {

/// Internal cap for suite-built relations: derived carriers legitimately
/// exceed the model-layer defaults, but a runaway product (large task count
/// at the top of the size range) should fail a trial loudly, not exhaust
/// memory.
inline Limits suite_limits() {
  Limits l = Limits::unbounded();
  l.max_relation_size = std::size_t{1} << 20;
  return l;
}

using TrialBody =
    std::function<std::optional<TrialFailure>(std::size_t, std::uint64_t,
                                              TheoremReport&)>;

inline TheoremReport run_trials(TheoremId id, const InstanceSpec& spec,
                                const TrialBody& body) {
  spec.validate();
  TheoremReport report;
  report.theorem = id;
  report.trials = spec.trials;
  Rng root(spec.seed);
  for (std::size_t t = 0; t < spec.trials; ++t) {
    const std::uint64_t sub_seed = root.next();
    std::optional<TrialFailure> failure;
    try {
      failure = body(t, sub_seed, report);
    } catch (const std::exception& e) {
      failure = TrialFailure{t, sub_seed, "exception", e.what()};
    }
    if (failure)
      report.failures.push_back(std::move(*failure));
    else
      ++report.passes;
  }
  return report;
}

inline std::map<Row, Row> function_index(const FunctionalSystem& f) {
  std::map<Row, Row> idx;
  for (const Row& row : f.relation())
    idx.emplace(f.io().input_of(row), f.io().output_of(row));
  return idx;
}

inline const Row& look_up(const std::map<Row, Row>& idx, const Row& in) {
  auto it = idx.find(in);
  if (it == idx.end())
    throw ConstructionError("function lookup miss during stage assembly");
  return it->second;
}

/// Lexicographically first row of a relation, for single-tuple corruption.
inline Relation drop_first_row(const Relation& rel) {
  Relation out;
  bool dropped = false;
  for (const Row& row : rel) {
    if (!dropped) {
      dropped = true;
      continue;
    }
    out.insert(row);
  }
  return out;
}

/// A random transfer learning system into `target`, carrying the given
/// knowledge drawn from `source`.
inline TransferLearningSystem random_transfer(Rng& rng,
                                              const LearningSystem& source,
                                              const LearningSystem& target,
                                              const ComponentSet& knowledge,
                                              const std::string& name,
                                              std::size_t min_size,
                                              std::size_t max_size) {
  std::vector<Element> pool;
  for (const Element& dt : target.data().members())
    for (const Element& k : knowledge.members())
      pool.push_back(Element::pair(dt, k));
  const std::size_t nd = rng.range(1, std::min(max_size, pool.size()));
  ComponentSet d(name + "_D", gen::pick_subset(rng, pool, nd));
  ComponentSet theta = gen::atom_carrier(rng, name + "_P", name + "t",
                                         min_size, max_size);
  InputOutputSystem a = gen::total_function(rng, name + "_A", d, theta);
  InputOutputSystem h = gen::total_function2(rng, name + "_H", theta,
                                             target.input(), target.output());
  return build_transfer(source, target, knowledge, a, h, name);
}

struct TwoWayTransfer {
  LearningSystem base1, base2;      // the original systems
  TransferLearningSystem tr1, tr2;  // each transferring into one side
};

/// Two learning systems transferring data-only knowledge to each other,
/// encoded with the designated null parameter.
inline TwoWayTransfer random_two_way(Rng& rng, std::size_t min_size,
                                     std::size_t max_size) {
  LearningSystem s1 = gen::learning_system(rng, "s1", min_size, max_size);
  LearningSystem s2 = gen::learning_system(rng, "s2", min_size, max_size);
  auto data_knowledge = [&](const LearningSystem& src, const std::string& nm) {
    const std::size_t n = rng.range(1, src.data().size());
    return knowledge_from_data(
        src, gen::pick_subset(rng, src.data().members().items(), n), nm);
  };
  ComponentSet k12 = data_knowledge(s1, "K12");
  ComponentSet k21 = data_knowledge(s2, "K21");
  TransferLearningSystem tr1 =
      random_transfer(rng, s2, s1, k21, "tr1", min_size, max_size);
  TransferLearningSystem tr2 =
      random_transfer(rng, s1, s2, k12, "tr2", min_size, max_size);
  return TwoWayTransfer{std::move(s1), std::move(s2), std::move(tr1),
                        std::move(tr2)};
}

/// The two-way transfer pair as one six-component system: position k pairs
/// the k-th carriers of the two induced relations, with algorithm and
/// hypothesis edges regrouped componentwise so the carriers coincide with
/// the multi-task system built over the same tasks.
inline AbstractSystem pair_system(const LearningSystem& a,
                                  const LearningSystem& b, std::string name) {
  auto zip_entry = [](std::size_t k, const Element& e1, const Element& e2) {
    if (k == kPosAlgorithm)
      return Element::pair(Element::pair(e1.parts()[0], e2.parts()[0]),
                           Element::pair(e1.parts()[1], e2.parts()[1]));
    if (k == kPosHypotheses)
      return Element::tuple({Element::pair(e1.parts()[0], e2.parts()[0]),
                             Element::pair(e1.parts()[1], e2.parts()[1]),
                             Element::pair(e1.parts()[2], e2.parts()[2])});
    return Element::pair(e1, e2);
  };
  std::vector<ComponentSet> comps;
  for (std::size_t k = 0; k < 6; ++k) {
    ElementSet members;
    for (const Element& e1 : a.induced().component(k).members())
      for (const Element& e2 : b.induced().component(k).members())
        members.insert(zip_entry(k, e1, e2));
    comps.emplace_back(name + "_c" + std::to_string(k), std::move(members));
  }
  Relation rel;
  for (const Row& r1 : a.induced().relation())
    for (const Row& r2 : b.induced().relation()) {
      Row row;
      row.reserve(6);
      for (std::size_t k = 0; k < 6; ++k)
        row.push_back(zip_entry(k, r1[k], r2[k]));
      rel.insert(std::move(row));
    }
  return AbstractSystem(std::move(name), std::move(comps), std::move(rel));
}

}  // namespace detail

/// Theorem: two-way transfer learning systems are homomorphic to a
/// non-trivial multi-task learning system. Per trial: build the two-way
/// transfer pair, assemble the multi-task system with the product algorithm,
/// and check that (a) the identity component maps verify, (b) the joint
/// algorithm is non-trivial relative to the original systems, and (c) the
/// search rediscovers a morphism.
inline TheoremReport check_theorem1(const InstanceSpec& spec) {
  return detail::run_trials(
      TheoremId::T1, spec,
      [&spec](std::size_t t, std::uint64_t seed,
              TheoremReport&) -> std::optional<TrialFailure> {
        Rng rng(seed);
        detail::TwoWayTransfer tw =
            detail::random_two_way(rng, spec.min_size, spec.max_size);
        std::vector<LearningSystem> tasks{tw.tr1.as_learning_system(),
                                          tw.tr2.as_learning_system()};
        FunctionalSystem joint_alg = product_algorithm(tasks, "mt_A");
        MultiTaskLearningSystem mt =
            build_multitask(tasks, joint_alg.io(), "mt");
        AbstractSystem pair = detail::pair_system(tasks[0], tasks[1], "pair");

        if (spec.mutate) {
          AbstractSystem corrupted(
              mt.joint().induced().name(), mt.joint().induced().components(),
              detail::drop_first_row(mt.joint().induced().relation()));
          HomomorphismCheck broken =
              verify_homomorphism(pair, corrupted, identity_morphism(pair));
          if (!broken.holds)
            return TrialFailure{t, seed, "mutation:identity-homomorphism",
                                broken.witness};
          return std::nullopt;  // corruption went undetected: trial "passes"
        }

        HomomorphismCheck check = verify_homomorphism(
            pair, mt.joint().induced(), identity_morphism(pair));
        if (!check.holds)
          return TrialFailure{t, seed, "identity-homomorphism", check.witness};

        if (mt.triviality() != Triviality::Trivial)
          return TrialFailure{t, seed, "product-triviality",
                              "product joint classified non-trivial"};
        std::vector<LearningSystem> originals{tw.base1, tw.base2};
        if (classify_triviality_against(mt.joint().algorithm(), originals) !=
            Triviality::Nontrivial)
          return TrialFailure{
              t, seed, "triviality",
              "joint algorithm equals the original systems' product"};

        SearchResult found =
            find_homomorphism(pair, mt.joint().induced(),
                              SearchBudget{200000, 10.0}, suite_limits());
        if (found.outcome != SearchOutcome::Found)
          return TrialFailure{t, seed, "search",
                              "no morphism found within budget"};
        HomomorphismCheck sound = verify_homomorphism(
            pair, mt.joint().induced(), *found.morphism);
        if (!sound.holds)
          return TrialFailure{t, seed, "search-soundness", sound.witness};
        return std::nullopt;
      });
}

/// Theorem: trivial multi-task systems are a parallel connection of learning
/// systems. Per trial: fold the tasks' elementary views with the parallel
/// operator, reassociate the fold spine, and compare extensionally with the
/// trivial multi-task system's elementary relation. Each trial also runs a
/// non-product joint control whose detected inequality is counted.
inline TheoremReport check_theorem2(const InstanceSpec& spec) {
  return detail::run_trials(
      TheoremId::T2, spec,
      [&spec](std::size_t t, std::uint64_t seed,
              TheoremReport& report) -> std::optional<TrialFailure> {
        Rng rng(seed);
        const std::size_t n = spec.task_count;
        std::vector<LearningSystem> tasks;
        for (std::size_t i = 1; i <= n; ++i)
          tasks.push_back(gen::learning_system(rng, "t" + std::to_string(i),
                                               spec.min_size, spec.max_size));
        FunctionalSystem prod = product_algorithm(tasks, "mt_A");
        MultiTaskLearningSystem mt = build_multitask(tasks, prod.io(), "mt");
        if (mt.triviality() != Triviality::Trivial)
          return TrialFailure{t, seed, "triviality",
                              "product joint classified non-trivial"};

        InputOutputSystem fold = tasks[0].elementary_view();
        for (std::size_t i = 1; i < n; ++i)
          fold = parallel_connect(fold, tasks[i].elementary_view(), "fold",
                                  suite_limits());
        Relation flat;
        for (const Row& row : fold.relation())
          flat.insert(Row{unnest_left(row[0], n), unnest_left(row[1], n),
                          unnest_left(row[2], n)});

        if (spec.mutate) {
          Relation corrupted = detail::drop_first_row(flat);
          if (!(corrupted ==
                mt.joint().elementary_view().relation()))
            return TrialFailure{t, seed, "mutation:fold-equality",
                                "corrupted fold differs from the multi-task "
                                "relation"};
          return std::nullopt;
        }

        if (!(flat == mt.joint().elementary_view().relation()))
          return TrialFailure{t, seed, "fold-equality",
                              "flattened fold differs from the multi-task "
                              "relation"};

        // Negative control: a joint algorithm off the product by one edge
        // must classify non-trivial, and (generically) break the equality.
        const ComponentSet& joint_params = prod.base().component(1);
        if (joint_params.size() >= 2) {
          const Row& first = prod.relation().rows().front();
          Element other = joint_params.members()[0] == first[1]
                              ? joint_params.members()[1]
                              : joint_params.members()[0];
          Relation mutated;
          bool skipped_first = false;
          for (const Row& row : prod.relation()) {
            if (!skipped_first) {
              skipped_first = true;
              mutated.insert(Row{row[0], other});
            } else {
              mutated.insert(row);
            }
          }
          InputOutputSystem alt = gen::binary_io(
              "mt_A_alt", prod.base().component(0), joint_params,
              std::move(mutated));
          MultiTaskLearningSystem mt_alt =
              build_multitask(tasks, alt, "mt_alt");
          if (mt_alt.triviality() != Triviality::Nontrivial)
            return TrialFailure{t, seed, "control-triviality",
                                "mutated joint still classified trivial"};
          if (!(flat == mt_alt.joint().elementary_view().relation()))
            ++report.control_detections;
        }
        return std::nullopt;
      });
}

/// Theorem: meta-learning systems are a cascade connection of a learning
/// algorithm and a learning system. Per trial: cascade a random outer
/// algorithm with a parameterized hypothesis family over the shared meta
/// parameter set, cross-check the cascade against the witness scan, and
/// check every meta-learning invariant on the designated subsystem.
inline TheoremReport check_theorem3(const InstanceSpec& spec) {
  return detail::run_trials(
      TheoremId::T3, spec,
      [&spec](std::size_t t, std::uint64_t seed,
              TheoremReport&) -> std::optional<TrialFailure> {
        Rng rng(seed);
        LearningSystem obj =
            gen::learning_system(rng, "obj", spec.min_size, spec.max_size);
        ComponentSet meta_data = gen::atom_carrier(rng, "m_D", "md",
                                                   spec.min_size,
                                                   spec.max_size);
        ComponentSet meta_params = gen::atom_carrier(
            rng, "m_P", "mp", 1, std::min<std::size_t>(3, spec.max_size));
        InputOutputSystem outer =
            gen::total_function(rng, "m_A", meta_data, meta_params);
        InputOutputSystem family = gen::total_function2(
            rng, "m_H", meta_params, obj.data(), obj.params());

        if (spec.mutate) {
          // Drop a family row whose meta parameter the outer algorithm
          // emits; the loss of slice totality must be detected.
          ElementSet emitted;
          for (const Row& edge : outer.relation()) emitted.insert(edge[1]);
          Relation corrupted;
          bool dropped = false;
          for (const Row& row : family.relation()) {
            if (!dropped && emitted.contains(row[0])) {
              dropped = true;
              continue;
            }
            corrupted.insert(row);
          }
          InputOutputSystem broken_family = gen::ternary_io(
              "m_H_bad", meta_params, obj.data(), obj.params(),
              std::move(corrupted));
          try {
            MetaLearningSystem broken =
                build_meta(outer, broken_family, obj, "meta_bad");
            if (auto v = meta_invariant_violation(broken))
              return TrialFailure{t, seed, "mutation:meta-invariants", *v};
          } catch (const ConstructionError& e) {
            return TrialFailure{t, seed, "mutation:meta-build", e.what()};
          }
          return std::nullopt;
        }

        InputOutputSystem cascade =
            cascade_connect(outer, family, CascadeBinding{1, 0}, "S3",
                            suite_limits());
        Relation expected;
        for (const Row& edge : outer.relation())
          for (const Row& hrow : family.relation())
            if (hrow[0] == edge[1])
              expected.insert(Row{edge[0], hrow[1], hrow[2]});
        if (!(cascade.relation() == expected))
          return TrialFailure{t, seed, "cascade",
                              "cascade relation differs from the witness "
                              "scan"};

        MetaLearningSystem meta = build_meta(outer, family, obj, "meta");
        if (auto v = meta_invariant_violation(meta))
          return TrialFailure{t, seed, "meta-invariants", *v};
        if (!meta.meta().input().same_members(obj.data()))
          return TrialFailure{t, seed, "meta-input",
                              "X_m differs from the object data"};
        if (!meta.meta().output().same_members(obj.params()))
          return TrialFailure{t, seed, "meta-output",
                              "Y_m differs from the object parameters"};
        return std::nullopt;
      });
}

namespace detail {

/// One side of the Figure 5 chain: a transfer system into this side plus a
/// meta system over the transfer system.
struct Fig5Side {
  TransferLearningSystem transfer;
  MetaLearningSystem meta;
};

/// Everything one trial of the Figure 5 chain builds.
struct Fig5Stages {
  // Elementary two-position systems, one per stage.
  InputOutputSystem a, b, c, d, e, f;
  LearningSystem plain_f;  // stage F as a learning system
};

inline Element triple(const Element& a, const Element& b, const Element& c) {
  return Element::tuple({a, b, c});
}

inline Fig5Stages build_fig5_stages(Rng& rng, std::size_t min_size,
                                    std::size_t max_size) {
  LearningSystem s1 = gen::learning_system(rng, "f1", min_size, max_size);
  LearningSystem s2 = gen::learning_system(rng, "f2", min_size, max_size);
  auto data_knowledge = [&](const LearningSystem& src, const std::string& nm) {
    const std::size_t cnt = rng.range(1, src.data().size());
    return knowledge_from_data(
        src, gen::pick_subset(rng, src.data().members().items(), cnt), nm);
  };
  ComponentSet k12 = data_knowledge(s1, "K12");
  ComponentSet k21 = data_knowledge(s2, "K21");
  TransferLearningSystem tr1 =
      random_transfer(rng, s2, s1, k21, "g1", min_size, max_size);
  TransferLearningSystem tr2 =
      random_transfer(rng, s1, s2, k12, "g2", min_size, max_size);

  auto meta_over = [&](const LearningSystem& object, const std::string& nm) {
    ComponentSet dm = gen::atom_carrier(rng, nm + "_D", nm + "d", min_size,
                                        max_size);
    ComponentSet tm = gen::atom_carrier(rng, nm + "_P", nm + "p", min_size,
                                        max_size);
    InputOutputSystem am = gen::total_function(rng, nm + "_A", dm, tm);
    InputOutputSystem hm = gen::total_function2(rng, nm + "_H", tm,
                                                object.data(),
                                                object.params());
    return build_meta(am, hm, object, nm);
  };
  MetaLearningSystem m1 = meta_over(tr1.as_learning_system(), "m1");
  MetaLearningSystem m2 = meta_over(tr2.as_learning_system(), "m2");

  // Per-side lookup tables.
  auto am1 = function_index(m1.meta().algorithm());
  auto am2 = function_index(m2.meta().algorithm());
  auto hm1 = function_index(m1.meta().hypotheses());
  auto hm2 = function_index(m2.meta().hypotheses());
  auto h1 = function_index(tr1.as_learning_system().hypotheses());
  auto h2 = function_index(tr2.as_learning_system().hypotheses());

  // Towers: one elementary system per side, input (meta data, data, input).
  auto tower = [&](const MetaLearningSystem& m, const TransferLearningSystem&
                                                     tr,
                   const std::map<Row, Row>& am, const std::map<Row, Row>& hm,
                   const std::map<Row, Row>& h, const std::string& nm) {
    ElementSet in_members;
    Relation rel;
    for (const Element& dm : m.meta().data().members())
      for (const Element& d : tr.transfer_data().members())
        for (const Element& x : tr.target().input().members()) {
          const Element& theta_m = look_up(am, Row{dm}).front();
          const Element& theta = look_up(hm, Row{theta_m, d}).front();
          const Element& y = look_up(h, Row{theta, x}).front();
          Element in = triple(dm, d, x);
          in_members.insert(in);
          rel.insert(Row{std::move(in), y});
        }
    return gen::binary_io(nm, ComponentSet(nm + "_in", std::move(in_members)),
                          tr.target().output(), std::move(rel));
  };
  InputOutputSystem tower1 = tower(m1, tr1, am1, hm1, h1, "tower1");
  InputOutputSystem tower2 = tower(m2, tr2, am2, hm2, h2, "tower2");

  // Stage A: the two towers, side by side.
  InputOutputSystem stage_a =
      parallel_connect(tower1, tower2, "stageA", suite_limits());

  // Joint pieces, each via the real connection operators.
  FunctionalSystem hm_joint = FunctionalSystem::make(parallel_connect(
      m1.meta().hypotheses().io(), m2.meta().hypotheses().io(), "Hm_joint",
      suite_limits()));
  FunctionalSystem am_joint = FunctionalSystem::make(parallel_connect(
      m1.meta().algorithm().io(), m2.meta().algorithm().io(), "Am_joint",
      suite_limits()));
  FunctionalSystem h_joint = FunctionalSystem::make(parallel_connect(
      tr1.as_learning_system().hypotheses().io(),
      tr2.as_learning_system().hypotheses().io(), "H_joint",
      suite_limits()));
  FunctionalSystem a_prime = FunctionalSystem::make(
      cascade_connect(am_joint.io(), hm_joint.io(), CascadeBinding{1, 0},
                      "A_prime", suite_limits()));

  auto hmj = function_index(hm_joint);
  auto amj = function_index(am_joint);
  auto hj = function_index(h_joint);
  auto apr = function_index(a_prime);

  const auto& dm1_set = m1.meta().data();
  const auto& dm2_set = m2.meta().data();
  const auto& d1_set = tr1.transfer_data();
  const auto& d2_set = tr2.transfer_data();
  const auto& x1_set = tr1.target().input();
  const auto& x2_set = tr2.target().input();

  // Stage builders share one loop over the six per-side coordinates; the
  // stage shape decides how the input element is grouped and which joint
  // objects evaluate it.
  enum class Stage { B, C, D, E };
  auto build_stage = [&](Stage which, const std::string& nm) {
    ElementSet in_members;
    Relation rel;
    for (const Element& dm_1 : dm1_set.members())
      for (const Element& dm_2 : dm2_set.members())
        for (const Element& d_1 : d1_set.members())
          for (const Element& d_2 : d2_set.members()) {
            Element d_pair = Element::pair(d_1, d_2);
            Element dm_pair = Element::pair(dm_1, dm_2);
            Element theta_pair = [&] {
              if (which == Stage::B) {
                // Metas still decomposed; the object algorithms are joint.
                const Element& tm_1 = look_up(am1, Row{dm_1}).front();
                const Element& tm_2 = look_up(am2, Row{dm_2}).front();
                return look_up(hmj, Row{Element::pair(tm_1, tm_2), d_pair})
                    .front();
              }
              if (which == Stage::C || which == Stage::D) {
                const Element& tm_pair = look_up(amj, Row{dm_pair}).front();
                return look_up(hmj, Row{tm_pair, d_pair}).front();
              }
              return look_up(apr, Row{dm_pair, d_pair}).front();
            }();
            for (const Element& x_1 : x1_set.members())
              for (const Element& x_2 : x2_set.members()) {
                Element y = [&] {
                  if (which == Stage::B || which == Stage::C) {
                    const Element& y_1 =
                        look_up(h1, Row{theta_pair.parts()[0], x_1}).front();
                    const Element& y_2 =
                        look_up(h2, Row{theta_pair.parts()[1], x_2}).front();
                    return Element::pair(y_1, y_2);
                  }
                  return look_up(hj,
                                 Row{theta_pair, Element::pair(x_1, x_2)})
                      .front();
                }();
                Element in = [&] {
                  switch (which) {
                    case Stage::B:
                      return Element::tuple({dm_1, dm_2, d_pair, x_1, x_2});
                    case Stage::C:
                      return Element::tuple({dm_pair, d_pair, x_1, x_2});
                    default:
                      return triple(dm_pair, d_pair,
                                    Element::pair(x_1, x_2));
                  }
                }();
                in_members.insert(in);
                rel.insert(Row{std::move(in), std::move(y)});
              }
          }
    return gen::binary_io(
        nm, ComponentSet(nm + "_in", std::move(in_members)),
        ComponentSet(nm + "_out",
                     stage_a.base().component(1).members()),
        std::move(rel));
  };

  InputOutputSystem stage_b = build_stage(Stage::B, "stageB");
  InputOutputSystem stage_c = build_stage(Stage::C, "stageC");
  InputOutputSystem stage_d = build_stage(Stage::D, "stageD");
  InputOutputSystem stage_e = build_stage(Stage::E, "stageE");

  // Stage F: redefine sets to recover a plain learning system. The data
  // carrier pairs the meta data tuple with the data tuple.
  ElementSet df_members;
  Relation af_rel;
  for (const Row& row : a_prime.relation()) {
    Element df = Element::pair(row[0], row[1]);
    df_members.insert(df);
    af_rel.insert(Row{std::move(df), row[2]});
  }
  ComponentSet data_f("F_D", std::move(df_members));
  InputOutputSystem alg_f = gen::binary_io(
      "F_A", data_f,
      ComponentSet("F_P", a_prime.base().component(2).members()),
      std::move(af_rel));
  LearningRoles roles_f{data_f,
                        ComponentSet("F_P",
                                     a_prime.base().component(2).members()),
                        ComponentSet("F_X", h_joint.base().component(1)
                                                .members()),
                        ComponentSet("F_Y", h_joint.base().component(2)
                                                .members())};
  LearningSystem plain_f =
      build_learning_system("F", alg_f, h_joint.io(), roles_f,
                            DataCarrier::Composite);

  ElementSet inf_members;
  Relation relf;
  InputOutputSystem elem_f = plain_f.elementary_view();
  for (const Row& row : elem_f.relation()) {
    Element in = Element::pair(row[0], row[1]);
    inf_members.insert(in);
    relf.insert(Row{std::move(in), row[2]});
  }
  InputOutputSystem stage_f = gen::binary_io(
      "stageF", ComponentSet("stageF_in", std::move(inf_members)),
      ComponentSet("stageF_out", stage_a.base().component(1).members()),
      std::move(relf));

  return Fig5Stages{std::move(stage_a), std::move(stage_b),
                    std::move(stage_c), std::move(stage_d),
                    std::move(stage_e), std::move(stage_f),
                    std::move(plain_f)};
}

/// The canonical regrouping morphism between consecutive stages: the input
/// map regroups the tuple structure, the output map is the identity.
inline Morphism regroup_morphism(
    const InputOutputSystem& from,
    const std::function<Element(const Element&)>& regroup) {
  Morphism m;
  m.maps.resize(2);
  for (const Element& e : from.base().component(0).members())
    m.maps[0].set(e, regroup(e));
  m.maps[1] = ElementMap::identity(from.base().component(1));
  return m;
}

}  // namespace detail

/// The Figure 5 regression: build the two-tower stage A and walk the five
/// documented steps to a plain learning system, verifying an onto,
/// relation-preserving morphism at every transition and the defining
/// biconditional at stage F.
inline TheoremReport check_figure5_chain(const InstanceSpec& spec) {
  return detail::run_trials(
      TheoremId::Fig5, spec,
      [&spec](std::size_t t, std::uint64_t seed,
              TheoremReport&) -> std::optional<TrialFailure> {
        Rng rng(seed);
        detail::Fig5Stages st =
            detail::build_fig5_stages(rng, spec.min_size, spec.max_size);

        auto part = [](const Element& e, std::size_t i) {
          return e.parts()[i];
        };
        // A: ((dm1, d1, x1), (dm2, d2, x2))
        auto rho_ab = [&](const Element& e) {
          const Element& t1 = part(e, 0);
          const Element& t2 = part(e, 1);
          return Element::tuple({part(t1, 0), part(t2, 0),
                                 Element::pair(part(t1, 1), part(t2, 1)),
                                 part(t1, 2), part(t2, 2)});
        };
        // B: (dm1, dm2, (d1, d2), x1, x2)
        auto rho_bc = [&](const Element& e) {
          return Element::tuple({Element::pair(part(e, 0), part(e, 1)),
                                 part(e, 2), part(e, 3), part(e, 4)});
        };
        // C: ((dm1, dm2), (d1, d2), x1, x2)
        auto rho_cd = [&](const Element& e) {
          return detail::triple(part(e, 0), part(e, 1),
                                Element::pair(part(e, 2), part(e, 3)));
        };
        // D = E: ((dm1, dm2), (d1, d2), (x1, x2))
        auto rho_de = [](const Element& e) { return e; };
        // F: (((dm1, dm2), (d1, d2)), (x1, x2))
        auto rho_ef = [&](const Element& e) {
          return Element::pair(Element::pair(part(e, 0), part(e, 1)),
                               part(e, 2));
        };

        struct Step {
          const char* name;
          const InputOutputSystem* from;
          const InputOutputSystem* to;
          std::function<Element(const Element&)> rho;
        };
        const Step steps[] = {{"A->B", &st.a, &st.b, rho_ab},
                              {"B->C", &st.b, &st.c, rho_bc},
                              {"C->D", &st.c, &st.d, rho_cd},
                              {"D->E", &st.d, &st.e, rho_de},
                              {"E->F", &st.e, &st.f, rho_ef}};

        if (spec.mutate) {
          // Corrupt one tuple of stage B; the A->B morphism must fail.
          InputOutputSystem broken_b(
              AbstractSystem(st.b.base().name(), st.b.base().components(),
                             detail::drop_first_row(st.b.relation())),
              IoPartition{st.b.input_positions(), st.b.output_positions()});
          HomomorphismCheck broken = verify_homomorphism(
              st.a, broken_b, detail::regroup_morphism(st.a, rho_ab));
          if (!broken.holds)
            return TrialFailure{t, seed, "mutation:A->B", broken.witness};
          return std::nullopt;
        }

        for (const Step& step : steps) {
          HomomorphismCheck check = verify_homomorphism(
              *step.from, *step.to,
              detail::regroup_morphism(*step.from, step.rho));
          if (!check.holds)
            return TrialFailure{t, seed, step.name, check.witness};
        }
        if (!check_biconditional(st.plain_f))
          return TrialFailure{t, seed, "F:biconditional",
                              "stage F fails the defining biconditional"};
        return std::nullopt;
      });
}

}  // namespace astlab
