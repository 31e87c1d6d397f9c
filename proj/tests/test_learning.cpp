#include <catch2/catch_amalgamated.hpp>

#include "astlab/generator.hpp"
#include "astlab/learning.hpp"
#include "helpers.hpp"

using namespace astlab;
using th::a;
using th::cs;
using th::cse;
using th::rel;
using th::t;

namespace {

/// The one-point learning system from the construction examples.
LearningSystem one_point() {
  ComponentSet x = cs("X", {"x1"});
  ComponentSet y = cs("Y", {"y1"});
  ComponentSet d = cse("D", {t({a("x1"), a("y1")})});
  ComponentSet p = cs("P", {"t1"});
  auto alg = gen::binary_io("A", d, p,
                            rel({{t({a("x1"), a("y1")}), a("t1")}}));
  auto hyp = gen::ternary_io("H", p, x, y,
                             rel({{a("t1"), a("x1"), a("y1")}}));
  return build_learning_system("L", alg, hyp, LearningRoles{d, p, x, y});
}

/// Exhaustive oracle for the (data, input, output) projection: scan every
/// theta.
Relation theta_scan(const InputOutputSystem& alg,
                    const InputOutputSystem& hyp) {
  Relation out;
  for (const Row& edge : alg.relation())
    for (const Row& hrow : hyp.relation())
      if (hrow[0] == edge[1]) out.insert(Row{edge[0], hrow[1], hrow[2]});
  return out;
}

}  // namespace

TEST_CASE("one-point learning system builds and projects") {
  LearningSystem ls = one_point();
  CHECK(check_biconditional(ls));
  AbstractSystem proj =
      project(ls.induced(), {kPosData, kPosInput, kPosOutput});
  CHECK(proj.relation() ==
        rel({{t({a("x1"), a("y1")}), a("x1"), a("y1")}}));
}

TEST_CASE("hypotheses leaving the output carrier are rejected") {
  ComponentSet x = cs("X", {"x1"});
  ComponentSet y = cs("Y", {"y1"});
  ComponentSet d = cse("D", {t({a("x1"), a("y1")})});
  ComponentSet p = cs("P", {"t1"});
  auto alg = gen::binary_io("A", d, p,
                            rel({{t({a("x1"), a("y1")}), a("t1")}}));
  // y2 is not a member of Y.
  auto hyp = gen::ternary_io("H", p, x, y,
                             rel({{a("t1"), a("x1"), a("y2")}}));
  CHECK_THROWS_AS(
      build_learning_system("L", alg, hyp, LearningRoles{d, p, x, y}),
      ConstructionError);
}

TEST_CASE("non-pair data members violate the carrier constraint") {
  ComponentSet x = cs("X", {"x1"});
  ComponentSet y = cs("Y", {"y1"});
  ComponentSet d = cs("D", {"x1"});  // an atom, not an (input, output) pair
  ComponentSet p = cs("P", {"t1"});
  auto alg = gen::binary_io("A", d, p, rel({{a("x1"), a("t1")}}));
  auto hyp = gen::ternary_io("H", p, x, y,
                             rel({{a("t1"), a("x1"), a("y1")}}));
  CHECK_THROWS_WITH(
      build_learning_system("L", alg, hyp, LearningRoles{d, p, x, y}),
      Catch::Matchers::StartsWith("data carrier violation"));
}

TEST_CASE("a non-functional algorithm is rejected by name") {
  ComponentSet x = cs("X", {"x1"});
  ComponentSet y = cs("Y", {"y1"});
  ComponentSet d = cse("D", {t({a("x1"), a("y1")})});
  ComponentSet p = cs("P", {"t1", "t2"});
  auto alg = gen::binary_io("A", d, p,
                            rel({{t({a("x1"), a("y1")}), a("t1")},
                                 {t({a("x1"), a("y1")}), a("t2")}}));
  auto hyp = gen::ternary_io("H", p, x, y,
                             rel({{a("t1"), a("x1"), a("y1")},
                                  {a("t2"), a("x1"), a("y1")}}));
  CHECK_THROWS_WITH(
      build_learning_system("L", alg, hyp, LearningRoles{d, p, x, y}),
      Catch::Matchers::StartsWith("algorithm not a function"));
}

TEST_CASE("builder projection equals the exhaustive theta scan") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    LearningSystem ls = gen::learning_system(rng, "g", 1, 4);
    AbstractSystem proj =
        project(ls.induced(), {kPosData, kPosInput, kPosOutput});
    CHECK(proj.relation() ==
          theta_scan(ls.algorithm().io(), ls.hypotheses().io()));
    CHECK(check_biconditional(ls));
  }
}

TEST_CASE("biconditional detects a missing witnessed tuple") {
  LearningSystem ls = one_point();
  // Drop the only induced row: the witnessed (d, x, y) goes missing.
  LearningSystem broken = LearningSystem::assemble_unchecked(
      ls.name(), ls.algorithm(), ls.hypotheses(),
      LearningRoles{ls.data(), ls.params(), ls.input(), ls.output()},
      AbstractSystem(ls.induced().name(), ls.induced().components(),
                     Relation{}),
      ls.data_carrier());
  CHECK_FALSE(check_biconditional(broken));
}

TEST_CASE("biconditional detects an unwitnessed extra tuple") {
  ComponentSet x = cs("X", {"x1", "x2"});
  ComponentSet y = cs("Y", {"y1"});
  ComponentSet d = cse("D", {t({a("x1"), a("y1")})});
  ComponentSet p = cs("P", {"t1"});
  auto alg = gen::binary_io("A", d, p,
                            rel({{t({a("x1"), a("y1")}), a("t1")}}));
  auto hyp = gen::ternary_io("H", p, x, y,
                             rel({{a("t1"), a("x1"), a("y1")},
                                  {a("t1"), a("x2"), a("y1")}}));
  LearningSystem ls =
      build_learning_system("L", alg, hyp, LearningRoles{d, p, x, y});
  // Forge an induced relation with one extra tuple whose theta is not an
  // algorithm edge for that data point.
  Relation forged = ls.induced().relation();
  forged.insert(Row{t({t({a("x1"), a("y1")}), a("t1")}),
                    t({a("x2"), a("y1")}), a("t1"),
                    t({a("t1"), a("x1"), a("y1")}), a("x1"), a("y1")});
  LearningSystem broken = LearningSystem::assemble_unchecked(
      ls.name(), ls.algorithm(), ls.hypotheses(),
      LearningRoles{ls.data(), ls.params(), ls.input(), ls.output()},
      AbstractSystem(ls.induced().name(), ls.induced().components(), forged),
      ls.data_carrier());
  CHECK_FALSE(check_biconditional(broken));
}

TEST_CASE("transfer with singleton carriers has a one-member data set") {
  LearningSystem src = one_point();
  LearningSystem tgt = one_point();
  ComponentSet k = product_set(src.data(), src.params(), "K");
  REQUIRE(k.size() == 1);
  ComponentSet d = product_set(tgt.data(), k, "DT");
  ComponentSet p = cs("PT", {"q"});
  Rng rng(1);
  auto alg = gen::total_function(rng, "ATr", d, p);
  auto hyp = gen::total_function2(rng, "HTr", p, tgt.input(), tgt.output());
  TransferLearningSystem tr = build_transfer(src, tgt, k, alg, hyp, "TR");
  CHECK(tr.transfer_data().size() == tgt.data().size() * k.size());
  CHECK(check_biconditional(tr.as_learning_system()));
}

TEST_CASE("knowledge picking 2 of 4 pairs bounds the transfer data by 6") {
  // Source with |D_S| = 2 and |Theta_S| = 2, so D_S x Theta_S has 4 pairs;
  // target with |D_T| = 3.
  ComponentSet sx = cs("SX", {"sx1", "sx2"});
  ComponentSet sy = cs("SY", {"sy1"});
  ComponentSet sd = cse("SD", {t({a("sx1"), a("sy1")}),
                               t({a("sx2"), a("sy1")})});
  ComponentSet sp = cs("SP", {"sp1", "sp2"});
  auto salg = gen::binary_io("SA", sd, sp,
                             rel({{t({a("sx1"), a("sy1")}), a("sp1")},
                                  {t({a("sx2"), a("sy1")}), a("sp2")}}));
  auto shyp = gen::ternary_io("SH", sp, sx, sy,
                              rel({{a("sp1"), a("sx1"), a("sy1")},
                                   {a("sp1"), a("sx2"), a("sy1")},
                                   {a("sp2"), a("sx1"), a("sy1")},
                                   {a("sp2"), a("sx2"), a("sy1")}}));
  LearningSystem src =
      build_learning_system("S", salg, shyp, LearningRoles{sd, sp, sx, sy});

  ComponentSet tx = cs("TX", {"tx1", "tx2", "tx3"});
  ComponentSet ty = cs("TY", {"ty1"});
  ComponentSet td = cse("TD", {t({a("tx1"), a("ty1")}),
                               t({a("tx2"), a("ty1")}),
                               t({a("tx3"), a("ty1")})});
  ComponentSet tp = cs("TP", {"tp1"});
  Relation talg_rows;
  for (const Element& de : td.members()) talg_rows.insert(Row{de, a("tp1")});
  Relation thyp_rows;
  for (const Element& xe : tx.members())
    thyp_rows.insert(Row{a("tp1"), xe, a("ty1")});
  LearningSystem tgt = build_learning_system(
      "T", gen::binary_io("TA", td, tp, talg_rows),
      gen::ternary_io("TH", tp, tx, ty, thyp_rows),
      LearningRoles{td, tp, tx, ty});

  // Pick 2 of the 4 (d_S, theta_S) pairs.
  std::vector<Element> kpool;
  for (const Element& de : src.data().members())
    for (const Element& pe : src.params().members())
      kpool.push_back(Element::pair(de, pe));
  REQUIRE(kpool.size() == 4);
  ComponentSet k("K", ElementSet{kpool[0], kpool[3]});

  // Oracle: enumerate D_T x K pairwise.
  ElementSet dpool;
  for (const Element& de : tgt.data().members())
    for (const Element& ke : k.members()) dpool.insert(Element::pair(de, ke));
  REQUIRE(dpool.size() == 6);

  Rng rng(3);
  ComponentSet d("DT", gen::pick_subset(rng, dpool.items(),
                                        rng.range(1, dpool.size())));
  ComponentSet p = cs("PT", {"q"});
  auto alg = gen::total_function(rng, "ATr", d, p);
  auto hyp = gen::total_function2(rng, "HTr", p, tgt.input(), tgt.output());
  TransferLearningSystem tr = build_transfer(src, tgt, k, alg, hyp, "TR");
  CHECK(tr.transfer_data().size() <= 6);
  for (const Element& m : tr.transfer_data().members()) {
    REQUIRE(m.is_tuple());
    CHECK(tgt.data().contains(m.parts()[0]));
    CHECK(k.contains(m.parts()[1]));
    CHECK(dpool.contains(m));
  }
}

TEST_CASE("transfer rejects empty knowledge") {
  LearningSystem src = one_point();
  CHECK_THROWS_WITH(knowledge_from_data(src, ElementSet{}, "K"),
                    Catch::Matchers::Equals("empty K_S"));
}

TEST_CASE("transfer hypotheses outside the target output are rejected") {
  LearningSystem src = one_point();
  LearningSystem tgt = one_point();
  ComponentSet k = product_set(src.data(), src.params(), "K");
  ComponentSet d = product_set(tgt.data(), k, "DT");
  ComponentSet p = cs("PT", {"q"});
  auto alg = gen::binary_io("ATr", d, p, rel({{d.members()[0], a("q")}}));
  auto hyp = gen::ternary_io("HTr", p, tgt.input(), tgt.output(),
                             rel({{a("q"), a("x1"), a("nope")}}));
  CHECK_THROWS_AS(build_transfer(src, tgt, k, alg, hyp, "TR"),
                  ConstructionError);
}

TEST_CASE("multitask with the product algorithm is trivial") {
  Rng rng(13);
  std::vector<LearningSystem> tasks{gen::learning_system(rng, "t1", 1, 2),
                                    gen::learning_system(rng, "t2", 1, 2)};
  FunctionalSystem prod = product_algorithm(tasks, "AJ");
  MultiTaskLearningSystem mt = build_multitask(tasks, prod.io(), "M");
  CHECK(mt.triviality() == Triviality::Trivial);
  CHECK(classify_triviality(mt) == Triviality::Trivial);
  CHECK(check_biconditional(mt.joint()));
}

TEST_CASE("a joint algorithm differing in one tuple is non-trivial") {
  Rng rng(14);
  std::vector<LearningSystem> tasks;
  // Ensure at least two joint parameters so a mutation exists.
  for (;;) {
    tasks = {gen::learning_system(rng, "t1", 1, 2),
             gen::learning_system(rng, "t2", 1, 2)};
    if (tasks[0].params().size() * tasks[1].params().size() >= 2) break;
  }
  FunctionalSystem prod = product_algorithm(tasks, "AJ");
  const ComponentSet& joint_params = prod.base().component(1);
  const Row& first = prod.relation().rows().front();
  Element other = joint_params.members()[0] == first[1]
                      ? joint_params.members()[1]
                      : joint_params.members()[0];
  Relation mutated;
  mutated.insert(Row{first[0], other});
  bool skipped = false;
  for (const Row& row : prod.relation()) {
    if (!skipped) {
      skipped = true;
      continue;
    }
    mutated.insert(row);
  }
  auto alt = gen::binary_io("AJ2", prod.base().component(0), joint_params,
                            std::move(mutated));
  MultiTaskLearningSystem mt = build_multitask(tasks, alt, "M");
  CHECK(mt.triviality() == Triviality::Nontrivial);
}

TEST_CASE("triviality comparison ignores enumeration order") {
  Rng rng(45);
  std::vector<LearningSystem> tasks{gen::learning_system(rng, "t1", 2, 3),
                                    gen::learning_system(rng, "t2", 2, 3)};
  FunctionalSystem prod = product_algorithm(tasks, "AJ");
  // The same edges inserted in reverse order compare equal as a set.
  std::vector<Row> reversed(prod.relation().rows().rbegin(),
                            prod.relation().rows().rend());
  auto alt = gen::binary_io("AJ2", prod.base().component(0),
                            prod.base().component(1),
                            Relation(std::move(reversed)));
  MultiTaskLearningSystem mt = build_multitask(tasks, alt, "M");
  CHECK(mt.triviality() == Triviality::Trivial);
}

TEST_CASE("multitask requires at least two tasks") {
  Rng rng(15);
  std::vector<LearningSystem> tasks{gen::learning_system(rng, "t1", 1, 2)};
  FunctionalSystem alg = tasks[0].algorithm();
  CHECK_THROWS_AS(build_multitask(tasks, alg.io(), "M"), UsageError);
}

TEST_CASE("triviality holds for product algorithms across sizes") {
  Rng rng(16);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = rng.range(2, 4);
    const std::size_t cap = n == 2 ? 4 : (n == 3 ? 3 : 2);
    std::vector<LearningSystem> tasks;
    for (std::size_t i = 0; i < n; ++i)
      tasks.push_back(gen::learning_system(
          rng, "t" + std::to_string(i + 1), 1, cap));
    FunctionalSystem prod = product_algorithm(tasks, "AJ");
    MultiTaskLearningSystem mt = build_multitask(tasks, prod.io(), "M");
    CHECK(mt.triviality() == Triviality::Trivial);
  }
}

TEST_CASE("transfer projection matches the brute-force theta scan") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    LearningSystem src = gen::learning_system(rng, "s", 1, 3);
    LearningSystem tgt = gen::learning_system(rng, "t", 1, 3);
    ComponentSet k = knowledge_from_data(
        src,
        gen::pick_subset(rng, src.data().members().items(),
                         rng.range(1, src.data().size())),
        "K");
    std::vector<Element> dpool;
    for (const Element& de : tgt.data().members())
      for (const Element& ke : k.members())
        dpool.push_back(Element::pair(de, ke));
    ComponentSet d("DT", gen::pick_subset(rng, dpool,
                                          rng.range(1, dpool.size())));
    ComponentSet p = gen::atom_carrier(rng, "PT", "q", 1, 3);
    auto alg = gen::total_function(rng, "ATr", d, p);
    auto hyp = gen::total_function2(rng, "HTr", p, tgt.input(), tgt.output());
    TransferLearningSystem tr = build_transfer(src, tgt, k, alg, hyp, "TR");
    AbstractSystem proj = project(tr.as_learning_system().induced(),
                                  {kPosData, kPosInput, kPosOutput});
    CHECK(proj.relation() == theta_scan(alg, hyp));
  }
}

TEST_CASE("meta with one parameter selecting the object algorithm") {
  LearningSystem obj = one_point();
  ComponentSet md = cs("MD", {"md1"});
  ComponentSet mp = cs("MP", {"mp1"});
  auto outer = gen::binary_io("AM", md, mp, rel({{a("md1"), a("mp1")}}));
  // The single slice is exactly the object algorithm.
  Relation family;
  for (const Row& edge : obj.algorithm().relation())
    family.insert(Row{a("mp1"), edge[0], edge[1]});
  auto hm = gen::ternary_io("HM", mp, obj.data(), obj.params(), family);
  MetaLearningSystem meta = build_meta(outer, hm, obj, "MT");
  CHECK(meta.hypothesis_slice(a("mp1")) == obj.algorithm().relation());
  CHECK_FALSE(meta_invariant_violation(meta).has_value());
}

TEST_CASE("meta slices are total functions for every parameter") {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    LearningSystem obj = gen::learning_system(rng, "o", 1, 3);
    ComponentSet md = gen::atom_carrier(rng, "MD", "md", 1, 3);
    ComponentSet mp = gen::atom_carrier(rng, "MP", "mp", 1, 2);
    auto outer = gen::total_function(rng, "AM", md, mp);
    auto hm = gen::total_function2(rng, "HM", mp, obj.data(), obj.params());
    MetaLearningSystem meta = build_meta(outer, hm, obj, "MT");
    for (const Element& pm : mp.members()) {
      Relation slice = meta.hypothesis_slice(pm);
      CHECK(slice.size() == obj.data().size());
      std::set<Element> domain;
      for (const Row& row : slice) CHECK(domain.insert(row[0]).second);
    }
    CHECK(check_biconditional(meta.meta()));
    CHECK(meta.meta().input().same_members(obj.data()));
    CHECK(meta.meta().output().same_members(obj.params()));
  }
}

TEST_CASE("an emitted meta parameter without a slice is rejected") {
  LearningSystem obj = one_point();
  ComponentSet md = cs("MD", {"md1"});
  ComponentSet mp = cs("MP", {"mp1", "mp2"});
  auto outer = gen::binary_io("AM", md, mp, rel({{a("md1"), a("mp2")}}));
  Relation family;
  for (const Row& edge : obj.algorithm().relation())
    family.insert(Row{a("mp1"), edge[0], edge[1]});  // only mp1 has a slice
  auto hm = gen::ternary_io("HM", mp, obj.data(), obj.params(), family);
  CHECK_THROWS_WITH(build_meta(outer, hm, obj, "MT"),
                    Catch::Matchers::StartsWith("dangling meta-parameter"));
}

TEST_CASE("meta binding failure names the cascade") {
  LearningSystem obj = one_point();
  ComponentSet md = cs("MD", {"md1"});
  ComponentSet mp = cs("MP", {"mp1"});
  ComponentSet mp_other = cs("MPX", {"zz"});
  auto outer = gen::binary_io("AM", md, mp, rel({{a("md1"), a("mp1")}}));
  Relation family;
  for (const Row& edge : obj.algorithm().relation())
    family.insert(Row{a("zz"), edge[0], edge[1]});
  auto hm =
      gen::ternary_io("HM", mp_other, obj.data(), obj.params(), family);
  CHECK_THROWS_WITH(build_meta(outer, hm, obj, "MT"),
                    Catch::Matchers::StartsWith("cascade binding failure"));
}
