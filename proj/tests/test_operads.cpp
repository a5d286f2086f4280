#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "operad_oracle.hpp"
#include "opgroth/operad.hpp"

using namespace opgroth;
using namespace opgroth::testing;

namespace {

std::vector<OpId> ops(std::initializer_list<OpId> xs) { return std::vector<OpId>(xs); }

OpId el(const Operad& o, std::size_t n, const char* label) {
  auto p = o.find(n, label);
  REQUIRE(p.has_value());
  return *p;
}

}  // namespace

TEST_CASE("semirings") {
  auto b = boolean_semiring();
  CHECK(check_semiring(b).ok());
  auto broken = b;
  broken.mul[3] = 0;  // 1 * 1 = 0
  CHECK_FALSE(check_semiring(broken).ok());
}

TEST_CASE("Comm") {
  auto c = build_comm(2);
  CHECK(c->arity_size(0) == 1);
  CHECK(c->arity_size(1) == 1);
  CHECK(c->arity_size(2) == 1);
  auto r = c->compose(FinMap::from_one_based(2, {2, 1}), OpId(0), ops({OpId(0), OpId(0)}));
  CHECK(r == OpId(0));
  auto c4 = build_comm(4);
  auto rep = check_operad_axioms(*c4);
  CHECK(rep.ok());
  CHECK(rep.count_of("operad.assoc_instances") == combinatorial_assoc_count(4, comm_size));
  CHECK(rep.count_of("operad.unit_instances") == 2 * 5);
}

TEST_CASE("Assoc carriers and compositions") {
  auto a = build_assoc(3);
  CHECK(a->arity_size(0) == 1);
  CHECK(a->arity_size(1) == 1);
  CHECK(a->arity_size(2) == 2);
  CHECK(a->arity_size(3) == 6);
  const OpId eta = a->unit();
  const OpId swap = el(*a, 2, "s21");
  CHECK(a->compose(identity_map(2), swap, ops({eta, eta})) == swap);
  CHECK(a->compose(terminal_map(2), eta, ops({swap})) == swap);
  // block swap inside the fiber {1,2} of [1,1,2]
  CHECK(a->label(3, *a->compose(FinMap::from_one_based(2, {1, 1, 2}), el(*a, 2, "s12"), ops({swap, eta}))) ==
        "s213");
  // sigma = swap, f = id: result is the swap itself
  CHECK(a->label(2, *a->compose(identity_map(2), swap, ops({eta, eta}))) == "s21");
}

TEST_CASE("Assoc axioms, exhaustive at N=3 with oracle agreement") {
  auto a = build_assoc(3);
  auto rep = check_operad_axioms(*a);
  CHECK(rep.ok());
  auto naive = naive_operad_check(*a);
  CHECK(naive.ok);
  CHECK(rep.count_of("operad.assoc_instances") == naive.assoc_instances);
  CHECK(rep.count_of("operad.assoc_instances") == combinatorial_assoc_count(3, assoc_size));
  CHECK(rep.count_of("operad.unit_instances") == naive.unit_instances);
}

TEST_CASE("Assoc associativity at N=4 on a seeded sample") {
  auto a = build_assoc(4);
  auto rep = check_operad_associativity_sampled(*a, 10000, 20240229);
  CHECK(rep.ok());
  CHECK(rep.count_of("operad.assoc_instances") == 10000);
  CHECK(rep.note_of("operad.sample_seed") == "20240229");
}

TEST_CASE("QConv over the Boolean semiring") {
  auto q = build_qconv(boolean_semiring(), 3);
  CHECK(q->arity_size(0) == 0);
  CHECK(q->arity_size(2) == 3);
  CHECK(q->carrier(2) == std::vector<std::string>{"q0_1", "q1_0", "q1_1"});
  const OpId one = el(*q, 1, "q1");
  CHECK(q->unit() == one);
  CHECK(q->compose(identity_map(2), el(*q, 2, "q1_1"), ops({one, one})) == el(*q, 2, "q1_1"));
  // non-monotone f: coordinates follow the increasing fiber enumeration
  auto r = q->compose(FinMap::from_one_based(2, {2, 1, 1}), el(*q, 2, "q1_0"), ops({el(*q, 2, "q0_1"), one}));
  CHECK(q->label(3, *r) == "q0_0_1");
  CHECK_THROWS_AS(q->compose(FinMap::from_one_based(2, {1, 1}), el(*q, 2, "q1_1"), ops({el(*q, 2, "q1_1"), one})),
                  std::domain_error);

  auto rep = check_operad_axioms(*q);
  CHECK(rep.ok());
  auto naive = naive_operad_check(*q);
  CHECK(naive.ok);
  CHECK(rep.count_of("operad.assoc_instances") == naive.assoc_instances);
  CHECK(rep.count_of("operad.assoc_instances") == combinatorial_assoc_count(3, qconv_bool_size));
}

TEST_CASE("corrupted operads fail in both checker and oracle") {
  auto a = build_assoc(3);
  const OpId eta = a->unit();
  const OpId id2 = el(*a, 2, "s12"), swap = el(*a, 2, "s21");

  Operad unit_broken = *a;
  unit_broken.set_entry(CompKey{terminal_map(2), eta, {swap}}, id2);
  auto r1 = check_operad_axioms(unit_broken);
  CHECK_FALSE(r1.ok());
  CHECK(r1.mentions("operad.unit_left", "mu [1,1] s1 s21"));
  CHECK_FALSE(naive_operad_check(unit_broken).ok);

  Operad assoc_broken = *a;
  assoc_broken.set_entry(CompKey{FinMap::from_one_based(2, {1, 1, 2}), id2, {swap, eta}}, el(*a, 3, "s123"));
  auto r2 = check_operad_axioms(assoc_broken);
  CHECK_FALSE(r2.ok());
  CHECK(r2.mentions("operad.assoc"));
  CHECK_FALSE(naive_operad_check(assoc_broken).ok);

  auto q = build_qconv(boolean_semiring(), 3);
  Operad q_broken = *q;
  q_broken.set_entry(CompKey{identity_map(2), el(*q, 2, "q1_1"), {el(*q, 1, "q1"), el(*q, 1, "q1")}},
                     el(*q, 2, "q1_0"));
  CHECK_FALSE(check_operad_axioms(q_broken).ok());
  CHECK_FALSE(naive_operad_check(q_broken).ok);

  // a table operad with one missing entry is structurally incomplete
  Operad t = tabulate(*build_comm(2));
  CHECK(check_operad_axioms(t).ok());
  Operad empty_table("E", Operad::Kind::table, 2, {{"c"}, {"c"}, {"c"}}, OpId(0));
  auto r3 = check_operad_axioms(empty_table);
  CHECK(r3.has_structural());
  CHECK(r3.mentions("operad.compose_missing"));
}

TEST_CASE("tabulated builtins are equal in behaviour") {
  auto a = build_assoc(3);
  Operad t = tabulate(*a);
  CHECK(t.kind() == Operad::Kind::table);
  for (std::size_t m = 0; m <= 3; ++m)
    for (std::size_t n = 0; n <= 3; ++n)
      for (const auto& f : all_maps(m, n))
        for (std::size_t p = 0; p < a->arity_size(n); ++p)
          for_each_operand_tuple(*a, f, [&](std::span<const OpId> qs) {
            CHECK(t.compose(f, OpId(p), qs) == a->compose(f, OpId(p), qs));
          });
}

TEST_CASE("operad morphisms") {
  auto a = build_assoc(3);
  auto q = build_qconv(boolean_semiring(), 3);
  CHECK(check_operad_morphism(terminal_morphism(a)).ok());
  CHECK(check_operad_morphism(terminal_morphism(q)).ok());
  CHECK(check_operad_morphism(identity_morphism(q)).ok());
  CHECK(check_operad_morphism(compose(terminal_morphism(build_comm(3)), terminal_morphism(a))).ok());

  auto broken = identity_morphism(a);
  broken.maps[2][el(*a, 2, "s21").index()] = el(*a, 2, "s12");
  auto rep = check_operad_morphism(broken);
  CHECK_FALSE(rep.ok());
  CHECK(rep.mentions("operad_morphism.composition"));
  // the instance named for this corruption is itself preserved: both sides are the identity
  CHECK_FALSE(rep.mentions("operad_morphism.composition", "mu [1,2] s21 s1 s1 |"));
  CHECK(rep.mentions("operad_morphism.composition", "mu [1,1,2] s12 s21 s1"));

  auto mismatch = terminal_morphism(a);
  mismatch.cod = build_comm(2);
  CHECK(check_operad_morphism(mismatch).has_structural());
}
