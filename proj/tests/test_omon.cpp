#include <doctest.h>

#include <array>

#include "opgroth/fixtures.hpp"
#include "opgroth/omon.hpp"
#include "opgroth/tuples.hpp"

using namespace opgroth;

namespace {

// Strict discrete structure read straight off operation tables, without
// the library's algebra check in the way.
OMonCategory discrete_structure(const OperadPtr& o, const FinSet& carrier,
                                const std::vector<std::vector<FinFunction>>& ops) {
  OMonCategory c(o, discrete_category(carrier.elements));
  for (std::size_t n = 0; n <= o->max_arity(); ++n)
    for (std::size_t p = 0; p < o->arity_size(n); ++p) {
      TensorTable& t = c.tensor(n, OpId(p));
      for (std::size_t k = 0; k < t.on_obj.size(); ++k) {
        t.on_obj[k] = ObjId(ops[n][p][k]);
        t.on_mor[k] = c.base()->identity(t.on_obj[k]);  // discrete: Mor = identities, same order
      }
    }
  return c;
}

std::size_t table_apply(const std::vector<std::vector<FinFunction>>& ops, std::size_t size, OpId p,
                        const std::vector<std::size_t>& xs) {
  std::size_t code = 0;
  for (std::size_t x : xs) code = code * size + x;
  return ops[xs.size()][p.index()][code];
}

// The strict-algebra equations checked by a plain loop nest.
bool algebra_oracle(const Operad& o, std::size_t size, const std::vector<std::vector<FinFunction>>& ops) {
  for (std::size_t x = 0; x < size; ++x)
    if (table_apply(ops, size, o.unit(), {x}) != x) return false;
  const std::size_t N = o.max_arity();
  for (std::size_t m = 0; m <= N; ++m)
    for (std::size_t n = 0; n <= N; ++n)
      for (const FinMap& f : all_maps(m, n))
        for (std::size_t p = 0; p < o.arity_size(n); ++p) {
          bool ok = true;
          for_each_operand_tuple(o, f, [&](std::span<const OpId> qs) {
            const OpId mu = o.compose_checked(f, OpId(p), qs);
            std::vector<std::size_t> radices(m, size);
            for_each_tuple(radices, [&](std::span<const std::size_t> xs) {
              std::vector<std::size_t> outer;
              for (std::size_t i = 0; i < n; ++i) {
                std::vector<std::size_t> inner;
                for (std::size_t j = 0; j < m; ++j)
                  if (f(j) == i) inner.push_back(xs[j]);
                outer.push_back(table_apply(ops, size, qs[i], inner));
              }
              ok = ok && table_apply(ops, size, mu, {xs.begin(), xs.end()}) ==
                             table_apply(ops, size, OpId(p), outer);
            });
          });
          if (!ok) return false;
        }
  return true;
}

OMonPtr share(OMonCategory c) { return std::make_shared<const OMonCategory>(std::move(c)); }

}  // namespace

TEST_CASE("fixture structures pass the coherence check") {
  auto assoc = build_assoc(3);
  auto comm = build_comm(3);
  auto dz2 = fixtures::dz2_omon(assoc);
  auto r = check_omon_category(*dz2);
  CHECK(r.ok());
  CHECK(r.count_of("omon.assoc_squares") > 0);
  CHECK(r.count_of("omon.phi_components") > 0);

  auto l2 = fixtures::l2_omon(comm);
  CHECK(check_omon_category(*l2).ok());
  // meet of the empty tuple is the top element
  CHECK(l2->tensor_obj(OpId(0), std::span<const ObjId>{}) == ObjId(1));

  auto qconv = build_qconv(boolean_semiring(), 3);
  CHECK(check_omon_category(*fixtures::l2_omon(qconv)).ok());
  CHECK(check_omon_category(*fixtures::dz2_omon(comm)).ok());
}

TEST_CASE("jobs do not change the report") {
  auto assoc = build_assoc(3);
  OMonCategory c = *fixtures::dz2_omon(assoc);
  c.set_phi(PhiKey{FinMap(1, {0, 0}), assoc->unit(), {OpId(0)}, {ObjId(1), ObjId(1)}}, MorId(1));
  const auto a = check_omon_category(c, 1), b = check_omon_category(c, 4);
  CHECK_FALSE(a.ok());
  CHECK(a.findings() == b.findings());
  CHECK(a.counts() == b.counts());
}

TEST_CASE("broken identity axiom is reported") {
  auto assoc = build_assoc(3);
  OMonCategory c = *fixtures::dz2_omon(assoc);
  // phi_{t_2}[eta; s12](0,0) := id_1
  const OpId s12 = *assoc->find(2, "s12");
  c.set_phi(PhiKey{FinMap(1, {0, 0}), assoc->unit(), {s12}, {ObjId(0), ObjId(0)}}, MorId(1));
  auto r = check_omon_category(c);
  CHECK(r.mentions("omon.phi_identity", "phi [1,1] s1 s12 (0,0)"));
  CHECK(r.mentions("omon.phi_type", "phi [1,1] s1 s12 (0,0)"));
}

TEST_CASE("mutated tensor entries are named") {
  auto assoc = build_assoc(3);
  OMonCategory c = *fixtures::dz2_omon(assoc);
  const OpId s12 = *assoc->find(2, "s12");
  const ObjId objs[2] = {ObjId(0), ObjId(1)};
  c.set_tensor_obj(s12, objs, ObjId(0));
  auto r = check_omon_category(c);
  CHECK(r.mentions("omon.tensor_functor", "tensor s12 (0,1)"));

  OMonCategory l = *fixtures::l2_omon(build_comm(3));
  const ObjId ones[2] = {ObjId(1), ObjId(1)};
  l.set_tensor_obj(OpId(0), ones, ObjId(0));
  CHECK(check_omon_category(l).mentions("omon.tensor_functor", "tensor e (1,1)"));

  OMonCategory u = *fixtures::dz2_omon(assoc);
  const ObjId one[1] = {ObjId(1)};
  u.set_tensor_obj(assoc->unit(), one, ObjId(0));
  CHECK(check_omon_category(u).mentions("omon.unit", "tensor s1 (1)"));
}

TEST_CASE("unset tables are structural") {
  OMonCategory c(build_comm(2), fixtures::dz2());
  auto r = check_omon_category(c);
  CHECK(r.has_structural());
  CHECK(r.mentions("omon.tensor_missing", "tensor e ()"));
}

TEST_CASE("an unset morphism entry with no candidate is a functoriality violation") {
  auto comm = build_comm(2);
  OMonCategory c = *fixtures::l2_omon(comm);
  // (0,0) |-> 1 leaves tensor e (le01,id_0) : 1 -> 0 without any value.
  const ObjId zeros[2] = {ObjId(0), ObjId(0)};
  c.set_tensor_obj(OpId(0), zeros, ObjId(1));
  const MorId le01 = *c.base()->find_morphism("le01");
  const MorId id0 = c.base()->identity(ObjId(0));
  for (const auto& mors : {std::array{le01, id0}, std::array{id0, le01}, std::array{id0, id0}})
    c.set_tensor_mor(OpId(0), mors, kUnsetMor);
  const CheckReport r = check_omon_category(c);
  CHECK(r.mentions("omon.tensor_functor", "tensor e (le01,id_0) has no value: tensor e (0,0) = 1"));
  CHECK(r.mentions("omon.tensor_functor", "tensor e (id_0,le01) has no value"));
  // id_1 is a candidate for (id_0,id_0), so that entry is merely missing.
  CHECK(r.mentions("omon.tensor_missing", "tensor e (id_0,id_0)"));
  CHECK(r.size() == 3);
}

TEST_CASE("strict checker agrees with the algebra oracle") {
  auto assoc = build_assoc(3);
  std::size_t agreed = 0, failing = 0;
  for (const SetAlgebra& alg : {fixtures::z2_algebra(assoc), fixtures::grade_algebra(assoc)}) {
    const std::size_t X = alg.carrier.size();
    CHECK(algebra_oracle(*assoc, X, alg.ops));
    CHECK(check_omon_category(discrete_structure(assoc, alg.carrier, alg.ops)).ok());
    // Every single-entry change of the binary operations.
    for (std::size_t p = 0; p < alg.ops[2].size(); ++p)
      for (std::size_t k = 0; k < alg.ops[2][p].size(); ++k)
        for (std::size_t v = 0; v < X; ++v) {
          if (v == alg.ops[2][p][k]) continue;
          auto ops = alg.ops;
          ops[2][p][k] = v;
          const bool oracle = algebra_oracle(*assoc, X, ops);
          const bool checker = check_omon_category(discrete_structure(assoc, alg.carrier, ops)).ok();
          CHECK(oracle == checker);
          agreed += oracle == checker;
          failing += !oracle;
        }
  }
  CHECK(agreed == 2 * 4 * 1 + 2 * 9 * 2);  // |S_2| * |X|^2 * (|X| - 1) per algebra
  CHECK(failing == agreed);
}

TEST_CASE("set algebras") {
  auto assoc = build_assoc(3);
  auto g = omon_from_set_algebra(fixtures::grade_algebra(assoc));
  CHECK(g.base()->num_objects() == 3);
  CHECK(check_omon_category(g).ok());
  CHECK(omon_from_set_algebra(fixtures::z2_algebra(assoc), fixtures::dz2()) == *fixtures::dz2_omon(assoc));

  // r*r*r = r
  const ObjId rrr[3] = {ObjId(2), ObjId(2), ObjId(2)};
  CHECK(g.tensor_obj(OpId(0), rrr) == ObjId(2));

  auto one = omon_from_set_algebra(monoid_algebra(assoc, singleton_set(), {0}, 0));
  CHECK(one.base()->num_objects() == 1);
  CHECK(check_omon_category(one).ok());

  // a non-associative table is rejected before construction
  auto bad = monoid_algebra(assoc, FinSet{{"0", "1"}}, {1, 0, 0, 0}, 0);
  CHECK_THROWS_AS(omon_from_set_algebra(bad), CheckFailure);
  CHECK_FALSE(check_set_algebra(bad).ok());
}

TEST_CASE("restriction along operad morphisms") {
  auto assoc = build_assoc(3);
  auto comm = build_comm(3);
  auto l2 = fixtures::l2_omon(comm);
  auto res = restrict_along_operad_morphism(terminal_morphism(assoc), *l2);
  CHECK(check_omon_category(res).ok());
  // meets are commutative, so the restriction is the Assoc meet structure
  CHECK(res == *fixtures::l2_omon(assoc));

  auto dz2 = fixtures::dz2_omon(assoc);
  CHECK(restrict_along_operad_morphism(identity_morphism(assoc), *dz2) == *dz2);

  auto qconv = build_qconv(boolean_semiring(), 3);
  CHECK(check_omon_category(restrict_along_operad_morphism(terminal_morphism(qconv), *l2)).ok());

  CHECK_THROWS_AS(restrict_along_operad_morphism(terminal_morphism(build_assoc(2)), *l2), std::invalid_argument);
  CHECK_THROWS_AS(restrict_along_operad_morphism(identity_morphism(assoc), *l2), std::invalid_argument);

  auto s = restrict_along_operad_morphism(terminal_morphism(assoc), StructuralSet{comm});
  CHECK(*s.operad == *assoc);
}

TEST_CASE("restriction keeps non-identity phi entries") {
  auto assoc = build_assoc(3);
  auto tw = share(extend_unbiased_to_assoc(fixtures::twisted_bz2_unbiased(3)));
  CHECK(!tw->phi_entries().empty());
  auto same = restrict_along_operad_morphism(identity_morphism(assoc), *tw);
  CHECK(same == *tw);
  CHECK(check_omon_category(same).ok());
}

TEST_CASE("unbiased translation") {
  for (const auto& u : {fixtures::z2_unbiased(3), fixtures::l2_unbiased(3), fixtures::twisted_bz2_unbiased(3)}) {
    CHECK(check_unbiased(u).ok());
    auto c = extend_unbiased_to_assoc(u);
    CHECK(*c.operad() == *build_assoc(3));
    auto r = check_omon_category(c);
    CHECK(r.ok());
    CHECK(forget_assoc_to_unbiased(c) == u);
  }
  CHECK(extend_unbiased_to_assoc(fixtures::z2_unbiased(3)) == *fixtures::dz2_omon(build_assoc(3)));
  CHECK(forget_assoc_to_unbiased(*fixtures::dz2_omon(build_assoc(3))) == fixtures::z2_unbiased(3));
  CHECK(forget_assoc_to_unbiased(restrict_along_operad_morphism(terminal_morphism(build_assoc(3)),
                                                                *fixtures::l2_omon(build_comm(3)))) ==
        fixtures::l2_unbiased(3));

  auto broken = fixtures::z2_unbiased(3);
  broken.tensors[1].on_obj = {ObjId(1), ObjId(0)};
  CHECK_FALSE(check_unbiased(broken).ok());
  CHECK_THROWS_AS(extend_unbiased_to_assoc(broken), CheckFailure);
}

TEST_CASE("extended phi does not depend on the factorization") {
  auto u = fixtures::twisted_bz2_unbiased(3);
  auto c = extend_unbiased_to_assoc(u);
  const Operad& O = *c.operad();
  const ObjId star = ObjId(0);
  for (std::size_t m = 0; m <= 3; ++m)
    for (std::size_t n = 0; n <= 3; ++n)
      for (const FinMap& f : all_maps(m, n)) {
        std::vector<OpId> ids;
        for (std::size_t s : fiber_sizes(f)) ids.push_back(O.permutation_id(identity_map(s)));
        const OpId idn = O.permutation_id(identity_map(n));
        const std::vector<ObjId> A(m, star);
        const auto [g, h] = factorize_monotone_perm(f);
        // phi_f = alpha_g after the permutation h, whose own phi is trivial
        CHECK(c.phi(f, idn, ids, A) == u.alpha_at(g, A));
        if (is_permutation(f)) {
          CHECK(c.phi(f, idn, ids, A) == c.base()->identity(star));
        }
      }
}

TEST_CASE("lax functors and transformations") {
  auto comm = build_comm(3);
  auto l2 = fixtures::l2_omon(comm);
  auto id = identity_lax_functor(l2);
  auto r = check_lax_omon_functor(id);
  CHECK(r.ok());
  CHECK(r.note_of("lax.classification") == "strict");
  CHECK(compose(id, id) == id);

  // Joins on the poset; the functor constant at the top is lax, and its
  // unit comparison 0 -> 1 is not invertible.
  auto join = share(omon_from_set_algebra(monoid_algebra(comm, FinSet{{"0", "1"}}, {0, 1, 1, 1}, 0), fixtures::l2()));
  CHECK(check_omon_category(*join).ok());
  const CatPtr L = join->base();
  LaxOMonFunctor top{join, join, CatFunctor{L, L, {ObjId(1), ObjId(1)}, {MorId(1), MorId(1), MorId(1)}}, {}};
  const MorId le01 = *L->find_morphism("le01");
  top.xi[XiKey{OpId(0), {}}] = le01;
  r = check_lax_omon_functor(top);
  CHECK(r.ok());
  CHECK(r.note_of("lax.classification") == "lax");
  CHECK(classify(compose(top, id)) == LaxKind::lax);

  // Missing the unit comparison makes xi ill-typed.
  LaxOMonFunctor wrong = top;
  wrong.xi.clear();
  CHECK(check_lax_omon_functor(wrong).mentions("lax.xi_type", "xi e ()"));

  auto idj = identity_lax_functor(join);
  NatTransform t{idj.F, top.F, {le01, L->identity(ObjId(1))}};
  OMonTransformation mt{idj, top, t};
  CHECK(check_omon_transformation(mt).ok());
  CHECK(check_omon_transformation(vertical_compose(identity_transformation(top), mt)).ok());

  // Operad mismatch is structural.
  LaxOMonFunctor mixed{fixtures::l2_omon(build_assoc(3)), l2, identity_functor(fixtures::l2()), {}};
  mixed.F.dom = mixed.dom->base();
  mixed.F.cod = l2->base();
  CHECK(check_lax_omon_functor(mixed).has_structural());

  // Restriction commutes with composition.
  auto assoc = build_assoc(3);
  auto h = terminal_morphism(assoc);
  auto rj = share(restrict_along_operad_morphism(h, *join));
  auto rtop = restrict_along_operad_morphism(h, top, rj, rj);
  CHECK(check_lax_omon_functor(rtop).ok());
  CHECK(restrict_along_operad_morphism(h, compose(top, top), rj, rj) == compose(rtop, rtop));
  auto ridj = restrict_along_operad_morphism(h, idj, rj, rj);
  CHECK(check_omon_transformation(restrict_along_operad_morphism(h, mt, ridj, rtop)).ok());
}

TEST_CASE("weak functor from the twisted structure") {
  // The identity on BZ2 from the twisted to the plain structure, with xi
  // absorbing the cocycle: xi_p = s^{b(n)} where b(n) = [n = 2].
  auto tw = share(extend_unbiased_to_assoc(fixtures::twisted_bz2_unbiased(3)));
  UnbiasedMonoidal plain_u = fixtures::twisted_bz2_unbiased(3);
  plain_u.alpha.clear();
  auto plain = share(extend_unbiased_to_assoc(plain_u));
  const CatPtr B = tw->base();
  const MorId s = *B->find_morphism("s");
  LaxOMonFunctor F{tw, plain, identity_functor(B), {}};
  const Operad& O = *tw->operad();
  for (std::size_t p = 0; p < O.arity_size(2); ++p) F.xi[XiKey{OpId(p), {ObjId(0), ObjId(0)}}] = s;
  auto r = check_lax_omon_functor(F);
  CHECK(r.ok());
  CHECK(r.note_of("lax.classification") == "weak");
  F.xi.erase(F.xi.begin());
  CHECK(check_lax_omon_functor(F).mentions("lax.pentagon"));
}

TEST_CASE("structural set") {
  const FinSet samples[3] = {FinSet{}, singleton_set(), FinSet{{"x", "y"}}};
  CHECK(check_structural_set(StructuralSet{build_comm(3)}, samples).ok());
  CHECK(check_structural_set(StructuralSet{build_assoc(3)}, samples).count_of("set.assoc_squares") > 0);
  const FinSet xy[3] = {FinSet{{"a", "b"}}, FinSet{{"x", "y", "z"}}, FinSet{{"u", "v"}}};
  // [2,1,2] regroups (a,x,u) into ((x),(a,u))
  const auto phi = structural_phi(FinMap(2, {1, 0, 1}), xy);
  const std::size_t src = encode_tuple(std::vector<std::size_t>{1, 2, 0}, std::vector<std::size_t>{2, 3, 2});
  CHECK(phi[src] == encode_tuple(std::vector<std::size_t>{2, 2}, std::vector<std::size_t>{3, 4}));
  CHECK(structural_tensor(std::span<const FinSet>{}).size() == 1);
}
