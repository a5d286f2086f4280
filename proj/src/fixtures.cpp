#include "opgroth/fixtures.hpp"

#include <map>

#include "opgroth/tuples.hpp"

namespace opgroth::fixtures {

CatPtr walk() {
  FinCatBuilder b;
  const ObjId a = b.add_object("a");
  const ObjId bb = b.add_object("b");
  b.add_arrow("u", a, bb);
  return b.build_shared();
}

CatPtr dz2() { return discrete_category({"0", "1"}); }

CatPtr l2() { return chain_category(2); }

CatPtr bz2() {
  FinCatBuilder b;
  const ObjId star = b.add_object("*");
  const MorId s = b.add_arrow("s", star, star);
  b.set_compose(s, s, *b.find_morphism("id_*"));
  return b.build_shared();
}

ISetPtr grade_iset() {
  return std::make_shared<const IndexedSet>(
      IndexedSet{dz2(), {FinSet{{"p", "q"}}, FinSet{{"r"}}}, {{0, 1}, {0}}});
}

SetAlgebra z2_algebra(const OperadPtr& o) { return monoid_algebra(o, FinSet{{"0", "1"}}, {0, 1, 1, 0}, 0); }

SetAlgebra meet_algebra(const OperadPtr& o) { return monoid_algebra(o, FinSet{{"0", "1"}}, {0, 0, 0, 1}, 1); }

SetAlgebra grade_algebra(const OperadPtr& o) {
  // rows p, q, r
  return monoid_algebra(o, FinSet{{"p", "q", "r"}}, {0, 1, 2, 1, 1, 2, 2, 2, 1}, 0);
}

OMonPtr dz2_omon(const OperadPtr& o) {
  return std::make_shared<const OMonCategory>(omon_from_set_algebra(z2_algebra(o), dz2()));
}

OMonPtr l2_omon(const OperadPtr& o) {
  return std::make_shared<const OMonCategory>(omon_from_set_algebra(meet_algebra(o), l2()));
}

namespace {

// Unbiased tensors of a monoid on the objects of a thin category.
UnbiasedMonoidal unbiased_from_monoid(const CatPtr& thin, const std::vector<std::size_t>& mul, std::size_t unit,
                                      std::size_t max_arity) {
  const OMonCategory c = omon_from_set_algebra(
      monoid_algebra(build_comm(max_arity), FinSet{thin->object_labels()}, mul, unit), thin);
  UnbiasedMonoidal u;
  u.base = thin;
  u.max_arity = max_arity;
  for (std::size_t n = 0; n <= max_arity; ++n) u.tensors.push_back(c.tensor(n, OpId(0)));
  return u;
}

}  // namespace

UnbiasedMonoidal z2_unbiased(std::size_t max_arity) { return unbiased_from_monoid(dz2(), {0, 1, 1, 0}, 0, max_arity); }

UnbiasedMonoidal l2_unbiased(std::size_t max_arity) { return unbiased_from_monoid(l2(), {0, 0, 0, 1}, 1, max_arity); }

UnbiasedMonoidal twisted_bz2_unbiased(std::size_t max_arity) {
  const CatPtr B = bz2();
  const MorId id = B->identity(ObjId(0));
  const MorId s = *B->find_morphism("s");
  UnbiasedMonoidal u;
  u.base = B;
  u.max_arity = max_arity;
  for (std::size_t n = 0; n <= max_arity; ++n) {
    TensorTable t;
    t.arity = n;
    t.on_obj.assign(1, ObjId(0));
    std::vector<std::size_t> radices(n, 2);
    for_each_tuple(radices, [&](std::span<const std::size_t> d) {
      std::size_t parity = 0;
      for (std::size_t k : d) parity ^= (MorId(k) == s);
      t.on_mor.push_back(parity ? s : id);
    });
    u.tensors.push_back(std::move(t));
  }
  auto b = [](std::size_t k) -> std::size_t { return k == 2; };
  for (std::size_t m = 0; m <= max_arity; ++m)
    for (std::size_t n = 0; n <= max_arity; ++n)
      for (const FinMap& f : all_maps(m, n)) {
        if (!is_monotone(f)) continue;
        std::size_t c = b(m) + b(n);
        for (std::size_t k : fiber_sizes(f)) c += b(k);
        if (c % 2) u.alpha[{f, std::vector<ObjId>(m, ObjId(0))}] = s;
      }
  return u;
}

namespace {

// on_mor from explicit non-identity entries; identities map identically.
IndexedSet iset_over(const CatPtr& c, std::vector<FinSet> sets, const std::map<std::string, FinFunction>& maps) {
  IndexedSet F{c, std::move(sets), {}};
  for (std::size_t u = 0; u < c->num_morphisms(); ++u) {
    const MorId m(u);
    if (c->is_identity(m)) {
      FinFunction id(F.on_obj[c->src(m).index()].size());
      for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
      F.on_mor.push_back(std::move(id));
    } else {
      F.on_mor.push_back(maps.at(c->label(m)));
    }
  }
  return F;
}

// nu computed in a total algebra: elem[i][x] is the algebra element of
// (i, x), and the result is located in its fiber.
LaxToSetPtr graded_laxtoset(const OMonPtr& index, IndexedSet F, const SetAlgebra& total,
                            const std::vector<std::vector<std::size_t>>& elem) {
  std::vector<std::size_t> pos(total.carrier.size(), 0);
  for (const auto& fib : elem)
    for (std::size_t x = 0; x < fib.size(); ++x) pos[fib[x]] = x;
  auto Fp = std::make_shared<const IndexedSet>(std::move(F));
  return std::make_shared<const LaxToSet>(make_lax_to_set(
      index, Fp, [&](OpId p, std::span<const ObjId> objs, std::span<const std::size_t> xs) {
        std::vector<std::size_t> es(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) es[k] = elem[objs[k].index()][xs[k]];
        return pos[total.apply(p, es)];
      }));
}

std::size_t zero_rule(OpId, std::span<const ObjId>, std::span<const std::size_t>) { return 0; }

}  // namespace

LaxToSetPtr grade_laxtoset(const OMonPtr& index) {
  return graded_laxtoset(index, iset_over(index->base(), {FinSet{{"p", "q"}}, FinSet{{"r"}}}, {}),
                         grade_algebra(index->operad()), {{0, 1}, {2}});
}

LaxToSetPtr unit_fiber_laxtoset(const OMonPtr& index) {
  auto F = std::make_shared<const IndexedSet>(iset_over(index->base(), {FinSet{{"e"}}, FinSet{}}, {}));
  return std::make_shared<const LaxToSet>(make_lax_to_set(index, F, zero_rule));
}

LaxToSetPtr torsor_laxtoset(const OMonPtr& index) {
  auto F = std::make_shared<const IndexedSet>(iset_over(index->base(), {FinSet{{"a", "b"}}}, {{"s", {1, 0}}}));
  return std::make_shared<const LaxToSet>(
      make_lax_to_set(index, F, [](OpId, std::span<const ObjId> objs, std::span<const std::size_t> xs) {
        std::size_t v = objs.size() == 2;
        for (std::size_t x : xs) v ^= x;
        return v;
      }));
}

LaxToSetPtr meet_laxtoset(const OMonPtr& index) {
  const SetAlgebra chain =
      monoid_algebra(index->operad(), FinSet{{"*", "a", "b"}}, {0, 0, 0, 0, 1, 1, 0, 1, 2}, 2);
  return graded_laxtoset(index, iset_over(index->base(), {FinSet{{"*"}}, FinSet{{"a", "b"}}}, {{"le01", {0}}}),
                         chain, {{0}, {1, 2}});
}

LaxToSetPtr top_fiber_laxtoset(const OMonPtr& index) {
  auto F = std::make_shared<const IndexedSet>(iset_over(index->base(), {FinSet{}, FinSet{{"*"}}}, {{"le01", {}}}));
  return std::make_shared<const LaxToSet>(make_lax_to_set(index, F, zero_rule));
}

}  // namespace opgroth::fixtures
