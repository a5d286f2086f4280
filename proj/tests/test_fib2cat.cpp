#include <doctest.h>

#include <functional>

#include "opgroth/fib2cat.hpp"
#include "opgroth/fixtures.hpp"
#include "test_support.hpp"

using namespace opgroth;
using opgroth::testing::all_functors;

namespace {

// Lift counting through hom sets, independent of lift_count's flat scan.
bool oracle_is_dfib(const CatFunctor& p) {
  const FinCat& E = *p.dom;
  const FinCat& B = *p.cod;
  for (std::size_t c = 0; c < E.num_objects(); ++c)
    for (std::size_t d = 0; d < B.num_objects(); ++d)
      for (MorId f : B.hom(p.on_obj[c], ObjId(d))) {
        std::size_t n = 0;
        for (std::size_t e = 0; e < E.num_objects(); ++e)
          for (MorId g : E.hom(ObjId(c), ObjId(e)))
            if (p.on_mor[g.index()] == f) ++n;
        if (n != 1) return false;
      }
  return true;
}

CatPtr two_points() { return discrete_category({"x", "y"}); }

CatFunctor swap_dz2() {
  auto c = fixtures::dz2();
  return CatFunctor{c, c, {ObjId(1), ObjId(0)}, {MorId(1), MorId(0)}};
}

// All ISet 1-cells F -> G, by brute force.
std::vector<ISetMorphism> all_iset_cells(const ISetPtr& F, const ISetPtr& G) {
  std::vector<ISetMorphism> out;
  for (const auto& M : all_functors(F->index, G->index)) {
    ISetMorphism m{F, G, M, std::vector<FinFunction>(F->on_obj.size())};
    std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t x) {
      if (i == F->on_obj.size()) {
        if (validate_iset_cell(m).ok()) out.push_back(m);
        return;
      }
      if (x == F->on_obj[i].size()) {
        go(i + 1, 0);
        return;
      }
      m.mu[i].resize(F->on_obj[i].size());
      for (std::size_t v = 0; v < G->on_obj[M(ObjId(i)).index()].size(); ++v) {
        m.mu[i][x] = v;
        go(i, x + 1);
      }
    };
    go(0, 0);
  }
  return out;
}

std::vector<DFibMorphism> all_dfib_cells(const DFibPtr& p, const DFibPtr& q) {
  std::vector<DFibMorphism> out;
  for (const auto& f1 : all_functors(p->proj.dom, q->proj.dom))
    for (const auto& f0 : all_functors(p->proj.cod, q->proj.cod)) {
      DFibMorphism m{p, q, f1, f0};
      if (validate_dfib_cell(m).ok()) out.push_back(m);
    }
  return out;
}

}  // namespace

TEST_CASE("discrete fibration examples") {
  auto walk = fixtures::walk();
  CHECK(check_discrete_fibration(identity_fibration(walk)).ok());

  auto pts = two_points();
  auto term = terminal_category();
  DiscreteFibration to_point{CatFunctor{pts, term, {ObjId(0), ObjId(0)}, {MorId(0), MorId(0)}}};
  CHECK(check_discrete_fibration(to_point).ok());

  DiscreteFibration collapse{CatFunctor{walk, term, {ObjId(0), ObjId(0)}, {MorId(0), MorId(0), MorId(0)}}};
  auto r = check_discrete_fibration(collapse);
  CHECK_FALSE(r.ok());
  CHECK(r.mentions("dfib.unique_lift", "(a,id_()) has 2 lifts"));
  CHECK(lift_count(collapse, ObjId(0), MorId(0)) == 2);
  CHECK(lift_count(collapse, ObjId(1), MorId(0)) == 1);
}

TEST_CASE("lift") {
  auto walk = fixtures::walk();
  auto p = identity_fibration(walk);
  CHECK(lift(p, ObjId(0), MorId(0)) == MorId(0));
  CHECK(lift(p, ObjId(0), MorId(2)) == MorId(2));
  CHECK_THROWS_AS(lift(p, ObjId(1), MorId(2)), std::invalid_argument);

  DiscreteFibration collapse{
      CatFunctor{walk, terminal_category(), {ObjId(0), ObjId(0)}, {MorId(0), MorId(0), MorId(0)}}};
  CHECK_THROWS_AS(lift(collapse, ObjId(0), MorId(0)), std::logic_error);

  // {0,1} x X over {0,1}.
  auto two = discrete_category({"0", "1"});
  auto X = discrete_category({"x", "y", "z"});
  auto prod = product_category({two, X});
  DiscreteFibration p2{prod.projections[0]};
  CHECK(check_discrete_fibration(p2).ok());
  for (std::size_t c = 0; c < prod.category->num_objects(); ++c) {
    ObjId o(c);
    CHECK(lift(p2, o, two->identity(p2.proj(o))) == prod.category->identity(o));
  }
}

TEST_CASE("check_discrete_fibration agrees with the hom-set oracle") {
  std::vector<CatPtr> cats{terminal_category(), fixtures::walk(), fixtures::dz2(), chain_category(3),
                           discrete_category({"x", "y", "z"})};
  std::size_t checked = 0, fibrations = 0;
  for (const auto& E : cats)
    for (const auto& B : cats)
      for (const auto& F : all_functors(E, B)) {
        const bool lib = check_discrete_fibration(DiscreteFibration{F}).ok();
        CHECK(lib == oracle_is_dfib(F));
        ++checked;
        fibrations += lib;
      }
  CHECK(checked == 144);  // functor count over the list above
  CHECK(fibrations > 10);
  CHECK(fibrations < checked);
}

TEST_CASE("indexed sets") {
  auto g = fixtures::grade_iset();
  CHECK(validate_indexed_set(*g).ok());
  CHECK(validate_indexed_set(constant_indexed_set(fixtures::walk(), FinSet{{"s", "t"}})).ok());

  // Walk -> Set with u sending both elements of F(a) to one element of F(b).
  IndexedSet F{fixtures::walk(), {FinSet{{"a0", "a1"}}, FinSet{{"b0"}}}, {{0, 1}, {0}, {0, 0}}};
  CHECK(validate_indexed_set(F).ok());
  auto broken = F;
  broken.on_mor[0] = {1, 0};
  CHECK(validate_indexed_set(broken).mentions("iset.identity", "a at a0"));
  broken = F;
  broken.on_mor[2] = {0, 1};
  CHECK(validate_indexed_set(broken).has_structural());
}

TEST_CASE("dfib cells") {
  auto dz = std::make_shared<const DiscreteFibration>(identity_fibration(fixtures::dz2()));
  auto id = identity_cell(dz);
  CHECK(validate_dfib_cell(id).ok());
  CHECK(validate_dfib_cell(identity_cell(id)).ok());

  DFibMorphism swapped = id;
  swapped.f0 = swap_dz2();
  auto r = validate_dfib_cell(swapped);
  CHECK_FALSE(r.ok());
  CHECK(r.mentions("dfib_cell.square", "object 0"));
  CHECK(r.mentions("dfib_cell.square", "object 1"));

  DFibMorphism both = id;
  both.f1 = swap_dz2();
  both.f0 = swap_dz2();
  CHECK(validate_dfib_cell(both).ok());
  CHECK(compose(both, both).f0 == identity_functor(fixtures::dz2()));

  DFibMorphism mismatched = id;
  mismatched.f0.dom = terminal_category();
  CHECK(validate_dfib_cell(mismatched).has_structural());

  auto walk = std::make_shared<const DiscreteFibration>(identity_fibration(fixtures::walk()));
  auto wid = identity_cell(walk);
  auto two = vertical_compose(identity_cell(wid), identity_cell(wid));
  CHECK(validate_dfib_cell(two).ok());
}

TEST_CASE("iset cells") {
  auto g = fixtures::grade_iset();
  auto id = identity_cell(g);
  CHECK(validate_iset_cell(id).ok());
  CHECK(validate_iset_cell(identity_cell(id)).ok());
  CHECK(compose(id, id) == id);

  // Collapse p, q together.
  ISetMorphism collapse = id;
  collapse.mu[0] = {0, 0};
  CHECK(validate_iset_cell(collapse).ok());
  CHECK(compose(collapse, collapse) == collapse);

  // Over walk, a non-natural family.
  auto walk = fixtures::walk();
  auto F = std::make_shared<const IndexedSet>(
      IndexedSet{walk, {FinSet{{"a0", "a1"}}, FinSet{{"b0", "b1"}}}, {{0, 1}, {0, 1}, {0, 1}}});
  ISetMorphism m = identity_cell(F);
  m.mu[0] = {1, 0};
  CHECK(validate_iset_cell(m).mentions("iset_cell.naturality", "(u,a0)"));

  // A 2-cell over the walk index: eta: const_a => id needs mu compatibility.
  auto term = std::make_shared<const IndexedSet>(constant_indexed_set(walk, singleton_set()));
  auto cells = all_iset_cells(term, term);
  CHECK(cells.size() == 3);  // the three endofunctors of walk
  std::size_t two_cells = 0;
  for (const auto& a : cells)
    for (const auto& b : cells)
      if (a.M.dom == b.M.dom) {
        std::vector<MorId> comps(2);
        for (MorId c0 : walk->hom(a.M(ObjId(0)), b.M(ObjId(0))))
          for (MorId c1 : walk->hom(a.M(ObjId(1)), b.M(ObjId(1)))) {
            NatTransform eta{a.M, b.M, {c0, c1}};
            if (!validate_natural_transformation(eta).ok()) continue;
            ISet2Morphism t{a, b, eta};
            CHECK(validate_iset_cell(t).ok());
            ++two_cells;
          }
      }
  // Natural transformations among the endofunctors of walk: the poset
  // const_a <= id <= const_b gives 6 comparable pairs.
  CHECK(two_cells == 6);
}

TEST_CASE("empty products") {
  auto d = product_dfib({});
  CHECK(check_discrete_fibration(*d.fibration).ok());
  CHECK(d.fibration->total().num_objects() == 1);
  CHECK(d.fibration->base().num_morphisms() == 1);
  auto i = product_iset({});
  CHECK(validate_indexed_set(*i.indexed_set).ok());
  CHECK(i.indexed_set->on_obj.size() == 1);
  CHECK(i.indexed_set->on_obj[0].size() == 1);
}

TEST_CASE("products of fibrations and indexed sets") {
  FinSet X{{"x", "y"}}, Y{{"1", "2", "3"}};
  auto d = product_dfib({set_as_dfib(X), set_as_dfib(Y)});
  CHECK(check_discrete_fibration(*d.fibration).ok());
  std::vector<FinSet> xy{X, Y};
  CHECK(*d.fibration == *set_as_dfib(product_set(xy)));
  for (const auto& pr : d.projections) CHECK(validate_dfib_cell(pr).ok());

  auto g = fixtures::grade_iset();
  auto i = product_iset({g, g});
  CHECK(validate_indexed_set(*i.indexed_set).ok());
  auto at00 = i.index.object_of(std::vector<ObjId>{ObjId(0), ObjId(0)});
  CHECK(i.indexed_set->on_obj[at00.index()].size() == 4);
  CHECK(i.indexed_set->on_obj[at00.index()].label(1) == "(p,q)");
  for (const auto& pr : i.projections) CHECK(validate_iset_cell(pr).ok());

  auto u = product_iset({g});
  CHECK(u.indexed_set == g);

  auto s = product_iset({set_as_iset(X), set_as_iset(Y)});
  CHECK(*s.index.category == *set_as_iset(product_set(xy))->index);
  for (const auto& v : s.indexed_set->on_obj) CHECK(v.size() == 1);
}

TEST_CASE("strict universal property of products") {
  SUBCASE("indexed sets") {
    auto g = fixtures::grade_iset();
    auto w = std::make_shared<const IndexedSet>(
        IndexedSet{fixtures::walk(), {FinSet{{"a0", "a1"}}, FinSet{{"b0"}}}, {{0, 1}, {0}, {0, 0}}});
    auto prod = product_iset({g, w});
    auto H = set_as_iset(FinSet{{"h0", "h1"}});
    auto into_g = all_iset_cells(H, g);
    auto into_w = all_iset_cells(H, w);
    auto into_p = all_iset_cells(H, prod.indexed_set);
    CHECK(into_p.size() == into_g.size() * into_w.size());
    std::size_t pairs = 0;
    for (const auto& a : into_g)
      for (const auto& b : into_w) {
        auto t = tuple_cell(prod, {a, b});
        CHECK(validate_iset_cell(t).ok());
        CHECK(compose(prod.projections[0], t) == a);
        CHECK(compose(prod.projections[1], t) == b);
        std::size_t matching = 0;
        for (const auto& c : into_p)
          if (compose(prod.projections[0], c) == a && compose(prod.projections[1], c) == b) ++matching;
        CHECK(matching == 1);
        ++pairs;
      }
    CHECK(pairs > 10);
  }
  SUBCASE("fibrations") {
    auto walk = std::make_shared<const DiscreteFibration>(identity_fibration(fixtures::walk()));
    auto pts = set_as_dfib(FinSet{{"0", "1"}});
    auto prod = product_dfib({walk, pts});
    auto src = set_as_dfib(FinSet{{"s", "t"}});
    auto into_w = all_dfib_cells(src, walk);
    auto into_s = all_dfib_cells(src, pts);
    auto into_p = all_dfib_cells(src, prod.fibration);
    CHECK(into_p.size() == into_w.size() * into_s.size());
    for (const auto& a : into_w)
      for (const auto& b : into_s) {
        auto t = tuple_cell(prod, {a, b});
        CHECK(validate_dfib_cell(t).ok());
        std::size_t matching = 0;
        for (const auto& c : into_p)
          if (compose(prod.projections[0], c) == a && compose(prod.projections[1], c) == b) ++matching;
        CHECK(matching == 1);
      }
  }
}

TEST_CASE("sets embed as fibrations") {
  for (std::size_t n = 0; n <= 4; ++n) {
    FinSet X;
    for (std::size_t k = 0; k < n; ++k) X.elements.push_back("e" + std::to_string(k));
    CHECK(check_discrete_fibration(*set_as_dfib(X)).ok());
    CHECK(validate_indexed_set(*set_as_iset(X)).ok());
  }
}
