#include <doctest.h>

#include <chrono>
#include <map>
#include <set>

#include "opgroth/fixtures.hpp"
#include "opgroth/groth.hpp"

using namespace opgroth;

namespace {

ISetPtr iset(CatPtr index, std::vector<FinSet> values, std::vector<FinFunction> maps) {
  return std::make_shared<const IndexedSet>(IndexedSet{std::move(index), std::move(values), std::move(maps)});
}

ISetPtr y12() {
  return iset(discrete_category({"1", "2"}), {FinSet{{"a"}}, FinSet{{"b", "c"}}}, {{0}, {0, 1}});
}

// Hom-set sizes of the category of elements, counted from the definition.
std::map<std::pair<std::string, std::string>, std::size_t> oracle_homs(const IndexedSet& F) {
  std::map<std::pair<std::string, std::string>, std::size_t> h;
  const FinCat& I = *F.index;
  for (std::size_t f = 0; f < I.num_morphisms(); ++f) {
    const auto& a = I.arrow(MorId(f));
    for (std::size_t x = 0; x < F.on_obj[a.src.index()].size(); ++x) {
      const std::size_t y = F.on_mor[f][x];
      ++h[{I.label(a.src) + "." + F.on_obj[a.src.index()].elements[x],
           I.label(a.tgt) + "." + F.on_obj[a.tgt.index()].elements[y]}];
    }
  }
  return h;
}

std::map<std::pair<std::string, std::string>, std::size_t> library_homs(const FinCat& E) {
  std::map<std::pair<std::string, std::string>, std::size_t> h;
  for (std::size_t a = 0; a < E.num_objects(); ++a)
    for (std::size_t b = 0; b < E.num_objects(); ++b) {
      const auto n = E.hom(ObjId(a), ObjId(b)).size();
      if (n) h[{E.label(ObjId(a)), E.label(ObjId(b))}] = n;
    }
  return h;
}

}  // namespace

TEST_CASE("groth on objects") {
  auto G = groth(y12());
  CHECK(check_discrete_fibration(*G).ok());
  CHECK(validate_category(G->total()).ok());
  CHECK(G->total().num_objects() == 3);
  auto T = transpose(G);
  CHECK(T->on_obj[0].size() == 1);
  CHECK(T->on_obj[1].size() == 2);
  CHECK(T->on_obj[1].elements == std::vector<std::string>{"2.b", "2.c"});

  auto walk = fixtures::walk();
  auto single = std::make_shared<const IndexedSet>(constant_indexed_set(walk, singleton_set()));
  auto W = groth(single);
  CHECK(check_discrete_fibration(*W).ok());
  CHECK(is_isomorphism(W->proj));
  CHECK(W->total().label(MorId(2)) == "u@a.*");

  auto g = groth(fixtures::grade_iset());
  CHECK(g->total().object_labels() == std::vector<std::string>{"0.p", "0.q", "1.r"});
  CHECK(g->proj.on_obj == std::vector<ObjId>{ObjId(0), ObjId(0), ObjId(1)});
}

TEST_CASE("transpose on objects") {
  FinSet X{{"x", "y", "z"}};
  auto T = transpose(set_as_dfib(X));
  CHECK(*T->index == *discrete_category(X.elements));
  for (const auto& v : T->on_obj) CHECK(v.size() == 1);
  CHECK(validate_indexed_set(*T).ok());

  auto walk = fixtures::walk();
  auto prod = product_category({walk, discrete_category({"x", "y"})});
  auto p = std::make_shared<const DiscreteFibration>(DiscreteFibration{prod.projections[0]});
  CHECK(check_discrete_fibration(*p).ok());
  auto Tp = transpose(p);
  CHECK(Tp->on_obj[0].elements == std::vector<std::string>{"(a,x)", "(a,y)"});
  CHECK(Tp->on_obj[1].size() == 2);
  CHECK(Tp->on_mor[2] == FinFunction{0, 1});
}

TEST_CASE("phi and psi components") {
  auto walk = fixtures::walk();
  auto single = std::make_shared<const IndexedSet>(constant_indexed_set(walk, singleton_set()));
  auto ph = phi(single);
  CHECK(check_phi_component(single, ph).ok());
  CHECK(ph.mu == std::vector<FinFunction>{{0}, {0}});

  auto g = fixtures::grade_iset();
  auto pg = phi(g);
  CHECK(check_phi_component(g, pg).ok());
  CHECK(pg.dom->on_obj[0].elements == std::vector<std::string>{"0.p", "0.q"});
  CHECK(pg.dom->on_obj[1].elements == std::vector<std::string>{"1.r"});
  CHECK(pg.mu == std::vector<FinFunction>{{0, 1}, {0}});

  auto X = set_as_dfib(FinSet{{"x", "y"}});
  auto ps = psi(X);
  CHECK(check_psi_component(X, ps).ok());
  CHECK(ps.dom->total().object_labels() == std::vector<std::string>{"x.x", "y.y"});
  CHECK(compose(ps, psi_inverse(X)) == identity_cell(X));

  // Dropping a pair leaves a non-total component.
  auto broken = pg;
  broken.mu[0].pop_back();
  CHECK(check_phi_component(g, broken).mentions("groth.phi_invertible"));
  broken = pg;
  broken.mu[0] = {1, 1};
  CHECK(check_phi_component(g, broken).mentions("groth.phi_invertible", "bijection"));
}

TEST_CASE("groth agrees with the hom-count oracle on a random corpus") {
  CorpusParams params;
  params.seed = 7;
  auto c = generate_corpus(params);
  for (const auto& F : c.isets) {
    auto G = groth(F);
    CHECK(library_homs(G->total()) == oracle_homs(*F));
    CHECK(validate_category(G->total()).ok());
  }
}

TEST_CASE("groth and transpose on cells") {
  auto g = fixtures::grade_iset();
  ISetMorphism collapse = identity_cell(g);
  collapse.mu[0] = {0, 0};
  auto gc = groth(collapse);
  CHECK(validate_dfib_cell(gc).ok());
  CHECK(gc.f1.on_obj == std::vector<ObjId>{ObjId(0), ObjId(0), ObjId(2)});
  CHECK(transpose(gc).mu == collapse.mu);

  // A 2-cell over the walk: const_a => id on the constant singleton.
  auto walk = fixtures::walk();
  auto single = std::make_shared<const IndexedSet>(constant_indexed_set(walk, singleton_set()));
  CatFunctor const_a{walk, walk, {ObjId(0), ObjId(0)}, {MorId(0), MorId(0), MorId(0)}};
  ISetMorphism m{single, single, const_a, {{0}, {0}}};
  ISetMorphism id = identity_cell(single);
  ISet2Morphism a{m, id, NatTransform{const_a, identity_functor(walk), {MorId(0), MorId(2)}}};
  REQUIRE(validate_iset_cell(a).ok());
  auto ga = groth(a);
  CHECK(validate_dfib_cell(ga).ok());
  CHECK(transpose(ga).eta == a.eta);
}

TEST_CASE("product comparisons are invertible") {
  auto g = fixtures::grade_iset();
  auto cmp = groth_product_comparison({g, y12()});
  CHECK(validate_dfib_cell(cmp).ok());
  CHECK(is_invertible(cmp));
  CHECK(is_invertible(groth_product_comparison({})));
  CHECK(is_invertible(groth_product_comparison({g})));

  auto p = groth(g);
  auto tc = transpose_product_comparison({p, set_as_dfib(FinSet{{"x", "y"}})});
  CHECK(validate_iset_cell(tc).ok());
  CHECK(is_invertible(tc));
  CHECK(is_invertible(transpose_product_comparison({})));
}

TEST_CASE("default corpus round trip") {
  CorpusParams params;
  const auto t0 = std::chrono::steady_clock::now();
  auto c = generate_corpus(params);
  CHECK(c.num_objects() >= 40);
  CHECK(c.num_one_cells() >= 60);
  CHECK(c.num_two_cells() >= 20);
  auto r = roundtrip_report(c, 2);
  INFO(r.summary());
  CHECK(r.ok());
  CHECK(r.count_of("groth.phi_naturality_squares") == c.iset_cells.size());
  CHECK(r.count_of("groth.psi_naturality_squares") == c.dfib_cells.size());
  CHECK(r.count_of("groth.composable_pairs") > 0);
  CHECK(r.count_of("transpose.composable_pairs") > 0);
  CHECK(r.note_of("corpus.seed") == "20240229");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("corpus round trip took " << secs << " s");

  // Same content regardless of thread count.
  CHECK(roundtrip_report(c, 1).summary() == r.summary());
}

TEST_CASE("discrete corpus round trip") {
  std::vector<ISetPtr> isets;
  std::vector<DFibPtr> dfibs;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::string> ys;
    std::vector<FinSet> vals;
    std::vector<FinFunction> maps;
    for (std::size_t y = 0; y < n; ++y) {
      ys.push_back("y" + std::to_string(y));
      FinSet s;
      for (std::size_t x = 0; x <= y; ++x) s.elements.push_back("x" + std::to_string(x));
      FinFunction id(s.size());
      for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
      vals.push_back(s);
      maps.push_back(id);
    }
    auto F = iset(discrete_category(ys), vals, maps);
    isets.push_back(F);
    dfibs.push_back(groth(F));
  }
  CorpusParams params;
  params.one_cells = 16;
  params.two_cells = 4;
  auto c = generate_cells(isets, dfibs, params);
  auto r = roundtrip_report(c);
  INFO(r.summary());
  CHECK(r.ok());
  CHECK(c.num_one_cells() > 0);
}
