#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "opgroth/fincat.hpp"
#include "opgroth/finmap.hpp"

using namespace opgroth;

namespace {

CatPtr walk() {
  FinCatBuilder b;
  auto a = b.add_object("a");
  auto bb = b.add_object("b");
  b.add_arrow("u", a, bb);
  return b.build_shared();
}

// One-object category from a monoid multiplication table; element 0 is the unit.
CatPtr monoid_category(const std::vector<std::string>& names, const std::vector<std::vector<int>>& mul) {
  FinCatBuilder b;
  auto o = b.add_object("*");
  std::vector<MorId> ids{MorId(0)};
  for (std::size_t k = 1; k < names.size(); ++k) ids.push_back(b.add_arrow(names[k], o, o));
  for (std::size_t g = 0; g < names.size(); ++g)
    for (std::size_t f = 0; f < names.size(); ++f) b.set_compose(ids[g], ids[f], ids[mul[g][f]]);
  return b.build_shared();
}

// Independent oracle: raw table scan, no use of the library's accessors
// beyond the stored vectors.
bool naive_is_category(const FinCat& c) {
  const auto& arrows = c.arrows();
  const auto& tab = c.table();
  const std::size_t nm = arrows.size();
  auto at = [&](std::size_t g, std::size_t f) { return tab[g * nm + f]; };
  for (std::size_t g = 0; g < nm; ++g)
    for (std::size_t f = 0; f < nm; ++f) {
      bool comp = arrows[g].src == arrows[f].tgt;
      if (comp != at(g, f).has_value()) return false;
      if (comp && (arrows[at(g, f)->index()].src != arrows[f].src || arrows[at(g, f)->index()].tgt != arrows[g].tgt))
        return false;
    }
  for (std::size_t f = 0; f < nm; ++f) {
    std::size_t it = c.identities()[arrows[f].tgt.index()].index();
    std::size_t is = c.identities()[arrows[f].src.index()].index();
    if (at(it, f)->index() != f || at(f, is)->index() != f) return false;
  }
  for (std::size_t f = 0; f < nm; ++f)
    for (std::size_t g = 0; g < nm; ++g)
      for (std::size_t h = 0; h < nm; ++h) {
        if (arrows[g].src != arrows[f].tgt || arrows[h].src != arrows[g].tgt) continue;
        if (at(h, at(g, f)->index()) != at(at(h, g)->index(), f)) return false;
      }
  return true;
}

FinCat with_entry(const FinCat& c, std::size_t g, std::size_t f, std::optional<MorId> h) {
  auto tab = c.table();
  tab[g * c.num_morphisms() + f] = h;
  return FinCat(c.object_labels(), c.arrows(), c.identities(), std::move(tab));
}

}  // namespace

TEST_CASE("walk category validates and a broken unit is named") {
  auto c = walk();
  CHECK(c->num_objects() == 2);
  CHECK(c->num_morphisms() == 3);
  CHECK(c->label(c->identity(ObjId(0))) == "id_a");
  CHECK(validate_category(*c).ok());

  auto u = *c->find_morphism("u");
  auto ida = *c->find_morphism("id_a");
  auto idb = *c->find_morphism("id_b");
  FinCat broken = with_entry(*c, u.index(), ida.index(), idb);
  auto r = validate_category(broken);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.has_structural());
  CHECK(r.mentions("category.unit", "(u,id_a)"));
}

TEST_CASE("missing or superfluous table entries are structural") {
  auto c = walk();
  auto u = *c->find_morphism("u");
  auto ida = *c->find_morphism("id_a");
  auto r = validate_category(with_entry(*c, u.index(), ida.index(), std::nullopt));
  CHECK(r.has_structural());
  CHECK(r.mentions("category.compose_missing", "(u,id_a)"));
  auto r2 = validate_category(with_entry(*c, u.index(), u.index(), u));
  CHECK(r2.has_structural());
  CHECK(r2.mentions("category.compose_extra"));
}

TEST_CASE("poset 0<=1<=2 is a category") {
  auto c = chain_category(3);
  CHECK(c->num_morphisms() == 6);
  auto r = validate_category(*c);
  CHECK(r.ok());
  // oracle: sum over objects of (arrows in) * (arrows out)
  std::size_t pairs = 0;
  for (std::size_t o = 0; o < 3; ++o) pairs += (o + 1) * (3 - o);
  CHECK(r.count_of("category.composable_pairs") == pairs);
}

TEST_CASE("validate_category agrees with a naive oracle on a mutated corpus") {
  std::vector<CatPtr> corpus{walk(), chain_category(3), chain_category(4), terminal_category(),
                             discrete_category({"x", "y"}),
                             monoid_category({"e", "s"}, {{0, 1}, {1, 0}}),
                             monoid_category({"e", "a", "b"}, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}),
                             monoid_category({"e", "z"}, {{0, 1}, {1, 1}}),
                             product_category({walk(), walk()}).category};
  std::size_t checked = 0, invalid = 0;
  for (const auto& c : corpus) {
    REQUIRE(c->num_objects() <= 5);
    REQUIRE(c->num_morphisms() <= 12);
    CHECK(validate_category(*c).ok() == naive_is_category(*c));
    const std::size_t nm = c->num_morphisms();
    for (std::size_t g = 0; g < nm; ++g)
      for (std::size_t f = 0; f < nm; ++f) {
        if (!c->composable(MorId(g), MorId(f))) continue;
        for (std::size_t h = 0; h < nm; ++h) {
          FinCat m = with_entry(*c, g, f, MorId(h));
          bool oracle = naive_is_category(m);
          CHECK(validate_category(m).ok() == oracle);
          ++checked;
          invalid += oracle ? 0 : 1;
        }
      }
  }
  CHECK(checked > 400);
  CHECK(invalid > 0);
}

TEST_CASE("products of categories") {
  auto empty = product_category({});
  CHECK(empty.category->num_objects() == 1);
  CHECK(empty.category->num_morphisms() == 1);
  CHECK(validate_category(*empty.category).ok());

  auto w = walk();
  auto sq = product_category({w, w});
  CHECK(sq.category->num_objects() == 4);
  CHECK(sq.category->num_morphisms() == 9);
  CHECK(validate_category(*sq.category).ok());
  CHECK(sq.category->label(ObjId(1)) == "(a,b)");
  for (const auto& p : sq.projections) CHECK(validate_functor(p).ok());

  auto unary = product_category({w});
  CHECK(unary.category == w);
  CHECK(unary.projections[0] == identity_functor(w));

  // projections jointly reflect equality
  const FinCat& P = *sq.category;
  for (std::size_t a = 0; a < P.num_morphisms(); ++a)
    for (std::size_t b = 0; b < P.num_morphisms(); ++b) {
      bool agree = sq.morphism_parts(MorId(a)) == sq.morphism_parts(MorId(b));
      CHECK(agree == (a == b));
    }

  // universal property: the tuple of the projections is the identity
  CHECK(tuple_functor(sq, sq.category, sq.projections) == identity_functor(sq.category));
  auto triple = product_category({w, chain_category(3), discrete_category({"x", "y"})});
  CHECK(triple.category->num_objects() == 2 * 3 * 2);
  CHECK(triple.category->num_morphisms() == 3 * 6 * 2);
  CHECK(validate_category(*triple.category).ok());
}

TEST_CASE("functor and transformation validation") {
  auto w = walk();
  CHECK(validate_functor(identity_functor(w)).ok());
  auto t = terminal_category();
  CatFunctor constant{w, t, {ObjId(0), ObjId(0)}, {MorId(0), MorId(0), MorId(0)}};
  CHECK(validate_functor(constant).ok());

  CatFunctor broken = identity_functor(w);
  broken.on_mor[w->find_morphism("u")->index()] = *w->find_morphism("id_a");
  auto r = validate_functor(broken);
  CHECK(r.mentions("functor.source_target", "u"));

  CatFunctor bad_size{w, t, {ObjId(0)}, {}};
  CHECK(validate_functor(bad_size).has_structural());

  // the two object inclusions of the terminal category into walk and the
  // transformation between them given by u
  CatFunctor at_a{t, w, {ObjId(0)}, {MorId(0)}};
  CatFunctor at_b{t, w, {ObjId(1)}, {MorId(1)}};
  NatTransform nu{at_a, at_b, {*w->find_morphism("u")}};
  CHECK(validate_natural_transformation(nu).ok());
  NatTransform wrong{at_a, at_b, {MorId(0)}};
  CHECK(validate_natural_transformation(wrong).mentions("nattrans.component_type"));
  CHECK(vertical_compose(identity_transformation(at_b), nu) == nu);
  CHECK(whisker_left(identity_functor(w), nu) == nu);
}

TEST_CASE("fibers and induced fiber maps") {
  FinMap f = FinMap::from_one_based(2, {2, 1, 1});
  CHECK(fiber(f, 0) == std::vector<std::size_t>{1, 2});
  CHECK(fiber(f, 1) == std::vector<std::size_t>{0});
  CHECK(fiber(identity_map(3), 1) == std::vector<std::size_t>{1});
  CHECK_THROWS(fiber(f, 2));

  FinMap g = FinMap::from_one_based(1, {1, 1});
  CHECK(induced_fiber_map(identity_map(1), g, 0) == FinMap::from_one_based(1, {1, 1}));
  CHECK(induced_fiber_map(FinMap::from_one_based(1, {1, 1}), FinMap::from_one_based(2, {2, 1}), 0) ==
        FinMap::from_one_based(2, {2, 1}));
  for (const auto& h : all_maps(3, 2))
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(induced_fiber_map(h, identity_map(3), i) == identity_map(fiber(h, i).size()));
  CHECK_THROWS(induced_fiber_map(f, identity_map(2), 0));
}

TEST_CASE("block permutations") {
  FinMap f = FinMap::from_one_based(2, {1, 1, 2});
  std::vector<FinMap> ids{identity_map(2), identity_map(1)};
  CHECK(block_permutation(f, ids) == identity_map(3));
  std::vector<FinMap> taus{FinMap::from_one_based(2, {2, 1}), identity_map(1)};
  CHECK(block_permutation(f, taus) == FinMap::from_one_based(3, {2, 1, 3}));
  std::vector<FinMap> bad{identity_map(1), identity_map(1)};
  CHECK_THROWS(block_permutation(f, bad));

  FinMap f4 = FinMap::from_one_based(2, {1, 1, 2, 2});
  std::vector<FinMap> swaps(2, FinMap::from_one_based(2, {2, 1}));
  CHECK(compose(block_permutation(f4, swaps), block_permutation(f4, swaps)) == identity_map(4));

  // homomorphism property for all fiberwise pairs, m <= 4
  for (std::size_t m = 0; m <= 4; ++m)
    for (std::size_t n = 0; n <= 3; ++n)
      for (const auto& h : all_maps(m, n)) {
        const auto sizes = fiber_sizes(h);
        std::vector<std::vector<FinMap>> choices;
        for (auto s : sizes) choices.push_back(all_permutations(s));
        std::vector<std::size_t> radices;
        for (auto& c : choices) radices.push_back(c.size());
        std::vector<std::vector<std::size_t>> tuples;
        std::vector<std::size_t> d(radices.size(), 0);
        std::size_t total = 1;
        for (auto r : radices) total *= r;
        for (std::size_t code = 0; code < total; ++code) {
          std::size_t x = code;
          for (std::size_t k = radices.size(); k-- > 0;) {
            d[k] = x % radices[k];
            x /= radices[k];
          }
          tuples.push_back(d);
        }
        for (const auto& a : tuples)
          for (const auto& b : tuples) {
            std::vector<FinMap> al, be, ab;
            for (std::size_t i = 0; i < n; ++i) {
              al.push_back(choices[i][a[i]]);
              be.push_back(choices[i][b[i]]);
              ab.push_back(compose(al.back(), be.back()));
            }
            auto ta = block_permutation(h, al);
            CHECK(compose(h, ta) == h);
            CHECK(compose(ta, block_permutation(h, be)) == block_permutation(h, ab));
          }
      }
}

TEST_CASE("monotone-permutation factorization") {
  FinMap mono = FinMap::from_one_based(3, {1, 1, 3});
  auto fm = factorize_monotone_perm(mono);
  CHECK(fm.g == mono);
  CHECK(fm.h == identity_map(3));
  auto fs = factorize_monotone_perm(FinMap::from_one_based(2, {2, 1}));
  CHECK(fs.g == identity_map(2));
  CHECK(fs.h == FinMap::from_one_based(2, {2, 1}));
  auto fx = factorize_monotone_perm(FinMap::from_one_based(2, {2, 1, 1}));
  CHECK(fx.g == FinMap::from_one_based(2, {1, 1, 2}));
  CHECK(fx.h == FinMap::from_one_based(3, {3, 1, 2}));
}

TEST_CASE("factorization is the unique fiber-order-preserving one (brute force, m,n <= 4)") {
  std::size_t maps = 0;
  for (std::size_t m = 0; m <= 4; ++m)
    for (std::size_t n = 0; n <= 4; ++n)
      for (const auto& f : all_maps(m, n)) {
        ++maps;
        std::vector<std::pair<FinMap, FinMap>> found;
        // enumerate permutations with std::next_permutation directly
        std::vector<std::size_t> hv(m);
        std::iota(hv.begin(), hv.end(), 0);
        do {
          bool keeps_order = true;
          for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b)
              if (f.values[a] == f.values[b] && hv[a] > hv[b]) keeps_order = false;
          if (!keeps_order) continue;
          std::vector<std::size_t> gv(m);
          for (std::size_t j = 0; j < m; ++j) gv[hv[j]] = f.values[j];
          if (!std::is_sorted(gv.begin(), gv.end())) continue;
          found.emplace_back(FinMap(n, gv), FinMap(m, hv));
        } while (std::next_permutation(hv.begin(), hv.end()));
        REQUIRE(found.size() == 1);
        auto fac = factorize_monotone_perm(f);
        CHECK(fac.g == found[0].first);
        CHECK(fac.h == found[0].second);
        CHECK(compose(fac.g, fac.h) == f);
      }
  // sum of n^m over m,n <= 4 with 0^0 = 1
  CHECK(maps == 499);
}

TEST_CASE("reindexing by fibers") {
  std::vector<std::string> t{"A", "B", "C"};
  auto same = reindex_by_fibers(identity_map(3), t);
  CHECK(same == std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"C"}});
  auto g = reindex_by_fibers(FinMap::from_one_based(2, {2, 1, 1}), t);
  CHECK(g == std::vector<std::vector<std::string>>{{"B", "C"}, {"A"}});
  CHECK(reindex_by_fibers(terminal_map(3), t) == std::vector<std::vector<std::string>>{{"A", "B", "C"}});
  CHECK_THROWS(reindex_by_fibers(identity_map(2), t));

  for (std::size_t m = 0; m <= 5; ++m)
    for (std::size_t n = 0; n <= 3; ++n)
      for (const auto& f : all_maps(m, n)) {
        std::vector<int> xs(m);
        std::iota(xs.begin(), xs.end(), 10);
        CHECK(flatten_fibers(f, reindex_by_fibers(f, xs)) == xs);
      }
}

TEST_CASE("Fin map enumeration and text form") {
  CHECK(all_maps(0, 3).size() == 1);
  CHECK(all_maps(0, 0).size() == 1);
  CHECK(all_maps(2, 0).empty());
  CHECK(all_maps(3, 2).size() == 8);
  CHECK(all_permutations(3).size() == 6);
  CHECK(all_permutations(0).size() == 1);
  CHECK(parse_finmap("[2,1,1]") == FinMap::from_one_based(2, {2, 1, 1}));
  CHECK(parse_finmap("2,1,1", 3).target() == 3);
  CHECK(parse_finmap("[]", 2) == FinMap(2, {}));
  CHECK(FinMap::from_one_based(2, {2, 1, 1}).to_string() == "[2,1,1]");
  CHECK_THROWS(parse_finmap("[0,1]"));
  CHECK_THROWS(parse_finmap("[1,,2]"));
  CHECK_THROWS(parse_finmap("[3]", 2));
  CHECK(is_monotone(FinMap::from_one_based(2, {1, 1, 2})));
  CHECK_FALSE(is_surjective(FinMap::from_one_based(3, {1, 1, 2})));
  CHECK(inverse_permutation(FinMap::from_one_based(3, {3, 1, 2})) == FinMap::from_one_based(3, {2, 3, 1}));
}
