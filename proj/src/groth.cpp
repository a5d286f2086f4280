#include "opgroth/groth.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "opgroth/parallel.hpp"
#include "opgroth/tuples.hpp"

namespace opgroth {

namespace {

std::vector<std::size_t> object_offsets(const IndexedSet& F) {
  std::vector<std::size_t> off(F.on_obj.size() + 1, 0);
  for (std::size_t i = 0; i < F.on_obj.size(); ++i) off[i + 1] = off[i] + F.on_obj[i].size();
  return off;
}

std::vector<std::size_t> morphism_offsets(const IndexedSet& F) {
  const FinCat& I = *F.index;
  std::vector<std::size_t> off(I.num_morphisms() + 1, 0);
  for (std::size_t f = 0; f < I.num_morphisms(); ++f)
    off[f + 1] = off[f] + F.on_obj[I.src(MorId(f)).index()].size();
  return off;
}

// Fibers of p in total-object order, and each object's position in its fiber.
struct Fibers {
  std::vector<std::vector<ObjId>> over;
  std::vector<std::size_t> position;
};

Fibers fibers_of(const DiscreteFibration& p) {
  Fibers fb;
  fb.over.resize(p.base().num_objects());
  fb.position.resize(p.total().num_objects());
  for (std::size_t c = 0; c < p.total().num_objects(); ++c) {
    auto& v = fb.over[p.proj(ObjId(c)).index()];
    fb.position[c] = v.size();
    v.push_back(ObjId(c));
  }
  return fb;
}

// lift_table[c * |base morphisms| + f], filled by one scan of the total.
std::vector<std::optional<MorId>> lift_table(const DiscreteFibration& p) {
  const FinCat& E = p.total();
  const std::size_t nb = p.base().num_morphisms();
  std::vector<std::optional<MorId>> t(E.num_objects() * nb);
  for (std::size_t u = 0; u < E.num_morphisms(); ++u) {
    auto& slot = t[E.src(MorId(u)).index() * nb + p.proj(MorId(u)).index()];
    if (slot) throw std::logic_error("not a discrete fibration: two lifts");
    slot = MorId(u);
  }
  return t;
}

MorId lifted(const std::vector<std::optional<MorId>>& t, const DiscreteFibration& p, ObjId c, MorId f) {
  const auto& slot = t[c.index() * p.base().num_morphisms() + f.index()];
  if (!slot) throw std::logic_error("not a discrete fibration: missing lift");
  return *slot;
}

}  // namespace

ObjId groth_object(const IndexedSet& F, ObjId i, std::size_t x) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < i.index(); ++k) off += F.on_obj[k].size();
  return ObjId(off + x);
}

MorId groth_morphism(const IndexedSet& F, MorId f, std::size_t x) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < f.index(); ++k) off += F.on_obj[F.index->src(MorId(k)).index()].size();
  return MorId(off + x);
}

DFibPtr groth(const ISetPtr& Fp) {
  const IndexedSet& F = *Fp;
  const FinCat& I = *F.index;
  const auto oo = object_offsets(F);
  const auto mo = morphism_offsets(F);
  const std::size_t nm = mo.back();

  std::vector<std::string> objects;
  std::vector<ObjId> proj_obj;
  for (std::size_t i = 0; i < I.num_objects(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x) {
      objects.push_back(I.label(ObjId(i)) + "." + F.on_obj[i].label(x));
      proj_obj.push_back(ObjId(i));
    }
  std::vector<Arrow> arrows;
  std::vector<MorId> proj_mor;
  for (std::size_t f = 0; f < I.num_morphisms(); ++f) {
    const MorId fm(f);
    const std::size_t i = I.src(fm).index(), j = I.tgt(fm).index();
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x) {
      const std::string& src_label = objects[oo[i] + x];
      std::string label = I.is_identity(fm) ? "id_" + src_label : I.label(fm) + "@" + src_label;
      arrows.push_back(Arrow{std::move(label), ObjId(oo[i] + x), ObjId(oo[j] + F.apply(fm, x))});
      proj_mor.push_back(fm);
    }
  }
  std::vector<MorId> identities;
  for (std::size_t i = 0; i < I.num_objects(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      identities.push_back(MorId(mo[I.identity(ObjId(i)).index()] + x));

  std::vector<std::optional<MorId>> table(nm * nm);
  for (std::size_t f = 0; f < I.num_morphisms(); ++f) {
    const MorId fm(f);
    const std::size_t i = I.src(fm).index();
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x) {
      const std::size_t y = F.apply(fm, x);
      for (std::size_t g = 0; g < I.num_morphisms(); ++g) {
        const MorId gm(g);
        if (!I.composable(gm, fm)) continue;
        const MorId gf = I.compose(gm, fm);
        table[(mo[g] + y) * nm + mo[f] + x] = MorId(mo[gf.index()] + x);
      }
    }
  }
  auto total = std::make_shared<const FinCat>(std::move(objects), std::move(arrows), std::move(identities),
                                              std::move(table));
  return std::make_shared<const DiscreteFibration>(
      DiscreteFibration{CatFunctor{total, F.index, std::move(proj_obj), std::move(proj_mor)}});
}

DFibMorphism groth(const ISetMorphism& m, const DFibPtr& dom, const DFibPtr& cod) {
  const IndexedSet& F = *m.dom;
  const IndexedSet& G = *m.cod;
  const FinCat& I = *F.index;
  const auto goo = object_offsets(G);
  const auto gmo = morphism_offsets(G);
  CatFunctor f1{dom->proj.dom, cod->proj.dom, {}, {}};
  for (std::size_t i = 0; i < I.num_objects(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      f1.on_obj.push_back(ObjId(goo[m.M(ObjId(i)).index()] + m.mu[i][x]));
  for (std::size_t f = 0; f < I.num_morphisms(); ++f) {
    const std::size_t i = I.src(MorId(f)).index();
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      f1.on_mor.push_back(MorId(gmo[m.M(MorId(f)).index()] + m.mu[i][x]));
  }
  return DFibMorphism{dom, cod, std::move(f1), m.M};
}

DFibMorphism groth(const ISetMorphism& m) { return groth(m, groth(m.dom), groth(m.cod)); }

DFib2Morphism groth(const ISet2Morphism& a) {
  const DFibPtr dom = groth(a.src.dom), cod = groth(a.src.cod);
  DFibMorphism s = groth(a.src, dom, cod), t = groth(a.tgt, dom, cod);
  const IndexedSet& F = *a.src.dom;
  const IndexedSet& G = *a.src.cod;
  const auto gmo = morphism_offsets(G);
  NatTransform mu1{s.f1, t.f1, {}};
  for (std::size_t i = 0; i < F.on_obj.size(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      mu1.components.push_back(MorId(gmo[a.eta[ObjId(i)].index()] + a.src.mu[i][x]));
  return DFib2Morphism{std::move(s), std::move(t), std::move(mu1), a.eta};
}

std::size_t fiber_position(const DiscreteFibration& p, ObjId c) {
  std::size_t k = 0;
  for (std::size_t d = 0; d < c.index(); ++d)
    if (p.proj(ObjId(d)) == p.proj(c)) ++k;
  return k;
}

ISetPtr transpose(const DFibPtr& pp) {
  const DiscreteFibration& p = *pp;
  const FinCat& B = p.base();
  const Fibers fb = fibers_of(p);
  const auto lifts = lift_table(p);
  auto F = std::make_shared<IndexedSet>();
  F->index = p.proj.cod;
  for (const auto& fiber : fb.over) {
    FinSet s;
    for (ObjId c : fiber) s.elements.push_back(p.total().label(c));
    F->on_obj.push_back(std::move(s));
  }
  for (std::size_t f = 0; f < B.num_morphisms(); ++f) {
    FinFunction fn;
    for (ObjId c : fb.over[B.src(MorId(f)).index()])
      fn.push_back(fb.position[p.total().tgt(lifted(lifts, p, c, MorId(f))).index()]);
    F->on_mor.push_back(std::move(fn));
  }
  return F;
}

ISetMorphism transpose(const DFibMorphism& m, const ISetPtr& dom, const ISetPtr& cod) {
  const Fibers fp = fibers_of(*m.dom);
  const Fibers fq = fibers_of(*m.cod);
  ISetMorphism out{dom, cod, m.f0, {}};
  for (const auto& fiber : fp.over) {
    FinFunction fn;
    for (ObjId c : fiber) fn.push_back(fq.position[m.f1(c).index()]);
    out.mu.push_back(std::move(fn));
  }
  return out;
}

ISetMorphism transpose(const DFibMorphism& m) { return transpose(m, transpose(m.dom), transpose(m.cod)); }

ISet2Morphism transpose(const DFib2Morphism& a) {
  const ISetPtr dom = transpose(a.src.dom), cod = transpose(a.src.cod);
  return ISet2Morphism{transpose(a.src, dom, cod), transpose(a.tgt, dom, cod), a.mu0};
}

namespace {

std::vector<FinFunction> identity_components(const IndexedSet& F) {
  std::vector<FinFunction> mu;
  for (const auto& X : F.on_obj) {
    FinFunction id(X.size());
    std::iota(id.begin(), id.end(), std::size_t{0});
    mu.push_back(std::move(id));
  }
  return mu;
}

}  // namespace

// T∫F has the fiber over i enumerated as (i,0), (i,1), ..., so both
// components are identities on positions.
ISetMorphism phi(const ISetPtr& F) {
  return ISetMorphism{transpose(groth(F)), F, identity_functor(F->index), identity_components(*F)};
}

ISetMorphism phi_inverse(const ISetPtr& F) {
  return ISetMorphism{F, transpose(groth(F)), identity_functor(F->index), identity_components(*F)};
}

DFibMorphism psi(const DFibPtr& p) {
  const ISetPtr T = transpose(p);
  const DFibPtr GT = groth(T);
  const Fibers fb = fibers_of(*p);
  const auto lifts = lift_table(*p);
  const FinCat& B = p->base();
  CatFunctor f1{GT->proj.dom, p->proj.dom, {}, {}};
  for (const auto& fiber : fb.over)
    for (ObjId c : fiber) f1.on_obj.push_back(c);
  for (std::size_t f = 0; f < B.num_morphisms(); ++f)
    for (ObjId c : fb.over[B.src(MorId(f)).index()]) f1.on_mor.push_back(lifted(lifts, *p, c, MorId(f)));
  return DFibMorphism{GT, p, std::move(f1), identity_functor(p->proj.cod)};
}

DFibMorphism psi_inverse(const DFibPtr& p) {
  const ISetPtr T = transpose(p);
  const DFibPtr GT = groth(T);
  const Fibers fb = fibers_of(*p);
  const FinCat& E = p->total();
  CatFunctor f1{p->proj.dom, GT->proj.dom, {}, {}};
  for (std::size_t c = 0; c < E.num_objects(); ++c)
    f1.on_obj.push_back(groth_object(*T, p->proj(ObjId(c)), fb.position[c]));
  for (std::size_t u = 0; u < E.num_morphisms(); ++u)
    f1.on_mor.push_back(groth_morphism(*T, p->proj(MorId(u)), fb.position[E.src(MorId(u)).index()]));
  return DFibMorphism{p, GT, std::move(f1), identity_functor(p->proj.cod)};
}

CheckReport check_phi_component(const ISetPtr& F, const ISetMorphism& c) {
  CheckReport r;
  if (!c.dom || !c.cod || !(*c.cod == *F) || !(*c.dom == *transpose(groth(F)))) {
    r.structural("groth.phi_refs", "component is not a cell T(∫F) -> F");
    return r;
  }
  CheckReport v = validate_iset_cell(c);
  if (!v.ok()) {
    r.violation("groth.phi_invertible", "component is not a valid cell");
    r.merge(v, "phi");
    return r;
  }
  if (!is_invertible(c)) r.violation("groth.phi_invertible", "component is not a bijection");
  return r;
}

CheckReport check_psi_component(const DFibPtr& p, const DFibMorphism& c) {
  CheckReport r;
  if (!c.dom || !c.cod || !(*c.cod == *p) || !(*c.dom == *groth(transpose(p)))) {
    r.structural("groth.psi_refs", "component is not a cell ∫(T p) -> p");
    return r;
  }
  CheckReport v = validate_dfib_cell(c);
  if (!v.ok()) {
    r.violation("groth.psi_invertible", "component is not a valid cell");
    r.merge(v, "psi");
    return r;
  }
  if (!is_invertible(c)) r.violation("groth.psi_invertible", "component functors are not isomorphisms");
  return r;
}

DFibMorphism groth_product_comparison(const std::vector<ISetPtr>& factors) {
  const ISetProduct P = product_iset(factors);
  const DFibPtr GP = groth(P.indexed_set);
  std::vector<DFibPtr> gs;
  for (const auto& F : factors) gs.push_back(groth(F));
  const DFibProduct Q = product_dfib(gs);
  if (factors.empty())
    return DFibMorphism{GP, Q.fibration, CatFunctor{GP->proj.dom, Q.fibration->proj.dom, {ObjId(0)}, {MorId(0)}},
                        identity_functor(GP->proj.cod)};
  std::vector<DFibMorphism> legs;
  for (std::size_t k = 0; k < factors.size(); ++k) legs.push_back(groth(P.projections[k], GP, gs[k]));
  return tuple_cell(Q, legs);
}

ISetMorphism transpose_product_comparison(const std::vector<DFibPtr>& factors) {
  const DFibProduct D = product_dfib(factors);
  const ISetPtr TD = transpose(D.fibration);
  std::vector<ISetPtr> ts;
  for (const auto& p : factors) ts.push_back(transpose(p));
  const ISetProduct P = product_iset(ts);
  if (factors.empty())
    return ISetMorphism{TD, P.indexed_set, identity_functor(TD->index), {FinFunction{0}}};
  std::vector<ISetMorphism> legs;
  for (std::size_t k = 0; k < factors.size(); ++k) legs.push_back(transpose(D.projections[k], TD, ts[k]));
  return tuple_cell(P, legs);
}

std::vector<CatPtr> corpus_categories() {
  std::vector<CatPtr> out{terminal_category(), discrete_category({"0", "1"}), discrete_category({"x", "y", "z"}),
                          chain_category(2), chain_category(3)};
  {
    FinCatBuilder b;
    auto a = b.add_object("a");
    auto c = b.add_object("b");
    b.add_arrow("u", a, c);
    out.push_back(b.build_shared());
  }
  {
    // Z/2 as a one-object category.
    FinCatBuilder b;
    auto o = b.add_object("*");
    auto s = b.add_arrow("s", o, o);
    b.set_compose(s, s, MorId(0));
    out.push_back(b.build_shared());
  }
  {
    // An idempotent.
    FinCatBuilder b;
    auto o = b.add_object("*");
    auto e = b.add_arrow("e", o, o);
    b.set_compose(e, e, e);
    out.push_back(b.build_shared());
  }
  {
    // Span a <- c -> b.
    FinCatBuilder b;
    auto a = b.add_object("a");
    auto c2 = b.add_object("b");
    auto c = b.add_object("c");
    b.add_arrow("l", c, a);
    b.add_arrow("r", c, c2);
    out.push_back(b.build_shared());
  }
  {
    // Parallel pair a => b.
    FinCatBuilder b;
    auto a = b.add_object("a");
    auto c = b.add_object("b");
    b.add_arrow("s", a, c);
    b.add_arrow("t", a, c);
    out.push_back(b.build_shared());
  }
  return out;
}

std::optional<IndexedSet> random_indexed_set(const CatPtr& index, std::size_t max_values, std::mt19937_64& rng) {
  const FinCat& I = *index;
  std::uniform_int_distribution<std::size_t> size_dist(1, std::max<std::size_t>(max_values, 1));
  std::bernoulli_distribution empty(0.1);
  IndexedSet F{index, {}, std::vector<FinFunction>(I.num_morphisms())};
  for (std::size_t i = 0; i < I.num_objects(); ++i) {
    const std::size_t n = (max_values == 0 || empty(rng)) ? 0 : size_dist(rng);
    FinSet s;
    for (std::size_t x = 0; x < n; ++x) s.elements.push_back(std::string(1, static_cast<char>('a' + x)));
    F.on_obj.push_back(std::move(s));
  }
  for (int attempt = 0; attempt < 2000; ++attempt) {
    for (std::size_t f = 0; f < I.num_morphisms(); ++f) {
      const MorId fm(f);
      const std::size_t ds = F.on_obj[I.src(fm).index()].size(), cs = F.on_obj[I.tgt(fm).index()].size();
      FinFunction fn(ds);
      if (I.is_identity(fm)) {
        std::iota(fn.begin(), fn.end(), std::size_t{0});
      } else {
        if (cs == 0 && ds > 0) return std::nullopt;
        for (auto& v : fn) v = std::uniform_int_distribution<std::size_t>(0, cs - 1)(rng);
      }
      F.on_mor[f] = std::move(fn);
    }
    if (validate_indexed_set(F).ok()) return F;
  }
  return std::nullopt;
}

std::optional<ISetMorphism> random_iset_cell(const ISetPtr& F, const ISetPtr& G, std::mt19937_64& rng) {
  const auto functors = enumerate_functors(F->index, G->index);
  if (functors.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, functors.size() - 1);
  for (int attempt = 0; attempt < 400; ++attempt) {
    ISetMorphism m{F, G, functors[pick(rng)], {}};
    bool possible = true;
    for (std::size_t i = 0; i < F->on_obj.size() && possible; ++i) {
      const std::size_t n = G->on_obj[m.M(ObjId(i)).index()].size();
      FinFunction fn(F->on_obj[i].size());
      if (n == 0 && !fn.empty()) possible = false;
      for (auto& v : fn)
        if (possible) v = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      m.mu.push_back(std::move(fn));
    }
    if (possible && validate_iset_cell(m).ok()) return m;
  }
  return std::nullopt;
}

std::optional<ISet2Morphism> random_iset_2cell(const ISetMorphism& m, const ISetMorphism& n,
                                               std::mt19937_64& rng) {
  const FinCat& J = *m.M.cod;
  const std::size_t no = m.M.dom->num_objects();
  std::vector<std::vector<MorId>> choices(no);
  std::vector<std::size_t> radices(no);
  for (std::size_t i = 0; i < no; ++i) {
    choices[i] = J.hom(m.M(ObjId(i)), n.M(ObjId(i)));
    radices[i] = choices[i].size();
  }
  std::vector<ISet2Morphism> found;
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    NatTransform eta{m.M, n.M, {}};
    for (std::size_t i = 0; i < no; ++i) eta.components.push_back(choices[i][d[i]]);
    ISet2Morphism a{m, n, std::move(eta)};
    if (validate_iset_cell(a).ok()) found.push_back(std::move(a));
  });
  if (found.empty()) return std::nullopt;
  // Prefer cells with a non-identity component when there are any.
  std::vector<ISet2Morphism> proper;
  for (const auto& a : found)
    for (std::size_t i = 0; i < no; ++i)
      if (!J.is_identity(a.eta.components[i])) {
        proper.push_back(a);
        break;
      }
  if (!proper.empty()) found.swap(proper);
  return found[std::uniform_int_distribution<std::size_t>(0, found.size() - 1)(rng)];
}

namespace {

// ∫F with objects and morphisms shuffled and relabelled, so that the
// fibration is not in the canonical form produced by groth().
DFibPtr scrambled_groth(const ISetPtr& F, std::mt19937_64& rng, std::size_t tag) {
  const DFibPtr g = groth(F);
  const FinCat& E = g->total();
  std::vector<std::size_t> op(E.num_objects()), mp(E.num_morphisms());
  std::iota(op.begin(), op.end(), std::size_t{0});
  std::iota(mp.begin(), mp.end(), std::size_t{0});
  std::shuffle(op.begin(), op.end(), rng);
  std::shuffle(mp.begin(), mp.end(), rng);  // op[old] = new
  std::vector<std::string> objects(E.num_objects());
  for (std::size_t c = 0; c < op.size(); ++c)
    objects[op[c]] = "t" + std::to_string(tag) + "_" + std::to_string(op[c]);
  std::vector<Arrow> arrows(E.num_morphisms());
  for (std::size_t u = 0; u < mp.size(); ++u) {
    const Arrow& a = E.arrow(MorId(u));
    std::string label = E.is_identity(MorId(u)) ? "id_" + objects[op[a.src.index()]] : "m" + std::to_string(mp[u]);
    arrows[mp[u]] = Arrow{std::move(label), ObjId(op[a.src.index()]), ObjId(op[a.tgt.index()])};
  }
  std::vector<MorId> identities(E.num_objects());
  for (std::size_t c = 0; c < op.size(); ++c) identities[op[c]] = MorId(mp[E.identity(ObjId(c)).index()]);
  const std::size_t nm = E.num_morphisms();
  std::vector<std::optional<MorId>> table(nm * nm);
  for (std::size_t gi = 0; gi < nm; ++gi)
    for (std::size_t fi = 0; fi < nm; ++fi)
      if (auto h = E.try_compose(MorId(gi), MorId(fi))) table[mp[gi] * nm + mp[fi]] = MorId(mp[h->index()]);
  auto total = std::make_shared<const FinCat>(std::move(objects), std::move(arrows), std::move(identities),
                                              std::move(table));
  CatFunctor proj{total, g->proj.cod, std::vector<ObjId>(op.size()), std::vector<MorId>(mp.size())};
  for (std::size_t c = 0; c < op.size(); ++c) proj.on_obj[op[c]] = g->proj(ObjId(c));
  for (std::size_t u = 0; u < mp.size(); ++u) proj.on_mor[mp[u]] = g->proj(MorId(u));
  return std::make_shared<const DiscreteFibration>(DiscreteFibration{std::move(proj)});
}

}  // namespace

namespace {

bool is_proper(const ISet2Morphism& a) {
  for (MorId u : a.eta.components)
    if (!a.eta.cod.cod->is_identity(u)) return true;
  return false;
}

// A 2-cell out of m into some random parallel cell, preferring ones with a
// non-identity component.
std::optional<ISet2Morphism> parallel_2cell(const ISetMorphism& m, std::mt19937_64& rng) {
  std::optional<ISet2Morphism> fallback;
  for (int attempt = 0; attempt < 30; ++attempt) {
    auto n = random_iset_cell(m.dom, m.cod, rng);
    if (!n) continue;
    auto a = random_iset_2cell(m, *n, rng);
    if (!a) continue;
    if (is_proper(*a)) return a;
    if (!fallback) fallback = std::move(a);
  }
  return fallback;
}

}  // namespace

GrothCorpus generate_cells(std::vector<ISetPtr> isets, std::vector<DFibPtr> dfibs, const CorpusParams& params) {
  GrothCorpus c;
  c.params = params;
  c.isets = std::move(isets);
  c.dfibs = std::move(dfibs);
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<ISetPtr> transposed;
  for (const auto& p : c.dfibs) transposed.push_back(transpose(p));

  const std::size_t iset_target = params.one_cells / 2;
  const std::size_t dfib_target = params.one_cells - iset_target;
  const std::size_t budget = 50 * (params.one_cells + 1);
  if (!c.isets.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, c.isets.size() - 1);
    for (std::size_t tries = 0; tries < budget && c.iset_cells.size() < iset_target; ++tries)
      if (auto m = random_iset_cell(c.isets[pick(rng)], c.isets[pick(rng)], rng)) c.iset_cells.push_back(*m);
  }
  // A DFib cell p -> q is Ψ_q ∘ ∫m ∘ Ψ_p^{-1} for a random m : Tp -> Tq.
  std::vector<std::pair<std::size_t, std::size_t>> dfib_ends;
  std::vector<ISetMorphism> dfib_sources;
  if (!c.dfibs.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, c.dfibs.size() - 1);
    for (std::size_t tries = 0; tries < budget && c.dfib_cells.size() < dfib_target; ++tries) {
      const std::size_t a = pick(rng), b = pick(rng);
      auto m = random_iset_cell(transposed[a], transposed[b], rng);
      if (!m) continue;
      const DFibMorphism pinv = psi_inverse(c.dfibs[a]);
      const DFibMorphism ps = psi(c.dfibs[b]);
      c.dfib_cells.push_back(compose(ps, compose(groth(*m, pinv.cod, ps.dom), pinv)));
      dfib_ends.emplace_back(a, b);
      dfib_sources.push_back(*m);
    }
  }
  const std::size_t iset2_target = params.two_cells / 2;
  const std::size_t dfib2_target = params.two_cells - iset2_target;
  if (!c.iset_cells.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, c.iset_cells.size() - 1);
    for (std::size_t tries = 0; tries < budget && c.iset_2cells.size() < iset2_target; ++tries) {
      const ISetMorphism m = c.iset_cells[pick(rng)];
      if (auto a = parallel_2cell(m, rng)) {
        c.iset_cells.push_back(a->tgt);
        c.iset_2cells.push_back(std::move(*a));
      }
    }
  }
  if (!c.dfib_cells.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, c.dfib_cells.size() - 1);
    for (std::size_t tries = 0; tries < budget && c.dfib_2cells.size() < dfib2_target; ++tries) {
      const std::size_t k = pick(rng);
      const auto [a, b] = dfib_ends[k];
      auto alpha = parallel_2cell(dfib_sources[k], rng);
      if (!alpha) continue;
      const DFibMorphism pinv = psi_inverse(c.dfibs[a]);
      const DFibMorphism ps = psi(c.dfibs[b]);
      const DFib2Morphism g = groth(*alpha);
      DFib2Morphism d = whisker_left(ps, whisker_right(g, pinv));
      c.dfib_cells.push_back(d.tgt);
      c.dfib_2cells.push_back(std::move(d));
    }
  }
  return c;
}

GrothCorpus generate_corpus(const CorpusParams& params) {
  std::mt19937_64 rng(params.seed);
  const auto cats = corpus_categories();
  std::uniform_int_distribution<std::size_t> pick(0, cats.size() - 1);
  std::vector<ISetPtr> isets;
  std::vector<DFibPtr> dfibs;
  const std::size_t n_iset = (params.objects + 1) / 2;
  std::size_t tag = 0;
  while (isets.size() + dfibs.size() < params.objects) {
    auto F = random_indexed_set(cats[pick(rng)], params.max_values, rng);
    if (!F) continue;
    auto Fp = std::make_shared<const IndexedSet>(std::move(*F));
    if (isets.size() < n_iset)
      isets.push_back(Fp);
    else
      dfibs.push_back(scrambled_groth(Fp, rng, tag++));
  }
  return generate_cells(std::move(isets), std::move(dfibs), params);
}

namespace {

bool same_obj(const ISetPtr& a, const ISetPtr& b) { return a == b || *a == *b; }
bool same_obj(const DFibPtr& a, const DFibPtr& b) { return a == b || *a == *b; }

std::string tag(const char* kind, std::size_t k) { return std::string(kind) + "[" + std::to_string(k) + "]"; }

}  // namespace

CheckReport roundtrip_report(const GrothCorpus& c, unsigned jobs) {
  // Each task owns one slot; slots are merged in order afterwards.
  std::vector<std::function<CheckReport()>> tasks;

  for (std::size_t k = 0; k < c.isets.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const ISetPtr& F = c.isets[k];
      const std::string w = tag("iset", k);
      const DFibPtr G = groth(F);
      r.merge(check_discrete_fibration(*G), w + "/groth");
      const ISetMorphism ph = phi(F), inv = phi_inverse(F);
      r.merge(check_phi_component(F, ph), w);
      if (!(compose(ph, inv) == identity_cell(F)) || !(compose(inv, ph) == identity_cell(ph.dom)))
        r.violation("groth.phi_invertible", "explicit inverse fails", w);
      if (!(groth(identity_cell(F)) == identity_cell(G)))
        r.violation("groth.functoriality", "identity not preserved", w);
      r.count("groth.phi_components");
      return r;
    });
  for (std::size_t k = 0; k < c.dfibs.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const DFibPtr& p = c.dfibs[k];
      const std::string w = tag("dfib", k);
      r.merge(check_discrete_fibration(*p), w);
      if (!r.ok()) return r;
      const ISetPtr T = transpose(p);
      r.merge(validate_indexed_set(*T), w + "/transpose");
      const DFibMorphism ps = psi(p), inv = psi_inverse(p);
      r.merge(check_psi_component(p, ps), w);
      if (!(compose(ps, inv) == identity_cell(p)) || !(compose(inv, ps) == identity_cell(ps.dom)))
        r.violation("groth.psi_invertible", "explicit inverse fails", w);
      if (!(transpose(identity_cell(p)) == identity_cell(T)))
        r.violation("transpose.functoriality", "identity not preserved", w);
      r.count("groth.psi_components");
      return r;
    });
  for (std::size_t k = 0; k < c.iset_cells.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const ISetMorphism& m = c.iset_cells[k];
      const std::string w = tag("iset_cell", k);
      r.merge(validate_iset_cell(m), w);
      if (!r.ok()) return r;
      const DFibMorphism gm = groth(m);
      r.merge(validate_dfib_cell(gm), w + "/groth");
      if (!(compose(phi(m.cod), transpose(gm)) == compose(m, phi(m.dom))))
        r.violation("groth.phi_naturality", "square fails", w);
      if (!(groth(identity_cell(m)) == identity_cell(gm)))
        r.violation("groth.functoriality", "identity 2-cell not preserved", w);
      r.count("groth.phi_naturality_squares");
      return r;
    });
  for (std::size_t k = 0; k < c.dfib_cells.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const DFibMorphism& m = c.dfib_cells[k];
      const std::string w = tag("dfib_cell", k);
      r.merge(validate_dfib_cell(m), w);
      if (!r.ok()) return r;
      const ISetMorphism tm = transpose(m);
      r.merge(validate_iset_cell(tm), w + "/transpose");
      if (!(compose(psi(m.cod), groth(tm)) == compose(m, psi(m.dom))))
        r.violation("groth.psi_naturality", "square fails", w);
      if (!(transpose(identity_cell(m)) == identity_cell(tm)))
        r.violation("transpose.functoriality", "identity 2-cell not preserved", w);
      r.count("groth.psi_naturality_squares");
      return r;
    });
  for (std::size_t k = 0; k < c.iset_2cells.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const ISet2Morphism& a = c.iset_2cells[k];
      const std::string w = tag("iset_2cell", k);
      r.merge(validate_iset_cell(a), w);
      if (!r.ok()) return r;
      const DFib2Morphism ga = groth(a);
      r.merge(validate_dfib_cell(ga), w + "/groth");
      if (!(whisker_left(phi(a.src.cod), transpose(ga)) == whisker_right(a, phi(a.src.dom))))
        r.violation("groth.phi_naturality", "2-cell whiskering fails", w);
      r.count("groth.phi_naturality_2cells");
      return r;
    });
  for (std::size_t k = 0; k < c.dfib_2cells.size(); ++k)
    tasks.push_back([&c, k] {
      CheckReport r;
      const DFib2Morphism& a = c.dfib_2cells[k];
      const std::string w = tag("dfib_2cell", k);
      r.merge(validate_dfib_cell(a), w);
      if (!r.ok()) return r;
      const ISet2Morphism ta = transpose(a);
      r.merge(validate_iset_cell(ta), w + "/transpose");
      if (!(whisker_left(psi(a.src.cod), groth(ta)) == whisker_right(a, psi(a.src.dom))))
        r.violation("groth.psi_naturality", "2-cell whiskering fails", w);
      r.count("groth.psi_naturality_2cells");
      return r;
    });

  // Composable pairs, matched by object identity.
  for (std::size_t f = 0; f < c.iset_cells.size(); ++f)
    for (std::size_t g = 0; g < c.iset_cells.size(); ++g) {
      if (!same_obj(c.iset_cells[f].cod, c.iset_cells[g].dom)) continue;
      tasks.push_back([&c, f, g] {
        CheckReport r;
        const ISetMorphism &mf = c.iset_cells[f], &mg = c.iset_cells[g];
        if (!(groth(compose(mg, mf)) == compose(groth(mg), groth(mf))))
          r.violation("groth.functoriality", "(" + tag("iset_cell", g) + "," + tag("iset_cell", f) + ")");
        r.count("groth.composable_pairs");
        return r;
      });
    }
  for (std::size_t f = 0; f < c.dfib_cells.size(); ++f)
    for (std::size_t g = 0; g < c.dfib_cells.size(); ++g) {
      if (!same_obj(c.dfib_cells[f].cod, c.dfib_cells[g].dom)) continue;
      tasks.push_back([&c, f, g] {
        CheckReport r;
        const DFibMorphism &mf = c.dfib_cells[f], &mg = c.dfib_cells[g];
        if (!(transpose(compose(mg, mf)) == compose(transpose(mg), transpose(mf))))
          r.violation("transpose.functoriality", "(" + tag("dfib_cell", g) + "," + tag("dfib_cell", f) + ")");
        r.count("transpose.composable_pairs");
        return r;
      });
    }
  for (std::size_t a = 0; a < c.iset_2cells.size(); ++a)
    for (std::size_t b = 0; b < c.iset_2cells.size(); ++b) {
      if (!(c.iset_2cells[a].tgt == c.iset_2cells[b].src)) continue;
      tasks.push_back([&c, a, b] {
        CheckReport r;
        const auto &x = c.iset_2cells[a], &y = c.iset_2cells[b];
        if (!(groth(vertical_compose(y, x)) == vertical_compose(groth(y), groth(x))))
          r.violation("groth.functoriality", "vertical (" + tag("iset_2cell", b) + "," + tag("iset_2cell", a) + ")");
        r.count("groth.composable_2cells");
        return r;
      });
    }
  for (std::size_t a = 0; a < c.dfib_2cells.size(); ++a)
    for (std::size_t b = 0; b < c.dfib_2cells.size(); ++b) {
      if (!(c.dfib_2cells[a].tgt == c.dfib_2cells[b].src)) continue;
      tasks.push_back([&c, a, b] {
        CheckReport r;
        const auto &x = c.dfib_2cells[a], &y = c.dfib_2cells[b];
        if (!(transpose(vertical_compose(y, x)) == vertical_compose(transpose(y), transpose(x))))
          r.violation("transpose.functoriality",
                      "vertical (" + tag("dfib_2cell", b) + "," + tag("dfib_2cell", a) + ")");
        r.count("transpose.composable_2cells");
        return r;
      });
    }

  // Product comparisons on neighbouring pairs.
  for (std::size_t k = 0; k + 1 < c.isets.size(); k += 2)
    tasks.push_back([&c, k] {
      CheckReport r;
      const DFibMorphism cmp = groth_product_comparison({c.isets[k], c.isets[k + 1]});
      r.merge(validate_dfib_cell(cmp), tag("iset", k));
      if (!is_invertible(cmp)) r.violation("groth.product_comparison", "not invertible", tag("iset", k));
      r.count("groth.product_comparisons");
      return r;
    });
  for (std::size_t k = 0; k + 1 < c.dfibs.size(); k += 2)
    tasks.push_back([&c, k] {
      CheckReport r;
      const ISetMorphism cmp = transpose_product_comparison({c.dfibs[k], c.dfibs[k + 1]});
      r.merge(validate_iset_cell(cmp), tag("dfib", k));
      if (!is_invertible(cmp)) r.violation("transpose.product_comparison", "not invertible", tag("dfib", k));
      r.count("transpose.product_comparisons");
      return r;
    });

  std::vector<CheckReport> slots(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t k) { slots[k] = tasks[k](); });
  CheckReport out;
  out.note("corpus.seed", std::to_string(c.params.seed));
  out.count("corpus.objects", c.num_objects());
  out.count("corpus.one_cells", c.num_one_cells());
  out.count("corpus.two_cells", c.num_two_cells());
  for (const auto& s : slots) out.merge(s);
  return out;
}

}  // namespace opgroth
