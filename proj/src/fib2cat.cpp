#include "opgroth/fib2cat.hpp"

#include <stdexcept>

#include "opgroth/tuples.hpp"

namespace opgroth {

std::optional<std::size_t> FinSet::find(std::string_view l) const {
  for (std::size_t k = 0; k < elements.size(); ++k)
    if (elements[k] == l) return k;
  return std::nullopt;
}

FinSet singleton_set(std::string label) { return FinSet{{std::move(label)}}; }

FinSet product_set(std::span<const FinSet> factors) {
  if (factors.size() == 1) return factors[0];
  std::vector<std::size_t> radices;
  for (const auto& f : factors) radices.push_back(f.size());
  FinSet out;
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < d.size(); ++k) parts.push_back(factors[k].label(d[k]));
    out.elements.push_back(paren_list(parts));
  });
  return out;
}

bool IndexedSet::operator==(const IndexedSet& o) const {
  return same_category(index, o.index) && on_obj == o.on_obj && on_mor == o.on_mor;
}

CheckReport validate_indexed_set(const IndexedSet& F) {
  CheckReport r;
  if (!F.index) {
    r.structural("iset.refs", "missing index category");
    return r;
  }
  const FinCat& I = *F.index;
  if (F.on_obj.size() != I.num_objects() || F.on_mor.size() != I.num_morphisms()) {
    r.structural("iset.size", "table sizes do not match the index category");
    return r;
  }
  for (std::size_t k = 0; k < I.num_morphisms(); ++k) {
    MorId u(k);
    const auto& fn = F.on_mor[k];
    const std::size_t ds = F.on_obj[I.src(u).index()].size(), cs = F.on_obj[I.tgt(u).index()].size();
    if (fn.size() != ds) {
      r.structural("iset.map_size", I.label(u));
      continue;
    }
    for (std::size_t v : fn)
      if (v >= cs) {
        r.structural("iset.map_range", I.label(u));
        break;
      }
  }
  if (r.has_structural()) return r;
  for (std::size_t a = 0; a < I.num_objects(); ++a) {
    ObjId i(a);
    const auto& fn = F.on_mor[I.identity(i).index()];
    for (std::size_t x = 0; x < fn.size(); ++x)
      if (fn[x] != x) r.violation("iset.identity", I.label(i) + " at " + F.on_obj[a].label(x));
  }
  for (std::size_t gi = 0; gi < I.num_morphisms(); ++gi)
    for (std::size_t fi = 0; fi < I.num_morphisms(); ++fi) {
      MorId g(gi), f(fi);
      if (!I.composable(g, f)) continue;
      auto gf = I.try_compose(g, f);
      if (!gf) continue;
      const auto& X = F.on_obj[I.src(f).index()];
      for (std::size_t x = 0; x < X.size(); ++x)
        if (F.apply(*gf, x) != F.apply(g, F.apply(f, x))) {
          r.violation("iset.composition", "(" + I.label(g) + "," + I.label(f) + ") at " + X.label(x));
          break;
        }
    }
  return r;
}

IndexedSet constant_indexed_set(const CatPtr& index, const FinSet& value) {
  IndexedSet F{index, std::vector<FinSet>(index->num_objects(), value), {}};
  FinFunction id(value.size());
  for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
  F.on_mor.assign(index->num_morphisms(), id);
  return F;
}

std::size_t lift_count(const DiscreteFibration& p, ObjId c, MorId f) {
  const FinCat& E = p.total();
  std::size_t n = 0;
  for (std::size_t k = 0; k < E.num_morphisms(); ++k)
    if (E.src(MorId(k)) == c && p.proj(MorId(k)) == f) ++n;
  return n;
}

MorId lift(const DiscreteFibration& p, ObjId c, MorId f) {
  if (p.base().src(f) != p.proj(c)) throw std::invalid_argument("lift: source mismatch");
  const FinCat& E = p.total();
  std::optional<MorId> found;
  for (std::size_t k = 0; k < E.num_morphisms(); ++k)
    if (E.src(MorId(k)) == c && p.proj(MorId(k)) == f) {
      if (found) throw std::logic_error("lift: not unique");
      found = MorId(k);
    }
  if (!found) throw std::logic_error("lift: no lift of " + p.base().label(f) + " at " + E.label(c));
  return *found;
}

CheckReport check_discrete_fibration(const DiscreteFibration& p) {
  CheckReport r = validate_functor(p.proj);
  if (!r.ok()) return r;
  const FinCat& E = p.total();
  const FinCat& B = p.base();
  std::size_t instances = 0;
  for (std::size_t c = 0; c < E.num_objects(); ++c)
    for (std::size_t f = 0; f < B.num_morphisms(); ++f) {
      if (B.src(MorId(f)) != p.proj(ObjId(c))) continue;
      ++instances;
      const std::size_t n = lift_count(p, ObjId(c), MorId(f));
      if (n != 1)
        r.violation("dfib.unique_lift", "(" + E.label(ObjId(c)) + "," + B.label(MorId(f)) + ") has " +
                                            std::to_string(n) + " lifts");
    }
  r.count("dfib.lift_instances", instances);
  return r;
}

DiscreteFibration identity_fibration(const CatPtr& c) { return DiscreteFibration{identity_functor(c)}; }

namespace {

bool same_dfib(const DFibPtr& a, const DFibPtr& b) { return a == b || (a && b && *a == *b); }
bool same_iset(const ISetPtr& a, const ISetPtr& b) { return a == b || (a && b && *a == *b); }

}  // namespace

bool DFibMorphism::operator==(const DFibMorphism& o) const {
  return same_dfib(dom, o.dom) && same_dfib(cod, o.cod) && f1 == o.f1 && f0 == o.f0;
}

bool ISetMorphism::operator==(const ISetMorphism& o) const {
  return same_iset(dom, o.dom) && same_iset(cod, o.cod) && M == o.M && mu == o.mu;
}

CheckReport validate_dfib_cell(const DFibMorphism& m) {
  CheckReport r;
  if (!m.dom || !m.cod) {
    r.structural("dfib_cell.refs", "missing domain or codomain");
    return r;
  }
  if (!same_category(m.f1.dom, m.dom->proj.dom) || !same_category(m.f1.cod, m.cod->proj.dom) ||
      !same_category(m.f0.dom, m.dom->proj.cod) || !same_category(m.f0.cod, m.cod->proj.cod)) {
    r.structural("dfib_cell.refs", "component functors do not match the fibrations");
    return r;
  }
  r.merge(validate_functor(m.f1), "f1");
  r.merge(validate_functor(m.f0), "f0");
  if (!r.ok()) return r;
  const auto& p = m.dom->proj;
  const auto& q = m.cod->proj;
  const FinCat& E = m.dom->total();
  for (std::size_t c = 0; c < E.num_objects(); ++c)
    if (q(m.f1(ObjId(c))) != m.f0(p(ObjId(c)))) r.violation("dfib_cell.square", "object " + E.label(ObjId(c)));
  for (std::size_t u = 0; u < E.num_morphisms(); ++u)
    if (q(m.f1(MorId(u))) != m.f0(p(MorId(u)))) r.violation("dfib_cell.square", "morphism " + E.label(MorId(u)));
  return r;
}

CheckReport validate_dfib_cell(const DFib2Morphism& m) {
  CheckReport r;
  if (!same_dfib(m.src.dom, m.tgt.dom) || !same_dfib(m.src.cod, m.tgt.cod)) {
    r.structural("dfib_2cell.refs", "source and target 1-cells are not parallel");
    return r;
  }
  if (!(m.mu1.dom == m.src.f1) || !(m.mu1.cod == m.tgt.f1) || !(m.mu0.dom == m.src.f0) ||
      !(m.mu0.cod == m.tgt.f0)) {
    r.structural("dfib_2cell.refs", "transformations do not match the 1-cells");
    return r;
  }
  r.merge(validate_natural_transformation(m.mu1), "mu1");
  r.merge(validate_natural_transformation(m.mu0), "mu0");
  if (!r.ok()) return r;
  const auto& p = m.src.dom->proj;
  const auto& q = m.src.cod->proj;
  const FinCat& E = m.src.dom->total();
  for (std::size_t c = 0; c < E.num_objects(); ++c)
    if (q(m.mu1[ObjId(c)]) != m.mu0[p(ObjId(c))]) r.violation("dfib_2cell.whiskering", E.label(ObjId(c)));
  return r;
}

DFibMorphism identity_cell(const DFibPtr& p) {
  return DFibMorphism{p, p, identity_functor(p->proj.dom), identity_functor(p->proj.cod)};
}

DFib2Morphism identity_cell(const DFibMorphism& m) {
  return DFib2Morphism{m, m, identity_transformation(m.f1), identity_transformation(m.f0)};
}

DFibMorphism compose(const DFibMorphism& g, const DFibMorphism& f) {
  return DFibMorphism{f.dom, g.cod, compose(g.f1, f.f1), compose(g.f0, f.f0)};
}

DFib2Morphism vertical_compose(const DFib2Morphism& b, const DFib2Morphism& a) {
  return DFib2Morphism{a.src, b.tgt, vertical_compose(b.mu1, a.mu1), vertical_compose(b.mu0, a.mu0)};
}

DFib2Morphism whisker_left(const DFibMorphism& h, const DFib2Morphism& a) {
  return DFib2Morphism{compose(h, a.src), compose(h, a.tgt), whisker_left(h.f1, a.mu1), whisker_left(h.f0, a.mu0)};
}

DFib2Morphism whisker_right(const DFib2Morphism& a, const DFibMorphism& f) {
  return DFib2Morphism{compose(a.src, f), compose(a.tgt, f), whisker_right(a.mu1, f.f1),
                       whisker_right(a.mu0, f.f0)};
}

bool is_invertible(const DFibMorphism& m) { return is_isomorphism(m.f1) && is_isomorphism(m.f0); }

CheckReport validate_iset_cell(const ISetMorphism& m) {
  CheckReport r;
  if (!m.dom || !m.cod || !same_category(m.M.dom, m.dom->index) || !same_category(m.M.cod, m.cod->index)) {
    r.structural("iset_cell.refs", "index functor does not match the indexed sets");
    return r;
  }
  r.merge(validate_functor(m.M), "M");
  if (!r.ok()) return r;
  const IndexedSet& F = *m.dom;
  const IndexedSet& G = *m.cod;
  const FinCat& I = *F.index;
  if (m.mu.size() != I.num_objects()) {
    r.structural("iset_cell.size", "component count");
    return r;
  }
  for (std::size_t i = 0; i < I.num_objects(); ++i) {
    const std::size_t target = G.on_obj[m.M(ObjId(i)).index()].size();
    if (m.mu[i].size() != F.on_obj[i].size()) r.structural("iset_cell.size", I.label(ObjId(i)));
    for (std::size_t v : m.mu[i])
      if (v >= target) {
        r.structural("iset_cell.range", I.label(ObjId(i)));
        break;
      }
  }
  if (r.has_structural()) return r;
  for (std::size_t k = 0; k < I.num_morphisms(); ++k) {
    MorId u(k);
    const std::size_t i = I.src(u).index(), j = I.tgt(u).index();
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      if (G.apply(m.M(u), m.mu[i][x]) != m.mu[j][F.apply(u, x)]) {
        r.violation("iset_cell.naturality", "(" + I.label(u) + "," + F.on_obj[i].label(x) + ")");
        break;
      }
  }
  return r;
}

CheckReport validate_iset_cell(const ISet2Morphism& m) {
  CheckReport r;
  if (!same_iset(m.src.dom, m.tgt.dom) || !same_iset(m.src.cod, m.tgt.cod)) {
    r.structural("iset_2cell.refs", "source and target 1-cells are not parallel");
    return r;
  }
  if (!(m.eta.dom == m.src.M) || !(m.eta.cod == m.tgt.M)) {
    r.structural("iset_2cell.refs", "transformation does not match the 1-cells");
    return r;
  }
  r.merge(validate_natural_transformation(m.eta), "eta");
  if (!r.ok()) return r;
  const IndexedSet& F = *m.src.dom;
  const IndexedSet& G = *m.src.cod;
  for (std::size_t i = 0; i < F.on_obj.size(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x)
      if (G.apply(m.eta[ObjId(i)], m.src.mu[i][x]) != m.tgt.mu[i][x])
        r.violation("iset_2cell.compatibility",
                    "(" + F.index->label(ObjId(i)) + "," + F.on_obj[i].label(x) + ")");
  return r;
}

ISetMorphism identity_cell(const ISetPtr& F) {
  ISetMorphism m{F, F, identity_functor(F->index), {}};
  for (const auto& X : F->on_obj) {
    FinFunction id(X.size());
    for (std::size_t x = 0; x < id.size(); ++x) id[x] = x;
    m.mu.push_back(std::move(id));
  }
  return m;
}

ISet2Morphism identity_cell(const ISetMorphism& m) { return ISet2Morphism{m, m, identity_transformation(m.M)}; }

ISetMorphism compose(const ISetMorphism& g, const ISetMorphism& f) {
  ISetMorphism h{f.dom, g.cod, compose(g.M, f.M), {}};
  for (std::size_t i = 0; i < f.mu.size(); ++i) {
    const auto& gm = g.mu.at(f.M(ObjId(i)).index());
    FinFunction c;
    for (std::size_t v : f.mu[i]) c.push_back(gm.at(v));
    h.mu.push_back(std::move(c));
  }
  return h;
}

ISet2Morphism vertical_compose(const ISet2Morphism& b, const ISet2Morphism& a) {
  return ISet2Morphism{a.src, b.tgt, vertical_compose(b.eta, a.eta)};
}

ISet2Morphism whisker_left(const ISetMorphism& h, const ISet2Morphism& a) {
  return ISet2Morphism{compose(h, a.src), compose(h, a.tgt), whisker_left(h.M, a.eta)};
}

ISet2Morphism whisker_right(const ISet2Morphism& a, const ISetMorphism& f) {
  return ISet2Morphism{compose(a.src, f), compose(a.tgt, f), whisker_right(a.eta, f.M)};
}

bool is_invertible(const ISetMorphism& m) {
  if (!is_isomorphism(m.M) || m.mu.size() != m.dom->on_obj.size()) return false;
  for (std::size_t i = 0; i < m.mu.size(); ++i) {
    const std::size_t n = m.cod->on_obj[m.M(ObjId(i)).index()].size();
    if (m.mu[i].size() != n) return false;
    std::vector<bool> hit(n, false);
    for (std::size_t v : m.mu[i]) {
      if (v >= n || hit[v]) return false;
      hit[v] = true;
    }
  }
  return true;
}

DFibProduct product_dfib(const std::vector<DFibPtr>& factors) {
  std::vector<CatPtr> totals, bases;
  std::vector<CatFunctor> projs;
  for (const auto& p : factors) {
    totals.push_back(p->proj.dom);
    bases.push_back(p->proj.cod);
    projs.push_back(p->proj);
  }
  DFibProduct out;
  if (factors.size() == 1) {
    out.fibration = factors[0];
    out.totals = product_category(totals);
    out.bases = product_category(bases);
    out.projections.push_back(identity_cell(factors[0]));
    return out;
  }
  out.totals = product_category(totals);
  out.bases = product_category(bases);
  out.fibration = std::make_shared<const DiscreteFibration>(
      DiscreteFibration{product_functor(out.totals, out.bases, projs)});
  for (std::size_t k = 0; k < factors.size(); ++k)
    out.projections.push_back(
        DFibMorphism{out.fibration, factors[k], out.totals.projections[k], out.bases.projections[k]});
  return out;
}

DFibMorphism tuple_cell(const DFibProduct& prod, const std::vector<DFibMorphism>& legs) {
  if (legs.empty()) throw std::invalid_argument("tuple_cell: need at least one leg for the source");
  std::vector<CatFunctor> l1, l0;
  for (const auto& l : legs) {
    l1.push_back(l.f1);
    l0.push_back(l.f0);
  }
  return DFibMorphism{legs[0].dom, prod.fibration, tuple_functor(prod.totals, legs[0].dom->proj.dom, l1),
                      tuple_functor(prod.bases, legs[0].dom->proj.cod, l0)};
}

namespace {

std::vector<std::size_t> value_radices(const std::vector<ISetPtr>& factors, std::span<const ObjId> parts) {
  std::vector<std::size_t> r;
  for (std::size_t k = 0; k < factors.size(); ++k) r.push_back(factors[k]->on_obj[parts[k].index()].size());
  return r;
}

}  // namespace

ISetProduct product_iset(const std::vector<ISetPtr>& factors) {
  ISetProduct out;
  std::vector<CatPtr> indices;
  for (const auto& F : factors) indices.push_back(F->index);
  out.index = product_category(indices);
  if (factors.size() == 1) {
    out.indexed_set = factors[0];
    out.projections.push_back(identity_cell(factors[0]));
    return out;
  }
  const FinCat& P = *out.index.category;
  auto G = std::make_shared<IndexedSet>();
  G->index = out.index.category;
  for (std::size_t a = 0; a < P.num_objects(); ++a) {
    const auto parts = out.index.object_parts(ObjId(a));
    std::vector<FinSet> vals;
    for (std::size_t k = 0; k < factors.size(); ++k) vals.push_back(factors[k]->on_obj[parts[k].index()]);
    G->on_obj.push_back(product_set(vals));
  }
  for (std::size_t u = 0; u < P.num_morphisms(); ++u) {
    const auto parts = out.index.morphism_parts(MorId(u));
    const auto src = out.index.object_parts(P.src(MorId(u)));
    const auto tgt = out.index.object_parts(P.tgt(MorId(u)));
    const auto sr = value_radices(factors, src), tr = value_radices(factors, tgt);
    FinFunction fn;
    for_each_tuple(sr, [&](std::span<const std::size_t> d) {
      std::vector<std::size_t> img(d.size());
      for (std::size_t k = 0; k < d.size(); ++k) img[k] = factors[k]->apply(parts[k], d[k]);
      fn.push_back(encode_tuple(img, tr));
    });
    G->on_mor.push_back(std::move(fn));
  }
  out.indexed_set = G;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    ISetMorphism pr{out.indexed_set, factors[k], out.index.projections[k], {}};
    for (std::size_t a = 0; a < P.num_objects(); ++a) {
      const auto r = value_radices(factors, out.index.object_parts(ObjId(a)));
      FinFunction fn;
      for (std::size_t x = 0; x < G->on_obj[a].size(); ++x) fn.push_back(decode_tuple(x, r)[k]);
      pr.mu.push_back(std::move(fn));
    }
    out.projections.push_back(std::move(pr));
  }
  return out;
}

ISetMorphism tuple_cell(const ISetProduct& prod, const std::vector<ISetMorphism>& legs) {
  if (legs.empty()) throw std::invalid_argument("tuple_cell: need at least one leg for the source");
  std::vector<CatFunctor> ms;
  std::vector<ISetPtr> factors;
  for (const auto& l : legs) {
    ms.push_back(l.M);
    factors.push_back(l.cod);
  }
  const ISetPtr& H = legs[0].dom;
  ISetMorphism m{H, prod.indexed_set, tuple_functor(prod.index, H->index, ms), {}};
  if (legs.size() == 1) {
    m.mu = legs[0].mu;
    return m;
  }
  for (std::size_t i = 0; i < H->on_obj.size(); ++i) {
    const auto target = prod.index.object_parts(m.M(ObjId(i)));
    const auto r = value_radices(factors, target);
    FinFunction fn;
    for (std::size_t x = 0; x < H->on_obj[i].size(); ++x) {
      std::vector<std::size_t> d;
      for (const auto& l : legs) d.push_back(l.mu[i][x]);
      fn.push_back(encode_tuple(d, r));
    }
    m.mu.push_back(std::move(fn));
  }
  return m;
}

DFibPtr set_as_dfib(const FinSet& x) {
  return std::make_shared<const DiscreteFibration>(identity_fibration(discrete_category(x.elements)));
}

ISetPtr set_as_iset(const FinSet& x) {
  return std::make_shared<const IndexedSet>(constant_indexed_set(discrete_category(x.elements), singleton_set()));
}

}  // namespace opgroth
