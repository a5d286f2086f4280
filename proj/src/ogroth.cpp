#include "opgroth/ogroth.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "opgroth/fixtures.hpp"
#include "opgroth/groth.hpp"
#include "opgroth/parallel.hpp"
#include "opgroth/tuples.hpp"

namespace opgroth {

namespace {

bool same_omon(const OMonPtr& a, const OMonPtr& b) { return a == b || (a && b && *a == *b); }
bool same_iset_ptr(const ISetPtr& a, const ISetPtr& b) { return a == b || (a && b && *a == *b); }
bool same_lax(const LaxToSetPtr& a, const LaxToSetPtr& b) { return a == b || (a && b && *a == *b); }
bool same_ofib(const OFibPtr& a, const OFibPtr& b) { return a == b || (a && b && *a == *b); }

std::string obj_tuple_text(const FinCat& c, std::span<const ObjId> objs) {
  std::vector<std::string> parts;
  for (ObjId a : objs) parts.push_back(a.index() < c.num_objects() ? c.label(a) : "?");
  return paren_list(parts);
}

std::string elem_tuple_text(const IndexedSet& F, std::span<const ObjId> objs, std::span<const std::size_t> xs) {
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < xs.size(); ++k) parts.push_back(F.on_obj.at(objs[k].index()).label(xs[k]));
  return paren_list(parts);
}

std::vector<std::size_t> fiber_radices(const IndexedSet& F, std::span<const ObjId> objs) {
  std::vector<std::size_t> r;
  r.reserve(objs.size());
  for (ObjId a : objs) r.push_back(F.on_obj.at(a.index()).size());
  return r;
}

template <class T>
std::vector<T> pick(std::span<const T> xs, const std::vector<std::size_t>& positions) {
  std::vector<T> out;
  out.reserve(positions.size());
  for (std::size_t j : positions) out.push_back(xs[j]);
  return out;
}

FinFunction identity_function(std::size_t n) {
  FinFunction f(n);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

// Calls fn(n, p, objs) for every (p, objs) with arity <= N.
template <class Fn>
void for_each_key(const Operad& O, std::size_t num_objects, Fn&& fn) {
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi)
      for_each_object_tuple(n, num_objects, [&](std::span<const ObjId> objs) { fn(n, OpId(pi), objs); });
}

// Objects and morphisms of ∫F decoded into (base, element), in the order
// groth() lays them out.
struct Elements {
  std::vector<ObjId> obj_base;
  std::vector<std::size_t> obj_elem;
  std::vector<MorId> mor_base;
  std::vector<std::size_t> mor_elem;
};

Elements elements_of(const IndexedSet& F) {
  Elements e;
  const FinCat& I = *F.index;
  for (std::size_t i = 0; i < I.num_objects(); ++i)
    for (std::size_t x = 0; x < F.on_obj[i].size(); ++x) {
      e.obj_base.push_back(ObjId(i));
      e.obj_elem.push_back(x);
    }
  for (std::size_t f = 0; f < I.num_morphisms(); ++f)
    for (std::size_t x = 0; x < F.on_obj[I.src(MorId(f)).index()].size(); ++x) {
      e.mor_base.push_back(MorId(f));
      e.mor_elem.push_back(x);
    }
  return e;
}

// Total objects over each base object, in total order, and each total
// object's position in its fiber.
struct FiberIndex {
  std::vector<std::vector<ObjId>> over;
  std::vector<std::size_t> position;
};

FiberIndex fiber_index(const DiscreteFibration& p) {
  FiberIndex fi;
  fi.over.resize(p.base().num_objects());
  fi.position.resize(p.total().num_objects());
  for (std::size_t c = 0; c < p.total().num_objects(); ++c) {
    auto& list = fi.over[p.proj(ObjId(c)).index()];
    fi.position[c] = list.size();
    list.push_back(ObjId(c));
  }
  return fi;
}

bool is_bijection(const FinFunction& f, std::size_t target) {
  if (f.size() != target) return false;
  std::vector<bool> seen(target, false);
  for (std::size_t v : f) {
    if (v >= target || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

// Structural completeness of nu; true when the value checks may run.
bool check_nu_structure(const LaxToSet& x, CheckReport& r) {
  const OMonCategory& C = *x.index_omon;
  const Operad& O = *C.operad();
  const FinCat& B = *C.base();
  const IndexedSet& F = *x.F;
  for (const auto& [key, fn] : x.nu) {
    bool ok = key.objs.size() <= O.max_arity() && key.p.index() < O.arity_size(key.objs.size());
    for (ObjId a : key.objs) ok = ok && a.index() < B.num_objects();
    if (!ok) r.structural("laxtoset.nu_key", "nu entry outside the operation and object range");
  }
  if (r.has_structural()) return false;
  for_each_key(O, B.num_objects(), [&](std::size_t, OpId p, std::span<const ObjId> objs) {
    auto it = x.nu.find(NuKey{p, {objs.begin(), objs.end()}});
    if (it == x.nu.end()) {
      r.structural("laxtoset.nu_missing", nu_entry_text(x, p, objs));
      return;
    }
    const auto radices = fiber_radices(F, objs);
    if (it->second.size() != tuple_count(radices)) {
      r.structural("laxtoset.nu_size", nu_entry_text(x, p, objs) + " has " + std::to_string(it->second.size()) +
                                           " values, expected " + std::to_string(tuple_count(radices)));
      return;
    }
    const std::size_t target = F.on_obj[C.tensor_obj(p, objs).index()].size();
    for (std::size_t v : it->second)
      if (v >= target) {
        r.structural("laxtoset.nu_range", nu_entry_text(x, p, objs) + " value out of range");
        return;
      }
  });
  return !r.has_structural();
}

void check_nu_laws(const LaxToSet& x, unsigned jobs, CheckReport& r) {
  const OMonCategory& C = *x.index_omon;
  const Operad& O = *C.operad();
  const FinCat& B = *C.base();
  const IndexedSet& F = *x.F;

  for (std::size_t i = 0; i < B.num_objects(); ++i) {
    const ObjId a(i);
    for (std::size_t v = 0; v < F.on_obj[i].size(); ++v) {
      const std::size_t xs[1] = {v};
      r.count("laxtoset.nu_units");
      if (x.nu_apply(O.unit(), std::span<const ObjId>(&a, 1), xs) != v)
        r.violation("laxtoset.nu_unit", nu_entry_text(x, O.unit(), std::span<const ObjId>(&a, 1)) + " at " +
                                            F.on_obj[i].label(v));
    }
  }

  // Naturality in morphism tuples; all-identity tuples hold by functoriality of F.
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const OpId p(pi);
      std::vector<std::size_t> mr(n, B.num_morphisms());
      std::vector<MorId> us(n);
      std::vector<ObjId> srcs(n), tgts(n);
      for_each_tuple(mr, [&](std::span<const std::size_t> d) {
        bool all_ids = true;
        for (std::size_t k = 0; k < n; ++k) {
          us[k] = MorId(d[k]);
          srcs[k] = B.src(us[k]);
          tgts[k] = B.tgt(us[k]);
          all_ids = all_ids && B.is_identity(us[k]);
        }
        if (all_ids) return;
        const MorId tu = C.tensor_mor(p, us);
        std::vector<std::size_t> ys(n);
        for_each_tuple(fiber_radices(F, srcs), [&](std::span<const std::size_t> xs) {
          r.count("laxtoset.nu_naturality");
          for (std::size_t k = 0; k < n; ++k) ys[k] = F.apply(us[k], xs[k]);
          if (F.apply(tu, x.nu_apply(p, srcs, xs)) != x.nu_apply(p, tgts, ys)) {
            std::vector<std::string> ml;
            for (MorId u : us) ml.push_back(B.label(u));
            r.violation("laxtoset.nu_natural", nu_entry_text(x, p, srcs) + " at " + elem_tuple_text(F, srcs, xs) +
                                                   " against " + paren_list(ml));
          }
        });
      });
    }

  const auto instances = composition_instances(O);
  std::vector<CheckReport> parts(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t k) {
    const OpInstance& in = instances[k];
    CheckReport& out = parts[k];
    const std::size_t m = in.f.source(), n = in.f.target();
    for_each_object_tuple(m, B.num_objects(), [&](std::span<const ObjId> A) {
      std::vector<std::vector<ObjId>> blocks(n);
      std::vector<ObjId> inner(n);
      for (std::size_t i = 0; i < n; ++i) {
        blocks[i] = pick(A, in.fibers[i]);
        inner[i] = C.tensor_obj(in.qs[i], blocks[i]);
      }
      const MorId phi0 = C.phi(in.f, in.p, in.qs, A);
      std::vector<std::size_t> ys(n);
      for_each_tuple(fiber_radices(F, A), [&](std::span<const std::size_t> xs) {
        out.count("laxtoset.pentagons");
        const std::size_t lhs = F.apply(phi0, x.nu_apply(in.mu, A, xs));
        for (std::size_t i = 0; i < n; ++i) ys[i] = x.nu_apply(in.qs[i], blocks[i], pick(xs, in.fibers[i]));
        if (lhs != x.nu_apply(in.p, inner, ys)) {
          std::string w = "pentagon " + in.f.to_string() + " " + O.label(n, in.p);
          for (std::size_t i = 0; i < n; ++i) w += " " + O.label(in.fibers[i].size(), in.qs[i]);
          // Name the nu entries the square reads so an edited entry shows up verbatim.
          w += " " + obj_tuple_text(B, A) + " at " + elem_tuple_text(F, A, xs) + " reading " +
               nu_entry_text(x, in.mu, A);
          for (std::size_t i = 0; i < n; ++i) w += ", " + nu_entry_text(x, in.qs[i], blocks[i]);
          out.violation("laxtoset.pentagon", w + ", " + nu_entry_text(x, in.p, inner));
        }
      });
    });
  });
  for (const auto& part : parts) r.merge(part);
}

CheckReport check_lax_to_set_impl(const LaxToSet& x, unsigned jobs, bool index_checked) {
  CheckReport r;
  if (!x.index_omon || !x.F || !x.index_omon->operad() || !x.index_omon->base() || !x.F->index) {
    r.structural("laxtoset.refs", "missing index structure or indexed set");
    return r;
  }
  if (!same_category(x.F->index, x.index_omon->base())) {
    r.structural("laxtoset.refs", "indexed set is not over the index category");
    return r;
  }
  if (!index_checked) {
    r.merge(check_omon_category(*x.index_omon, jobs), "index");
    if (!r.ok()) return r;
  }
  r.merge(validate_indexed_set(*x.F), "F");
  if (!r.ok()) return r;
  if (!check_nu_structure(x, r)) return r;
  check_nu_laws(x, jobs, r);
  if (!r.ok()) return r;
  bool weak = true;
  const IndexedSet& F = *x.F;
  for (const auto& [key, fn] : x.nu)
    weak = weak && is_bijection(fn, F.on_obj[x.index_omon->tensor_obj(key.p, key.objs).index()].size());
  r.note("lax.classification", weak ? "weak" : "lax");
  return r;
}

CheckReport check_ofib_object_impl(const OFibObject& y, unsigned jobs, bool base_checked) {
  CheckReport r;
  if (!y.p || !y.total_omon || !y.base_omon || !y.total_omon->operad() || !y.base_omon->operad()) {
    r.structural("ofib.refs", "missing fibration or structure");
    return r;
  }
  if (!same_category(y.total_omon->base(), y.p->proj.dom) || !same_category(y.base_omon->base(), y.p->proj.cod)) {
    r.structural("ofib.refs", "structures do not live on the fibration's categories");
    return r;
  }
  if (!(*y.total_omon->operad() == *y.base_omon->operad())) {
    r.structural("ofib.operad_mismatch", y.total_omon->operad()->name() + " vs " + y.base_omon->operad()->name());
    return r;
  }
  r.merge(check_discrete_fibration(*y.p), "fibration");
  r.merge(check_omon_category(*y.total_omon, jobs), "total");
  if (!base_checked) r.merge(check_omon_category(*y.base_omon, jobs), "base");
  if (!r.ok()) return r;

  const OMonCategory& T = *y.total_omon;
  const OMonCategory& S = *y.base_omon;
  const Operad& O = *T.operad();
  const FinCat& E = *T.base();
  const FinCat& B = *S.base();
  const CatFunctor& q = y.p->proj;
  for_each_key(O, E.num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> cs) {
    std::vector<ObjId> bs(n);
    for (std::size_t k = 0; k < n; ++k) bs[k] = q(cs[k]);
    const ObjId got = q(T.tensor_obj(p, cs));
    const ObjId want = S.tensor_obj(p, bs);
    r.count("ofib.tensor_objects");
    if (got != want)
      r.violation("ofib.strict_tensor", tensor_entry_text(T, p, cs) + " lies over " + B.label(got) + ", expected " +
                                            B.label(want));
  });
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const OpId p(pi);
      std::vector<std::size_t> mr(n, E.num_morphisms());
      std::vector<MorId> us(n), bs(n);
      for_each_tuple(mr, [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) {
          us[k] = MorId(d[k]);
          bs[k] = q(us[k]);
        }
        r.count("ofib.tensor_morphisms");
        const MorId got = q(T.tensor_mor(p, us));
        const MorId want = S.tensor_mor(p, bs);
        if (got != want)
          r.violation("ofib.strict_tensor", tensor_entry_text(T, p, std::span<const MorId>(us)) + " lies over " +
                                                B.label(got) + ", expected " + B.label(want));
      });
    }
  const auto instances = composition_instances(O);
  std::vector<CheckReport> parts(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t k) {
    const OpInstance& in = instances[k];
    for_each_object_tuple(in.f.source(), E.num_objects(), [&](std::span<const ObjId> cs) {
      std::vector<ObjId> bs(cs.size());
      for (std::size_t j = 0; j < cs.size(); ++j) bs[j] = q(cs[j]);
      parts[k].count("ofib.phi_components");
      if (q(T.phi(in.f, in.p, in.qs, cs)) != S.phi(in.f, in.p, in.qs, bs))
        parts[k].violation("ofib.strict_phi", phi_entry_text(T, in.f, in.p, in.qs, cs));
    });
  });
  for (const auto& part : parts) r.merge(part);
  return r;
}

// The monoidal square of zeta only; endpoints and U are assumed valid.
void check_zeta_square(const LaxToSetMorphism& m, CheckReport& r) {
  const LaxToSet& X = *m.dom;
  const LaxToSet& Y = *m.cod;
  const OMonCategory& C = *X.index_omon;
  const Operad& O = *C.operad();
  const IndexedSet& F = *X.F;
  const IndexedSet& G = *Y.F;
  for_each_key(O, C.base()->num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> is) {
    std::vector<ObjId> uis(n);
    for (std::size_t k = 0; k < n; ++k) uis[k] = m.U.F(is[k]);
    const MorId xi = m.U.xi_at(p, is);
    const std::size_t ti = C.tensor_obj(p, is).index();
    std::vector<std::size_t> zs(n);
    for_each_tuple(fiber_radices(F, is), [&](std::span<const std::size_t> xs) {
      r.count("ocell.monoidal_squares");
      for (std::size_t k = 0; k < n; ++k) zs[k] = m.zeta[is[k].index()][xs[k]];
      const std::size_t lhs = m.zeta[ti][X.nu_apply(p, is, xs)];
      const std::size_t rhs = G.apply(xi, Y.nu_apply(p, uis, zs));
      if (lhs != rhs)
        r.violation("ocell.monoidal", "zeta square " + O.label(n, p) + " " + obj_tuple_text(*C.base(), is) +
                                          " at " + elem_tuple_text(F, is, xs));
    });
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Lax functors into Set

std::size_t LaxToSet::nu_apply(OpId p, std::span<const ObjId> objs, std::span<const std::size_t> xs) const {
  auto it = nu.find(NuKey{p, {objs.begin(), objs.end()}});
  if (it == nu.end()) throw std::out_of_range("nu: missing entry");
  return it->second.at(encode_tuple(xs, fiber_radices(*F, objs)));
}

bool LaxToSet::operator==(const LaxToSet& o) const {
  return same_omon(index_omon, o.index_omon) && same_iset_ptr(F, o.F) && nu == o.nu;
}

LaxToSet make_lax_to_set(OMonPtr index, ISetPtr F, const NuRule& rule) {
  LaxToSet x{std::move(index), std::move(F), {}};
  for_each_key(*x.index_omon->operad(), x.index_omon->base()->num_objects(),
               [&](std::size_t, OpId p, std::span<const ObjId> objs) {
                 FinFunction fn;
                 for_each_tuple(fiber_radices(*x.F, objs),
                                [&](std::span<const std::size_t> xs) { fn.push_back(rule(p, objs, xs)); });
                 x.nu[NuKey{p, {objs.begin(), objs.end()}}] = std::move(fn);
               });
  return x;
}

std::string nu_entry_text(const LaxToSet& x, OpId p, std::span<const ObjId> objs) {
  return "nu " + x.index_omon->operad()->label(objs.size(), p) + " " + obj_tuple_text(*x.index_omon->base(), objs);
}

CheckReport check_lax_to_set(const LaxToSet& x, unsigned jobs) { return check_lax_to_set_impl(x, jobs, false); }

CheckReport check_lax_omon_functor(const LaxToSet& x, unsigned jobs) { return check_lax_to_set(x, jobs); }

// ---------------------------------------------------------------------------
// O-monoidal discrete fibrations

bool OFibObject::operator==(const OFibObject& o) const {
  auto same_p = [](const DFibPtr& a, const DFibPtr& b) { return a == b || (a && b && *a == *b); };
  return same_p(p, o.p) && same_omon(total_omon, o.total_omon) && same_omon(base_omon, o.base_omon);
}

CheckReport check_ofib_object(const OFibObject& y, unsigned jobs) { return check_ofib_object_impl(y, jobs, false); }

// ---------------------------------------------------------------------------
// Cells

ISetMorphism LaxToSetMorphism::underlying() const { return ISetMorphism{dom->F, cod->F, U.F, zeta}; }

bool LaxToSetMorphism::operator==(const LaxToSetMorphism& o) const {
  return same_lax(dom, o.dom) && same_lax(cod, o.cod) && U == o.U && zeta == o.zeta;
}

DFibMorphism OFibMorphism::underlying() const { return DFibMorphism{dom->p, cod->p, F1.F, F0.F}; }

bool OFibMorphism::operator==(const OFibMorphism& o) const {
  return same_ofib(dom, o.dom) && same_ofib(cod, o.cod) && F1 == o.F1 && F0 == o.F0;
}

CheckReport check_cell(const LaxToSetMorphism& m) {
  CheckReport r;
  if (!m.dom || !m.cod || !m.U.dom || !m.U.cod) {
    r.structural("ocell.refs", "missing endpoint");
    return r;
  }
  if (!same_omon(m.U.dom, m.dom->index_omon) || !same_omon(m.U.cod, m.cod->index_omon)) {
    r.structural("ocell.refs", "lax functor does not connect the index structures");
    return r;
  }
  r.merge(check_lax_omon_functor(m.U), "U");
  if (!r.ok()) return r;
  r.merge(validate_iset_cell(m.underlying()), "zeta");
  if (!r.ok()) return r;
  check_zeta_square(m, r);
  return r;
}

CheckReport check_cell(const LaxToSet2Morphism& a) {
  CheckReport r;
  if (!same_lax(a.src.dom, a.tgt.dom) || !same_lax(a.src.cod, a.tgt.cod)) {
    r.structural("ocell2.refs", "source and target cells are not parallel");
    return r;
  }
  r.merge(check_omon_transformation(OMonTransformation{a.src.U, a.tgt.U, a.eta}), "eta");
  if (!r.ok()) return r;
  r.merge(validate_iset_cell(ISet2Morphism{a.src.underlying(), a.tgt.underlying(), a.eta}), "cell");
  return r;
}

CheckReport check_cell(const OFibMorphism& m) {
  CheckReport r;
  if (!m.dom || !m.cod || !m.F1.dom || !m.F1.cod || !m.F0.dom || !m.F0.cod) {
    r.structural("ocell.refs", "missing endpoint");
    return r;
  }
  if (!same_omon(m.F1.dom, m.dom->total_omon) || !same_omon(m.F1.cod, m.cod->total_omon) ||
      !same_omon(m.F0.dom, m.dom->base_omon) || !same_omon(m.F0.cod, m.cod->base_omon)) {
    r.structural("ocell.refs", "lax functors do not connect the structures");
    return r;
  }
  r.merge(check_lax_omon_functor(m.F1), "F1");
  r.merge(check_lax_omon_functor(m.F0), "F0");
  if (!r.ok()) return r;
  r.merge(validate_dfib_cell(m.underlying()), "square");
  if (!r.ok()) return r;
  const OMonCategory& T = *m.dom->total_omon;
  const Operad& O = *T.operad();
  const CatFunctor& q = m.dom->p->proj;
  const CatFunctor& q2 = m.cod->p->proj;
  for_each_key(O, T.base()->num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> cs) {
    std::vector<ObjId> bs(n);
    for (std::size_t k = 0; k < n; ++k) bs[k] = q(cs[k]);
    r.count("ocell.xi_over");
    if (q2(m.F1.xi_at(p, cs)) != m.F0.xi_at(p, bs))
      r.violation("ocell.xi_over", "xi " + O.label(n, p) + " " + obj_tuple_text(*T.base(), cs));
  });
  return r;
}

CheckReport check_cell(const OFib2Morphism& a) {
  CheckReport r;
  if (!same_ofib(a.src.dom, a.tgt.dom) || !same_ofib(a.src.cod, a.tgt.cod)) {
    r.structural("ocell2.refs", "source and target cells are not parallel");
    return r;
  }
  r.merge(check_omon_transformation(OMonTransformation{a.src.F1, a.tgt.F1, a.mu1}), "mu1");
  r.merge(check_omon_transformation(OMonTransformation{a.src.F0, a.tgt.F0, a.mu0}), "mu0");
  if (!r.ok()) return r;
  r.merge(validate_dfib_cell(DFib2Morphism{a.src.underlying(), a.tgt.underlying(), a.mu1, a.mu0}), "cell");
  return r;
}

LaxToSetMorphism identity_cell(const LaxToSetPtr& x) {
  LaxToSetMorphism m{x, x, identity_lax_functor(x->index_omon), {}};
  for (const FinSet& s : x->F->on_obj) m.zeta.push_back(identity_function(s.size()));
  return m;
}

OFibMorphism identity_cell(const OFibPtr& y) {
  return OFibMorphism{y, y, identity_lax_functor(y->total_omon), identity_lax_functor(y->base_omon)};
}

LaxToSet2Morphism identity_cell(const LaxToSetMorphism& m) {
  return LaxToSet2Morphism{m, m, identity_transformation(m.U.F)};
}

OFib2Morphism identity_cell(const OFibMorphism& m) {
  return OFib2Morphism{m, m, identity_transformation(m.F1.F), identity_transformation(m.F0.F)};
}

LaxToSetMorphism compose(const LaxToSetMorphism& g, const LaxToSetMorphism& f) {
  if (!same_lax(f.cod, g.dom)) throw std::invalid_argument("compose: cells not composable");
  LaxToSetMorphism out{f.dom, g.cod, compose(g.U, f.U), {}};
  for (std::size_t i = 0; i < f.zeta.size(); ++i) {
    const auto& gz = g.zeta.at(f.U.F(ObjId(i)).index());
    FinFunction z;
    for (std::size_t v : f.zeta[i]) z.push_back(gz.at(v));
    out.zeta.push_back(std::move(z));
  }
  return out;
}

OFibMorphism compose(const OFibMorphism& g, const OFibMorphism& f) {
  if (!same_ofib(f.cod, g.dom)) throw std::invalid_argument("compose: cells not composable");
  return OFibMorphism{f.dom, g.cod, compose(g.F1, f.F1), compose(g.F0, f.F0)};
}

LaxToSet2Morphism vertical_compose(const LaxToSet2Morphism& b, const LaxToSet2Morphism& a) {
  return LaxToSet2Morphism{a.src, b.tgt, vertical_compose(b.eta, a.eta)};
}

OFib2Morphism vertical_compose(const OFib2Morphism& b, const OFib2Morphism& a) {
  return OFib2Morphism{a.src, b.tgt, vertical_compose(b.mu1, a.mu1), vertical_compose(b.mu0, a.mu0)};
}

// ---------------------------------------------------------------------------
// ∫^O and its transpose

namespace {

OFibPtr omon_groth_unchecked(const LaxToSetPtr& x) {
  const IndexedSet& F = *x->F;
  const OMonCategory& C = *x->index_omon;
  const Operad& O = *C.operad();
  const FinCat& B = *C.base();
  DFibPtr G = groth(x->F);
  const FinCat& E = G->total();
  const Elements el = elements_of(F);

  OMonCategory T(C.operad(), G->proj.dom);
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const OpId p(pi);
      TensorTable& t = T.tensor(n, p);
      std::vector<ObjId> is(n);
      std::vector<std::size_t> xs(n);
      std::size_t code = 0;
      std::vector<std::size_t> radices(n, E.num_objects());
      for_each_tuple(radices, [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) {
          is[k] = el.obj_base[d[k]];
          xs[k] = el.obj_elem[d[k]];
        }
        t.on_obj[code++] = groth_object(F, C.tensor_obj(p, is), x->nu_apply(p, is, xs));
      });
      std::vector<MorId> fs(n);
      code = 0;
      radices.assign(n, E.num_morphisms());
      for_each_tuple(radices, [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) {
          fs[k] = el.mor_base[d[k]];
          is[k] = B.src(fs[k]);
          xs[k] = el.mor_elem[d[k]];
        }
        t.on_mor[code++] = groth_morphism(F, C.tensor_mor(p, fs), x->nu_apply(p, is, xs));
      });
    }
  // Lifts of identities are identities, so only explicit base entries matter.
  for (const auto& [key, val] : C.phi_entries()) {
    if (B.is_identity(val)) continue;
    const OpId mu = O.compose_checked(key.f, key.p, key.qs);
    std::vector<ObjId> cs(key.objs.size());
    for_each_tuple(fiber_radices(F, key.objs), [&](std::span<const std::size_t> xs) {
      for (std::size_t k = 0; k < cs.size(); ++k) cs[k] = groth_object(F, key.objs[k], xs[k]);
      T.set_phi(PhiKey{key.f, key.p, key.qs, cs}, groth_morphism(F, val, x->nu_apply(mu, key.objs, xs)));
    });
  }
  return std::make_shared<const OFibObject>(
      OFibObject{G, std::make_shared<const OMonCategory>(std::move(T)), x->index_omon});
}

LaxToSetPtr omon_transpose_unchecked(const OFibPtr& y) {
  const OMonCategory& T = *y->total_omon;
  const OMonCategory& S = *y->base_omon;
  const FiberIndex fi = fiber_index(*y->p);
  LaxToSet x{y->base_omon, transpose(y->p), {}};
  for_each_key(*S.operad(), S.base()->num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> is) {
    std::vector<std::size_t> radices(n);
    for (std::size_t k = 0; k < n; ++k) radices[k] = fi.over[is[k].index()].size();
    std::vector<ObjId> cs(n);
    FinFunction fn;
    for_each_tuple(radices, [&](std::span<const std::size_t> d) {
      for (std::size_t k = 0; k < n; ++k) cs[k] = fi.over[is[k].index()][d[k]];
      fn.push_back(fi.position[T.tensor_obj(p, cs).index()]);
    });
    x.nu[NuKey{p, {is.begin(), is.end()}}] = std::move(fn);
  });
  return std::make_shared<const LaxToSet>(std::move(x));
}

}  // namespace

OFibPtr omon_groth(const LaxToSetPtr& x) {
  CheckReport r = check_lax_to_set(*x);
  if (!r.ok()) throw CheckFailure("omon_groth: input does not validate", std::move(r));
  return omon_groth_unchecked(x);
}

OFibMorphism omon_groth(const LaxToSetMorphism& m, const OFibPtr& dom, const OFibPtr& cod) {
  const DFibMorphism d = groth(m.underlying(), dom->p, cod->p);
  LaxOMonFunctor F0 = m.U;
  F0.dom = dom->base_omon;
  F0.cod = cod->base_omon;
  LaxOMonFunctor F1{dom->total_omon, cod->total_omon, d.f1, {}};
  const IndexedSet& F = *m.dom->F;
  const LaxToSet& Y = *m.cod;
  const FinCat& D = *m.U.cod->base();
  const Operad& O = *m.U.dom->operad();
  const Elements el = elements_of(F);
  for_each_key(O, dom->p->total().num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> cs) {
    std::vector<ObjId> is(n), uis(n);
    std::vector<std::size_t> zs(n);
    for (std::size_t k = 0; k < n; ++k) {
      is[k] = el.obj_base[cs[k].index()];
      uis[k] = m.U.F(is[k]);
      zs[k] = m.zeta[is[k].index()][el.obj_elem[cs[k].index()]];
    }
    const MorId xi0 = m.U.xi_at(p, is);
    if (D.is_identity(xi0)) return;
    F1.xi[XiKey{p, {cs.begin(), cs.end()}}] = groth_morphism(*Y.F, xi0, Y.nu_apply(p, uis, zs));
  });
  return OFibMorphism{dom, cod, std::move(F1), std::move(F0)};
}

OFib2Morphism omon_groth(const LaxToSet2Morphism& a, const OFibMorphism& src, const OFibMorphism& tgt) {
  const IndexedSet& F = *a.src.dom->F;
  const IndexedSet& G = *a.src.cod->F;
  const Elements el = elements_of(F);
  NatTransform mu1{src.F1.F, tgt.F1.F, {}};
  for (std::size_t c = 0; c < el.obj_base.size(); ++c) {
    const ObjId i = el.obj_base[c];
    mu1.components.push_back(groth_morphism(G, a.eta[i], a.src.zeta[i.index()][el.obj_elem[c]]));
  }
  NatTransform mu0{src.F0.F, tgt.F0.F, a.eta.components};
  return OFib2Morphism{src, tgt, std::move(mu1), std::move(mu0)};
}

LaxToSetPtr omon_transpose(const OFibPtr& y) {
  CheckReport r = check_ofib_object(*y);
  if (!r.ok()) throw CheckFailure("omon_transpose: input does not validate", std::move(r));
  return omon_transpose_unchecked(y);
}

LaxToSetMorphism omon_transpose(const OFibMorphism& m, const LaxToSetPtr& dom, const LaxToSetPtr& cod) {
  ISetMorphism t = transpose(m.underlying(), dom->F, cod->F);
  LaxOMonFunctor U = m.F0;
  U.dom = dom->index_omon;
  U.cod = cod->index_omon;
  return LaxToSetMorphism{dom, cod, std::move(U), std::move(t.mu)};
}

LaxToSet2Morphism omon_transpose(const OFib2Morphism& a, const LaxToSetMorphism& src, const LaxToSetMorphism& tgt) {
  return LaxToSet2Morphism{src, tgt, NatTransform{src.U.F, tgt.U.F, a.mu0.components}};
}

LaxToSetMorphism omon_phi(const LaxToSetPtr& x, const LaxToSetPtr& transposed_groth) {
  const ISetMorphism ph = phi(x->F);
  LaxOMonFunctor U = identity_lax_functor(x->index_omon);
  U.dom = transposed_groth->index_omon;
  return LaxToSetMorphism{transposed_groth, x, std::move(U), ph.mu};
}

LaxToSetMorphism omon_phi_inverse(const LaxToSetPtr& x, const LaxToSetPtr& transposed_groth) {
  const ISetMorphism ph = phi_inverse(x->F);
  LaxOMonFunctor U = identity_lax_functor(x->index_omon);
  U.cod = transposed_groth->index_omon;
  return LaxToSetMorphism{x, transposed_groth, std::move(U), ph.mu};
}

OFibMorphism omon_psi(const OFibPtr& y, const OFibPtr& groth_transposed) {
  DFibMorphism ps = psi(y->p);
  ps.f1.dom = groth_transposed->p->proj.dom;
  ps.f1.cod = y->p->proj.dom;
  LaxOMonFunctor F0 = identity_lax_functor(y->base_omon);
  F0.dom = groth_transposed->base_omon;
  return OFibMorphism{groth_transposed, y, LaxOMonFunctor{groth_transposed->total_omon, y->total_omon, ps.f1, {}},
                      std::move(F0)};
}

OFibMorphism omon_psi_inverse(const OFibPtr& y, const OFibPtr& groth_transposed) {
  DFibMorphism ps = psi_inverse(y->p);
  ps.f1.dom = y->p->proj.dom;
  ps.f1.cod = groth_transposed->p->proj.dom;
  LaxOMonFunctor F0 = identity_lax_functor(y->base_omon);
  F0.cod = groth_transposed->base_omon;
  return OFibMorphism{y, groth_transposed, LaxOMonFunctor{y->total_omon, groth_transposed->total_omon, ps.f1, {}},
                      std::move(F0)};
}

// ---------------------------------------------------------------------------
// Products and special objects

namespace {

OMonPtr product_omon_over(const OperadPtr& o, const std::vector<OMonPtr>& factors, const ProductCategory& P) {
  OMonCategory T(o, P.category);
  const FinCat& Pc = *P.category;
  const std::size_t J = factors.size();
  for (std::size_t n = 0; n <= o->max_arity(); ++n)
    for (std::size_t pi = 0; pi < o->arity_size(n); ++pi) {
      const OpId p(pi);
      TensorTable& t = T.tensor(n, p);
      std::size_t code = 0;
      std::vector<std::vector<ObjId>> oparts(n);
      std::vector<ObjId> slice(n), res(J);
      for_each_tuple(std::vector<std::size_t>(n, Pc.num_objects()), [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) oparts[k] = P.object_parts(ObjId(d[k]));
        for (std::size_t j = 0; j < J; ++j) {
          for (std::size_t k = 0; k < n; ++k) slice[k] = oparts[k][j];
          res[j] = factors[j]->tensor_obj(p, slice);
        }
        t.on_obj[code++] = P.object_of(res);
      });
      code = 0;
      std::vector<std::vector<MorId>> mparts(n);
      std::vector<MorId> mslice(n), mres(J);
      for_each_tuple(std::vector<std::size_t>(n, Pc.num_morphisms()), [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) mparts[k] = P.morphism_parts(MorId(d[k]));
        for (std::size_t j = 0; j < J; ++j) {
          for (std::size_t k = 0; k < n; ++k) mslice[k] = mparts[k][j];
          mres[j] = factors[j]->tensor_mor(p, mslice);
        }
        t.on_mor[code++] = P.morphism_of(mres);
      });
    }
  bool any_phi = false;
  for (const auto& f : factors) any_phi = any_phi || !f->phi_entries().empty();
  if (any_phi)
    for (const OpInstance& in : composition_instances(*o))
      for_each_object_tuple(in.f.source(), Pc.num_objects(), [&](std::span<const ObjId> A) {
        std::vector<std::vector<ObjId>> parts;
        for (ObjId a : A) parts.push_back(P.object_parts(a));
        std::vector<MorId> comps(J);
        std::vector<ObjId> slice(A.size());
        for (std::size_t j = 0; j < J; ++j) {
          for (std::size_t k = 0; k < A.size(); ++k) slice[k] = parts[k][j];
          comps[j] = factors[j]->phi(in.f, in.p, in.qs, slice);
        }
        const MorId v = P.morphism_of(comps);
        if (!Pc.is_identity(v)) T.set_phi(PhiKey{in.f, in.p, in.qs, {A.begin(), A.end()}}, v);
      });
  return std::make_shared<const OMonCategory>(std::move(T));
}

}  // namespace

OMonPtr terminal_omon(const OperadPtr& o) {
  OMonCategory T(o, terminal_category());
  for (std::size_t n = 0; n <= o->max_arity(); ++n)
    for (std::size_t pi = 0; pi < o->arity_size(n); ++pi) {
      TensorTable& t = T.tensor(n, OpId(pi));
      std::fill(t.on_obj.begin(), t.on_obj.end(), ObjId(0));
      std::fill(t.on_mor.begin(), t.on_mor.end(), MorId(0));
    }
  return std::make_shared<const OMonCategory>(std::move(T));
}

OMonPtr product_omon(const OperadPtr& o, const std::vector<OMonPtr>& factors) {
  if (factors.empty()) return terminal_omon(o);
  if (factors.size() == 1) return factors[0];
  std::vector<CatPtr> bases;
  for (const auto& f : factors) {
    if (!(*f->operad() == *o)) throw std::invalid_argument("product_omon: factor over a different operad");
    bases.push_back(f->base());
  }
  return product_omon_over(o, factors, product_category(bases));
}

OFibPtr product_ofib(const OperadPtr& o, const std::vector<OFibPtr>& factors) {
  if (factors.empty()) return identity_ofib(terminal_omon(o));
  if (factors.size() == 1) return factors[0];
  std::vector<DFibPtr> ps;
  std::vector<OMonPtr> totals, bases;
  for (const auto& y : factors) {
    if (!(*y->total_omon->operad() == *o)) throw std::invalid_argument("product_ofib: factor over a different operad");
    ps.push_back(y->p);
    totals.push_back(y->total_omon);
    bases.push_back(y->base_omon);
  }
  const DFibProduct dp = product_dfib(ps);
  return std::make_shared<const OFibObject>(
      OFibObject{dp.fibration, product_omon_over(o, totals, dp.totals), product_omon_over(o, bases, dp.bases)});
}

OFibPtr identity_ofib(const OMonPtr& c) {
  return std::make_shared<const OFibObject>(
      OFibObject{std::make_shared<const DiscreteFibration>(identity_fibration(c->base())), c, c});
}

LaxToSetPtr constant_singleton(const OMonPtr& index) {
  auto F = std::make_shared<const IndexedSet>(constant_indexed_set(index->base(), singleton_set()));
  return std::make_shared<const LaxToSet>(
      make_lax_to_set(index, F, [](OpId, std::span<const ObjId>, std::span<const std::size_t>) { return 0; }));
}

// ---------------------------------------------------------------------------
// Restriction

namespace {

void check_over(const OperadMorphism& h, const OperadPtr& over, const OMonPtr& restricted) {
  if (!h.dom || !h.cod || !over || !(*over == *h.cod))
    throw std::invalid_argument("restrict: object does not live over the codomain operad");
  if (!restricted || !(*restricted->operad() == *h.dom))
    throw std::invalid_argument("restrict: restricted structure expected");
}

}  // namespace

LaxToSet restrict_along_operad_morphism(const OperadMorphism& h, const LaxToSet& x, const OMonPtr& index) {
  check_over(h, x.index_omon->operad(), index);
  LaxToSet out{index, x.F, {}};
  for_each_key(*h.dom, index->base()->num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> objs) {
    std::vector<ObjId> key(objs.begin(), objs.end());
    out.nu[NuKey{p, key}] = x.nu.at(NuKey{h(n, p), key});
  });
  return out;
}

OFibObject restrict_along_operad_morphism(const OperadMorphism& h, const OFibObject& y, const OMonPtr& total,
                                          const OMonPtr& base) {
  check_over(h, y.total_omon->operad(), total);
  check_over(h, y.base_omon->operad(), base);
  return OFibObject{y.p, total, base};
}

LaxToSetMorphism restrict_along_operad_morphism(const OperadMorphism& h, const LaxToSetMorphism& m,
                                                const LaxToSetPtr& dom, const LaxToSetPtr& cod) {
  return LaxToSetMorphism{dom, cod, restrict_along_operad_morphism(h, m.U, dom->index_omon, cod->index_omon),
                          m.zeta};
}

OFibMorphism restrict_along_operad_morphism(const OperadMorphism& h, const OFibMorphism& m, const OFibPtr& dom,
                                            const OFibPtr& cod) {
  return OFibMorphism{dom, cod, restrict_along_operad_morphism(h, m.F1, dom->total_omon, cod->total_omon),
                      restrict_along_operad_morphism(h, m.F0, dom->base_omon, cod->base_omon)};
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

// Lax functors C -> D whose comparisons are forced: the identity when the
// tensors agree, else the unique morphism. The identity functor on C == D
// comes first.
std::vector<LaxOMonFunctor> forced_lax_functors(const OMonPtr& C, const OMonPtr& D) {
  std::vector<LaxOMonFunctor> out;
  if (C == D) out.push_back(identity_lax_functor(C));
  const FinCat& Db = *D->base();
  for (const CatFunctor& F : enumerate_functors(C->base(), D->base())) {
    LaxOMonFunctor L{C, D, F, {}};
    bool ok = true;
    for_each_key(*C->operad(), C->base()->num_objects(), [&](std::size_t n, OpId p, std::span<const ObjId> A) {
      if (!ok) return;
      std::vector<ObjId> FA(n);
      for (std::size_t k = 0; k < n; ++k) FA[k] = F(A[k]);
      const ObjId src = D->tensor_obj(p, FA);
      const ObjId tgt = F(C->tensor_obj(p, A));
      if (src == tgt) return;
      const auto homs = Db.hom(src, tgt);
      if (homs.size() != 1) {
        ok = false;
        return;
      }
      L.xi[XiKey{p, {A.begin(), A.end()}}] = homs[0];
    });
    if (!ok || !check_lax_omon_functor(L).ok()) continue;
    if (std::find(out.begin(), out.end(), L) == out.end()) out.push_back(std::move(L));
  }
  return out;
}

// Natural zeta : F => G∘U by backtracking over objects; at most `cap` results.
std::vector<std::vector<FinFunction>> natural_zetas(const IndexedSet& F, const IndexedSet& G, const CatFunctor& U,
                                                    std::size_t cap) {
  const FinCat& I = *F.index;
  std::vector<std::vector<FinFunction>> out;
  std::vector<FinFunction> cur(I.num_objects());
  auto consistent = [&](std::size_t upto) {
    for (std::size_t k = 0; k < I.num_morphisms(); ++k) {
      const MorId u(k);
      const std::size_t i = I.src(u).index(), j = I.tgt(u).index();
      if (i > upto || j > upto) continue;
      for (std::size_t v = 0; v < F.on_obj[i].size(); ++v)
        if (G.apply(U(u), cur[i][v]) != cur[j][F.apply(u, v)]) return false;
    }
    return true;
  };
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (out.size() >= cap) return;
    if (i == I.num_objects()) {
      out.push_back(cur);
      return;
    }
    const std::size_t dom = F.on_obj[i].size();
    const std::size_t cod = G.on_obj[U(ObjId(i)).index()].size();
    std::vector<std::size_t> radices(dom, cod);
    for_each_tuple(radices, [&](std::span<const std::size_t> d) {
      if (out.size() >= cap) return false;
      cur[i].assign(d.begin(), d.end());
      if (consistent(i)) go(i + 1);
      return true;
    });
  };
  go(0);
  return out;
}

// Natural transformations between two functors by backtracking.
std::vector<NatTransform> natural_transformations(const CatFunctor& S, const CatFunctor& T, std::size_t cap) {
  const FinCat& C = *S.dom;
  const FinCat& D = *S.cod;
  std::vector<NatTransform> out;
  std::vector<MorId> cur(C.num_objects());
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (out.size() >= cap) return;
    if (i == C.num_objects()) {
      NatTransform t{S, T, cur};
      if (validate_natural_transformation(t).ok()) out.push_back(std::move(t));
      return;
    }
    for (MorId u : D.hom(S(ObjId(i)), T(ObjId(i)))) {
      cur[i] = u;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

constexpr std::size_t kEnumerationCap = 4096;

}  // namespace

void generate_ocells(OCorpus& corpus, std::size_t cells_per_pair) {
  std::mt19937_64 rng(corpus.seed);
  // Groth images of the lax objects, appended when missing.
  std::vector<OFibPtr> images(corpus.lax.size());
  for (std::size_t k = 0; k < corpus.lax.size(); ++k) {
    images[k] = omon_groth_unchecked(corpus.lax[k]);
    if (k < corpus.ofibs.size() && corpus.ofibs[k] && *corpus.ofibs[k] == *images[k])
      images[k] = corpus.ofibs[k];
    else
      corpus.ofibs.push_back(images[k]);
  }
  std::map<std::pair<const OMonCategory*, const OMonCategory*>, std::vector<LaxOMonFunctor>> functor_cache;
  std::vector<std::pair<std::size_t, std::size_t>> cell_ends;
  for (std::size_t a = 0; a < corpus.lax.size(); ++a)
    for (std::size_t b = 0; b < corpus.lax.size(); ++b) {
      const LaxToSetPtr& X = corpus.lax[a];
      const LaxToSetPtr& Y = corpus.lax[b];
      if (!(*X->index_omon->operad() == *Y->index_omon->operad())) continue;
      auto key = std::make_pair(X->index_omon.get(), Y->index_omon.get());
      auto it = functor_cache.find(key);
      if (it == functor_cache.end())
        it = functor_cache.emplace(key, forced_lax_functors(X->index_omon, Y->index_omon)).first;
      std::vector<LaxToSetMorphism> found;
      for (const LaxOMonFunctor& U : it->second)
        for (auto& z : natural_zetas(*X->F, *Y->F, U.F, kEnumerationCap)) {
          LaxToSetMorphism m{X, Y, U, std::move(z)};
          CheckReport r;
          check_zeta_square(m, r);
          if (r.ok()) found.push_back(std::move(m));
        }
      std::vector<LaxToSetMorphism> chosen;
      if (a == b) {
        LaxToSetMorphism id = identity_cell(X);
        chosen.push_back(id);
        found.erase(std::remove(found.begin(), found.end(), id), found.end());
      }
      std::shuffle(found.begin(), found.end(), rng);
      for (std::size_t k = 0; k < found.size() && k < cells_per_pair; ++k) chosen.push_back(std::move(found[k]));
      for (auto& m : chosen) {
        corpus.lax_cells.push_back(std::move(m));
        cell_ends.emplace_back(a, b);
      }
    }
  for (std::size_t k = 0; k < corpus.lax_cells.size(); ++k)
    corpus.ofib_cells.push_back(
        omon_groth(corpus.lax_cells[k], images[cell_ends[k].first], images[cell_ends[k].second]));
  // Identity cells on the OFib objects that are not groth images.
  for (std::size_t k = corpus.lax.size(); k < corpus.ofibs.size(); ++k)
    if (std::find(images.begin(), images.end(), corpus.ofibs[k]) == images.end())
      corpus.ofib_cells.push_back(identity_cell(corpus.ofibs[k]));

  // 2-cells between parallel lax cells, with their OFib images.
  const std::size_t num_cells = corpus.lax_cells.size();
  for (std::size_t s = 0; s < num_cells; ++s)
    for (std::size_t t = 0; t < num_cells; ++t) {
      const LaxToSetMorphism& m = corpus.lax_cells[s];
      const LaxToSetMorphism& n = corpus.lax_cells[t];
      if (cell_ends[s] != cell_ends[t]) continue;
      std::vector<LaxToSet2Morphism> found;
      for (auto& eta : natural_transformations(m.U.F, n.U.F, kEnumerationCap)) {
        LaxToSet2Morphism a{m, n, std::move(eta)};
        if (check_cell(a).ok()) found.push_back(std::move(a));
      }
      std::shuffle(found.begin(), found.end(), rng);
      for (std::size_t k = 0; k < found.size() && k < cells_per_pair; ++k) {
        corpus.ofib_2cells.push_back(omon_groth(found[k], corpus.ofib_cells[s], corpus.ofib_cells[t]));
        corpus.lax_2cells.push_back(std::move(found[k]));
      }
    }
}

OCorpus generate_ocorpus(const OCorpusParams& params) {
  namespace fx = fixtures;
  OCorpus c;
  c.seed = params.seed;
  const std::size_t N = params.max_arity;
  const OperadPtr assoc = build_assoc(N);
  const OperadPtr comm = build_comm(N);
  const OperadPtr qconv = build_qconv(boolean_semiring(), N);
  c.operads = {assoc, comm, qconv};
  c.operad_morphisms = {identity_morphism(assoc), identity_morphism(comm), identity_morphism(qconv),
                        terminal_morphism(assoc), terminal_morphism(qconv)};

  const OMonPtr dz2A = fx::dz2_omon(assoc);
  const OMonPtr twA =
      std::make_shared<const OMonCategory>(extend_unbiased_to_assoc(fx::twisted_bz2_unbiased(N)));
  const OMonPtr ptA = terminal_omon(assoc);
  const OMonPtr dz2C = fx::dz2_omon(comm);
  const OMonPtr l2C = fx::l2_omon(comm);
  const OMonPtr ptC = terminal_omon(comm);
  const OMonPtr l2Q = fx::l2_omon(qconv);
  const OMonPtr ptQ = terminal_omon(qconv);
  c.structures = {dz2A, twA, ptA, dz2C, l2C, ptC, l2Q, ptQ};

  c.lax = {fx::grade_laxtoset(dz2A), constant_singleton(dz2A), fx::unit_fiber_laxtoset(dz2A),
           fx::torsor_laxtoset(twA), constant_singleton(twA), constant_singleton(ptA),
           fx::grade_laxtoset(dz2C), fx::meet_laxtoset(l2C), constant_singleton(l2C),
           fx::top_fiber_laxtoset(l2C), constant_singleton(ptC),
           fx::meet_laxtoset(l2Q), constant_singleton(l2Q), fx::top_fiber_laxtoset(l2Q), constant_singleton(ptQ)};
  for (const auto& x : c.lax) c.ofibs.push_back(omon_groth(x));
  for (const auto& s : {dz2A, twA, l2C, l2Q}) c.ofibs.push_back(identity_ofib(s));
  if (params.include_products) c.ofibs.push_back(product_ofib(assoc, {c.ofibs[0], c.ofibs[0]}));
  generate_ocells(c, params.cells_per_pair);
  return c;
}

// ---------------------------------------------------------------------------
// Round trip

namespace {

struct LaxData {
  bool ok = false;
  OFibPtr G;                  // ∫x
  LaxToSetPtr T;              // T∫x
  LaxToSetMorphism phi, phi_inv;
};

struct OFibData {
  bool ok = false;
  LaxToSetPtr T;   // Ty
  OFibPtr G;       // ∫Ty
  OFibMorphism psi, psi_inv;
};

template <class P>
std::map<const void*, std::size_t> index_of(const std::vector<P>& xs) {
  std::map<const void*, std::size_t> m;
  for (std::size_t k = 0; k < xs.size(); ++k) m.emplace(xs[k].get(), k);
  return m;
}

std::string loc(const char* kind, std::size_t k) { return std::string(kind) + "[" + std::to_string(k) + "]"; }

}  // namespace

CheckReport omon_roundtrip_check(const OCorpus& corpus, unsigned jobs) {
  CheckReport report;
  // Each distinct index structure is validated once.
  std::map<const OMonCategory*, bool> index_ok;
  for (const auto& x : corpus.lax) index_ok.emplace(x->index_omon.get(), false);
  for (const auto& y : corpus.ofibs) index_ok.emplace(y->base_omon.get(), false);
  {
    std::vector<const OMonCategory*> keys;
    for (const auto& [k, v] : index_ok) keys.push_back(k);
    std::vector<CheckReport> parts(keys.size());
    parallel_for(keys.size(), jobs, [&](std::size_t k) { parts[k] = check_omon_category(*keys[k]); });
    for (std::size_t k = 0; k < keys.size(); ++k) {
      index_ok[keys[k]] = parts[k].ok();
      report.merge(parts[k], "structure[" + std::to_string(k) + "]/");
    }
    report.count("ogroth.structures", keys.size());
  }

  std::vector<LaxData> ld(corpus.lax.size());
  std::vector<CheckReport> lr(corpus.lax.size());
  parallel_for(corpus.lax.size(), jobs, [&](std::size_t k) {
    CheckReport& r = lr[k];
    const LaxToSetPtr& x = corpus.lax[k];
    LaxData& d = ld[k];
    if (!x->index_omon || !index_ok[x->index_omon.get()]) {
      r.count("ogroth.skipped");
      return;
    }
    const CheckReport in = check_lax_to_set_impl(*x, 1, true);
    r.merge(in, "input/");
    if (!in.ok()) {
      r.count("ogroth.skipped");
      return;
    }
    d.G = omon_groth_unchecked(x);
    r.merge(check_ofib_object_impl(*d.G, 1, true), "groth/");
    if (!(*d.G->p == *groth(x->F))) r.violation("ogroth.groth_underlying", "total fibration differs from ∫F");
    if (d.G->base_omon != x->index_omon) r.violation("ogroth.fixed_base", "base structure is not the index");
    d.T = omon_transpose_unchecked(d.G);
    r.merge(check_lax_to_set_impl(*d.T, 1, true), "transpose/");
    if (!(*d.T->F == *transpose(d.G->p)))
      r.violation("ogroth.transpose_underlying", "indexed set differs from the fibers");
    if (d.T->nu != x->nu) r.violation("ogroth.nu_relabel", "nu tables differ after relabeling");
    d.phi = omon_phi(x, d.T);
    d.phi_inv = omon_phi_inverse(x, d.T);
    r.merge(check_cell(d.phi), "phi/");
    r.merge(check_cell(d.phi_inv), "phi_inverse/");
    if (!(d.phi.underlying() == phi(x->F))) r.violation("ogroth.phi_underlying", "component differs from Φ");
    const bool inv = is_invertible(d.phi.underlying()) && classify(d.phi.U) == LaxKind::strict &&
                     compose(d.phi, d.phi_inv) == identity_cell(x) && compose(d.phi_inv, d.phi) == identity_cell(d.T);
    if (!inv) r.violation("ogroth.phi_invertible", "Φ is not an isomorphism");
    r.count("ogroth.phi_components");
    if (!(omon_groth(identity_cell(x), d.G, d.G) == identity_cell(d.G)))
      r.violation("ogroth.groth_identity", "∫ does not preserve the identity");
    d.ok = r.ok();
  });
  for (std::size_t k = 0; k < lr.size(); ++k) report.merge(lr[k], loc("lax", k) + "/");

  std::vector<OFibData> od(corpus.ofibs.size());
  std::vector<CheckReport> orp(corpus.ofibs.size());
  parallel_for(corpus.ofibs.size(), jobs, [&](std::size_t k) {
    CheckReport& r = orp[k];
    const OFibPtr& y = corpus.ofibs[k];
    OFibData& d = od[k];
    if (!y->base_omon || !index_ok[y->base_omon.get()]) {
      r.count("ogroth.skipped");
      return;
    }
    const CheckReport in = check_ofib_object_impl(*y, 1, true);
    r.merge(in, "input/");
    if (!in.ok()) {
      r.count("ogroth.skipped");
      return;
    }
    d.T = omon_transpose_unchecked(y);
    r.merge(check_lax_to_set_impl(*d.T, 1, true), "transpose/");
    d.G = omon_groth_unchecked(d.T);
    r.merge(check_ofib_object_impl(*d.G, 1, true), "groth/");
    d.psi = omon_psi(y, d.G);
    d.psi_inv = omon_psi_inverse(y, d.G);
    r.merge(check_cell(d.psi), "psi/");
    r.merge(check_cell(d.psi_inv), "psi_inverse/");
    const bool inv = is_invertible(d.psi.underlying()) && classify(d.psi.F1) == LaxKind::strict &&
                     compose(d.psi, d.psi_inv) == identity_cell(y) && compose(d.psi_inv, d.psi) == identity_cell(d.G);
    if (!inv) r.violation("ogroth.psi_invertible", "Ψ is not an isomorphism");
    r.count("ogroth.psi_components");
    if (!(omon_transpose(identity_cell(y), d.T, d.T) == identity_cell(d.T)))
      r.violation("ogroth.transpose_identity", "transpose does not preserve the identity");
    d.ok = r.ok();
  });
  for (std::size_t k = 0; k < orp.size(); ++k) report.merge(orp[k], loc("ofib", k) + "/");

  const auto lax_idx = index_of(corpus.lax);
  const auto ofib_idx = index_of(corpus.ofibs);
  auto lax_data = [&](const LaxToSetPtr& x) -> const LaxData* {
    auto it = lax_idx.find(x.get());
    return it == lax_idx.end() || !ld[it->second].ok ? nullptr : &ld[it->second];
  };
  auto ofib_data = [&](const OFibPtr& y) -> const OFibData* {
    auto it = ofib_idx.find(y.get());
    return it == ofib_idx.end() || !od[it->second].ok ? nullptr : &od[it->second];
  };

  // 1-cells: validity of the images and naturality of Φ and Ψ.
  std::vector<char> lax_cell_ok(corpus.lax_cells.size(), 0);
  std::vector<CheckReport> cr(corpus.lax_cells.size());
  parallel_for(corpus.lax_cells.size(), jobs, [&](std::size_t k) {
    const LaxToSetMorphism& m = corpus.lax_cells[k];
    CheckReport& r = cr[k];
    const LaxData* a = lax_data(m.dom);
    const LaxData* b = lax_data(m.cod);
    const CheckReport in = check_cell(m);
    r.merge(in, "input/");
    if (!a || !b || !in.ok()) {
      r.count("ogroth.skipped");
      return;
    }
    const OFibMorphism n = omon_groth(m, a->G, b->G);
    r.merge(check_cell(n), "groth/");
    const LaxToSetMorphism tn = omon_transpose(n, a->T, b->T);
    r.merge(check_cell(tn), "transpose/");
    r.count("ogroth.phi_naturality");
    if (!(compose(b->phi, tn) == compose(m, a->phi))) r.violation("ogroth.phi_natural", "Φ square fails");
    // Fixed base: cells over the identity of a shared index stay over it.
    if (m.dom->index_omon == m.cod->index_omon && m.U == identity_lax_functor(m.dom->index_omon)) {
      r.count("ogroth.fixed_base_cells");
      if (!(n.F0 == identity_lax_functor(a->G->base_omon)) || classify(n.F1) != LaxKind::strict)
        r.violation("ogroth.fixed_base_cell", "image does not lie over the identity");
    }
    lax_cell_ok[k] = r.ok();
  });
  for (std::size_t k = 0; k < cr.size(); ++k) report.merge(cr[k], loc("lax_cell", k) + "/");

  std::vector<char> ofib_cell_ok(corpus.ofib_cells.size(), 0);
  std::vector<CheckReport> ocr(corpus.ofib_cells.size());
  parallel_for(corpus.ofib_cells.size(), jobs, [&](std::size_t k) {
    const OFibMorphism& n = corpus.ofib_cells[k];
    CheckReport& r = ocr[k];
    const OFibData* a = ofib_data(n.dom);
    const OFibData* b = ofib_data(n.cod);
    const CheckReport in = check_cell(n);
    r.merge(in, "input/");
    if (!a || !b || !in.ok()) {
      r.count("ogroth.skipped");
      return;
    }
    const LaxToSetMorphism t = omon_transpose(n, a->T, b->T);
    r.merge(check_cell(t), "transpose/");
    const OFibMorphism gt = omon_groth(t, a->G, b->G);
    r.merge(check_cell(gt), "groth/");
    r.count("ogroth.psi_naturality");
    if (!(compose(b->psi, gt) == compose(n, a->psi))) r.violation("ogroth.psi_natural", "Ψ square fails");
    ofib_cell_ok[k] = r.ok();
  });
  for (std::size_t k = 0; k < ocr.size(); ++k) report.merge(ocr[k], loc("ofib_cell", k) + "/");

  // Composable pairs.
  for (std::size_t i = 0; i < corpus.lax_cells.size(); ++i)
    for (std::size_t j = 0; j < corpus.lax_cells.size(); ++j) {
      const auto& f = corpus.lax_cells[i];
      const auto& g = corpus.lax_cells[j];
      if (!lax_cell_ok[i] || !lax_cell_ok[j] || f.cod != g.dom) continue;
      const LaxData* a = lax_data(f.dom);
      const LaxData* b = lax_data(f.cod);
      const LaxData* c = lax_data(g.cod);
      report.count("ogroth.groth_composable_pairs");
      if (!(omon_groth(compose(g, f), a->G, c->G) == compose(omon_groth(g, b->G, c->G), omon_groth(f, a->G, b->G))))
        report.violation("ogroth.groth_compose", "lax_cell[" + std::to_string(j) + "]∘lax_cell[" + std::to_string(i) + "]");
    }
  for (std::size_t i = 0; i < corpus.ofib_cells.size(); ++i)
    for (std::size_t j = 0; j < corpus.ofib_cells.size(); ++j) {
      const auto& f = corpus.ofib_cells[i];
      const auto& g = corpus.ofib_cells[j];
      if (!ofib_cell_ok[i] || !ofib_cell_ok[j] || f.cod != g.dom) continue;
      const OFibData* a = ofib_data(f.dom);
      const OFibData* b = ofib_data(f.cod);
      const OFibData* c = ofib_data(g.cod);
      report.count("ogroth.transpose_composable_pairs");
      if (!(omon_transpose(compose(g, f), a->T, c->T) ==
            compose(omon_transpose(g, b->T, c->T), omon_transpose(f, a->T, b->T))))
        report.violation("ogroth.transpose_compose",
                         "ofib_cell[" + std::to_string(j) + "]∘ofib_cell[" + std::to_string(i) + "]");
    }

  // 2-cells.
  for (std::size_t k = 0; k < corpus.lax_2cells.size(); ++k) {
    const LaxToSet2Morphism& a = corpus.lax_2cells[k];
    const std::string where = loc("lax_2cell", k) + "/";
    const CheckReport in = check_cell(a);
    report.merge(in, where + "input/");
    const LaxData* d = lax_data(a.src.dom);
    const LaxData* e = lax_data(a.src.cod);
    if (!in.ok() || !d || !e) {
      report.count("ogroth.skipped");
      continue;
    }
    const OFibMorphism s = omon_groth(a.src, d->G, e->G);
    const OFibMorphism t = omon_groth(a.tgt, d->G, e->G);
    const OFib2Morphism img = omon_groth(a, s, t);
    report.merge(check_cell(img), where + "groth/");
    const LaxToSet2Morphism back =
        omon_transpose(img, omon_transpose(s, d->T, e->T), omon_transpose(t, d->T, e->T));
    report.count("ogroth.two_cells");
    if (back.eta.components != a.eta.components) report.violation("ogroth.two_cell_roundtrip", where);
    for (std::size_t j = 0; j < corpus.lax_2cells.size(); ++j) {
      const LaxToSet2Morphism& b = corpus.lax_2cells[j];
      if (!(b.src == a.tgt)) continue;
      const OFibMorphism u = omon_groth(b.tgt, d->G, e->G);
      report.count("ogroth.vertical_pairs");
      if (!(omon_groth(vertical_compose(b, a), s, u) == vertical_compose(omon_groth(b, t, u), img)))
        report.violation("ogroth.groth_vertical", where + " then lax_2cell[" + std::to_string(j) + "]");
    }
  }
  for (std::size_t k = 0; k < corpus.ofib_2cells.size(); ++k) {
    const OFib2Morphism& a = corpus.ofib_2cells[k];
    const std::string where = loc("ofib_2cell", k) + "/";
    const CheckReport in = check_cell(a);
    report.merge(in, where + "input/");
    const OFibData* d = ofib_data(a.src.dom);
    const OFibData* e = ofib_data(a.src.cod);
    if (!in.ok() || !d || !e) {
      report.count("ogroth.skipped");
      continue;
    }
    const LaxToSetMorphism s = omon_transpose(a.src, d->T, e->T);
    const LaxToSetMorphism t = omon_transpose(a.tgt, d->T, e->T);
    report.merge(check_cell(omon_transpose(a, s, t)), where + "transpose/");
    report.count("ogroth.two_cells");
  }

  std::set<const OMonCategory*> groups;
  for (const auto& x : corpus.lax) groups.insert(x->index_omon.get());
  report.count("ogroth.fixed_base_groups", groups.size());
  report.count("ogroth.lax_objects", corpus.lax.size());
  report.count("ogroth.ofib_objects", corpus.ofibs.size());
  return report;
}

CheckReport restriction_report(const OCorpus& corpus, unsigned jobs) {
  CheckReport report;
  for (std::size_t hk = 0; hk < corpus.operad_morphisms.size(); ++hk) {
    const OperadMorphism& h = corpus.operad_morphisms[hk];
    const std::string where = "restrict[" + std::to_string(hk) + "]/";
    auto lives_over = [&](const OMonPtr& c) { return *c->operad() == *h.cod; };

    std::map<const OMonCategory*, OMonPtr> restricted;
    auto add = [&](const OMonPtr& c) {
      if (lives_over(c) && !restricted.count(c.get()))
        restricted.emplace(c.get(), std::make_shared<const OMonCategory>(restrict_along_operad_morphism(h, *c)));
    };
    for (const auto& x : corpus.lax) add(x->index_omon);
    for (const auto& y : corpus.ofibs) {
      add(y->total_omon);
      add(y->base_omon);
    }
    {
      std::vector<const OMonCategory*> keys;
      for (const auto& [k, v] : restricted) keys.push_back(k);
      std::vector<CheckReport> parts(keys.size());
      parallel_for(keys.size(), jobs, [&](std::size_t k) { parts[k] = check_omon_category(*restricted[keys[k]]); });
      for (const auto& part : parts) report.merge(part, where + "structure/");
      report.count("restrict.structures", keys.size());
    }

    std::map<const void*, LaxToSetPtr> rlax;
    for (const auto& x : corpus.lax)
      if (lives_over(x->index_omon))
        rlax.emplace(x.get(), std::make_shared<const LaxToSet>(
                                  restrict_along_operad_morphism(h, *x, restricted.at(x->index_omon.get()))));
    std::map<const void*, OFibPtr> rofib;
    for (const auto& y : corpus.ofibs)
      if (lives_over(y->total_omon))
        rofib.emplace(y.get(), std::make_shared<const OFibObject>(restrict_along_operad_morphism(
                                   h, *y, restricted.at(y->total_omon.get()), restricted.at(y->base_omon.get()))));

    std::vector<CheckReport> parts(corpus.lax.size() + corpus.ofibs.size());
    parallel_for(parts.size(), jobs, [&](std::size_t k) {
      CheckReport& r = parts[k];
      if (k < corpus.lax.size()) {
        auto it = rlax.find(corpus.lax[k].get());
        if (it == rlax.end()) return;
        r.count("restrict.lax_objects");
        r.merge(check_lax_to_set_impl(*it->second, 1, true), loc("lax", k) + "/");
        if (!r.ok()) return;
        // ∫ commutes with restriction.
        const OFibPtr g = omon_groth_unchecked(corpus.lax[k]);
        const OFibObject expect = restrict_along_operad_morphism(
            h, *g, std::make_shared<const OMonCategory>(restrict_along_operad_morphism(h, *g->total_omon)),
            it->second->index_omon);
        if (!(*omon_groth_unchecked(it->second) == expect)) r.violation("restrict.groth", loc("lax", k));
      } else {
        const std::size_t j = k - corpus.lax.size();
        auto it = rofib.find(corpus.ofibs[j].get());
        if (it == rofib.end()) return;
        r.count("restrict.ofib_objects");
        r.merge(check_ofib_object_impl(*it->second, 1, true), loc("ofib", j) + "/");
      }
    });
    for (const auto& part : parts) report.merge(part, where);

    std::vector<LaxToSetMorphism> rcells(corpus.lax_cells.size());
    std::vector<char> has_rcell(corpus.lax_cells.size(), 0);
    std::vector<CheckReport> cparts(corpus.lax_cells.size() + corpus.ofib_cells.size());
    for (std::size_t k = 0; k < corpus.lax_cells.size(); ++k) {
      const auto& m = corpus.lax_cells[k];
      auto d = rlax.find(m.dom.get());
      auto c = rlax.find(m.cod.get());
      if (d == rlax.end() || c == rlax.end()) continue;
      rcells[k] = restrict_along_operad_morphism(h, m, d->second, c->second);
      has_rcell[k] = 1;
    }
    parallel_for(cparts.size(), jobs, [&](std::size_t k) {
      if (k < corpus.lax_cells.size()) {
        if (!has_rcell[k]) return;
        cparts[k].count("restrict.lax_cells");
        cparts[k].merge(check_cell(rcells[k]), loc("lax_cell", k) + "/");
      } else {
        const std::size_t j = k - corpus.lax_cells.size();
        const auto& m = corpus.ofib_cells[j];
        auto d = rofib.find(m.dom.get());
        auto c = rofib.find(m.cod.get());
        if (d == rofib.end() || c == rofib.end()) return;
        cparts[k].count("restrict.ofib_cells");
        cparts[k].merge(check_cell(restrict_along_operad_morphism(h, m, d->second, c->second)),
                        loc("ofib_cell", j) + "/");
      }
    });
    for (const auto& part : cparts) report.merge(part, where);

    for (std::size_t i = 0; i < corpus.lax_cells.size(); ++i)
      for (std::size_t j = 0; j < corpus.lax_cells.size(); ++j) {
        if (!has_rcell[i] || !has_rcell[j] || corpus.lax_cells[i].cod != corpus.lax_cells[j].dom) continue;
        const auto& f = corpus.lax_cells[i];
        const auto& g = corpus.lax_cells[j];
        report.count("restrict.composable_pairs");
        const auto whole = restrict_along_operad_morphism(h, compose(g, f), rlax.at(f.dom.get()), rlax.at(g.cod.get()));
        if (!(whole == compose(rcells[j], rcells[i])))
          report.violation("restrict.compose", where + "lax_cell[" + std::to_string(j) + "]∘lax_cell[" +
                                                   std::to_string(i) + "]");
      }
    for (const auto& a : corpus.lax_2cells) {
      auto d = rlax.find(a.src.dom.get());
      auto c = rlax.find(a.src.cod.get());
      if (d == rlax.end() || c == rlax.end()) continue;
      const LaxToSet2Morphism ra{restrict_along_operad_morphism(h, a.src, d->second, c->second),
                                 restrict_along_operad_morphism(h, a.tgt, d->second, c->second), a.eta};
      report.count("restrict.two_cells");
      report.merge(check_cell(ra), where + "lax_2cell/");
    }
  }
  report.count("restrict.operad_morphisms", corpus.operad_morphisms.size());
  return report;
}

}  // namespace opgroth
