#include "opgroth/fincat.hpp"

#include <stdexcept>
#include <tuple>

#include "opgroth/tuples.hpp"

namespace opgroth {

FinCat::FinCat(std::vector<std::string> objects, std::vector<Arrow> morphisms,
               std::vector<MorId> identities, std::vector<std::optional<MorId>> table)
    : objects_(std::move(objects)),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      table_(std::move(table)) {
  const std::size_t no = objects_.size(), nm = morphisms_.size();
  if (identities_.size() != no) throw std::invalid_argument("FinCat: identity table size");
  if (table_.size() != nm * nm) throw std::invalid_argument("FinCat: composition table size");
  for (const auto& a : morphisms_)
    if (a.src.index() >= no || a.tgt.index() >= no)
      throw std::out_of_range("FinCat: arrow endpoint out of range: " + a.label);
  for (MorId i : identities_)
    if (i.index() >= nm) throw std::out_of_range("FinCat: identity out of range");
  for (const auto& e : table_)
    if (e && e->index() >= nm) throw std::out_of_range("FinCat: composite out of range");
  for (std::size_t k = 0; k < no; ++k) object_index_.emplace(objects_[k], static_cast<std::uint32_t>(k));
  for (std::size_t k = 0; k < nm; ++k)
    morphism_index_.emplace(morphisms_[k].label, static_cast<std::uint32_t>(k));
}

std::optional<MorId> FinCat::try_compose(MorId g, MorId f) const {
  return table_.at(g.index() * morphisms_.size() + f.index());
}

MorId FinCat::compose(MorId g, MorId f) const {
  auto h = try_compose(g, f);
  if (!h) throw std::logic_error("FinCat::compose: undefined " + label(g) + " o " + label(f));
  return *h;
}

std::optional<ObjId> FinCat::find_object(std::string_view l) const {
  auto it = object_index_.find(std::string(l));
  if (it == object_index_.end()) return std::nullopt;
  return ObjId(it->second);
}

std::optional<MorId> FinCat::find_morphism(std::string_view l) const {
  auto it = morphism_index_.find(std::string(l));
  if (it == morphism_index_.end()) return std::nullopt;
  return MorId(it->second);
}

std::vector<MorId> FinCat::hom(ObjId a, ObjId b) const {
  std::vector<MorId> out;
  for (std::size_t k = 0; k < morphisms_.size(); ++k)
    if (morphisms_[k].src == a && morphisms_[k].tgt == b) out.emplace_back(k);
  return out;
}

std::optional<MorId> FinCat::inverse(MorId f) const {
  for (MorId g : hom(tgt(f), src(f))) {
    if (try_compose(g, f) == identity(src(f)) && try_compose(f, g) == identity(tgt(f))) return g;
  }
  return std::nullopt;
}

bool FinCat::operator==(const FinCat& o) const {
  return objects_ == o.objects_ && morphisms_ == o.morphisms_ && identities_ == o.identities_ &&
         table_ == o.table_;
}

bool same_category(const CatPtr& a, const CatPtr& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

ObjId FinCatBuilder::add_object(std::string label) {
  ObjId id(objects_.size());
  identities_.emplace_back(arrows_.size());
  arrows_.push_back({"id_" + label, id, id});
  objects_.push_back(std::move(label));
  return id;
}

MorId FinCatBuilder::add_arrow(std::string label, ObjId src, ObjId tgt) {
  MorId id(arrows_.size());
  arrows_.push_back({std::move(label), src, tgt});
  return id;
}

void FinCatBuilder::set_compose(MorId g, MorId f, MorId h) { explicit_.emplace_back(g, f, h); }

std::optional<ObjId> FinCatBuilder::find_object(std::string_view l) const {
  for (std::size_t k = 0; k < objects_.size(); ++k)
    if (objects_[k] == l) return ObjId(k);
  return std::nullopt;
}

std::optional<MorId> FinCatBuilder::find_morphism(std::string_view l) const {
  for (std::size_t k = 0; k < arrows_.size(); ++k)
    if (arrows_[k].label == l) return MorId(k);
  return std::nullopt;
}

FinCat FinCatBuilder::build() const {
  const std::size_t nm = arrows_.size();
  std::vector<std::optional<MorId>> table(nm * nm);
  for (std::size_t k = 0; k < nm; ++k) {
    const auto& a = arrows_[k];
    if (a.src.index() >= objects_.size() || a.tgt.index() >= objects_.size()) continue;
    table[identities_[a.tgt.index()].index() * nm + k] = MorId(k);
    table[k * nm + identities_[a.src.index()].index()] = MorId(k);
  }
  for (const auto& [g, f, h] : explicit_) table.at(g.index() * nm + f.index()) = h;
  return FinCat(objects_, arrows_, identities_, std::move(table));
}

CheckReport validate_category(const FinCat& c) {
  CheckReport r;
  const std::size_t nm = c.num_morphisms();
  for (std::size_t a = 0; a < c.num_objects(); ++a)
    for (std::size_t b = a + 1; b < c.num_objects(); ++b)
      if (c.label(ObjId(a)) == c.label(ObjId(b)))
        r.structural("category.labels", "duplicate object label " + c.label(ObjId(a)));
  for (std::size_t a = 0; a < nm; ++a)
    for (std::size_t b = a + 1; b < nm; ++b)
      if (c.label(MorId(a)) == c.label(MorId(b)))
        r.structural("category.labels", "duplicate morphism label " + c.label(MorId(a)));
  for (std::size_t a = 0; a < c.num_objects(); ++a) {
    MorId i = c.identity(ObjId(a));
    if (c.src(i) != ObjId(a) || c.tgt(i) != ObjId(a))
      r.structural("category.identity_type", "identity of " + c.label(ObjId(a)) + " is " + c.label(i));
  }
  if (r.has_structural()) return r;

  auto pair_name = [&](MorId g, MorId f) { return "(" + c.label(g) + "," + c.label(f) + ")"; };
  std::size_t pairs = 0;
  for (std::size_t gi = 0; gi < nm; ++gi)
    for (std::size_t fi = 0; fi < nm; ++fi) {
      MorId g(gi), f(fi);
      auto h = c.try_compose(g, f);
      if (c.composable(g, f)) {
        ++pairs;
        if (!h)
          r.structural("category.compose_missing", pair_name(g, f));
        else if (c.src(*h) != c.src(f) || c.tgt(*h) != c.tgt(g))
          r.violation("category.compose_type", pair_name(g, f) + " -> " + c.label(*h));
      } else if (h) {
        r.structural("category.compose_extra", pair_name(g, f));
      }
    }
  r.count("category.composable_pairs", pairs);
  if (r.has_structural()) return r;

  for (std::size_t fi = 0; fi < nm; ++fi) {
    MorId f(fi);
    MorId it = c.identity(c.tgt(f)), is = c.identity(c.src(f));
    if (c.compose(it, f) != f) r.violation("category.unit", pair_name(it, f));
    if (c.compose(f, is) != f) r.violation("category.unit", pair_name(f, is));
  }
  r.count("category.unit_instances", 2 * nm);
  // An ill-typed composite makes one side of a square undefined; that
  // counts as an associativity failure of the triple.
  std::size_t triples = 0;
  for (std::size_t fi = 0; fi < nm; ++fi)
    for (std::size_t gi = 0; gi < nm; ++gi) {
      MorId f(fi), g(gi);
      if (!c.composable(g, f)) continue;
      MorId gf = c.compose(g, f);
      for (std::size_t hi = 0; hi < nm; ++hi) {
        MorId h(hi);
        if (!c.composable(h, g)) continue;
        ++triples;
        MorId hg = c.compose(h, g);
        std::optional<MorId> lhs, rhs;
        if (c.composable(h, gf)) lhs = c.try_compose(h, gf);
        if (c.composable(hg, f)) rhs = c.try_compose(hg, f);
        if (!lhs || !rhs || *lhs != *rhs)
          r.violation("category.assoc", "(" + c.label(h) + "," + c.label(g) + "," + c.label(f) + ")");
      }
    }
  r.count("category.assoc_instances", triples);
  return r;
}

CatPtr terminal_category() {
  FinCatBuilder b;
  b.add_object("()");
  return b.build_shared();
}

CatPtr discrete_category(std::vector<std::string> labels) {
  FinCatBuilder b;
  for (auto& l : labels) b.add_object(std::move(l));
  return b.build_shared();
}

CatPtr chain_category(std::size_t n) {
  FinCatBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_object(std::to_string(i));
  std::vector<std::vector<MorId>> le(n, std::vector<MorId>(n));
  for (std::size_t i = 0; i < n; ++i) le[i][i] = MorId(i);  // identities come first
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      le[i][j] = b.add_arrow("le" + std::to_string(i) + std::to_string(j), ObjId(i), ObjId(j));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) b.set_compose(le[j][k], le[i][j], le[i][k]);
  return b.build_shared();
}

bool CatFunctor::operator==(const CatFunctor& o) const {
  return same_category(dom, o.dom) && same_category(cod, o.cod) && on_obj == o.on_obj &&
         on_mor == o.on_mor;
}

CatFunctor identity_functor(const CatPtr& c) {
  CatFunctor f{c, c, {}, {}};
  for (std::size_t k = 0; k < c->num_objects(); ++k) f.on_obj.emplace_back(k);
  for (std::size_t k = 0; k < c->num_morphisms(); ++k) f.on_mor.emplace_back(k);
  return f;
}

CatFunctor compose(const CatFunctor& g, const CatFunctor& f) {
  if (!same_category(f.cod, g.dom)) throw std::invalid_argument("compose: functors not composable");
  CatFunctor h{f.dom, g.cod, {}, {}};
  for (ObjId a : f.on_obj) h.on_obj.push_back(g(a));
  for (MorId m : f.on_mor) h.on_mor.push_back(g(m));
  return h;
}

CheckReport validate_functor(const CatFunctor& F) {
  CheckReport r;
  if (!F.dom || !F.cod) {
    r.structural("functor.refs", "missing domain or codomain");
    return r;
  }
  const FinCat& C = *F.dom;
  const FinCat& D = *F.cod;
  if (F.on_obj.size() != C.num_objects() || F.on_mor.size() != C.num_morphisms()) {
    r.structural("functor.size", "table sizes do not match the domain");
    return r;
  }
  for (ObjId a : F.on_obj)
    if (a.index() >= D.num_objects()) r.structural("functor.range", "object image out of range");
  for (MorId m : F.on_mor)
    if (m.index() >= D.num_morphisms()) r.structural("functor.range", "morphism image out of range");
  if (r.has_structural()) return r;

  bool typed = true;
  for (std::size_t k = 0; k < C.num_morphisms(); ++k) {
    MorId u(k);
    if (D.src(F(u)) != F(C.src(u)) || D.tgt(F(u)) != F(C.tgt(u))) {
      r.violation("functor.source_target", C.label(u) + " |-> " + D.label(F(u)));
      typed = false;
    }
  }
  for (std::size_t k = 0; k < C.num_objects(); ++k) {
    ObjId a(k);
    if (F(C.identity(a)) != D.identity(F(a)))
      r.violation("functor.identity", C.label(a));
  }
  if (!typed) return r;
  for (std::size_t gi = 0; gi < C.num_morphisms(); ++gi)
    for (std::size_t fi = 0; fi < C.num_morphisms(); ++fi) {
      MorId g(gi), f(fi);
      if (!C.composable(g, f)) continue;
      auto gf = C.try_compose(g, f);
      auto img = D.try_compose(F(g), F(f));
      if (!gf || !img || F(*gf) != *img)
        r.violation("functor.composition", "(" + C.label(g) + "," + C.label(f) + ")");
    }
  return r;
}

bool is_isomorphism(const CatFunctor& F) {
  std::vector<bool> hit_o(F.cod->num_objects()), hit_m(F.cod->num_morphisms());
  if (F.on_obj.size() != hit_o.size() || F.on_mor.size() != hit_m.size()) return false;
  for (ObjId a : F.on_obj) {
    if (hit_o[a.index()]) return false;
    hit_o[a.index()] = true;
  }
  for (MorId m : F.on_mor) {
    if (hit_m[m.index()]) return false;
    hit_m[m.index()] = true;
  }
  return true;
}

std::vector<CatFunctor> enumerate_functors(const CatPtr& dom, const CatPtr& cod) {
  std::vector<CatFunctor> out;
  const std::size_t no = dom->num_objects(), nm = dom->num_morphisms();
  CatFunctor F{dom, cod, std::vector<ObjId>(no), std::vector<MorId>(nm)};
  std::vector<std::size_t> obj_radices(no, cod->num_objects());
  for_each_tuple(obj_radices, [&](std::span<const std::size_t> objs) {
    for (std::size_t a = 0; a < no; ++a) F.on_obj[a] = ObjId(objs[a]);
    std::vector<std::vector<MorId>> choices(nm);
    std::vector<std::size_t> radices(nm);
    for (std::size_t k = 0; k < nm; ++k) {
      const Arrow& a = dom->arrow(MorId(k));
      choices[k] = cod->hom(F(a.src), F(a.tgt));
      radices[k] = choices[k].size();
    }
    for_each_tuple(radices, [&](std::span<const std::size_t> mors) {
      for (std::size_t k = 0; k < nm; ++k) F.on_mor[k] = choices[k][mors[k]];
      if (validate_functor(F).ok()) out.push_back(F);
    });
  });
  return out;
}

NatTransform identity_transformation(const CatFunctor& f) {
  NatTransform t{f, f, {}};
  for (ObjId a : f.on_obj) t.components.push_back(f.cod->identity(a));
  return t;
}

NatTransform vertical_compose(const NatTransform& beta, const NatTransform& alpha) {
  if (!(alpha.cod == beta.dom)) throw std::invalid_argument("vertical_compose: not composable");
  NatTransform t{alpha.dom, beta.cod, {}};
  const FinCat& D = *alpha.dom.cod;
  for (std::size_t k = 0; k < alpha.components.size(); ++k)
    t.components.push_back(D.compose(beta.components[k], alpha.components[k]));
  return t;
}

NatTransform whisker_left(const CatFunctor& h, const NatTransform& alpha) {
  NatTransform t{compose(h, alpha.dom), compose(h, alpha.cod), {}};
  for (MorId m : alpha.components) t.components.push_back(h(m));
  return t;
}

NatTransform whisker_right(const NatTransform& alpha, const CatFunctor& f) {
  NatTransform t{compose(alpha.dom, f), compose(alpha.cod, f), {}};
  for (ObjId a : f.on_obj) t.components.push_back(alpha[a]);
  return t;
}

NatTransform horizontal_compose(const NatTransform& beta, const NatTransform& alpha) {
  return vertical_compose(whisker_left(beta.cod, alpha), whisker_right(beta, alpha.dom));
}

CheckReport validate_natural_transformation(const NatTransform& t) {
  CheckReport r;
  if (!same_category(t.dom.dom, t.cod.dom) || !same_category(t.dom.cod, t.cod.cod)) {
    r.structural("nattrans.refs", "domain and codomain functors are not parallel");
    return r;
  }
  const FinCat& C = *t.dom.dom;
  const FinCat& D = *t.dom.cod;
  if (t.components.size() != C.num_objects()) {
    r.structural("nattrans.size", "component count does not match the domain");
    return r;
  }
  for (MorId m : t.components)
    if (m.index() >= D.num_morphisms()) {
      r.structural("nattrans.range", "component out of range");
      return r;
    }
  bool typed = true;
  for (std::size_t k = 0; k < C.num_objects(); ++k) {
    ObjId a(k);
    MorId c = t[a];
    if (D.src(c) != t.dom(a) || D.tgt(c) != t.cod(a)) {
      r.violation("nattrans.component_type", C.label(a) + " |-> " + D.label(c));
      typed = false;
    }
  }
  if (!typed) return r;
  for (std::size_t k = 0; k < C.num_morphisms(); ++k) {
    MorId f(k);
    auto lhs = D.try_compose(t.cod(f), t[C.src(f)]);
    auto rhs = D.try_compose(t[C.tgt(f)], t.dom(f));
    if (!lhs || !rhs || *lhs != *rhs) r.violation("nattrans.naturality", C.label(f));
  }
  r.count("nattrans.squares", C.num_morphisms());
  return r;
}

namespace {

std::vector<std::size_t> object_radices(const std::vector<CatPtr>& fs) {
  std::vector<std::size_t> r;
  for (const auto& f : fs) r.push_back(f->num_objects());
  return r;
}

std::vector<std::size_t> morphism_radices(const std::vector<CatPtr>& fs) {
  std::vector<std::size_t> r;
  for (const auto& f : fs) r.push_back(f->num_morphisms());
  return r;
}

}  // namespace

ObjId ProductCategory::object_of(std::span<const ObjId> parts) const {
  if (factors.size() == 1) return parts[0];
  std::vector<std::size_t> d;
  for (ObjId a : parts) d.push_back(a.index());
  return ObjId(encode_tuple(d, object_radices(factors)));
}

MorId ProductCategory::morphism_of(std::span<const MorId> parts) const {
  if (factors.size() == 1) return parts[0];
  std::vector<std::size_t> d;
  for (MorId m : parts) d.push_back(m.index());
  return MorId(encode_tuple(d, morphism_radices(factors)));
}

std::vector<ObjId> ProductCategory::object_parts(ObjId a) const {
  std::vector<ObjId> out;
  for (const auto& p : projections) out.push_back(p(a));
  return out;
}

std::vector<MorId> ProductCategory::morphism_parts(MorId f) const {
  std::vector<MorId> out;
  for (const auto& p : projections) out.push_back(p(f));
  return out;
}

ProductCategory product_category(std::vector<CatPtr> factors) {
  ProductCategory P;
  if (factors.size() == 1) {
    P.category = factors[0];
    P.projections.push_back(identity_functor(factors[0]));
    P.factors = std::move(factors);
    return P;
  }
  const auto orad = object_radices(factors);
  const auto mrad = morphism_radices(factors);
  const std::size_t no = tuple_count(orad), nm = tuple_count(mrad);

  std::vector<std::string> objects;
  objects.reserve(no);
  for_each_tuple(orad, [&](std::span<const std::size_t> d) {
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < d.size(); ++k) parts.push_back(factors[k]->label(ObjId(d[k])));
    objects.push_back(paren_list(parts));
  });
  std::vector<Arrow> arrows;
  arrows.reserve(nm);
  for_each_tuple(mrad, [&](std::span<const std::size_t> d) {
    std::vector<std::string> parts;
    std::vector<std::size_t> s, t;
    bool all_id = true;
    for (std::size_t k = 0; k < d.size(); ++k) {
      MorId m(d[k]);
      parts.push_back(factors[k]->label(m));
      s.push_back(factors[k]->src(m).index());
      t.push_back(factors[k]->tgt(m).index());
      all_id = all_id && factors[k]->is_identity(m);
    }
    ObjId src(encode_tuple(s, orad)), tgt(encode_tuple(t, orad));
    arrows.push_back({all_id ? "id_" + objects[src.index()] : paren_list(parts), src, tgt});
  });
  std::vector<MorId> ids;
  for_each_tuple(orad, [&](std::span<const std::size_t> d) {
    std::vector<std::size_t> m;
    for (std::size_t k = 0; k < d.size(); ++k) m.push_back(factors[k]->identity(ObjId(d[k])).index());
    ids.emplace_back(encode_tuple(m, mrad));
  });
  std::vector<std::optional<MorId>> table(nm * nm);
  for (std::size_t g = 0; g < nm; ++g) {
    auto gd = decode_tuple(g, mrad);
    for (std::size_t f = 0; f < nm; ++f) {
      auto fd = decode_tuple(f, mrad);
      std::vector<std::size_t> h(factors.size());
      bool ok = true;
      for (std::size_t k = 0; k < factors.size() && ok; ++k) {
        auto c = factors[k]->try_compose(MorId(gd[k]), MorId(fd[k]));
        if (!c || !factors[k]->composable(MorId(gd[k]), MorId(fd[k]))) ok = false;
        else h[k] = c->index();
      }
      if (ok) table[g * nm + f] = MorId(encode_tuple(h, mrad));
    }
  }
  P.category = std::make_shared<const FinCat>(std::move(objects), std::move(arrows), std::move(ids),
                                              std::move(table));
  for (std::size_t k = 0; k < factors.size(); ++k) {
    CatFunctor pr{P.category, factors[k], {}, {}};
    for (std::size_t a = 0; a < no; ++a) pr.on_obj.emplace_back(decode_tuple(a, orad)[k]);
    for (std::size_t m = 0; m < nm; ++m) pr.on_mor.emplace_back(decode_tuple(m, mrad)[k]);
    P.projections.push_back(std::move(pr));
  }
  P.factors = std::move(factors);
  return P;
}

ProductCategory power_category(const CatPtr& base, std::size_t n) {
  return product_category(std::vector<CatPtr>(n, base));
}

CatFunctor tuple_functor(const ProductCategory& prod, const CatPtr& source,
                         std::span<const CatFunctor> legs) {
  if (legs.size() != prod.factors.size()) throw std::invalid_argument("tuple_functor: leg count");
  CatFunctor F{source, prod.category, {}, {}};
  for (std::size_t a = 0; a < source->num_objects(); ++a) {
    std::vector<ObjId> parts;
    for (const auto& l : legs) parts.push_back(l(ObjId(a)));
    F.on_obj.push_back(prod.object_of(parts));
  }
  for (std::size_t m = 0; m < source->num_morphisms(); ++m) {
    std::vector<MorId> parts;
    for (const auto& l : legs) parts.push_back(l(MorId(m)));
    F.on_mor.push_back(prod.morphism_of(parts));
  }
  return F;
}

CatFunctor product_functor(const ProductCategory& dom, const ProductCategory& cod,
                           std::span<const CatFunctor> parts) {
  std::vector<CatFunctor> legs;
  for (std::size_t k = 0; k < parts.size(); ++k) legs.push_back(compose(parts[k], dom.projections[k]));
  return tuple_functor(cod, dom.category, legs);
}

}  // namespace opgroth
