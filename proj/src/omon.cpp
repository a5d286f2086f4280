#include "opgroth/omon.hpp"

#include <algorithm>
#include <stdexcept>

#include "opgroth/parallel.hpp"
#include "opgroth/tuples.hpp"

namespace opgroth {

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

template <class I>
std::size_t code_of(std::span<const I> xs, std::size_t radix) {
  std::size_t code = 0;
  for (const I& x : xs) code = code * radix + x.index();
  return code;
}

template <class I>
std::vector<I> decode_ids(std::size_t code, std::size_t n, std::size_t radix) {
  std::vector<I> out(n);
  for (std::size_t k = n; k-- > 0;) {
    out[k] = I(code % radix);
    code /= radix;
  }
  return out;
}

template <class T>
std::vector<T> pick(std::span<const T> xs, const std::vector<std::size_t>& positions) {
  std::vector<T> out;
  out.reserve(positions.size());
  for (std::size_t j : positions) out.push_back(xs[j]);
  return out;
}

std::string obj_tuple_text(const FinCat& c, std::span<const ObjId> objs) {
  std::vector<std::string> parts;
  for (ObjId a : objs) parts.push_back(a.index() < c.num_objects() ? c.label(a) : "?");
  return paren_list(parts);
}

std::string mor_tuple_text(const FinCat& c, std::span<const MorId> mors) {
  std::vector<std::string> parts;
  for (MorId u : mors) parts.push_back(u.index() < c.num_morphisms() ? c.label(u) : "?");
  return paren_list(parts);
}

std::string obj_text(const FinCat& c, ObjId a) {
  return a.index() < c.num_objects() ? c.label(a) : "?";
}

std::string mor_text(const FinCat& c, MorId u) {
  if (u.index() >= c.num_morphisms()) return "?";
  return c.label(u) + " : " + c.label(c.src(u)) + " -> " + c.label(c.tgt(u));
}

bool all_units(const Operad& o, std::span<const OpId> qs, const std::vector<std::vector<std::size_t>>& fibs) {
  for (std::size_t i = 0; i < qs.size(); ++i)
    if (fibs[i].size() != 1 || qs[i] != o.unit()) return false;
  return true;
}

// Every (f, p, q) with defined composite; `unbiased` keeps monotone f and
// identity permutations only.
std::vector<OpInstance> op_instances(const Operad& o, bool unbiased) {
  std::vector<OpInstance> out;
  const std::size_t N = o.max_arity();
  for (std::size_t m = 0; m <= N; ++m)
    for (std::size_t n = 0; n <= N; ++n)
      for (const FinMap& f : all_maps(m, n)) {
        if (unbiased && !is_monotone(f)) continue;
        const auto fibs = fibers(f);
        for (std::size_t pi = 0; pi < o.arity_size(n); ++pi) {
          const OpId p(pi);
          if (unbiased && p != o.permutation_id(identity_map(n))) continue;
          for_each_operand_tuple(o, f, [&](std::span<const OpId> qs) {
            if (unbiased)
              for (std::size_t i = 0; i < qs.size(); ++i)
                if (qs[i] != o.permutation_id(identity_map(fibs[i].size()))) return;
            std::optional<OpId> mu;
            try {
              mu = o.compose(f, p, qs);
            } catch (const std::domain_error&) {
              return;
            }
            if (!mu) return;
            out.push_back({f, p, {qs.begin(), qs.end()}, *mu, fibs});
          });
        }
      }
  return out;
}

// Dense lookup of mu_f(p;q) over all arities <= N, built once per check.
class ComposeTable {
 public:
  explicit ComposeTable(const Operad& o) : N_(o.max_arity()) {
    for (std::size_t n = 0; n <= N_; ++n) {
      ops_.push_back(o.arity_size(n));
      width_ = std::max(width_, o.arity_size(n));
    }
    for (std::size_t n = 0; n <= N_; ++n) qspan_.push_back(ipow(width_, n));
    blocks_.resize((N_ + 1) * (N_ + 1));
    for (std::size_t m = 0; m <= N_; ++m)
      for (std::size_t n = 0; n <= N_; ++n)
        blocks_[m * (N_ + 1) + n].assign(ipow(n, m) * ops_[n] * qspan_[n], kNone);
    for (const OpInstance& in : op_instances(o, false))
      blocks_[in.f.source() * (N_ + 1) + in.f.target()][index(in.f, in.p, in.qs)] = in.mu.value;
  }

  std::optional<OpId> get(const FinMap& f, OpId p, std::span<const OpId> qs) const {
    const std::uint32_t v = blocks_[f.source() * (N_ + 1) + f.target()][index(f, p, qs)];
    if (v == kNone) return std::nullopt;
    return OpId(v);
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  std::size_t index(const FinMap& f, OpId p, std::span<const OpId> qs) const {
    const std::size_t n = f.target();
    std::size_t fc = 0, qc = 0;
    for (std::size_t v : f.values) fc = fc * n + v;
    for (OpId q : qs) qc = qc * width_ + q.index();
    return (fc * ops_[n] + p.index()) * qspan_[n] + qc;
  }

  std::size_t N_;
  std::size_t width_ = 1;
  std::vector<std::size_t> ops_, qspan_;
  std::vector<std::vector<std::uint32_t>> blocks_;  // [m * (N+1) + n]
};

// Morphisms grouped by source and the composable pairs (g, f), g after f.
struct CatIndex {
  std::vector<std::vector<MorId>> out;
  std::vector<std::pair<MorId, MorId>> pairs;
  std::vector<std::vector<MorId>> homs;  // [a * |Ob| + b]

  explicit CatIndex(const FinCat& c) : out(c.num_objects()), homs(c.num_objects() * c.num_objects()) {
    for (std::size_t u = 0; u < c.num_morphisms(); ++u) {
      const MorId mu(u);
      out[c.src(mu).index()].push_back(mu);
      homs[c.src(mu).index() * c.num_objects() + c.tgt(mu).index()].push_back(mu);
    }
    for (std::size_t f = 0; f < c.num_morphisms(); ++f)
      for (MorId g : out[c.tgt(MorId(f)).index()]) pairs.emplace_back(g, MorId(f));
  }
};

// Calls fn(mors) for each tuple of morphisms whose sources are `objs`.
template <class Fn>
void for_each_morphism_tuple_from(const CatIndex& idx, std::span<const ObjId> objs, Fn&& fn) {
  std::vector<std::size_t> radices;
  for (ObjId a : objs) radices.push_back(idx.out[a.index()].size());
  std::vector<MorId> mors(objs.size());
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    for (std::size_t k = 0; k < d.size(); ++k) mors[k] = idx.out[objs[k].index()][d[k]];
    fn(std::span<const MorId>(mors));
  });
}

// Read access shared by the category checker and its unbiased variant.
struct OMonView {
  const OMonCategory& c;
  const FinCat& B;
  const Operad& O;
  bool unbiased;

  std::string op(std::size_t n, OpId p) const { return unbiased ? std::to_string(n) : O.label(n, p); }

  std::string ops_text(std::span<const OpId> qs, const std::vector<std::vector<std::size_t>>& fibs) const {
    std::string s;
    for (std::size_t i = 0; i < qs.size(); ++i) s += " " + op(fibs[i].size(), qs[i]);
    return s;
  }

  std::string tensor_text(OpId p, std::span<const ObjId> objs) const {
    return "tensor " + op(objs.size(), p) + " " + obj_tuple_text(B, objs);
  }
  std::string tensor_text(OpId p, std::span<const MorId> mors) const {
    return "tensor " + op(mors.size(), p) + " " + mor_tuple_text(B, mors);
  }
  std::string phi_text(const OpInstance& in, std::span<const ObjId> objs) const {
    if (unbiased) return "alpha " + in.f.to_string() + " " + obj_tuple_text(B, objs);
    return "phi " + in.f.to_string() + " " + op(in.f.target(), in.p) + ops_text(in.qs, in.fibers) + " " +
           obj_tuple_text(B, objs);
  }

  MorId phi(const OpInstance& in, std::span<const ObjId> objs) const {
    const auto& entries = c.phi_entries();
    if (!entries.empty()) {
      auto it = entries.find(PhiKey{in.f, in.p, in.qs, {objs.begin(), objs.end()}});
      if (it != entries.end()) return it->second;
    }
    return B.identity(c.tensor_obj(in.mu, objs));
  }

  std::vector<ObjId> inner_objs(const OpInstance& in, std::span<const ObjId> objs) const {
    std::vector<ObjId> inner(in.fibers.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const auto part = pick(objs, in.fibers[i]);
      inner[i] = c.tensor_obj(in.qs[i], part);
    }
    return inner;
  }

  ObjId nested_obj(const OpInstance& in, std::span<const ObjId> objs) const {
    return c.tensor_obj(in.p, inner_objs(in, objs));
  }

  // "tensor p (tensor q1 (..), ..) = tensor p (B..) = C": every table entry the
  // nested tensor reads, so a typing failure names the entries involved.
  std::string nested_text(const OpInstance& in, std::span<const ObjId> objs) const {
    std::string s = "tensor " + op(in.fibers.size(), in.p) + " (";
    for (std::size_t i = 0; i < in.fibers.size(); ++i) {
      const auto part = pick(objs, in.fibers[i]);
      s += (i ? ", " : "") + tensor_text(in.qs[i], std::span<const ObjId>(part));
    }
    const auto inner = inner_objs(in, objs);
    return s + ") = " + tensor_text(in.p, std::span<const ObjId>(inner)) + " = " +
           obj_text(B, c.tensor_obj(in.p, inner));
  }

  MorId nested_mor(const OpInstance& in, std::span<const MorId> mors) const {
    std::vector<MorId> inner(in.fibers.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const auto part = pick(mors, in.fibers[i]);
      inner[i] = c.tensor_mor(in.qs[i], part);
    }
    return c.tensor_mor(in.p, inner);
  }
};

void check_structure(const OMonCategory& c, CheckReport& r) {
  if (!c.operad() || !c.base()) {
    r.structural("omon.refs", "operad or base category missing");
    return;
  }
  const Operad& O = *c.operad();
  const FinCat& B = *c.base();
  const std::size_t N = O.max_arity();
  if (c.tensors().size() != N + 1) {
    r.structural("omon.tensor_arity", "expected tensors for arities 0.." + std::to_string(N));
    return;
  }
  for (std::size_t n = 0; n <= N; ++n) {
    if (c.tensors()[n].size() != O.arity_size(n)) {
      r.structural("omon.tensor_arity", "arity " + std::to_string(n) + " has the wrong number of tensors");
      continue;
    }
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const TensorTable& t = c.tensors()[n][pi];
      const std::string name = "tensor " + O.label(n, OpId(pi));
      if (t.arity != n || t.on_obj.size() != ipow(B.num_objects(), n) ||
          t.on_mor.size() != ipow(B.num_morphisms(), n)) {
        r.structural("omon.tensor_size", name + " has tables of the wrong size");
        continue;
      }
      for (std::size_t k = 0; k < t.on_obj.size(); ++k) {
        const auto objs = decode_ids<ObjId>(k, n, B.num_objects());
        if (t.on_obj[k] == kUnsetObj)
          r.structural("omon.tensor_missing", name + " " + obj_tuple_text(B, objs));
        else if (t.on_obj[k].index() >= B.num_objects())
          r.structural("omon.tensor_range", name + " " + obj_tuple_text(B, objs));
      }
      for (std::size_t k = 0; k < t.on_mor.size(); ++k) {
        const auto mors = decode_ids<MorId>(k, n, B.num_morphisms());
        if (t.on_mor[k] == kUnsetMor) {
          // With no morphism between the tensored endpoints the object table is
          // at fault, not the missing entry.
          std::vector<ObjId> srcs, tgts;
          for (MorId u : mors) {
            srcs.push_back(B.src(u));
            tgts.push_back(B.tgt(u));
          }
          const ObjId a = t.on_obj[code_of<ObjId>(srcs, B.num_objects())];
          const ObjId b = t.on_obj[code_of<ObjId>(tgts, B.num_objects())];
          const bool known = a != kUnsetObj && b != kUnsetObj && a.index() < B.num_objects() &&
                             b.index() < B.num_objects();
          if (known && B.hom(a, b).empty())
            r.violation("omon.tensor_functor", name + " " + mor_tuple_text(B, mors) + " has no value: " + name +
                                                   " " + obj_tuple_text(B, srcs) + " = " + obj_text(B, a) + " -> " +
                                                   name + " " + obj_tuple_text(B, tgts) + " = " + obj_text(B, b));
          else
            r.structural("omon.tensor_missing", name + " " + mor_tuple_text(B, mors));
        }
        else if (t.on_mor[k].index() >= B.num_morphisms())
          r.structural("omon.tensor_range", name + " " + mor_tuple_text(B, mors));
      }
    }
  }
  for (const auto& [key, value] : c.phi_entries()) {
    const FinMap& f = key.f;
    const std::string where = "phi " + f.to_string();
    bool ok = f.source() <= N && f.target() <= N && key.p.index() < O.arity_size(f.target()) &&
              key.qs.size() == f.target() && key.objs.size() == f.source();
    if (ok) {
      const auto sizes = fiber_sizes(f);
      for (std::size_t i = 0; i < sizes.size(); ++i) ok = ok && key.qs[i].index() < O.arity_size(sizes[i]);
      for (ObjId a : key.objs) ok = ok && a.index() < B.num_objects();
    }
    if (ok) {
      try {
        ok = O.compose(f, key.p, key.qs).has_value();
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      r.structural("omon.phi_key", where + " does not name an instance");
      continue;
    }
    if (value.index() >= B.num_morphisms())
      r.structural("omon.phi_range", phi_entry_text(c, f, key.p, key.qs, key.objs));
  }
}

void check_tensors(const OMonView& v, const CatIndex& idx, CheckReport& r) {
  const FinCat& B = v.B;
  const std::size_t N = v.O.max_arity();
  for (std::size_t n = 0; n <= N; ++n)
    for (std::size_t pi = 0; pi < v.O.arity_size(n); ++pi) {
      const OpId p(pi);
      if (v.unbiased && p != v.O.permutation_id(identity_map(n))) continue;
      const TensorTable& t = v.c.tensor(n, p);
      for (std::size_t k = 0; k < t.on_mor.size(); ++k) {
        const auto mors = decode_ids<MorId>(k, n, B.num_morphisms());
        std::vector<ObjId> srcs, tgts;
        bool identities = true;
        for (MorId u : mors) {
          srcs.push_back(B.src(u));
          tgts.push_back(B.tgt(u));
          identities = identities && B.is_identity(u);
        }
        const MorId val = t.on_mor[k];
        const ObjId s = v.c.tensor_obj(p, srcs), g = v.c.tensor_obj(p, tgts);
        r.count("omon.tensor_instances");
        if (B.src(val) != s || B.tgt(val) != g) {
          r.violation("omon.tensor_functor", v.tensor_text(p, mors) + " = " + mor_text(B, val) + ", expected " +
                                                 v.tensor_text(p, srcs) + " = " + obj_text(B, s) + " -> " +
                                                 v.tensor_text(p, tgts) + " = " + obj_text(B, g));
        } else if (identities && !B.is_identity(val)) {
          r.violation("omon.tensor_functor",
                      v.tensor_text(p, mors) + " = " + B.label(val) + " is not an identity");
        }
      }
      // Composition: tuples of composable pairs.
      std::vector<std::size_t> radices(n, idx.pairs.size());
      std::vector<MorId> gs(n), fs(n), gfs(n);
      for_each_tuple(radices, [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) {
          std::tie(gs[k], fs[k]) = idx.pairs[d[k]];
          gfs[k] = B.compose(gs[k], fs[k]);
        }
        r.count("omon.tensor_instances");
        const MorId lhs = v.c.tensor_mor(p, gfs);
        const auto rhs = B.try_compose(v.c.tensor_mor(p, gs), v.c.tensor_mor(p, fs));
        if (!rhs || *rhs != lhs)
          r.violation("omon.tensor_functor", v.tensor_text(p, gfs) + " differs from " + v.tensor_text(p, gs) +
                                                 " after " + v.tensor_text(p, fs));
      });
    }
  if (N >= 1) {
    const OpId eta = v.O.unit();
    const TensorTable& t = v.c.tensor(1, eta);
    for (std::size_t a = 0; a < B.num_objects(); ++a)
      if (t.on_obj[a] != ObjId(a)) {
        const ObjId objs[1] = {ObjId(a)};
        r.violation("omon.unit", v.tensor_text(eta, std::span<const ObjId>(objs)) + " = " + obj_text(B, t.on_obj[a]));
      }
    for (std::size_t u = 0; u < B.num_morphisms(); ++u)
      if (t.on_mor[u] != MorId(u)) {
        const MorId mors[1] = {MorId(u)};
        r.violation("omon.unit", v.tensor_text(eta, std::span<const MorId>(mors)) + " = " + B.label(t.on_mor[u]));
      }
  }
}

void check_phi_instance(const OMonView& v, const CatIndex& idx, const OpInstance& in, CheckReport& r) {
  const FinCat& B = v.B;
  const std::size_t m = in.f.source(), n = in.f.target();
  const bool id_axiom = (in.f == identity_map(n) && all_units(v.O, in.qs, in.fibers)) ||
                        (n == 1 && in.p == v.O.unit());
  for_each_object_tuple(m, B.num_objects(), [&](std::span<const ObjId> A) {
    r.count("omon.phi_components");
    const MorId comp = v.phi(in, A);
    const ObjId s = v.c.tensor_obj(in.mu, A), t = v.nested_obj(in, A);
    bool typed = B.src(comp) == s && B.tgt(comp) == t;
    if (id_axiom && comp != B.identity(s))
      r.violation("omon.phi_identity", v.phi_text(in, A) + " = " + B.label(comp) + " must be an identity");
    if (!typed) {
      r.violation("omon.phi_type", v.phi_text(in, A) + " = " + mor_text(B, comp) + ", expected " +
                                       v.tensor_text(in.mu, A) + " = " + obj_text(B, s) + " -> " +
                                       v.nested_text(in, A));
      return;
    }
    if (!B.inverse(comp)) r.violation("omon.phi_invertible", v.phi_text(in, A) + " = " + B.label(comp));
    for_each_morphism_tuple_from(idx, A, [&](std::span<const MorId> us) {
      std::vector<ObjId> tg;
      for (MorId u : us) tg.push_back(B.tgt(u));
      r.count("omon.phi_naturality");
      const auto lhs = B.try_compose(v.phi(in, tg), v.c.tensor_mor(in.mu, us));
      const auto rhs = B.try_compose(v.nested_mor(in, us), comp);
      if (!lhs || !rhs || *lhs != *rhs)
        r.violation("omon.phi_natural", v.phi_text(in, A) + " against " + mor_tuple_text(B, us));
    });
  });
}

// All (g, f) with g : l -> m, f : m -> n; one parallel task each.
std::vector<std::pair<FinMap, FinMap>> map_pairs(std::size_t N, bool monotone) {
  std::vector<std::pair<FinMap, FinMap>> out;
  for (std::size_t l = 0; l <= N; ++l)
    for (std::size_t m = 0; m <= N; ++m)
      for (std::size_t n = 0; n <= N; ++n)
        for (const FinMap& g : all_maps(l, m)) {
          if (monotone && !is_monotone(g)) continue;
          for (const FinMap& f : all_maps(m, n)) {
            if (monotone && !is_monotone(f)) continue;
            out.emplace_back(g, f);
          }
        }
  return out;
}

void check_square(const OMonView& v, const ComposeTable& ct, const FinMap& g, const FinMap& f, CheckReport& r) {
  const Operad& O = v.O;
  const FinCat& B = v.B;
  const std::size_t l = g.source(), m = f.source(), n = f.target();
  const FinMap fg = compose(f, g);
  const auto ffib = fibers(f), gfib = fibers(g), fgfib = fibers(fg);
  std::vector<FinMap> gi(n);
  std::vector<OpInstance> right(n);
  for (std::size_t i = 0; i < n; ++i) {
    gi[i] = induced_fiber_map(f, g, i);
    right[i].f = gi[i];
    right[i].fibers = fibers(gi[i]);
  }
  std::vector<OpId> ss(n);
  OpInstance top{fg, {}, {}, {}, fgfib}, left{g, {}, {}, {}, gfib}, bottom{f, {}, {}, {}, ffib};
  std::vector<MorId> rparts(n);
  std::vector<ObjId> bobjs(m), scratch;
  scratch.reserve(l);
  const OpId id_n = v.unbiased ? O.permutation_id(identity_map(n)) : OpId(0);
  for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
    const OpId p(pi);
    if (v.unbiased && p != id_n) continue;
    for_each_operand_tuple(O, f, [&](std::span<const OpId> qs) {
      if (v.unbiased)
        for (std::size_t i = 0; i < n; ++i)
          if (qs[i] != O.permutation_id(identity_map(ffib[i].size()))) return;
      const auto mf = ct.get(f, p, qs);
      if (!mf) return;
      for_each_operand_tuple(O, g, [&](std::span<const OpId> rs) {
        if (v.unbiased)
          for (std::size_t j = 0; j < m; ++j)
            if (rs[j] != O.permutation_id(identity_map(gfib[j].size()))) return;
        // s_i = mu_{g_i}(q_i; r|f^-1(i))
        for (std::size_t i = 0; i < n; ++i) {
          right[i].qs = pick(rs, ffib[i]);
          const auto si = ct.get(gi[i], qs[i], right[i].qs);
          if (!si) return;
          ss[i] = *si;
          right[i].p = qs[i];
          right[i].mu = *si;
        }
        const auto top_mu = ct.get(fg, p, ss);
        const auto left_mu = ct.get(g, *mf, rs);
        if (!top_mu || !left_mu) return;
        top.p = p;
        top.qs = ss;
        top.mu = *top_mu;
        left.p = *mf;
        left.qs.assign(rs.begin(), rs.end());
        left.mu = *left_mu;
        bottom.p = p;
        bottom.qs.assign(qs.begin(), qs.end());
        bottom.mu = *mf;
        auto restricted = [&](std::span<const ObjId> A, const std::vector<std::size_t>& pos) {
          scratch.clear();
          for (std::size_t j : pos) scratch.push_back(A[j]);
          return std::span<const ObjId>(scratch);
        };
        std::size_t squares = 0;
        for_each_object_tuple(l, B.num_objects(), [&](std::span<const ObjId> A) {
          ++squares;
          for (std::size_t i = 0; i < n; ++i) rparts[i] = v.phi(right[i], restricted(A, fgfib[i]));
          for (std::size_t j = 0; j < m; ++j) bobjs[j] = v.c.tensor_obj(rs[j], restricted(A, gfib[j]));
          const auto lhs = B.try_compose(v.c.tensor_mor(p, rparts), v.phi(top, A));
          const auto rhs = B.try_compose(v.phi(bottom, bobjs), v.phi(left, A));
          if (!lhs || !rhs || *lhs != *rhs) {
            std::string w = "square g " + g.to_string() + " f " + f.to_string() + " p " + v.op(n, p) + " q" +
                            v.ops_text(qs, ffib) + " r" + v.ops_text(rs, gfib) + " " + obj_tuple_text(B, A);
            r.violation("omon.assoc", w);
          }
        });
        r.count("omon.assoc_squares", squares);
      });
    });
  }
}

CheckReport check_omon_impl(const OMonCategory& c, unsigned jobs, bool unbiased) {
  CheckReport r;
  check_structure(c, r);
  if (!r.ok()) return r;
  const OMonView v{c, *c.base(), *c.operad(), unbiased};
  const CatIndex idx(v.B);
  check_tensors(v, idx, r);
  const auto instances = op_instances(v.O, unbiased);
  std::vector<CheckReport> parts(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t k) { check_phi_instance(v, idx, instances[k], parts[k]); });
  for (const auto& part : parts) r.merge(part);
  const auto pairs = map_pairs(v.O.max_arity(), unbiased);
  const ComposeTable ct(v.O);
  std::vector<CheckReport> squares(pairs.size());
  parallel_for(pairs.size(), jobs,
               [&](std::size_t k) { check_square(v, ct, pairs[k].first, pairs[k].second, squares[k]); });
  for (const auto& part : squares) r.merge(part);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// OMonCategory

OMonCategory::OMonCategory(OperadPtr operad, CatPtr base) : operad_(std::move(operad)), base_(std::move(base)) {
  if (!operad_ || !base_) throw std::invalid_argument("OMonCategory: null operad or base");
  const std::size_t N = operad_->max_arity();
  tensors_.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    TensorTable t;
    t.arity = n;
    t.on_obj.assign(ipow(base_->num_objects(), n), kUnsetObj);
    t.on_mor.assign(ipow(base_->num_morphisms(), n), kUnsetMor);
    tensors_[n].assign(operad_->arity_size(n), t);
  }
}

ObjId OMonCategory::tensor_obj(OpId p, std::span<const ObjId> objs) const {
  return tensors_.at(objs.size()).at(p.index()).on_obj.at(code_of(objs, base_->num_objects()));
}

MorId OMonCategory::tensor_mor(OpId p, std::span<const MorId> mors) const {
  return tensors_.at(mors.size()).at(p.index()).on_mor.at(code_of(mors, base_->num_morphisms()));
}

void OMonCategory::set_tensor_obj(OpId p, std::span<const ObjId> objs, ObjId value) {
  tensors_.at(objs.size()).at(p.index()).on_obj.at(code_of(objs, base_->num_objects())) = value;
}

void OMonCategory::set_tensor_mor(OpId p, std::span<const MorId> mors, MorId value) {
  tensors_.at(mors.size()).at(p.index()).on_mor.at(code_of(mors, base_->num_morphisms())) = value;
}

MorId OMonCategory::phi(const FinMap& f, OpId p, std::span<const OpId> qs, std::span<const ObjId> objs) const {
  if (!phi_.empty()) {
    auto it = phi_.find(PhiKey{f, p, {qs.begin(), qs.end()}, {objs.begin(), objs.end()}});
    if (it != phi_.end()) return it->second;
  }
  const auto mu = operad_->compose(f, p, qs);
  if (!mu) throw std::invalid_argument("phi: composite undefined");
  return base_->identity(tensor_obj(*mu, objs));
}

bool OMonCategory::operator==(const OMonCategory& o) const {
  if (!operad_ || !o.operad_) return operad_ == o.operad_ && base_ == o.base_;
  if (!(*operad_ == *o.operad_) || !same_category(base_, o.base_) || tensors_ != o.tensors_) return false;
  if (phi_ == o.phi_) return true;
  auto covered = [](const OMonCategory& a, const OMonCategory& b) {
    for (const auto& [key, val] : a.phi_)
      if (b.phi(key.f, key.p, key.qs, key.objs) != val) return false;
    return true;
  };
  return covered(*this, o) && covered(o, *this);
}

std::vector<OpInstance> composition_instances(const Operad& o) { return op_instances(o, false); }

ObjId nested_tensor_obj(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                        std::span<const ObjId> objs) {
  const auto fibs = fibers(f);
  std::vector<ObjId> inner(fibs.size());
  for (std::size_t i = 0; i < fibs.size(); ++i) inner[i] = c.tensor_obj(qs[i], pick(objs, fibs[i]));
  return c.tensor_obj(p, inner);
}

MorId nested_tensor_mor(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                        std::span<const MorId> mors) {
  const auto fibs = fibers(f);
  std::vector<MorId> inner(fibs.size());
  for (std::size_t i = 0; i < fibs.size(); ++i) inner[i] = c.tensor_mor(qs[i], pick(mors, fibs[i]));
  return c.tensor_mor(p, inner);
}

std::string tensor_entry_text(const OMonCategory& c, OpId p, std::span<const ObjId> objs) {
  return "tensor " + c.operad()->label(objs.size(), p) + " " + obj_tuple_text(*c.base(), objs);
}

std::string tensor_entry_text(const OMonCategory& c, OpId p, std::span<const MorId> mors) {
  return "tensor " + c.operad()->label(mors.size(), p) + " " + mor_tuple_text(*c.base(), mors);
}

std::string phi_entry_text(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                           std::span<const ObjId> objs) {
  const Operad& O = *c.operad();
  std::string s = "phi " + f.to_string() + " " + O.label(f.target(), p);
  const auto sizes = fiber_sizes(f);
  for (std::size_t i = 0; i < qs.size(); ++i) s += " " + O.label(sizes[i], qs[i]);
  return s + " " + obj_tuple_text(*c.base(), objs);
}

namespace {

std::optional<MorId> forced_value(const OMonCategory& c, const CatIndex& idx, const TensorTable& t,
                                  std::size_t code) {
  const FinCat& B = *c.base();
  const auto mors = decode_ids<MorId>(code, t.arity, B.num_morphisms());
  std::vector<ObjId> srcs, tgts;
  for (MorId u : mors) {
    srcs.push_back(B.src(u));
    tgts.push_back(B.tgt(u));
  }
  const ObjId s = t.on_obj.at(code_of<ObjId>(srcs, B.num_objects()));
  const ObjId g = t.on_obj.at(code_of<ObjId>(tgts, B.num_objects()));
  if (s == kUnsetObj || g == kUnsetObj || s.index() >= B.num_objects() || g.index() >= B.num_objects())
    return std::nullopt;
  const auto& hom = idx.homs[s.index() * B.num_objects() + g.index()];
  if (hom.size() != 1) return std::nullopt;
  return hom[0];
}

}  // namespace

void complete_forced_tensor_morphisms(OMonCategory& c) {
  const CatIndex idx(*c.base());
  for (std::size_t n = 0; n < c.tensors().size(); ++n)
    for (std::size_t p = 0; p < c.tensors()[n].size(); ++p) {
      TensorTable& t = c.tensor(n, OpId(p));
      for (std::size_t k = 0; k < t.on_mor.size(); ++k)
        if (t.on_mor[k] == kUnsetMor)
          if (auto v = forced_value(c, idx, t, k)) t.on_mor[k] = *v;
    }
}

bool tensor_mor_is_forced(const OMonCategory& c, std::size_t n, OpId p, std::size_t code) {
  const CatIndex idx(*c.base());
  const TensorTable& t = c.tensor(n, p);
  const auto v = forced_value(c, idx, t, code);
  return v && *v == t.on_mor.at(code);
}

CheckReport check_omon_category(const OMonCategory& c, unsigned jobs) { return check_omon_impl(c, jobs, false); }

// ---------------------------------------------------------------------------
// Lax functors and transformations

MorId LaxOMonFunctor::xi_at(OpId p, std::span<const ObjId> objs) const {
  if (!xi.empty()) {
    auto it = xi.find(XiKey{p, {objs.begin(), objs.end()}});
    if (it != xi.end()) return it->second;
  }
  std::vector<ObjId> images;
  for (ObjId a : objs) images.push_back(F(a));
  return cod->base()->identity(cod->tensor_obj(p, images));
}

bool LaxOMonFunctor::operator==(const LaxOMonFunctor& o) const {
  auto same = [](const OMonPtr& a, const OMonPtr& b) { return a == b || (a && b && *a == *b); };
  if (!same(dom, o.dom) || !same(cod, o.cod) || !(F == o.F)) return false;
  if (xi == o.xi) return true;
  auto covered = [](const LaxOMonFunctor& a, const LaxOMonFunctor& b) {
    for (const auto& [key, val] : a.xi)
      if (b.xi_at(key.p, key.objs) != val) return false;
    return true;
  };
  return covered(*this, o) && covered(o, *this);
}

std::string_view to_string(LaxKind k) {
  switch (k) {
    case LaxKind::strict: return "strict";
    case LaxKind::weak: return "weak";
    case LaxKind::lax: return "lax";
  }
  return "lax";
}

namespace {

std::vector<ObjId> apply_objs(const CatFunctor& F, std::span<const ObjId> objs) {
  std::vector<ObjId> out;
  out.reserve(objs.size());
  for (ObjId a : objs) out.push_back(F(a));
  return out;
}

std::vector<MorId> apply_mors(const CatFunctor& F, std::span<const MorId> mors) {
  std::vector<MorId> out;
  out.reserve(mors.size());
  for (MorId u : mors) out.push_back(F(u));
  return out;
}

std::string xi_text(const LaxOMonFunctor& F, OpId p, std::span<const ObjId> objs) {
  return "xi " + F.dom->operad()->label(objs.size(), p) + " " + obj_tuple_text(*F.dom->base(), objs);
}

bool check_lax_structure(const LaxOMonFunctor& F, CheckReport& r) {
  if (!F.dom || !F.cod) {
    r.structural("lax.refs", "domain or codomain missing");
    return false;
  }
  if (!F.dom->operad() || !F.cod->operad() || !(*F.dom->operad() == *F.cod->operad())) {
    r.structural("lax.operad_mismatch", "domain and codomain live over different operads");
    return false;
  }
  if (!same_category(F.F.dom, F.dom->base()) || !same_category(F.F.cod, F.cod->base())) {
    r.structural("lax.refs", "underlying functor does not match the base categories");
    return false;
  }
  const CheckReport fr = validate_functor(F.F);
  if (!fr.ok()) {
    r.merge(fr);
    return false;
  }
  const Operad& O = *F.dom->operad();
  const FinCat& C = *F.dom->base();
  const FinCat& D = *F.cod->base();
  for (const auto& [key, val] : F.xi) {
    bool ok = key.objs.size() <= O.max_arity() && key.p.index() < O.arity_size(key.objs.size());
    for (ObjId a : key.objs) ok = ok && a.index() < C.num_objects();
    if (!ok) {
      r.structural("lax.xi_key", "xi entry does not name an instance");
      continue;
    }
    if (val.index() >= D.num_morphisms()) r.structural("lax.xi_range", xi_text(F, key.p, key.objs));
  }
  return r.ok();
}

}  // namespace

CheckReport check_lax_omon_functor(const LaxOMonFunctor& F, unsigned jobs) {
  CheckReport r;
  if (!check_lax_structure(F, r)) return r;
  const OMonCategory& Cm = *F.dom;
  const OMonCategory& Dm = *F.cod;
  const Operad& O = *Cm.operad();
  const FinCat& C = *Cm.base();
  const FinCat& D = *Dm.base();
  const std::size_t N = O.max_arity();

  for (std::size_t n = 0; n <= N; ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const OpId p(pi);
      for_each_object_tuple(n, C.num_objects(), [&](std::span<const ObjId> A) {
        r.count("lax.xi_components");
        const MorId x = F.xi_at(p, A);
        const ObjId s = Dm.tensor_obj(p, apply_objs(F.F, A)), t = F.F(Cm.tensor_obj(p, A));
        if (D.src(x) != s || D.tgt(x) != t) {
          r.violation("lax.xi_type", xi_text(F, p, A) + " = " + mor_text(D, x) + ", expected " + obj_text(D, s) +
                                         " -> " + obj_text(D, t));
          return;
        }
        if (n == 1 && p == O.unit() && !D.is_identity(x))
          r.violation("lax.xi_unit", xi_text(F, p, A) + " = " + D.label(x) + " must be an identity");
      });
      std::vector<std::size_t> radices(n, C.num_morphisms());
      std::vector<MorId> us(n);
      std::vector<ObjId> src(n), tgt(n);
      for_each_tuple(radices, [&](std::span<const std::size_t> d) {
        for (std::size_t k = 0; k < n; ++k) {
          us[k] = MorId(d[k]);
          src[k] = C.src(us[k]);
          tgt[k] = C.tgt(us[k]);
        }
        r.count("lax.xi_naturality");
        const auto lhs = D.try_compose(F.F(Cm.tensor_mor(p, us)), F.xi_at(p, src));
        const auto rhs = D.try_compose(F.xi_at(p, tgt), Dm.tensor_mor(p, apply_mors(F.F, us)));
        if (!lhs || !rhs || *lhs != *rhs)
          r.violation("lax.xi_natural", xi_text(F, p, src) + " against " + mor_tuple_text(C, us));
      });
    }

  const auto instances = op_instances(O, false);
  std::vector<CheckReport> parts(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t k) {
    const OpInstance& in = instances[k];
    CheckReport& out = parts[k];
    const std::size_t n = in.f.target();
    for_each_object_tuple(in.f.source(), C.num_objects(), [&](std::span<const ObjId> A) {
      out.count("lax.pentagons");
      // F(phi^C) ∘ xi_mu  versus  xi_p ∘ (x)_p(xi_{q_i}) ∘ phi^D
      const MorId lhs1 = F.F(Cm.phi(in.f, in.p, in.qs, A));
      const auto lhs = D.try_compose(lhs1, F.xi_at(in.mu, A));
      std::vector<ObjId> inner(n);
      std::vector<MorId> xis(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto part = pick(A, in.fibers[i]);
        inner[i] = Cm.tensor_obj(in.qs[i], part);
        xis[i] = F.xi_at(in.qs[i], part);
      }
      const MorId phid = Dm.phi(in.f, in.p, in.qs, apply_objs(F.F, A));
      std::optional<MorId> rhs = D.try_compose(Dm.tensor_mor(in.p, xis), phid);
      if (rhs) rhs = D.try_compose(F.xi_at(in.p, inner), *rhs);
      if (!lhs || !rhs || *lhs != *rhs) {
        std::string w = "pentagon " + in.f.to_string() + " " + O.label(n, in.p);
        for (std::size_t i = 0; i < n; ++i) w += " " + O.label(in.fibers[i].size(), in.qs[i]);
        out.violation("lax.pentagon", w + " " + obj_tuple_text(C, A));
      }
    });
  });
  for (const auto& part : parts) r.merge(part);
  if (r.ok()) r.note("lax.classification", std::string(to_string(classify(F))));
  return r;
}

LaxKind classify(const LaxOMonFunctor& F) {
  const FinCat& C = *F.dom->base();
  const FinCat& D = *F.cod->base();
  const Operad& O = *F.dom->operad();
  bool strict = true, weak = true;
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi)
      for_each_object_tuple(n, C.num_objects(), [&](std::span<const ObjId> A) {
        const MorId x = F.xi_at(OpId(pi), A);
        strict = strict && D.is_identity(x);
        weak = weak && D.inverse(x).has_value();
      });
  return strict ? LaxKind::strict : weak ? LaxKind::weak : LaxKind::lax;
}

LaxOMonFunctor identity_lax_functor(const OMonPtr& c) { return LaxOMonFunctor{c, c, identity_functor(c->base()), {}}; }

LaxOMonFunctor compose(const LaxOMonFunctor& g, const LaxOMonFunctor& f) {
  if (!same_category(f.F.cod, g.F.dom)) throw std::invalid_argument("compose: lax functors not composable");
  LaxOMonFunctor out{f.dom, g.cod, compose(g.F, f.F), {}};
  const Operad& O = *f.dom->operad();
  const FinCat& E = *g.cod->base();
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi)
      for_each_object_tuple(n, f.dom->base()->num_objects(), [&](std::span<const ObjId> A) {
        const OpId p(pi);
        const MorId x = E.compose(g.F(f.xi_at(p, A)), g.xi_at(p, apply_objs(f.F, A)));
        const MorId id = E.identity(g.cod->tensor_obj(p, apply_objs(out.F, A)));
        if (x != id) out.xi[XiKey{p, {A.begin(), A.end()}}] = x;
      });
  return out;
}

CheckReport check_omon_transformation(const OMonTransformation& t) {
  CheckReport r;
  const LaxOMonFunctor& F = t.dom;
  const LaxOMonFunctor& G = t.cod;
  if (!check_lax_structure(F, r) || !check_lax_structure(G, r)) return r;
  if (!(*F.dom == *G.dom) || !(*F.cod == *G.cod)) {
    r.structural("omontrans.refs", "functors are not parallel");
    return r;
  }
  if (!(t.t.dom == F.F) || !(t.t.cod == G.F)) {
    r.structural("omontrans.refs", "transformation does not match the functors");
    return r;
  }
  const CheckReport nr = validate_natural_transformation(t.t);
  if (!nr.ok()) {
    r.merge(nr);
    return r;
  }
  const OMonCategory& Cm = *F.dom;
  const OMonCategory& Dm = *F.cod;
  const Operad& O = *Cm.operad();
  const FinCat& C = *Cm.base();
  const FinCat& D = *Dm.base();
  for (std::size_t n = 0; n <= O.max_arity(); ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi)
      for_each_object_tuple(n, C.num_objects(), [&](std::span<const ObjId> A) {
        const OpId p(pi);
        r.count("omontrans.squares");
        std::vector<MorId> comps;
        for (ObjId a : A) comps.push_back(t.t[a]);
        const auto lhs = D.try_compose(t.t[Cm.tensor_obj(p, A)], F.xi_at(p, A));
        const auto rhs = D.try_compose(G.xi_at(p, A), Dm.tensor_mor(p, comps));
        if (!lhs || !rhs || *lhs != *rhs)
          r.violation("omontrans.square", "square " + O.label(n, p) + " " + obj_tuple_text(C, A));
      });
  return r;
}

OMonTransformation identity_transformation(const LaxOMonFunctor& F) {
  return OMonTransformation{F, F, identity_transformation(F.F)};
}

OMonTransformation vertical_compose(const OMonTransformation& b, const OMonTransformation& a) {
  return OMonTransformation{a.dom, b.cod, vertical_compose(b.t, a.t)};
}

// ---------------------------------------------------------------------------
// Structural Set

FinSet structural_tensor(std::span<const FinSet> xs) { return product_set(xs); }

FinFunction structural_phi(const FinMap& f, std::span<const FinSet> xs) {
  if (xs.size() != f.source()) throw std::invalid_argument("structural_phi: arity mismatch");
  std::vector<std::size_t> radices;
  for (const auto& x : xs) radices.push_back(x.size());
  const auto fibs = fibers(f);
  std::vector<std::vector<std::size_t>> inner_radices(fibs.size());
  std::vector<std::size_t> outer_radices(fibs.size());
  for (std::size_t i = 0; i < fibs.size(); ++i) {
    for (std::size_t j : fibs[i]) inner_radices[i].push_back(radices[j]);
    outer_radices[i] = tuple_count(inner_radices[i]);
  }
  FinFunction out;
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    std::vector<std::size_t> outer(fibs.size());
    for (std::size_t i = 0; i < fibs.size(); ++i) {
      std::vector<std::size_t> digits;
      for (std::size_t j : fibs[i]) digits.push_back(d[j]);
      outer[i] = encode_tuple(digits, inner_radices[i]);
    }
    out.push_back(encode_tuple(outer, outer_radices));
  });
  return out;
}

CheckReport check_structural_set(const StructuralSet& s, std::span<const FinSet> samples) {
  CheckReport r;
  if (!s.operad) {
    r.structural("set.refs", "operad missing");
    return r;
  }
  const std::size_t N = s.operad->max_arity();
  for (const auto& [g, f] : map_pairs(N, false)) {
    const std::size_t l = g.source(), m = f.source(), n = f.target();
    const FinMap fg = compose(f, g);
    const auto gfib = fibers(g), fgfib = fibers(fg);
    std::vector<std::size_t> radices(l, samples.size());
    for_each_tuple(radices, [&](std::span<const std::size_t> d) {
      std::vector<FinSet> X;
      for (std::size_t k : d) X.push_back(samples[k]);
      // Bottom∘Left and Right∘Top as functions on prod X.
      std::vector<FinSet> blocks(m);
      for (std::size_t j = 0; j < m; ++j) blocks[j] = structural_tensor(pick<FinSet>(X, gfib[j]));
      const auto left = structural_phi(g, X);
      const auto bottom = structural_phi(f, blocks);
      const auto top = structural_phi(fg, X);
      // Right acts blockwise on prod_i prod_{(fg)(k)=i} X_k.
      std::vector<FinFunction> rights(n);
      std::vector<std::size_t> rad_in(n), rad_out(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto Xi = pick<FinSet>(X, fgfib[i]);
        rights[i] = structural_phi(induced_fiber_map(f, g, i), Xi);
        rad_in[i] = structural_tensor(Xi).size();
        rad_out[i] = rad_in[i];
      }
      r.count("set.assoc_squares");
      for (std::size_t x = 0; x < left.size(); ++x) {
        auto digits = decode_tuple(top[x], rad_in);
        for (std::size_t i = 0; i < n; ++i) digits[i] = rights[i][digits[i]];
        if (encode_tuple(digits, rad_out) != bottom[left[x]]) {
          r.violation("set.assoc", "square g " + g.to_string() + " f " + f.to_string());
          break;
        }
      }
    });
  }
  for (std::size_t m = 0; m <= N; ++m)
    for (std::size_t n = 0; n <= N; ++n)
      for (const FinMap& f : all_maps(m, n)) {
        if (!(f == identity_map(n)) && n != 1) continue;
        std::vector<std::size_t> radices(m, samples.size());
        for_each_tuple(radices, [&](std::span<const std::size_t> d) {
          std::vector<FinSet> X;
          for (std::size_t k : d) X.push_back(samples[k]);
          const auto self = structural_phi(f, X);
          for (std::size_t x = 0; x < self.size(); ++x)
            if (self[x] != x) {
              r.violation("set.identity", "phi " + f.to_string());
              break;
            }
        });
      }
  return r;
}

// ---------------------------------------------------------------------------
// Restriction

namespace {

void check_restrictable(const OperadMorphism& h, const OperadPtr& over) {
  if (!h.dom || !h.cod || !over) throw std::invalid_argument("restrict: missing operad");
  if (h.dom->max_arity() != h.cod->max_arity() || over->max_arity() != h.cod->max_arity())
    throw std::invalid_argument("restrict: truncation mismatch");
  if (!(*over == *h.cod)) throw std::invalid_argument("restrict: cell does not live over the codomain operad");
}

// pre[n][P] = operations of h.dom mapped to P.
std::vector<std::vector<std::vector<OpId>>> preimages(const OperadMorphism& h) {
  std::vector<std::vector<std::vector<OpId>>> pre(h.dom->max_arity() + 1);
  for (std::size_t n = 0; n <= h.dom->max_arity(); ++n) {
    pre[n].resize(h.cod->arity_size(n));
    for (std::size_t p = 0; p < h.dom->arity_size(n); ++p) pre[n][h(n, OpId(p)).index()].push_back(OpId(p));
  }
  return pre;
}

}  // namespace

OMonCategory restrict_along_operad_morphism(const OperadMorphism& h, const OMonCategory& c) {
  check_restrictable(h, c.operad());
  OMonCategory out(h.dom, c.base());
  for (std::size_t n = 0; n <= h.dom->max_arity(); ++n)
    for (std::size_t p = 0; p < h.dom->arity_size(n); ++p) out.tensor(n, OpId(p)) = c.tensor(n, h(n, OpId(p)));
  const auto pre = preimages(h);
  for (const auto& [key, val] : c.phi_entries()) {
    const auto sizes = fiber_sizes(key.f);
    const auto& ps = pre.at(key.f.target()).at(key.p.index());
    std::vector<std::size_t> radices;
    for (std::size_t i = 0; i < sizes.size(); ++i) radices.push_back(pre[sizes[i]][key.qs[i].index()].size());
    for (OpId p : ps)
      for_each_tuple(radices, [&](std::span<const std::size_t> d) {
        std::vector<OpId> qs(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) qs[i] = pre[sizes[i]][key.qs[i].index()][d[i]];
        out.set_phi(PhiKey{key.f, p, qs, key.objs}, val);
      });
  }
  return out;
}

LaxOMonFunctor restrict_along_operad_morphism(const OperadMorphism& h, const LaxOMonFunctor& F,
                                              const OMonPtr& dom, const OMonPtr& cod) {
  check_restrictable(h, F.dom->operad());
  if (!dom || !cod || !(*dom->operad() == *h.dom) || !(*cod->operad() == *h.dom))
    throw std::invalid_argument("restrict: restricted endpoints expected");
  LaxOMonFunctor out{dom, cod, F.F, {}};
  out.F.dom = dom->base();
  out.F.cod = cod->base();
  const auto pre = preimages(h);
  for (const auto& [key, val] : F.xi)
    for (OpId p : pre.at(key.objs.size()).at(key.p.index())) out.xi[XiKey{p, key.objs}] = val;
  return out;
}

OMonTransformation restrict_along_operad_morphism(const OperadMorphism& h, const OMonTransformation& t,
                                                  const LaxOMonFunctor& dom, const LaxOMonFunctor& cod) {
  check_restrictable(h, t.dom.dom->operad());
  OMonTransformation out{dom, cod, t.t};
  out.t.dom = dom.F;
  out.t.cod = cod.F;
  return out;
}

StructuralSet restrict_along_operad_morphism(const OperadMorphism& h, const StructuralSet& s) {
  check_restrictable(h, s.operad);
  return StructuralSet{h.dom};
}

// ---------------------------------------------------------------------------
// Unbiased data and the Assoc translation

MorId UnbiasedMonoidal::alpha_at(const FinMap& f, std::span<const ObjId> objs) const {
  std::vector<ObjId> key(objs.begin(), objs.end());
  auto it = alpha.find({f, key});
  if (it != alpha.end()) return it->second;
  return base->identity(tensors.at(f.source()).on_obj.at(code_of(objs, base->num_objects())));
}

bool UnbiasedMonoidal::operator==(const UnbiasedMonoidal& o) const {
  return same_category(base, o.base) && max_arity == o.max_arity && tensors == o.tensors && alpha == o.alpha;
}

namespace {

// The unbiased data as an Assoc-structure whose permutation-indexed
// tensors all equal the identity-indexed one; only monotone instances with
// identity permutations are meaningful.
OMonCategory unbiased_as_assoc(const UnbiasedMonoidal& u) {
  OMonCategory c(build_assoc(u.max_arity), u.base);
  const Operad& O = *c.operad();
  if (u.tensors.size() != u.max_arity + 1) return c;
  for (std::size_t n = 0; n <= u.max_arity; ++n)
    for (std::size_t p = 0; p < O.arity_size(n); ++p) c.tensor(n, OpId(p)) = u.tensors[n];
  for (const auto& [key, val] : u.alpha) {
    const auto& [f, objs] = key;
    if (f.source() > u.max_arity || f.target() > u.max_arity) continue;
    std::vector<OpId> qs;
    for (std::size_t s : fiber_sizes(f)) qs.push_back(O.permutation_id(identity_map(s)));
    c.set_phi(PhiKey{f, O.permutation_id(identity_map(f.target())), qs, objs}, val);
  }
  return c;
}

}  // namespace

CheckReport check_unbiased(const UnbiasedMonoidal& u, unsigned jobs) {
  CheckReport r;
  if (!u.base || u.tensors.size() != u.max_arity + 1) {
    r.structural("unbiased.refs", "base missing or tensor count differs from max_arity + 1");
    return r;
  }
  for (const auto& [key, val] : u.alpha)
    if (!is_monotone(key.first)) r.structural("unbiased.alpha_key", "alpha " + key.first.to_string() + " is not monotone");
  if (!r.ok()) return r;
  return check_omon_impl(unbiased_as_assoc(u), jobs, true);
}

OMonCategory extend_unbiased_to_assoc(const UnbiasedMonoidal& u) {
  const CheckReport pre = check_unbiased(u);
  if (!pre.ok()) throw CheckFailure("extend_unbiased_to_assoc: unbiased axioms fail", pre);
  OMonCategory c(build_assoc(u.max_arity), u.base);
  const Operad& O = *c.operad();
  const FinCat& B = *u.base;
  for (std::size_t n = 0; n <= u.max_arity; ++n)
    for (std::size_t pi = 0; pi < O.arity_size(n); ++pi) {
      const FinMap inv = inverse_permutation(O.permutation(n, OpId(pi)));
      TensorTable& t = c.tensor(n, OpId(pi));
      for (std::size_t k = 0; k < t.on_obj.size(); ++k) {
        const auto objs = decode_ids<ObjId>(k, n, B.num_objects());
        std::vector<ObjId> permuted(n);
        for (std::size_t i = 0; i < n; ++i) permuted[i] = objs[inv(i)];
        t.on_obj[k] = u.tensors[n].on_obj[code_of<ObjId>(permuted, B.num_objects())];
      }
      for (std::size_t k = 0; k < t.on_mor.size(); ++k) {
        const auto mors = decode_ids<MorId>(k, n, B.num_morphisms());
        std::vector<MorId> permuted(n);
        for (std::size_t i = 0; i < n; ++i) permuted[i] = mors[inv(i)];
        t.on_mor[k] = u.tensors[n].on_mor[code_of<MorId>(permuted, B.num_morphisms())];
      }
    }
  if (u.alpha.empty()) return c;
  for (const OpInstance& in : op_instances(O, false)) {
    const std::size_t m = in.f.source(), n = in.f.target();
    const FinMap& pinv = inverse_permutation(O.permutation(n, in.p));
    std::vector<std::size_t> g_vals;
    for (std::size_t i = 0; i < n; ++i)
      g_vals.insert(g_vals.end(), in.fibers[pinv(i)].size(), i);
    const FinMap g(n, g_vals);
    const FinMap muinv = inverse_permutation(O.permutation(m, in.mu));
    for_each_object_tuple(m, B.num_objects(), [&](std::span<const ObjId> A) {
      std::vector<ObjId> permuted(m);
      for (std::size_t k = 0; k < m; ++k) permuted[k] = A[muinv(k)];
      auto it = u.alpha.find({g, permuted});
      if (it != u.alpha.end()) c.set_phi(PhiKey{in.f, in.p, in.qs, {A.begin(), A.end()}}, it->second);
    });
  }
  return c;
}

UnbiasedMonoidal forget_assoc_to_unbiased(const OMonCategory& c) {
  const Operad& O = *c.operad();
  if (O.kind() != Operad::Kind::assoc) throw std::invalid_argument("forget_assoc_to_unbiased: not an Assoc structure");
  UnbiasedMonoidal u;
  u.base = c.base();
  u.max_arity = O.max_arity();
  for (std::size_t n = 0; n <= u.max_arity; ++n) u.tensors.push_back(c.tensor(n, O.permutation_id(identity_map(n))));
  for (const auto& [key, val] : c.phi_entries()) {
    if (!is_monotone(key.f) || key.p != O.permutation_id(identity_map(key.f.target()))) continue;
    const auto sizes = fiber_sizes(key.f);
    bool ids = true;
    for (std::size_t i = 0; i < sizes.size(); ++i) ids = ids && key.qs[i] == O.permutation_id(identity_map(sizes[i]));
    if (ids) u.alpha[{key.f, key.objs}] = val;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Strict algebras on sets

std::size_t SetAlgebra::apply(OpId p, std::span<const std::size_t> xs) const {
  std::size_t code = 0;
  for (std::size_t x : xs) code = code * carrier.size() + x;
  return ops.at(xs.size()).at(p.index()).at(code);
}

CheckReport check_set_algebra(const SetAlgebra& a) {
  CheckReport r;
  if (!a.operad) {
    r.structural("algebra.refs", "operad missing");
    return r;
  }
  const Operad& O = *a.operad;
  const std::size_t X = a.carrier.size();
  if (a.ops.size() != O.max_arity() + 1) {
    r.structural("algebra.size", "expected operations for arities 0.." + std::to_string(O.max_arity()));
    return r;
  }
  for (std::size_t n = 0; n <= O.max_arity(); ++n) {
    if (a.ops[n].size() != O.arity_size(n)) {
      r.structural("algebra.size", "arity " + std::to_string(n) + " has the wrong number of operations");
      continue;
    }
    for (std::size_t p = 0; p < a.ops[n].size(); ++p) {
      if (a.ops[n][p].size() != ipow(X, n)) r.structural("algebra.size", "op " + O.label(n, OpId(p)));
      for (std::size_t v : a.ops[n][p])
        if (v >= X) {
          r.structural("algebra.range", "op " + O.label(n, OpId(p)));
          break;
        }
    }
  }
  if (!r.ok()) return r;
  auto tuple_text = [&](std::span<const std::size_t> xs) {
    std::vector<std::string> parts;
    for (std::size_t x : xs) parts.push_back(a.carrier.label(x));
    return paren_list(parts);
  };
  if (O.max_arity() >= 1)
    for (std::size_t x = 0; x < X; ++x)
      if (a.ops[1][O.unit().index()][x] != x)
        r.violation("algebra.unit", "op " + O.label(1, O.unit()) + " (" + a.carrier.label(x) + ")");
  for (const OpInstance& in : op_instances(O, false)) {
    std::vector<std::size_t> radices(in.f.source(), X);
    for_each_tuple(radices, [&](std::span<const std::size_t> xs) {
      r.count("algebra.instances");
      std::vector<std::size_t> inner(in.fibers.size());
      for (std::size_t i = 0; i < inner.size(); ++i) inner[i] = a.apply(in.qs[i], pick(xs, in.fibers[i]));
      if (a.apply(in.mu, xs) != a.apply(in.p, inner)) {
        std::string w = "algebra " + in.f.to_string() + " " + O.label(in.f.target(), in.p);
        for (std::size_t i = 0; i < in.qs.size(); ++i) w += " " + O.label(in.fibers[i].size(), in.qs[i]);
        r.violation("algebra.compose", w + " " + tuple_text(xs));
      }
    });
  }
  return r;
}

SetAlgebra monoid_algebra(const OperadPtr& o, const FinSet& carrier, const std::vector<std::size_t>& mul,
                          std::size_t unit) {
  const std::size_t X = carrier.size();
  if (mul.size() != X * X || unit >= X) throw std::invalid_argument("monoid_algebra: bad monoid table");
  SetAlgebra a{o, carrier, {}};
  a.ops.resize(o->max_arity() + 1);
  for (std::size_t n = 0; n <= o->max_arity(); ++n)
    for (std::size_t pi = 0; pi < o->arity_size(n); ++pi) {
      const OpId p(pi);
      std::vector<std::size_t> order;  // positions multiplied, left to right
      switch (o->kind()) {
        case Operad::Kind::assoc: {
          const FinMap inv = inverse_permutation(o->permutation(n, p));
          for (std::size_t k = 0; k < n; ++k) order.push_back(inv(k));
          break;
        }
        case Operad::Kind::comm:
          for (std::size_t k = 0; k < n; ++k) order.push_back(k);
          break;
        case Operad::Kind::qconv: {
          const Semiring& R = *o->semiring();
          if (R.size() != 2) throw std::invalid_argument("monoid_algebra: only the Boolean semiring is supported");
          const auto& coords = o->coordinates(n, p);
          for (std::size_t k = 0; k < n; ++k)
            if (coords[k] == R.one) order.push_back(k);
          break;
        }
        case Operad::Kind::table:
          throw std::invalid_argument("monoid_algebra: table operads carry no canonical action");
      }
      FinFunction table;
      std::vector<std::size_t> radices(n, X);
      for_each_tuple(radices, [&](std::span<const std::size_t> xs) {
        std::size_t acc = unit;
        for (std::size_t k : order) acc = mul[acc * X + xs[k]];
        table.push_back(acc);
      });
      a.ops[n].push_back(std::move(table));
    }
  return a;
}

OMonCategory omon_from_set_algebra(const SetAlgebra& a, CatPtr thin) {
  const CheckReport r = check_set_algebra(a);
  if (!r.ok()) throw CheckFailure("omon_from_set_algebra: algebra equations fail", r);
  if (!thin) thin = discrete_category(a.carrier.elements);
  if (thin->num_objects() != a.carrier.size())
    throw std::invalid_argument("omon_from_set_algebra: base objects differ from the carrier");
  OMonCategory c(a.operad, thin);
  for (std::size_t n = 0; n <= a.operad->max_arity(); ++n)
    for (std::size_t p = 0; p < a.operad->arity_size(n); ++p) {
      TensorTable& t = c.tensor(n, OpId(p));
      for (std::size_t k = 0; k < t.on_obj.size(); ++k) t.on_obj[k] = ObjId(a.ops[n][p][k]);
    }
  complete_forced_tensor_morphisms(c);
  for (const auto& row : c.tensors())
    for (const auto& t : row)
      for (MorId u : t.on_mor)
        if (u == kUnsetMor) throw std::invalid_argument("omon_from_set_algebra: tensor is not monotone on the base");
  return c;
}

}  // namespace opgroth
