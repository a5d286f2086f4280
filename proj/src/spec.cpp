#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "opgroth/spec.hpp"
#include "opgroth/tuples.hpp"

namespace opgroth {

namespace {

constexpr std::string_view kKindNames[] = {"category", "functor", "nattrans", "fibration", "iset", "semiring",
                                           "operad",   "omon",    "laxfun",   "omontrans", "ofib", "laxtoset"};

template <class T>
bool deref_equal(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

bool same_value(const SectionValue& a, const SectionValue& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b);
        if constexpr (requires { x.get(); }) {
          return deref_equal(x, y);
        } else {
          return x == y;
        }
      },
      a);
}

bool same_pointer(const SectionValue& a, const SectionValue& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (requires { x.get(); }) {
          return x.get() == std::get<T>(b).get();
        } else {
          return false;
        }
      },
      a);
}

// Referenced values with the role used for derived names.
std::vector<std::pair<SectionValue, std::string>> dependencies(const SectionValue& v) {
  std::vector<std::pair<SectionValue, std::string>> d;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CatFunctor>) {
          d = {{x.dom, "dom"}, {x.cod, "cod"}};
        } else if constexpr (std::is_same_v<T, NatTransform>) {
          d = {{x.dom, "dom"}, {x.cod, "cod"}};
        } else if constexpr (std::is_same_v<T, DFibPtr>) {
          d = {{x->proj.dom, "total"}, {x->proj.cod, "base"}};
        } else if constexpr (std::is_same_v<T, ISetPtr>) {
          d = {{x->index, "index"}};
        } else if constexpr (std::is_same_v<T, OperadPtr>) {
          if (x->semiring()) d = {{*x->semiring(), "semiring"}};
        } else if constexpr (std::is_same_v<T, OMonPtr>) {
          d = {{x->operad(), "operad"}, {x->base(), "base"}};
        } else if constexpr (std::is_same_v<T, LaxOMonFunctor>) {
          d = {{x.dom, "dom"}, {x.cod, "cod"}};
        } else if constexpr (std::is_same_v<T, OMonTransformation>) {
          d = {{x.dom, "dom"}, {x.cod, "cod"}};
        } else if constexpr (std::is_same_v<T, OFibPtr>) {
          d = {{x->p, "fib"}, {x->total_omon, "total"}, {x->base_omon, "base"}};
        } else if constexpr (std::is_same_v<T, LaxToSetPtr>) {
          d = {{x->index_omon, "index"}, {x->F, "iset"}};
        }
      },
      v);
  return d;
}

// ---- writing ---------------------------------------------------------------

bool needs_quotes(std::string_view s) {
  if (s.empty()) return true;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char ch = s[k];
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v' || ch == ',' || ch == '(' || ch == ')' ||
        ch == '[' || ch == ']' || ch == '=' || ch == ':' || ch == '#' || ch == '"' || ch == '\\')
      return true;
    if (ch == '-' && k + 1 < s.size() && s[k + 1] == '>') return true;
  }
  return false;
}

std::string q(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

template <class Range, class Fn>
std::string joined(const Range& r, std::string_view sep, Fn&& fn) {
  std::string out;
  bool first = true;
  for (const auto& x : r) {
    if (!first) out += sep;
    first = false;
    out += fn(x);
  }
  return out;
}

// Map entries keyed by (p, objs), ordered by arity first.
template <class Map>
std::vector<std::pair<typename Map::key_type, typename Map::mapped_type>> by_arity(const Map& m) {
  std::vector<std::pair<typename Map::key_type, typename Map::mapped_type>> v(m.begin(), m.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.first.objs.size() < b.first.objs.size();
  });
  return v;
}

class Writer {
 public:
  explicit Writer(const SpecDocument& doc) : doc_(doc) {}

  std::string ref(const SectionValue& v, std::string_view what) const {
    if (auto n = doc_.name_of(v)) return q(*n);
    throw std::invalid_argument("write_spec: no section for the " + std::string(what));
  }

  void category(std::ostream& os, const FinCat& C) const {
    auto arrow = [&](MorId f) {
      os << q(C.label(f)) << " : " << q(C.label(C.src(f))) << " -> " << q(C.label(C.tgt(f))) << "\n";
    };
    // Short form when identities come in object order with default labels:
    // each "objects" line then sits where its identities are.
    bool short_form = true;
    std::size_t next = 0;
    for (std::size_t k = 0; k < C.num_morphisms() && short_form; ++k) {
      const MorId f(k);
      if (!C.is_identity(f)) continue;
      short_form = C.src(f).index() == next && C.label(f) == "id_" + C.label(C.src(f));
      ++next;
    }
    if (!short_form) {
      os << "objects = " << joined(C.object_labels(), ", ", [](const std::string& s) { return q(s); }) << "\n";
      for (std::size_t k = 0; k < C.num_morphisms(); ++k) {
        const MorId f(k);
        if (C.is_identity(f))
          os << "identity " << q(C.label(C.src(f))) << " = " << q(C.label(f)) << "\n";
        else
          arrow(f);
      }
    } else {
      std::vector<std::string> pending;
      auto flush = [&] {
        if (pending.empty()) return;
        os << "objects = " << joined(pending, ", ", [](const std::string& s) { return q(s); }) << "\n";
        pending.clear();
      };
      for (std::size_t k = 0; k < C.num_morphisms(); ++k) {
        const MorId f(k);
        if (C.is_identity(f)) {
          pending.push_back(C.label(C.src(f)));
          continue;
        }
        flush();
        arrow(f);
      }
      flush();
    }
    const std::size_t nm = C.num_morphisms();
    for (std::size_t g = 0; g < nm; ++g)
      for (std::size_t f = 0; f < nm; ++f) {
        const auto& h = C.table()[g * nm + f];
        if (!h) continue;
        const MorId G(g), F(f);
        // Unit-law slots that hold their default value are implied.
        const bool unit_slot = (C.is_identity(G) && C.tgt(F) == C.src(G) && *h == F) ||
                               (C.is_identity(F) && C.src(G) == C.tgt(F) && *h == G);
        if (unit_slot) continue;
        os << "compose " << q(C.label(G)) << " " << q(C.label(F)) << " = " << q(C.label(*h)) << "\n";
      }
  }

  void functor_body(std::ostream& os, const CatFunctor& F) const {
    const FinCat& C = *F.dom;
    const FinCat& D = *F.cod;
    for (std::size_t a = 0; a < C.num_objects(); ++a)
      os << "obj " << q(C.label(ObjId(a))) << " = " << q(D.label(F(ObjId(a)))) << "\n";
    for (std::size_t f = 0; f < C.num_morphisms(); ++f) {
      const MorId m(f);
      if (C.is_identity(m) && F(m) == D.identity(F(C.src(m)))) continue;
      os << "mor " << q(C.label(m)) << " = " << q(D.label(F(m))) << "\n";
    }
  }

  void components(std::ostream& os, const NatTransform& t) const {
    for (std::size_t a = 0; a < t.dom.dom->num_objects(); ++a)
      os << "component " << q(t.dom.dom->label(ObjId(a))) << " = " << q(t.dom.cod->label(t[ObjId(a)])) << "\n";
  }

  void iset(std::ostream& os, const IndexedSet& F) const {
    const FinCat& I = *F.index;
    os << "index = " << ref(F.index, "index category") << "\n";
    for (std::size_t a = 0; a < I.num_objects(); ++a)
      os << "set " << q(I.label(ObjId(a))) << " ="
         << (F.on_obj[a].size() ? " " : "")
         << joined(F.on_obj[a].elements, ", ", [](const std::string& s) { return q(s); }) << "\n";
    for (std::size_t u = 0; u < I.num_morphisms(); ++u) {
      const MorId m(u);
      const FinFunction& fn = F.on_mor[u];
      bool identity = I.is_identity(m);
      for (std::size_t x = 0; identity && x < fn.size(); ++x) identity = fn[x] == x;
      if (identity) continue;
      const FinSet& tgt = F.on_obj[I.tgt(m).index()];
      os << "map " << q(I.label(m)) << " =" << (fn.empty() ? "" : " ")
         << joined(fn, ", ", [&](std::size_t x) { return q(tgt.label(x)); }) << "\n";
    }
  }

  void semiring(std::ostream& os, const Semiring& r) const {
    auto lbl = [&](std::size_t x) { return q(r.elements.at(x)); };
    os << "elements = " << joined(r.elements, ", ", [](const std::string& s) { return q(s); }) << "\n";
    os << "zero = " << lbl(r.zero) << "\none = " << lbl(r.one) << "\n";
    os << "add = " << joined(r.add, ", ", lbl) << "\n";
    os << "mul = " << joined(r.mul, ", ", lbl) << "\n";
  }

  static std::string entry(const Operad& o, const FinMap& f, OpId p, std::span<const OpId> qs) {
    std::string s = f.to_string() + " " + q(o.label(f.target(), p));
    const auto sizes = fiber_sizes(f);
    for (std::size_t i = 0; i < qs.size(); ++i) s += " " + q(o.label(sizes[i], qs[i]));
    return s;
  }

  void operad(std::ostream& os, const Operad& o) const {
    if (o.kind() != Operad::Kind::table) os << "builtin = " << to_string(o.kind()) << "\n";
    os << "max_arity = " << o.max_arity() << "\n";
    if (o.semiring()) os << "semiring = " << ref(*o.semiring(), "semiring") << "\n";
    if (o.kind() == Operad::Kind::table) {
      for (std::size_t n = 0; n <= o.max_arity(); ++n)
        os << "arity " << n << " =" << (o.carrier(n).empty() ? "" : " ")
           << joined(o.carrier(n), ", ", [](const std::string& s) { return q(s); }) << "\n";
      os << "unit = " << q(o.label(1, o.unit())) << "\n";
    }
    for (const auto& [key, r] : o.entries())
      os << "mu " << entry(o, key.f, key.p, key.qs) << " = " << q(o.label(key.f.source(), r)) << "\n";
  }

  void omon(std::ostream& os, const OMonCategory& c) const {
    const FinCat& B = *c.base();
    const Operad& O = *c.operad();
    os << "operad = " << ref(c.operad(), "operad") << "\nbase = " << ref(c.base(), "base category") << "\n";
    for (std::size_t n = 0; n <= O.max_arity(); ++n)
      for (std::size_t p = 0; p < O.arity_size(n); ++p) {
        const TensorTable& t = c.tensor(n, OpId(p));
        const std::vector<std::size_t> orad(n, B.num_objects()), mrad(n, B.num_morphisms());
        std::size_t code = 0;
        for_each_tuple(orad, [&](std::span<const std::size_t> d) {
          const ObjId v = t.on_obj[code++];
          if (v == kUnsetObj) return;
          os << "tensor " << q(O.label(n, OpId(p))) << " ("
             << joined(d, ",", [&](std::size_t a) { return q(B.label(ObjId(a))); }) << ") = " << q(B.label(v))
             << "\n";
        });
        code = 0;
        for_each_tuple(mrad, [&](std::span<const std::size_t> d) {
          const std::size_t k = code++;
          const MorId v = t.on_mor[k];
          if (v == kUnsetMor || tensor_mor_is_forced(c, n, OpId(p), k)) return;
          os << "tensor " << q(O.label(n, OpId(p))) << " ("
             << joined(d, ",", [&](std::size_t f) { return q(B.label(MorId(f))); }) << ") = " << q(B.label(v))
             << "\n";
        });
      }
    for (const auto& [key, g] : c.phi_entries())
      os << "phi " << entry(O, key.f, key.p, key.qs) << " ("
         << joined(key.objs, ",", [&](ObjId a) { return q(B.label(a)); }) << ") = " << q(B.label(g)) << "\n";
  }

  void laxfun(std::ostream& os, const LaxOMonFunctor& F) const {
    os << "dom = " << ref(F.dom, "domain structure") << "\ncod = " << ref(F.cod, "codomain structure") << "\n";
    functor_body(os, F.F);
    const FinCat& C = *F.dom->base();
    const FinCat& D = *F.cod->base();
    for (const auto& [key, g] : by_arity(F.xi))
      os << "xi " << q(F.dom->operad()->label(key.objs.size(), key.p)) << " ("
         << joined(key.objs, ",", [&](ObjId a) { return q(C.label(a)); }) << ") = " << q(D.label(g)) << "\n";
  }

  void laxtoset(std::ostream& os, const LaxToSet& x) const {
    const OMonCategory& c = *x.index_omon;
    const FinCat& B = *c.base();
    os << "index = " << ref(x.index_omon, "index structure") << "\niset = " << ref(x.F, "indexed set") << "\n";
    for (const auto& [key, fn] : by_arity(x.nu)) {
      const ObjId t = c.tensor_obj(key.p, key.objs);
      const FinSet& target = x.F->on_obj.at(t.index());
      os << "nu " << q(c.operad()->label(key.objs.size(), key.p)) << " ("
         << joined(key.objs, ",", [&](ObjId a) { return q(B.label(a)); }) << ") = ["
         << joined(fn, ", ", [&](std::size_t e) { return q(target.label(e)); }) << "]\n";
    }
  }

  void section(std::ostream& os, const Section& s) const {
    os << "[" << to_string(s.kind()) << " " << q(s.name) << "]\n";
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, CatPtr>) {
            category(os, *x);
          } else if constexpr (std::is_same_v<T, CatFunctor>) {
            os << "dom = " << ref(x.dom, "domain") << "\ncod = " << ref(x.cod, "codomain") << "\n";
            functor_body(os, x);
          } else if constexpr (std::is_same_v<T, NatTransform>) {
            os << "dom = " << ref(x.dom, "source functor") << "\ncod = " << ref(x.cod, "target functor") << "\n";
            components(os, x);
          } else if constexpr (std::is_same_v<T, DFibPtr>) {
            os << "total = " << ref(x->proj.dom, "total category") << "\nbase = " << ref(x->proj.cod, "base")
               << "\n";
            functor_body(os, x->proj);
          } else if constexpr (std::is_same_v<T, ISetPtr>) {
            iset(os, *x);
          } else if constexpr (std::is_same_v<T, Semiring>) {
            semiring(os, x);
          } else if constexpr (std::is_same_v<T, OperadPtr>) {
            operad(os, *x);
          } else if constexpr (std::is_same_v<T, OMonPtr>) {
            omon(os, *x);
          } else if constexpr (std::is_same_v<T, LaxOMonFunctor>) {
            laxfun(os, x);
          } else if constexpr (std::is_same_v<T, OMonTransformation>) {
            os << "dom = " << ref(x.dom, "source lax functor") << "\ncod = " << ref(x.cod, "target lax functor")
               << "\n";
            components(os, x.t);
          } else if constexpr (std::is_same_v<T, OFibPtr>) {
            os << "fibration = " << ref(x->p, "fibration") << "\ntotal = " << ref(x->total_omon, "total structure")
               << "\nbase = " << ref(x->base_omon, "base structure") << "\n";
          } else if constexpr (std::is_same_v<T, LaxToSetPtr>) {
            laxtoset(os, *x);
          }
        },
        s.value);
  }

 private:
  const SpecDocument& doc_;
};

}  // namespace

std::string_view to_string(SectionKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<SectionKind> parse_section_kind(std::string_view s) {
  for (std::size_t k = 0; k < std::size(kKindNames); ++k)
    if (kKindNames[k] == s) return static_cast<SectionKind>(k);
  return std::nullopt;
}

std::string Diagnostic::text() const {
  std::string s = std::to_string(line) + ":" + std::to_string(column) + ": ";
  if (!section.empty()) s += "[" + section + "] ";
  return s + message;
}

const Section* SpecDocument::find(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::optional<std::string> SpecDocument::name_of(const SectionValue& value) const {
  for (const auto& s : sections)
    if (same_pointer(s.value, value)) return s.name;
  for (const auto& s : sections)
    if (same_value(s.value, value)) return s.name;
  return std::nullopt;
}

std::string SpecDocument::add(std::string name, SectionValue value, const SpecDocument* hints) {
  for (auto& [dep, role] : dependencies(value)) {
    if (name_of(dep)) continue;
    std::optional<std::string> hinted = hints ? hints->name_of(dep) : std::nullopt;
    add(hinted && !find(*hinted) ? *hinted : name + "_" + role, dep, hints);
  }
  std::string unique = name;
  for (std::size_t k = 2; find(unique); ++k) unique = name + "_" + std::to_string(k);
  sections.push_back(Section{unique, std::move(value), 0});
  return unique;
}

bool table_equal(const SpecDocument& a, const SpecDocument& b) {
  if (a.sections.size() != b.sections.size()) return false;
  for (std::size_t k = 0; k < a.sections.size(); ++k) {
    const Section& x = a.sections[k];
    const Section& y = b.sections[k];
    if (x.name != y.name || !same_value(x.value, y.value)) return false;
  }
  return true;
}

std::string write_spec(const SpecDocument& doc) {
  std::ostringstream os;
  const Writer w(doc);
  for (std::size_t k = 0; k < doc.sections.size(); ++k) {
    if (k) os << "\n";
    w.section(os, doc.sections[k]);
  }
  return os.str();
}

CheckReport check_section(const Section& s, unsigned jobs) {
  return std::visit(
      [&](const auto& x) -> CheckReport {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CatPtr>) return validate_category(*x);
        else if constexpr (std::is_same_v<T, CatFunctor>) return validate_functor(x);
        else if constexpr (std::is_same_v<T, NatTransform>) return validate_natural_transformation(x);
        else if constexpr (std::is_same_v<T, DFibPtr>) return check_discrete_fibration(*x);
        else if constexpr (std::is_same_v<T, ISetPtr>) return validate_indexed_set(*x);
        else if constexpr (std::is_same_v<T, Semiring>) return check_semiring(x);
        else if constexpr (std::is_same_v<T, OperadPtr>) return check_operad_axioms(*x);
        else if constexpr (std::is_same_v<T, OMonPtr>) return check_omon_category(*x, jobs);
        else if constexpr (std::is_same_v<T, LaxOMonFunctor>) return check_lax_omon_functor(x, jobs);
        else if constexpr (std::is_same_v<T, OMonTransformation>) return check_omon_transformation(x);
        else if constexpr (std::is_same_v<T, OFibPtr>) return check_ofib_object(*x, jobs);
        else return check_lax_to_set(*x, jobs);
      },
      s.value);
}

}  // namespace opgroth
