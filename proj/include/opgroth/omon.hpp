#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opgroth/fib2cat.hpp"
#include "opgroth/fincat.hpp"
#include "opgroth/finmap.hpp"
#include "opgroth/operad.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

inline constexpr ObjId kUnsetObj{std::numeric_limits<std::uint32_t>::max()};
inline constexpr MorId kUnsetMor{std::numeric_limits<std::uint32_t>::max()};

/// One functor base^n -> base stored as two dense tables indexed by the
/// lexicographic code of the argument tuple (same order as power_category).
struct TensorTable {
  std::size_t arity = 0;
  std::vector<ObjId> on_obj;
  std::vector<MorId> on_mor;
  bool operator==(const TensorTable&) const = default;
};

struct PhiKey {
  FinMap f;
  OpId p;
  std::vector<OpId> qs;
  std::vector<ObjId> objs;  // the m-tuple A
  auto operator<=>(const PhiKey&) const = default;
};

/// An O-monoidal category in unpacked form: a tensor functor per operation
/// and structure morphisms
///   phi_f[p;q](A) : (x)_{mu_f(p;q)}(A) -> (x)_p(((x)_{q_i}(A|f^-1(i)))_i).
/// phi is sparse; an absent entry is the identity on its source object.
class OMonCategory {
 public:
  OMonCategory() = default;
  // Tensor tables start out unset (kUnsetObj / kUnsetMor).
  OMonCategory(OperadPtr operad, CatPtr base);

  const OperadPtr& operad() const { return operad_; }
  const CatPtr& base() const { return base_; }
  std::size_t max_arity() const { return operad_->max_arity(); }

  const TensorTable& tensor(std::size_t n, OpId p) const { return tensors_.at(n).at(p.index()); }
  TensorTable& tensor(std::size_t n, OpId p) { return tensors_.at(n).at(p.index()); }
  ObjId tensor_obj(OpId p, std::span<const ObjId> objs) const;
  MorId tensor_mor(OpId p, std::span<const MorId> mors) const;
  void set_tensor_obj(OpId p, std::span<const ObjId> objs, ObjId value);
  void set_tensor_mor(OpId p, std::span<const MorId> mors, MorId value);

  // The stored component, or the identity on the expected source. Throws
  // std::invalid_argument when mu_f(p;q) is undefined.
  MorId phi(const FinMap& f, OpId p, std::span<const OpId> qs, std::span<const ObjId> objs) const;
  void set_phi(PhiKey key, MorId value) { phi_[std::move(key)] = value; }
  void erase_phi(const PhiKey& key) { phi_.erase(key); }
  const std::map<PhiKey, MorId>& phi_entries() const { return phi_; }

  const std::vector<std::vector<TensorTable>>& tensors() const { return tensors_; }

  // Tables compared by value, phi by component (an explicit identity equals
  // an absent entry), operads semantically.
  bool operator==(const OMonCategory& o) const;

 private:
  OperadPtr operad_;
  CatPtr base_;
  std::vector<std::vector<TensorTable>> tensors_;  // [n][p]
  std::map<PhiKey, MorId> phi_;
};

using OMonPtr = std::shared_ptr<const OMonCategory>;

// (x)_p((x)_{q_i}(A|f^-1(i)))_i on objects and on morphism tuples.
ObjId nested_tensor_obj(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                        std::span<const ObjId> objs);
MorId nested_tensor_mor(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                        std::span<const MorId> mors);

// DSL notation for table entries, used in witnesses: "tensor s12 (0,1)",
// "phi [1,1] s1 s12 (0,1)".
std::string tensor_entry_text(const OMonCategory& c, OpId p, std::span<const ObjId> objs);
std::string tensor_entry_text(const OMonCategory& c, OpId p, std::span<const MorId> mors);
std::string phi_entry_text(const OMonCategory& c, const FinMap& f, OpId p, std::span<const OpId> qs,
                           std::span<const ObjId> objs);

// Fills every unset morphism entry whose value is forced: the unique
// morphism between the tensored source and target when the hom-set has
// exactly one element. Other unset entries stay unset.
void complete_forced_tensor_morphisms(OMonCategory& c);
// True when the stored entry equals the value complete_forced_tensor_morphisms would derive.
bool tensor_mor_is_forced(const OMonCategory& c, std::size_t n, OpId p, std::size_t code);

/// A composable (f, p, q) with its composite mu = mu_f(p;q); fibers of f
/// are cached.
struct OpInstance {
  FinMap f;
  OpId p;
  std::vector<OpId> qs;
  OpId mu;
  std::vector<std::vector<std::size_t>> fibers;
};

// Every instance with arities <= N and a defined composite, ordered by
// (m, n, f, p, q).
std::vector<OpInstance> composition_instances(const Operad& o);

// Calls fn(span<const ObjId>) for every n-tuple of objects in lexicographic order.
template <class Fn>
void for_each_object_tuple(std::size_t n, std::size_t num_objects, Fn&& fn);

// Exhaustive coherence check: tensor functoriality, unit, phi typing,
// invertibility, naturality, identity axioms and the associativity square
// for all arities <= N. Structural problems stop the check early.
CheckReport check_omon_category(const OMonCategory& c, unsigned jobs = 1);

/// Lax O-monoidal functor with xi_p[A] : (x)_p(F A_i) -> F((x)_p A).
/// Absent xi entries are identities.
struct XiKey {
  OpId p;
  std::vector<ObjId> objs;
  auto operator<=>(const XiKey&) const = default;
};

struct LaxOMonFunctor {
  OMonPtr dom;
  OMonPtr cod;
  CatFunctor F;
  std::map<XiKey, MorId> xi;

  MorId xi_at(OpId p, std::span<const ObjId> objs) const;
  // Compares xi by component, so explicit identities equal absent entries.
  bool operator==(const LaxOMonFunctor& o) const;
};

enum class LaxKind { strict, weak, lax };
std::string_view to_string(LaxKind k);

// Also records the classification in the note "lax.classification".
CheckReport check_lax_omon_functor(const LaxOMonFunctor& F, unsigned jobs = 1);
LaxKind classify(const LaxOMonFunctor& F);
LaxOMonFunctor identity_lax_functor(const OMonPtr& c);
LaxOMonFunctor compose(const LaxOMonFunctor& g, const LaxOMonFunctor& f);  // g∘f

struct OMonTransformation {
  LaxOMonFunctor dom;
  LaxOMonFunctor cod;
  NatTransform t;
  bool operator==(const OMonTransformation&) const = default;
};

CheckReport check_omon_transformation(const OMonTransformation& t);
OMonTransformation identity_transformation(const LaxOMonFunctor& F);
OMonTransformation vertical_compose(const OMonTransformation& b, const OMonTransformation& a);

/// (Set, x) with the cartesian structure pulled back to `operad`: every
/// p-indexed tensor is the cartesian product and every phi is the
/// regrouping of coordinates by fibers.
struct StructuralSet {
  OperadPtr operad;
};

FinSet structural_tensor(std::span<const FinSet> xs);
// Element codes of prod_j X_j mapped to codes of prod_i (prod_{f(j)=i} X_j).
FinFunction structural_phi(const FinMap& f, std::span<const FinSet> xs);
// Associativity square and identity axioms on every tuple drawn from `samples`.
CheckReport check_structural_set(const StructuralSet& s, std::span<const FinSet> samples);

// Restriction along h : O -> P. Inputs must live over h.cod; throws
// std::invalid_argument on a truncation or operad mismatch.
OMonCategory restrict_along_operad_morphism(const OperadMorphism& h, const OMonCategory& c);
// Dom and cod of the result are the given restrictions, which must be the
// restrictions of F.dom and F.cod.
LaxOMonFunctor restrict_along_operad_morphism(const OperadMorphism& h, const LaxOMonFunctor& F,
                                              const OMonPtr& dom, const OMonPtr& cod);
OMonTransformation restrict_along_operad_morphism(const OperadMorphism& h, const OMonTransformation& t,
                                                  const LaxOMonFunctor& dom, const LaxOMonFunctor& cod);
StructuralSet restrict_along_operad_morphism(const OperadMorphism& h, const StructuralSet& s);

/// Unbiased monoidal data: a tensor per arity and
///   alpha_f(A) : (x)_m(A) -> (x)_n(((x)_{|f^-1(i)|}(A|f^-1(i)))_i)
/// for monotone f. Absent alpha entries are identities.
struct UnbiasedMonoidal {
  CatPtr base;
  std::size_t max_arity = 0;
  std::vector<TensorTable> tensors;  // [n]
  std::map<std::pair<FinMap, std::vector<ObjId>>, MorId> alpha;

  MorId alpha_at(const FinMap& f, std::span<const ObjId> objs) const;
  bool operator==(const UnbiasedMonoidal& o) const;
};

// The OMonCategory axioms restricted to monotone maps and identity
// permutations, plus (x)_1 = id.
CheckReport check_unbiased(const UnbiasedMonoidal& u, unsigned jobs = 1);
// (x)_p(A) = (x)_n(A_{p^-1(i)})_i, and phi_f[p;q](A) = alpha_g(A∘mu^-1) with
// mu = mu_f(p;q) and g the monotone map with fiber sizes |f^-1(p^-1(i))|.
// Throws CheckFailure when the unbiased axioms fail.
OMonCategory extend_unbiased_to_assoc(const UnbiasedMonoidal& u);
UnbiasedMonoidal forget_assoc_to_unbiased(const OMonCategory& c);

/// A strict O-algebra on a finite set: ops[n][p] is a table over the codes
/// of carrier^n.
struct SetAlgebra {
  OperadPtr operad;
  FinSet carrier;
  std::vector<std::vector<FinFunction>> ops;

  std::size_t apply(OpId p, std::span<const std::size_t> xs) const;
};

CheckReport check_set_algebra(const SetAlgebra& a);
// Operations derived from a monoid (mul over codes x*|X|+y, unit): Assoc
// multiplies in the order a_{p^-1(1)},...; Comm in index order; QConv over
// the Boolean semiring multiplies the entries with coordinate one. The
// result is not checked.
SetAlgebra monoid_algebra(const OperadPtr& o, const FinSet& carrier, const std::vector<std::size_t>& mul,
                          std::size_t unit);
// Strict structure on the discrete category of the carrier, or on `thin`
// (objects = carrier) with morphism entries forced. Throws CheckFailure
// when the algebra equations fail, std::invalid_argument when a tensor is
// not monotone on `thin`.
OMonCategory omon_from_set_algebra(const SetAlgebra& a, CatPtr thin = nullptr);

}  // namespace opgroth

#include "opgroth/tuples.hpp"

namespace opgroth {

template <class Fn>
void for_each_object_tuple(std::size_t n, std::size_t num_objects, Fn&& fn) {
  std::vector<std::size_t> radices(n, num_objects);
  std::vector<ObjId> objs(n);
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    for (std::size_t k = 0; k < d.size(); ++k) objs[k] = ObjId(d[k]);
    fn(std::span<const ObjId>(objs));
  });
}

}  // namespace opgroth
