#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "opgroth/fib2cat.hpp"
#include "opgroth/omon.hpp"
#include "opgroth/operad.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

struct NuKey {
  OpId p;
  std::vector<ObjId> objs;
  auto operator<=>(const NuKey&) const = default;
};

/// A lax O-monoidal functor from index_omon into the structural Set:
///   nu_p[i](x_1, .., x_n) in F((x)_p i)
/// stored per (p, i) on the lexicographic codes of prod_k F(i_k). Every
/// key must be present.
struct LaxToSet {
  OMonPtr index_omon;
  ISetPtr F;
  std::map<NuKey, FinFunction> nu;

  std::size_t nu_apply(OpId p, std::span<const ObjId> objs, std::span<const std::size_t> xs) const;
  bool operator==(const LaxToSet& o) const;
};

using LaxToSetPtr = std::shared_ptr<const LaxToSet>;

// nu filled from rule(p, objs, xs), which must return an element of
// F((x)_p objs). The result is not checked.
using NuRule = std::function<std::size_t(OpId, std::span<const ObjId>, std::span<const std::size_t>)>;
LaxToSet make_lax_to_set(OMonPtr index, ISetPtr F, const NuRule& rule);

// Validity of the index structure, the indexed set, completeness of nu,
// the unit law, naturality and the pentagon. Notes the classification.
CheckReport check_lax_to_set(const LaxToSet& x, unsigned jobs = 1);
CheckReport check_lax_omon_functor(const LaxToSet& x, unsigned jobs = 1);
std::string nu_entry_text(const LaxToSet& x, OpId p, std::span<const ObjId> objs);

/// A discrete fibration that is a strict O-monoidal functor.
struct OFibObject {
  DFibPtr p;
  OMonPtr total_omon;
  OMonPtr base_omon;
  bool operator==(const OFibObject& o) const;
};

using OFibPtr = std::shared_ptr<const OFibObject>;

CheckReport check_ofib_object(const OFibObject& y, unsigned jobs = 1);

/// 1-cells of ISet^{O,lax}: a lax functor U between the index structures
/// and a monoidal zeta : F => G∘U.
struct LaxToSetMorphism {
  LaxToSetPtr dom;
  LaxToSetPtr cod;
  LaxOMonFunctor U;
  std::vector<FinFunction> zeta;  // zeta[i] : F(i) -> G(U i)

  ISetMorphism underlying() const;
  bool operator==(const LaxToSetMorphism& o) const;
};

struct LaxToSet2Morphism {
  LaxToSetMorphism src;
  LaxToSetMorphism tgt;
  NatTransform eta;  // src.U => tgt.U
  bool operator==(const LaxToSet2Morphism&) const = default;
};

/// 1-cells of OFib: lax functors on totals and bases forming a commuting
/// square with F1's comparisons lying over F0's.
struct OFibMorphism {
  OFibPtr dom;
  OFibPtr cod;
  LaxOMonFunctor F1;
  LaxOMonFunctor F0;

  DFibMorphism underlying() const;
  bool operator==(const OFibMorphism& o) const;
};

struct OFib2Morphism {
  OFibMorphism src;
  OFibMorphism tgt;
  NatTransform mu1;
  NatTransform mu0;
  bool operator==(const OFib2Morphism&) const = default;
};

CheckReport check_cell(const LaxToSetMorphism& m);
CheckReport check_cell(const LaxToSet2Morphism& a);
CheckReport check_cell(const OFibMorphism& m);
CheckReport check_cell(const OFib2Morphism& a);

LaxToSetMorphism identity_cell(const LaxToSetPtr& x);
OFibMorphism identity_cell(const OFibPtr& y);
LaxToSet2Morphism identity_cell(const LaxToSetMorphism& m);
OFib2Morphism identity_cell(const OFibMorphism& m);
LaxToSetMorphism compose(const LaxToSetMorphism& g, const LaxToSetMorphism& f);
OFibMorphism compose(const OFibMorphism& g, const OFibMorphism& f);
LaxToSet2Morphism vertical_compose(const LaxToSet2Morphism& b, const LaxToSet2Morphism& a);
OFib2Morphism vertical_compose(const OFib2Morphism& b, const OFib2Morphism& a);

/// ∫^O. The total tensor is (x)_p((i_k, x_k))_k = ((x)_p i, nu_p[i](x)) and
/// total phi components are the lifts of the base ones. Throws
/// CheckFailure when the input does not validate.
OFibPtr omon_groth(const LaxToSetPtr& x);
OFibMorphism omon_groth(const LaxToSetMorphism& m, const OFibPtr& dom, const OFibPtr& cod);
OFib2Morphism omon_groth(const LaxToSet2Morphism& a, const OFibMorphism& src, const OFibMorphism& tgt);

/// The inverse direction: fibers with nu read off the total tensors.
LaxToSetPtr omon_transpose(const OFibPtr& y);
LaxToSetMorphism omon_transpose(const OFibMorphism& m, const LaxToSetPtr& dom, const LaxToSetPtr& cod);
LaxToSet2Morphism omon_transpose(const OFib2Morphism& a, const LaxToSetMorphism& src,
                                 const LaxToSetMorphism& tgt);

// The round-trip isomorphisms as O-monoidal cells, built from Φ and Ψ.
LaxToSetMorphism omon_phi(const LaxToSetPtr& x, const LaxToSetPtr& transposed_groth);
LaxToSetMorphism omon_phi_inverse(const LaxToSetPtr& x, const LaxToSetPtr& transposed_groth);
OFibMorphism omon_psi(const OFibPtr& y, const OFibPtr& groth_transposed);
OFibMorphism omon_psi_inverse(const OFibPtr& y, const OFibPtr& groth_transposed);

// Products. Factors share one operad; the empty product is the terminal
// structure over `o`, a unary product is the factor itself.
OMonPtr terminal_omon(const OperadPtr& o);
OMonPtr product_omon(const OperadPtr& o, const std::vector<OMonPtr>& factors);
OFibPtr product_ofib(const OperadPtr& o, const std::vector<OFibPtr>& factors);
// The identity fibration on c with both structures equal to c.
OFibPtr identity_ofib(const OMonPtr& c);
// Constant singleton with the only possible nu.
LaxToSetPtr constant_singleton(const OMonPtr& index);

// Restriction along an operad morphism, objects and cells.
LaxToSet restrict_along_operad_morphism(const OperadMorphism& h, const LaxToSet& x, const OMonPtr& index);
OFibObject restrict_along_operad_morphism(const OperadMorphism& h, const OFibObject& y, const OMonPtr& total,
                                          const OMonPtr& base);
// Endpoints are the restrictions of the cell's endpoints.
LaxToSetMorphism restrict_along_operad_morphism(const OperadMorphism& h, const LaxToSetMorphism& m,
                                                const LaxToSetPtr& dom, const LaxToSetPtr& cod);
OFibMorphism restrict_along_operad_morphism(const OperadMorphism& h, const OFibMorphism& m, const OFibPtr& dom,
                                            const OFibPtr& cod);

/// Shipped O-monoidal corpus: the graded-monoid family over Assoc, meet
/// families over Comm and QConv(Boolean), cells among them.
/// Invariant: ofibs[k] = omon_groth(lax[k]) for k < lax.size(); further
/// OFib objects follow.
struct OCorpus {
  std::uint64_t seed = 20240229;
  std::vector<OperadPtr> operads;
  std::vector<OperadMorphism> operad_morphisms;
  std::vector<OMonPtr> structures;  // index and stand-alone structures
  std::vector<LaxToSetPtr> lax;
  std::vector<OFibPtr> ofibs;
  std::vector<LaxToSetMorphism> lax_cells;
  std::vector<OFibMorphism> ofib_cells;
  std::vector<LaxToSet2Morphism> lax_2cells;
  std::vector<OFib2Morphism> ofib_2cells;
};

struct OCorpusParams {
  std::uint64_t seed = 20240229;
  std::size_t max_arity = 3;
  bool include_products = true;   // the product of two graded monoids
  std::size_t cells_per_pair = 2;  // sampled when more cells exist
};

OCorpus generate_ocorpus(const OCorpusParams& params);
// Cells among the given objects: the identity and sampled monoidal
// transformations over lax functors between the index structures, plus
// their images on the OFib side.
void generate_ocells(OCorpus& corpus, std::size_t cells_per_pair);

// Both round trips with O-monoidal Φ/Ψ, strict functoriality on corpus
// 1-cells and composable pairs, 2-cell images and the fixed-base
// restriction. Inputs that fail validation are reported and skipped.
CheckReport omon_roundtrip_check(const OCorpus& corpus, unsigned jobs = 1);
// Every corpus object and cell restricted along every corpus operad
// morphism into its operad, then re-validated.
CheckReport restriction_report(const OCorpus& corpus, unsigned jobs = 1);

}  // namespace opgroth
