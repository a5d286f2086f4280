#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "opgroth/fib2cat.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

/// The category of elements. Objects are pairs (i, x) labelled "<i>.<x>",
/// ordered by i then x; morphisms are pairs (f, x) with x in F(src f),
/// ordered by f then x and labelled "<f>@<i>.<x>" ("id_<i>.<x>" for
/// identities).
DFibPtr groth(const ISetPtr& F);
DFibMorphism groth(const ISetMorphism& m);
DFibMorphism groth(const ISetMorphism& m, const DFibPtr& dom, const DFibPtr& cod);
DFib2Morphism groth(const ISet2Morphism& a);

ObjId groth_object(const IndexedSet& F, ObjId i, std::size_t x);
MorId groth_morphism(const IndexedSet& F, MorId f, std::size_t x);

/// Fibers as an indexed set over the base. Elements carry the labels of
/// the total objects, in total-object order.
ISetPtr transpose(const DFibPtr& p);
ISetMorphism transpose(const DFibMorphism& m);
ISetMorphism transpose(const DFibMorphism& m, const ISetPtr& dom, const ISetPtr& cod);
ISet2Morphism transpose(const DFib2Morphism& a);

// Position of c inside the fiber over p(c).
std::size_t fiber_position(const DiscreteFibration& p, ObjId c);

// phi(F) : T(∫F) -> F and psi(p) : ∫(T p) -> p, with explicit inverses.
ISetMorphism phi(const ISetPtr& F);
ISetMorphism phi_inverse(const ISetPtr& F);
DFibMorphism psi(const DFibPtr& p);
DFibMorphism psi_inverse(const DFibPtr& p);

// Validity plus invertibility of a claimed component.
CheckReport check_phi_component(const ISetPtr& F, const ISetMorphism& component);
CheckReport check_psi_component(const DFibPtr& p, const DFibMorphism& component);

/// Comparison 1-cells from the construction of a product to the product of
/// the constructions: ∫(F1 x .. x Fn) -> ∫F1 x .. x ∫Fn and
/// T(p1 x .. x pn) -> Tp1 x .. x Tpn.
DFibMorphism groth_product_comparison(const std::vector<ISetPtr>& factors);
ISetMorphism transpose_product_comparison(const std::vector<DFibPtr>& factors);

struct CorpusParams {
  std::uint64_t seed = 20240229;
  std::size_t objects = 40;   // split evenly between the two sides
  std::size_t one_cells = 60;
  std::size_t two_cells = 20;
  std::size_t max_values = 3;
};

struct GrothCorpus {
  CorpusParams params;
  std::vector<ISetPtr> isets;
  std::vector<DFibPtr> dfibs;
  std::vector<ISetMorphism> iset_cells;
  std::vector<DFibMorphism> dfib_cells;
  std::vector<ISet2Morphism> iset_2cells;
  std::vector<DFib2Morphism> dfib_2cells;

  std::size_t num_objects() const { return isets.size() + dfibs.size(); }
  std::size_t num_one_cells() const { return iset_cells.size() + dfib_cells.size(); }
  std::size_t num_two_cells() const { return iset_2cells.size() + dfib_2cells.size(); }
};

// Index categories with at most 3 objects and 6 morphisms.
std::vector<CatPtr> corpus_categories();

// A random functor into finite sets of size <= max_values, by rejection.
std::optional<IndexedSet> random_indexed_set(const CatPtr& index, std::size_t max_values, std::mt19937_64& rng);
std::optional<ISetMorphism> random_iset_cell(const ISetPtr& F, const ISetPtr& G, std::mt19937_64& rng);
std::optional<ISet2Morphism> random_iset_2cell(const ISetMorphism& m, const ISetMorphism& n,
                                               std::mt19937_64& rng);

// Seeded objects and cells. DFib objects are ∫ of fresh indexed sets with
// total objects and morphisms shuffled and relabelled.
GrothCorpus generate_corpus(const CorpusParams& params);
// Cells among the given objects, generated from the same seed.
GrothCorpus generate_cells(std::vector<ISetPtr> isets, std::vector<DFibPtr> dfibs, const CorpusParams& params);

// Invertibility and naturality of Φ and Ψ against every corpus cell, and
// strict functoriality of ∫ and T on every composable corpus pair.
CheckReport roundtrip_report(const GrothCorpus& corpus, unsigned jobs = 1);

}  // namespace opgroth
