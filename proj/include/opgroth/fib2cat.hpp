#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opgroth/fincat.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

struct FinSet {
  std::vector<std::string> elements;

  std::size_t size() const { return elements.size(); }
  const std::string& label(std::size_t x) const { return elements.at(x); }
  std::optional<std::size_t> find(std::string_view label) const;
  bool operator==(const FinSet&) const = default;
};

// A total function is stored as its value list; the codomain lives with
// whatever structure owns the function.
using FinFunction = std::vector<std::size_t>;

FinSet singleton_set(std::string label = "*");
FinSet product_set(std::span<const FinSet> factors);  // labels "(x,y)"

/// A functor from a finite category to finite sets.
struct IndexedSet {
  CatPtr index;
  std::vector<FinSet> on_obj;
  std::vector<FinFunction> on_mor;  // on_mor[u] : F(src u) -> F(tgt u)

  std::size_t apply(MorId u, std::size_t x) const { return on_mor.at(u.index()).at(x); }
  bool operator==(const IndexedSet& o) const;
};

using ISetPtr = std::shared_ptr<const IndexedSet>;

CheckReport validate_indexed_set(const IndexedSet& F);
IndexedSet constant_indexed_set(const CatPtr& index, const FinSet& value);

/// A functor proj : total -> base, expected to have unique lifts.
struct DiscreteFibration {
  CatFunctor proj;

  const FinCat& total() const { return *proj.dom; }
  const FinCat& base() const { return *proj.cod; }
  bool operator==(const DiscreteFibration& o) const { return proj == o.proj; }
};

using DFibPtr = std::shared_ptr<const DiscreteFibration>;

CheckReport check_discrete_fibration(const DiscreteFibration& p);
// Number of morphisms of the total category with source c lying over f.
std::size_t lift_count(const DiscreteFibration& p, ObjId c, MorId f);
// The unique lift of f starting at c. Throws std::invalid_argument on a
// source mismatch and std::logic_error when the lift is not unique.
MorId lift(const DiscreteFibration& p, ObjId c, MorId f);
DiscreteFibration identity_fibration(const CatPtr& c);

struct DFibMorphism {
  DFibPtr dom;
  DFibPtr cod;
  CatFunctor f1;  // on totals
  CatFunctor f0;  // on bases
  bool operator==(const DFibMorphism& o) const;
};

struct DFib2Morphism {
  DFibMorphism src;
  DFibMorphism tgt;
  NatTransform mu1;
  NatTransform mu0;
  bool operator==(const DFib2Morphism& o) const = default;
};

CheckReport validate_dfib_cell(const DFibMorphism& m);
CheckReport validate_dfib_cell(const DFib2Morphism& m);
DFibMorphism identity_cell(const DFibPtr& p);
DFib2Morphism identity_cell(const DFibMorphism& m);
DFibMorphism compose(const DFibMorphism& g, const DFibMorphism& f);       // g∘f
DFib2Morphism vertical_compose(const DFib2Morphism& b, const DFib2Morphism& a);  // b·a
DFib2Morphism whisker_left(const DFibMorphism& h, const DFib2Morphism& a);   // h∘a
DFib2Morphism whisker_right(const DFib2Morphism& a, const DFibMorphism& f);  // a∘f
// Both component functors are isomorphisms; the inverse square then commutes.
bool is_invertible(const DFibMorphism& m);

struct ISetMorphism {
  ISetPtr dom;
  ISetPtr cod;
  CatFunctor M;
  std::vector<FinFunction> mu;  // mu[i] : F(i) -> G(M i)
  bool operator==(const ISetMorphism& o) const;
};

struct ISet2Morphism {
  ISetMorphism src;
  ISetMorphism tgt;
  NatTransform eta;  // src.M => tgt.M
  bool operator==(const ISet2Morphism& o) const = default;
};

CheckReport validate_iset_cell(const ISetMorphism& m);
CheckReport validate_iset_cell(const ISet2Morphism& m);
ISetMorphism identity_cell(const ISetPtr& F);
ISet2Morphism identity_cell(const ISetMorphism& m);
ISetMorphism compose(const ISetMorphism& g, const ISetMorphism& f);
ISet2Morphism vertical_compose(const ISet2Morphism& b, const ISet2Morphism& a);
ISet2Morphism whisker_left(const ISetMorphism& h, const ISet2Morphism& a);
ISet2Morphism whisker_right(const ISet2Morphism& a, const ISetMorphism& f);
// M is an isomorphism and every component is a bijection.
bool is_invertible(const ISetMorphism& m);

// Finite strict 2-products. The empty product is the identity fibration on
// the terminal category, resp. the singleton indexed set over it.
struct DFibProduct {
  DFibPtr fibration;
  ProductCategory totals;
  ProductCategory bases;
  std::vector<DFibMorphism> projections;
};
DFibProduct product_dfib(const std::vector<DFibPtr>& factors);
// The unique 1-cell into the product with the given projections.
DFibMorphism tuple_cell(const DFibProduct& prod, const std::vector<DFibMorphism>& legs);

struct ISetProduct {
  ISetPtr indexed_set;
  ProductCategory index;
  std::vector<ISetMorphism> projections;
};
ISetProduct product_iset(const std::vector<ISetPtr>& factors);
ISetMorphism tuple_cell(const ISetProduct& prod, const std::vector<ISetMorphism>& legs);

// A set as the identity fibration on its discrete category, and as the
// constant singleton indexed set over that category.
DFibPtr set_as_dfib(const FinSet& x);
ISetPtr set_as_iset(const FinSet& x);

}  // namespace opgroth
