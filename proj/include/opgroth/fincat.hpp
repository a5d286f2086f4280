#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "opgroth/report.hpp"

namespace opgroth {

/// Dense 0-based identifier scoped to one category.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr std::size_t index() const { return value; }
  auto operator<=>(const Id&) const = default;
};

using ObjId = Id<struct ObjTag>;
using MorId = Id<struct MorTag>;

struct Arrow {
  std::string label;
  ObjId src;
  ObjId tgt;
  bool operator==(const Arrow&) const = default;
};

/// A finite category given by an explicit composition table.
///
/// `table` has one slot per ordered pair (g, f), laid out as
/// `g * num_morphisms() + f`, holding g∘f. Slots for non-composable pairs
/// are expected to be empty; validate_category reports any slot that is
/// missing, superfluous, or ill-typed. Construction only rejects input that
/// cannot be indexed at all (ids out of range, wrong table size).
class FinCat {
 public:
  FinCat() = default;
  FinCat(std::vector<std::string> objects, std::vector<Arrow> morphisms,
         std::vector<MorId> identities, std::vector<std::optional<MorId>> table);

  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_morphisms() const { return morphisms_.size(); }

  const std::string& label(ObjId a) const { return objects_.at(a.index()); }
  const std::string& label(MorId f) const { return morphisms_.at(f.index()).label; }
  const Arrow& arrow(MorId f) const { return morphisms_.at(f.index()); }
  ObjId src(MorId f) const { return arrow(f).src; }
  ObjId tgt(MorId f) const { return arrow(f).tgt; }
  MorId identity(ObjId a) const { return identities_.at(a.index()); }
  bool is_identity(MorId f) const { return identity(src(f)) == f; }

  bool composable(MorId g, MorId f) const { return src(g) == tgt(f); }
  std::optional<MorId> try_compose(MorId g, MorId f) const;
  // g∘f; throws std::logic_error when the slot is empty.
  MorId compose(MorId g, MorId f) const;

  std::optional<ObjId> find_object(std::string_view label) const;
  std::optional<MorId> find_morphism(std::string_view label) const;
  std::vector<MorId> hom(ObjId a, ObjId b) const;
  std::optional<MorId> inverse(MorId f) const;

  const std::vector<std::string>& object_labels() const { return objects_; }
  const std::vector<Arrow>& arrows() const { return morphisms_; }
  const std::vector<MorId>& identities() const { return identities_; }
  const std::vector<std::optional<MorId>>& table() const { return table_; }

  bool operator==(const FinCat& other) const;

 private:
  std::vector<std::string> objects_;
  std::vector<Arrow> morphisms_;
  std::vector<MorId> identities_;
  std::vector<std::optional<MorId>> table_;
  std::unordered_map<std::string, std::uint32_t> object_index_;
  std::unordered_map<std::string, std::uint32_t> morphism_index_;
};

using CatPtr = std::shared_ptr<const FinCat>;

bool same_category(const CatPtr& a, const CatPtr& b);

/// Incremental construction used by fixtures and the DSL. Each object gets
/// an identity labelled "id_<object>"; unit-law compositions are filled in
/// unless set explicitly.
class FinCatBuilder {
 public:
  ObjId add_object(std::string label);
  MorId add_arrow(std::string label, ObjId src, ObjId tgt);
  void set_compose(MorId g, MorId f, MorId h);

  std::optional<ObjId> find_object(std::string_view label) const;
  std::optional<MorId> find_morphism(std::string_view label) const;
  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_morphisms() const { return arrows_.size(); }

  FinCat build() const;
  CatPtr build_shared() const { return std::make_shared<const FinCat>(build()); }

 private:
  std::vector<std::string> objects_;
  std::vector<Arrow> arrows_;
  std::vector<MorId> identities_;
  std::vector<std::tuple<MorId, MorId, MorId>> explicit_;
};

CheckReport validate_category(const FinCat& c);

CatPtr terminal_category();
CatPtr discrete_category(std::vector<std::string> labels);
// Thin category of the total order 0 < 1 < ... < n-1; objects "0".."n-1",
// the arrow i -> j (i < j) labelled "le<i><j>".
CatPtr chain_category(std::size_t n);

struct CatFunctor {
  CatPtr dom;
  CatPtr cod;
  std::vector<ObjId> on_obj;
  std::vector<MorId> on_mor;

  ObjId operator()(ObjId a) const { return on_obj.at(a.index()); }
  MorId operator()(MorId f) const { return on_mor.at(f.index()); }
  bool operator==(const CatFunctor& other) const;
};

CatFunctor identity_functor(const CatPtr& c);
CatFunctor compose(const CatFunctor& g, const CatFunctor& f);  // g∘f
CheckReport validate_functor(const CatFunctor& f);
bool is_isomorphism(const CatFunctor& f);
// All functors dom -> cod in lexicographic order of their tables.
std::vector<CatFunctor> enumerate_functors(const CatPtr& dom, const CatPtr& cod);

struct NatTransform {
  CatFunctor dom;
  CatFunctor cod;
  std::vector<MorId> components;

  MorId operator[](ObjId a) const { return components.at(a.index()); }
  bool operator==(const NatTransform& other) const = default;
};

NatTransform identity_transformation(const CatFunctor& f);
NatTransform vertical_compose(const NatTransform& beta, const NatTransform& alpha);  // beta·alpha
NatTransform whisker_left(const CatFunctor& h, const NatTransform& alpha);           // H∘alpha
NatTransform whisker_right(const NatTransform& alpha, const CatFunctor& f);          // alpha∘F
NatTransform horizontal_compose(const NatTransform& beta, const NatTransform& alpha);
CheckReport validate_natural_transformation(const NatTransform& t);

/// Cartesian product with tuples ordered lexicographically (factor 0
/// slowest). A unary product is the factor itself with the identity
/// projection; the empty product is the terminal category.
struct ProductCategory {
  CatPtr category;
  std::vector<CatPtr> factors;
  std::vector<CatFunctor> projections;

  ObjId object_of(std::span<const ObjId> parts) const;
  MorId morphism_of(std::span<const MorId> parts) const;
  std::vector<ObjId> object_parts(ObjId a) const;
  std::vector<MorId> morphism_parts(MorId f) const;
};

ProductCategory product_category(std::vector<CatPtr> factors);
ProductCategory power_category(const CatPtr& base, std::size_t n);
// The unique functor into the product whose projections are `legs`.
CatFunctor tuple_functor(const ProductCategory& prod, const CatPtr& source,
                         std::span<const CatFunctor> legs);
// Product of functors F_k: C_k -> D_k as a functor between products.
CatFunctor product_functor(const ProductCategory& dom, const ProductCategory& cod,
                           std::span<const CatFunctor> parts);

}  // namespace opgroth
