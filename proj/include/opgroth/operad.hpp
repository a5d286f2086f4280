#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opgroth/fincat.hpp"
#include "opgroth/finmap.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

/// Finite semiring given by dense operation tables over element indices.
struct Semiring {
  std::string name;
  std::vector<std::string> elements;
  std::vector<std::size_t> add;  // add[a * size + b]
  std::vector<std::size_t> mul;
  std::size_t zero = 0;
  std::size_t one = 0;

  std::size_t size() const { return elements.size(); }
  std::size_t plus(std::size_t a, std::size_t b) const { return add.at(a * size() + b); }
  std::size_t times(std::size_t a, std::size_t b) const { return mul.at(a * size() + b); }
  std::optional<std::size_t> find(std::string_view label) const;
  // Tables only; the name is ignored.
  bool operator==(const Semiring& o) const {
    return elements == o.elements && add == o.add && mul == o.mul && zero == o.zero && one == o.one;
  }
};

Semiring boolean_semiring();
CheckReport check_semiring(const Semiring& r);

using OpId = Id<struct OpTag>;

struct CompKey {
  FinMap f;
  OpId p;
  std::vector<OpId> qs;
  auto operator<=>(const CompKey&) const = default;
};

/// Arity-truncated operad. Carriers O(0..N) are labelled finite sets.
/// Builtins compute composition from a rule; explicit entries take
/// precedence over the rule and are the only source for table operads.
class Operad {
 public:
  enum class Kind { comm, assoc, qconv, table };

  Operad(std::string name, Kind kind, std::size_t max_arity,
         std::vector<std::vector<std::string>> carriers, OpId unit);

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  Kind kind() const { return kind_; }
  std::size_t max_arity() const { return max_arity_; }

  std::size_t arity_size(std::size_t n) const { return carriers_.at(n).size(); }
  const std::vector<std::string>& carrier(std::size_t n) const { return carriers_.at(n); }
  const std::string& label(std::size_t n, OpId p) const { return carriers_.at(n).at(p.index()); }
  std::optional<OpId> find(std::size_t n, std::string_view label) const;
  OpId unit() const { return unit_; }

  // mu_f(p; qs). Returns nullopt when no value is defined. Throws
  // std::domain_error("domain-empty") when an empty fiber must draw from an
  // empty O(0), and std::invalid_argument for other ill-typed requests.
  std::optional<OpId> compose(const FinMap& f, OpId p, std::span<const OpId> qs) const;
  OpId compose_checked(const FinMap& f, OpId p, std::span<const OpId> qs) const;

  void set_entry(const CompKey& key, OpId value);
  const std::map<CompKey, OpId>& entries() const { return entries_; }

  const std::optional<Semiring>& semiring() const { return semiring_; }
  void set_semiring(Semiring r);
  // Assoc: the permutation named by an element of O(n).
  const FinMap& permutation(std::size_t n, OpId p) const { return perms_.at(n).at(p.index()); }
  OpId permutation_id(const FinMap& sigma) const;
  // QConv: coordinates of an element of O(n) as semiring indices.
  const std::vector<std::size_t>& coordinates(std::size_t n, OpId p) const {
    return coords_.at(n).at(p.index());
  }

  // "mu [2,1,1] p q1 q2" in file notation.
  std::string entry_text(const FinMap& f, OpId p, std::span<const OpId> qs) const;

  // Semantic equality: the name is ignored.
  bool operator==(const Operad& o) const;

 private:
  friend std::shared_ptr<const Operad> build_assoc(std::size_t);
  friend std::shared_ptr<const Operad> build_qconv(const Semiring&, std::size_t);

  std::optional<OpId> rule(const FinMap& f, OpId p, std::span<const OpId> qs) const;

  std::string name_;
  Kind kind_;
  std::size_t max_arity_;
  std::vector<std::vector<std::string>> carriers_;
  OpId unit_;
  std::map<CompKey, OpId> entries_;
  std::optional<Semiring> semiring_;
  std::vector<std::vector<FinMap>> perms_;
  std::map<FinMap, OpId> perm_index_;
  std::vector<std::vector<std::vector<std::size_t>>> coords_;
  std::vector<std::map<std::vector<std::size_t>, OpId>> coord_index_;
};

using OperadPtr = std::shared_ptr<const Operad>;

std::string_view to_string(Operad::Kind k);

OperadPtr build_comm(std::size_t max_arity);
OperadPtr build_assoc(std::size_t max_arity);
OperadPtr build_qconv(const Semiring& r, std::size_t max_arity);

// Calls fn(qs) for every tuple qs with qs[i] in O(|f^{-1}(i)|), in
// lexicographic order. Empty fibers over an empty O(0) yield no tuples.
template <class Fn>
void for_each_operand_tuple(const Operad& o, const FinMap& f, Fn&& fn);

CheckReport check_operad_axioms(const Operad& o);
// Associativity on `samples` pseudorandom instances; the seed is recorded
// in the report notes.
CheckReport check_operad_associativity_sampled(const Operad& o, std::size_t samples, std::uint64_t seed);

// Table-backed copy holding every composition with arities <= N.
Operad tabulate(const Operad& o);

struct OperadMorphism {
  OperadPtr dom;
  OperadPtr cod;
  std::vector<std::vector<OpId>> maps;  // maps[n][p] in cod's O(n)

  OpId operator()(std::size_t n, OpId p) const { return maps.at(n).at(p.index()); }
  std::vector<OpId> apply(std::span<const OpId> ps, std::span<const std::size_t> arities) const;
};

CheckReport check_operad_morphism(const OperadMorphism& h);
OperadMorphism identity_morphism(const OperadPtr& o);
OperadMorphism terminal_morphism(const OperadPtr& o);
OperadMorphism compose(const OperadMorphism& b, const OperadMorphism& a);  // b∘a

}  // namespace opgroth

#include "opgroth/tuples.hpp"

namespace opgroth {

template <class Fn>
void for_each_operand_tuple(const Operad& o, const FinMap& f, Fn&& fn) {
  const auto sizes = fiber_sizes(f);
  std::vector<std::size_t> radices;
  radices.reserve(sizes.size());
  for (std::size_t s : sizes) radices.push_back(o.arity_size(s));
  std::vector<OpId> qs(sizes.size());
  for_each_tuple(radices, [&](std::span<const std::size_t> d) {
    for (std::size_t i = 0; i < d.size(); ++i) qs[i] = OpId(d[i]);
    fn(std::span<const OpId>(qs));
  });
}

}  // namespace opgroth
