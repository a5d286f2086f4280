#pragma once

#include "opgroth/fib2cat.hpp"
#include "opgroth/fincat.hpp"
#include "opgroth/ogroth.hpp"
#include "opgroth/omon.hpp"
#include "opgroth/operad.hpp"
#include "opgroth/spec.hpp"

namespace opgroth::fixtures {

// Objects a, b and one arrow u : a -> b.
CatPtr walk();
// The discrete category {0, 1}; the carrier of the Z/2 structure.
CatPtr dz2();
// The poset 0 <= 1.
CatPtr l2();
// One object * and the group Z/2 = {id_*, s} of endomorphisms.
CatPtr bz2();

// The Z/2-graded monoid {p, q, r} as an indexed set over dz2():
// degree 0 holds p, q and degree 1 holds r.
ISetPtr grade_iset();

// Monoids as algebras over any builtin operad (see monoid_algebra).
SetAlgebra z2_algebra(const OperadPtr& o);     // addition mod 2 on {0, 1}
SetAlgebra meet_algebra(const OperadPtr& o);   // meet on {0, 1}, unit 1
SetAlgebra grade_algebra(const OperadPtr& o);  // unit p, q*q = q, r*r = q, q*r = r*q = r

// Strict structures: Z/2 on dz2() and meets on l2().
OMonPtr dz2_omon(const OperadPtr& o);
OMonPtr l2_omon(const OperadPtr& o);

UnbiasedMonoidal z2_unbiased(std::size_t max_arity);
UnbiasedMonoidal l2_unbiased(std::size_t max_arity);
// Every tensor is * and sums morphisms; alpha_f = s^{c(f)} with
// c(f) = b(m) + b(n) + sum_i b(|f^-1(i)|) mod 2 and b(k) = [k = 2]. Not strict,
// yet coherent because c is a coboundary.
UnbiasedMonoidal twisted_bz2_unbiased(std::size_t max_arity);

// Lax functors into Set. `index` must be dz2_omon, l2_omon or the
// extension of twisted_bz2_unbiased over the respective operad.
// GRADE over dz2: nu multiplies in the graded monoid.
LaxToSetPtr grade_laxtoset(const OMonPtr& index);
// Over dz2: F(0) = {e}, F(1) empty.
LaxToSetPtr unit_fiber_laxtoset(const OMonPtr& index);
// Over the twisted BZ2: F(*) = {a, b}, s swaps, nu_n = xor of the inputs
// plus [n = 2].
LaxToSetPtr torsor_laxtoset(const OMonPtr& index);
// Over l2: F(0) = {*}, F(1) = {a, b}, F(le01)(*) = a; nu is the meet in
// the chain * < a < b.
LaxToSetPtr meet_laxtoset(const OMonPtr& index);
// Over l2: F(0) empty, F(1) = {*}.
LaxToSetPtr top_fiber_laxtoset(const OMonPtr& index);

// Documents shipped as text under fixtures/, keyed by file name.
std::vector<std::pair<std::string, SpecDocument>> shipped_documents();

// A shipped file derived from another by one textual edit.
struct BrokenVariant {
  std::string file;
  std::string source;
  std::string from;  // must occur exactly once in the source text
  std::string to;
  int expected_exit;  // of `check`
};
std::vector<BrokenVariant> broken_variants();
// The variant's text from the written source document.
std::string variant_text(const BrokenVariant& v);

}  // namespace opgroth::fixtures
