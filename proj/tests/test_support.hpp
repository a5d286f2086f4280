#pragma once

#include <functional>
#include <vector>

#include "opgroth/fincat.hpp"

namespace opgroth::testing {

// Every valid functor dom -> cod, by brute force over object assignments and
// then hom-constrained morphism assignments. Meant for categories with a
// handful of morphisms.
inline std::vector<CatFunctor> all_functors(const CatPtr& dom, const CatPtr& cod) {
  std::vector<CatFunctor> out;
  const std::size_t no = dom->num_objects(), nm = dom->num_morphisms();
  std::vector<ObjId> obj(no);
  std::vector<MorId> mor(nm);
  std::function<void(std::size_t)> mors = [&](std::size_t k) {
    if (k == nm) {
      CatFunctor f{dom, cod, obj, mor};
      if (validate_functor(f).ok()) out.push_back(f);
      return;
    }
    const Arrow& a = dom->arrow(MorId(k));
    for (MorId g : cod->hom(obj[a.src.index()], obj[a.tgt.index()])) {
      mor[k] = g;
      mors(k + 1);
    }
  };
  std::function<void(std::size_t)> objs = [&](std::size_t k) {
    if (k == no) {
      mors(0);
      return;
    }
    for (std::size_t c = 0; c < cod->num_objects(); ++c) {
      obj[k] = ObjId(c);
      objs(k + 1);
    }
  };
  objs(0);
  return out;
}

}  // namespace opgroth::testing
