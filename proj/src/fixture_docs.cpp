#include <stdexcept>

#include "opgroth/fixtures.hpp"
#include "opgroth/groth.hpp"

namespace opgroth::fixtures {

namespace {

SpecDocument walk_doc() {
  SpecDocument d;
  d.add("walk", walk());
  return d;
}

SpecDocument dz2_doc(bool with_grade) {
  SpecDocument d;
  const OperadPtr assoc = build_assoc(3);
  const OMonPtr sum = dz2_omon(assoc);
  d.add("assoc", assoc);
  d.add("dz2", sum->base());
  d.add("dz2_sum", sum);
  if (with_grade) {
    const LaxToSetPtr g = grade_laxtoset(sum);
    d.add("grade_sets", g->F);
    d.add("grade", g);
  }
  return d;
}

SpecDocument l2_doc() {
  SpecDocument d;
  const OperadPtr comm = build_comm(3);
  const OMonPtr meet = l2_omon(comm);
  d.add("comm", comm);
  d.add("l2", meet->base());
  d.add("l2_meet", meet);
  return d;
}

// One section of every kind.
SpecDocument sections_doc() {
  SpecDocument d;
  const Semiring b = boolean_semiring();
  const OperadPtr qc = build_qconv(b, 2);
  d.add("bool", b);
  d.add("qconv2", qc);
  d.add("comm2", std::make_shared<const Operad>(tabulate(*build_comm(2))));
  const CatPtr w = walk();
  const OMonPtr meet = l2_omon(qc);
  const CatPtr L = meet->base();
  d.add("walk", w);
  d.add("l2", L);
  const CatFunctor incl{w, L, {ObjId(0), ObjId(1)}, {L->identity(ObjId(0)), L->identity(ObjId(1)), *L->find_morphism("le01")}};
  const CatFunctor top{w, L, {ObjId(1), ObjId(1)}, {L->identity(ObjId(1)), L->identity(ObjId(1)), L->identity(ObjId(1))}};
  d.add("incl", incl);
  d.add("top", top);
  d.add("to_top", NatTransform{incl, top, {*L->find_morphism("le01"), L->identity(ObjId(1))}});
  const ISetPtr F = std::make_shared<const IndexedSet>(
      IndexedSet{w, {FinSet{{"x", "y"}}, FinSet{{"z"}}}, {{0, 1}, {0}, {0, 0}}});
  d.add("walk_sets", F);
  d.add("walk_elements", groth(F));
  d.add("l2_meet", meet);
  const LaxOMonFunctor id = identity_lax_functor(meet);
  d.add("l2_id", id);
  d.add("l2_id_id", identity_transformation(id));
  const LaxToSetPtr chain = meet_laxtoset(meet);
  d.add("meet_chain", chain);
  d.add("meet_elements", omon_groth(chain));
  return d;
}

SpecDocument corpus_small_doc() {
  CorpusParams params;
  params.objects = 8;
  const GrothCorpus c = generate_corpus(params);
  SpecDocument d;
  for (std::size_t k = 0; k < c.isets.size(); ++k) d.add("iset" + std::to_string(k), c.isets[k]);
  for (std::size_t k = 0; k < c.dfibs.size(); ++k) d.add("fib" + std::to_string(k), c.dfibs[k]);
  return d;
}

SpecDocument ocorpus_small_doc() {
  SpecDocument d = dz2_doc(true);
  const OperadPtr comm = build_comm(3);
  const OMonPtr meet = l2_omon(comm);
  d.add("comm", comm);
  d.add("l2", meet->base());
  d.add("l2_meet", meet);
  const LaxToSetPtr chain = meet_laxtoset(meet);
  d.add("meet_sets", chain->F);
  d.add("meet_chain", chain);
  d.add("l2_point", constant_singleton(meet));
  d.add("l2_self", identity_ofib(meet));
  return d;
}

}  // namespace

std::vector<std::pair<std::string, SpecDocument>> shipped_documents() {
  return {{"walk.cat", walk_doc()},          {"dz2.omon", dz2_doc(false)},
          {"l2.omon", l2_doc()},             {"grade.laxtoset", dz2_doc(true)},
          {"sections.spec", sections_doc()}, {"corpus_small.spec", corpus_small_doc()},
          {"ocorpus_small.spec", ocorpus_small_doc()}};
}

std::vector<BrokenVariant> broken_variants() {
  return {
      {"walk_unit.cat", "walk.cat", "u : a -> b\n", "u : a -> b\ncompose u id_a = id_b\n", 1},
      {"walk_syntax.cat", "walk.cat", "u : a -> b\n", "u : a b\n", 2},
      {"grade_nu.laxtoset", "grade.laxtoset", "nu s1 (0) = [p, q]\n", "nu s1 (0) = [q, q]\n", 1},
      {"grade_ref.laxtoset", "grade.laxtoset", "iset = grade_sets\n", "iset = grade_set\n", 2},
      {"dz2_tensor.omon", "dz2.omon", "tensor s12 (1,1) = 0\n", "tensor s12 (1,1) = 1\n", 1},
  };
}

std::string variant_text(const BrokenVariant& v) {
  for (const auto& [file, doc] : shipped_documents()) {
    if (file != v.source) continue;
    std::string text = write_spec(doc);
    const std::size_t at = text.find(v.from);
    if (at == std::string::npos || text.find(v.from, at + 1) != std::string::npos)
      throw std::logic_error("variant_text: edit for " + v.file + " does not match exactly once");
    return text.replace(at, v.from.size(), v.to);
  }
  throw std::logic_error("variant_text: unknown source " + v.source);
}

}  // namespace opgroth::fixtures
