// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only when all pass.
#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "operad_oracle.hpp"
#include "opgroth/finmap.hpp"
#include "opgroth/fixtures.hpp"
#include "opgroth/groth.hpp"
#include "opgroth/ogroth.hpp"
#include "opgroth/omon.hpp"
#include "opgroth/operad.hpp"
#include "opgroth/spec.hpp"

using namespace opgroth;
using namespace opgroth::testing;
namespace fx = opgroth::fixtures;

namespace {

// Collects failed expectations for one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void detail(const std::string& d) { details_.push_back(d); }
  bool ok() const { return failed_ == 0; }
  std::string text() const {
    std::string s;
    for (const auto& d : ok() ? details_ : failures_) s += (s.empty() ? "" : "; ") + d;
    if (failed_ > failures_.size()) s += "; " + std::to_string(failed_ - failures_.size()) + " more";
    return s;
  }

 private:
  std::vector<std::string> failures_, details_;
  std::size_t failed_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

const OperadPtr& assoc3() {
  static const OperadPtr o = build_assoc(3);
  return o;
}

const OperadPtr& comm3() {
  static const OperadPtr o = build_comm(3);
  return o;
}

void operad_axioms(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* name;
    OperadPtr o;
    std::size_t (*carrier)(std::size_t);
  };
  const Case cases[] = {{"assoc(3)", build_assoc(3), assoc_size},
                        {"comm(4)", build_comm(4), comm_size},
                        {"qconv(bool,3)", build_qconv(boolean_semiring(), 3), qconv_bool_size}};
  for (const auto& k : cases) {
    const CheckReport r = check_operad_axioms(*k.o);
    const NaiveResult naive = naive_operad_check(*k.o);
    const std::size_t closed = combinatorial_assoc_count(k.o->max_arity(), k.carrier);
    const std::size_t got = r.count_of("operad.assoc_instances");
    c.expect(r.ok(), std::string(k.name) + " report: " + r.summary());
    c.expect(naive.ok, std::string(k.name) + " naive oracle found a failure");
    c.expect(got == naive.assoc_instances && got == closed,
             std::string(k.name) + " counts " + std::to_string(got) + " vs naive " +
                 std::to_string(naive.assoc_instances) + " vs closed form " + std::to_string(closed));
    c.expect(r.count_of("operad.unit_instances") == naive.unit_instances, std::string(k.name) + " unit count");
    c.detail(std::string(k.name) + " " + std::to_string(got) + " instances");
  }
  const double s = seconds_since(t0);
  c.expect(s < 60, "took " + fmt_seconds(s));
  c.detail(fmt_seconds(s));
}

void factorization(Criterion& c) {
  std::size_t maps = 0;
  for (std::size_t m = 0; m <= 4; ++m)
    for (std::size_t n = 0; n <= 4; ++n) {
      // Every g: m -> n as a raw value vector, in base-n counting order.
      std::size_t total = 1;
      for (std::size_t k = 0; k < m; ++k) total *= n;
      std::vector<std::vector<std::size_t>> all(total, std::vector<std::size_t>(m));
      for (std::size_t code = 0; code < total; ++code)
        for (std::size_t k = m, x = code; k-- > 0; x /= n) all[code][k] = x % n;
      for (const auto& fv : all) {
        ++maps;
        std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> found;
        std::vector<std::size_t> hv(m);
        std::iota(hv.begin(), hv.end(), 0);
        do {
          for (const auto& gv : all) {
            if (!std::is_sorted(gv.begin(), gv.end())) continue;
            bool ok = true;
            for (std::size_t j = 0; j < m && ok; ++j) ok = gv[hv[j]] == fv[j];
            for (std::size_t a = 0; a < m && ok; ++a)
              for (std::size_t b = a + 1; b < m && ok; ++b) ok = !(fv[a] == fv[b] && hv[a] > hv[b]);
            if (ok) found.emplace_back(gv, hv);
          }
        } while (std::next_permutation(hv.begin(), hv.end()));
        const FinMap f(n, fv);
        c.expect(found.size() == 1, f.to_string() + " has " + std::to_string(found.size()) + " factorizations");
        if (found.size() != 1) continue;
        const auto fac = factorize_monotone_perm(f);
        c.expect(fac.g == FinMap(n, found[0].first) && fac.h == FinMap(m, found[0].second),
                 "factorize_monotone_perm" + f.to_string());
      }
    }
  c.expect(maps == 499, "enumerated " + std::to_string(maps) + " maps");
  c.detail(std::to_string(maps) + " maps, each with exactly one factorization");
}

void classical_roundtrip(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const GrothCorpus corpus = generate_corpus(CorpusParams{});
  c.expect(corpus.num_objects() >= 40, "objects " + std::to_string(corpus.num_objects()));
  c.expect(corpus.num_one_cells() >= 60, "1-cells " + std::to_string(corpus.num_one_cells()));
  c.expect(corpus.num_two_cells() >= 20, "2-cells " + std::to_string(corpus.num_two_cells()));
  for (const auto& F : corpus.isets) {
    c.expect(F->index->num_objects() <= 3, "index category with more than 3 objects");
    c.expect(F->index->num_morphisms() <= 6, "index category with more than 6 morphisms");
    for (const auto& s : F->on_obj) c.expect(s.size() <= 3, "value set with more than 3 elements");
  }
  const CheckReport r = roundtrip_report(corpus, 1);
  c.expect(r.ok(), r.summary());
  c.expect(r.count_of("groth.phi_naturality_squares") == corpus.iset_cells.size(), "phi squares");
  c.expect(r.count_of("groth.psi_naturality_squares") == corpus.dfib_cells.size(), "psi squares");
  c.expect(r.count_of("groth.composable_pairs") > 0 && r.count_of("transpose.composable_pairs") > 0,
           "no composable pairs exercised");
  const double s = seconds_since(t0);
  c.expect(s < 120, "took " + fmt_seconds(s));
  c.detail(std::to_string(corpus.num_objects()) + " objects, " + std::to_string(corpus.num_one_cells()) +
           " 1-cells, " + std::to_string(corpus.num_two_cells()) + " 2-cells, " + fmt_seconds(s));
}

void coherence(Criterion& c) {
  const OMonPtr dz2 = fx::dz2_omon(assoc3());
  const OMonPtr l2 = fx::l2_omon(comm3());
  c.expect(check_omon_category(*dz2).ok(), "DZ2 over assoc");
  c.expect(check_omon_category(*l2).ok(), "L2 over comm");
  // Restrictions along terminal morphisms, from Comm-structures on the same carriers.
  const OMonCategory rdz2 = restrict_along_operad_morphism(terminal_morphism(assoc3()), *fx::dz2_omon(comm3()));
  const OMonCategory rl2 = restrict_along_operad_morphism(terminal_morphism(assoc3()), *l2);
  const OperadPtr qconv = build_qconv(boolean_semiring(), 3);
  const OMonCategory ql2 = restrict_along_operad_morphism(terminal_morphism(qconv), *l2);
  c.expect(check_omon_category(rdz2).ok() && rdz2 == *dz2, "DZ2 restricted along assoc -> comm");
  c.expect(check_omon_category(rl2).ok(), "L2 restricted along assoc -> comm");
  c.expect(check_omon_category(ql2).ok(), "L2 restricted along qconv -> comm");

  // Every shipped single-entry mutation of the two fixtures.
  std::size_t shipped = 0;
  for (const auto& m : mutations()) {
    if (m.file != "dz2.omon" && m.file != "l2.omon") continue;
    ++shipped;
    const RunResult r = run({m.command, apply(m, "acc4")});
    c.expect(r.code == 1 && r.out.find(m.witness) != std::string::npos, m.file + ": " + m.from + " -> " + m.to);
  }
  for (const auto& v : fx::broken_variants()) {
    if (v.source != "dz2.omon" && v.source != "l2.omon") continue;
    ++shipped;
    const RunResult r = run({"check", fixture(v.file)});
    const std::string entry = v.to.substr(0, v.to.find(" ="));
    c.expect(r.code == v.expected_exit && r.out.find(entry) != std::string::npos, v.file);
  }
  // And every flip of a tensor object entry in the shipped text.
  std::size_t flips = 0;
  for (const char* file : {"dz2.omon", "l2.omon"}) {
    const std::string text = read_text(fixture(file));
    std::size_t at = 0;
    while ((at = text.find("\ntensor ", at)) != std::string::npos) {
      ++at;
      const std::size_t eol = text.find('\n', at);
      const std::string line = text.substr(at, eol - at);
      const std::size_t eq = line.rfind(" = ");
      const std::string value = line.substr(eq + 3);
      if (value != "0" && value != "1") continue;
      const std::string entry = line.substr(0, eq);
      std::string mutated = text;
      mutated.replace(at + eq + 3, value.size(), value == "0" ? "1" : "0");
      const SpecDocument d = parse_spec_file(mutated);
      bool named = false;
      for (const auto& s : d.sections) {
        const CheckReport r = check_section(s, 1);
        for (const auto& f : r.findings()) named = named || f.witness.find(entry) != std::string::npos;
      }
      c.expect(d.ok() && named, std::string(file) + ": " + line + " flipped");
      ++flips;
    }
  }
  c.detail(std::to_string(shipped) + " shipped mutations and " + std::to_string(flips) +
           " tensor flips rejected with the entry named");
}

void unbiased_translation(Criterion& c) {
  for (const auto& [name, u] : {std::pair{"Z/2", fx::z2_unbiased(3)}, std::pair{"L2", fx::l2_unbiased(3)}}) {
    c.expect(check_unbiased(u).ok(), std::string(name) + " unbiased check");
    const OMonCategory e = extend_unbiased_to_assoc(u);
    c.expect(*e.operad() == *assoc3(), std::string(name) + " extension is over assoc(3)");
    const CheckReport r = check_omon_category(e);
    c.expect(r.ok(), std::string(name) + " extension: " + r.summary());
    c.expect(forget_assoc_to_unbiased(e) == u, std::string(name) + " forget after extend");
  }
  c.detail("forget after extend is the identity on Z/2 and L2");
}

const OCorpus& ocorpus() {
  static const OCorpus c = generate_ocorpus(OCorpusParams{});
  return c;
}

void monoidal_groth(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const OMonPtr dz2 = fx::dz2_omon(assoc3());
  const OFibPtr y = omon_groth(fx::grade_laxtoset(dz2));
  const CheckReport ry = check_ofib_object(*y);
  c.expect(ry.ok(), "omon_groth(GRADE): " + ry.summary());
  c.expect(*y->base_omon == *dz2, "base is the DZ2 structure");
  // The total structure must be the graded monoid p = 1, q*q = q, r*r = q, q*r = r*q = r
  // on the discrete category of its three elements.
  const FinCat& E = y->p->total();
  c.expect(E.num_objects() == 3 && E.num_morphisms() == 3, "total category is discrete on 3 objects");
  const auto mul = [](std::size_t a, std::size_t b) -> std::size_t {
    if (a == 0 || b == 0) return a + b;
    return a == b ? 1 : 2;
  };
  const OMonCategory& T = *y->total_omon;
  const Operad& O = *assoc3();
  if (E.num_objects() == 3) {
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        const ObjId ab[2] = {ObjId(a), ObjId(b)};
        c.expect(T.tensor_obj(*O.find(2, "s12"), ab).index() == mul(a, b), "product table");
        c.expect(T.tensor_obj(*O.find(2, "s21"), ab).index() == mul(b, a), "swapped product table");
      }
    c.expect(T.tensor_obj(*O.find(0, "s"), std::span<const ObjId>{}) == ObjId(0), "unit is p");
  }
  c.expect(T.phi_entries().empty(), "total structure is strict");
  c.expect(check_omon_category(T).ok(), "total structure is coherent");

  const OCorpus& corpus = ocorpus();
  std::vector<std::string> families;
  for (const auto& o : corpus.operads) families.push_back(std::string(to_string(o->kind())));
  for (const char* k : {"assoc", "comm", "qconv"})
    c.expect(std::find(families.begin(), families.end(), k) != families.end(), std::string("no ") + k + " family");
  const CheckReport r = omon_roundtrip_check(corpus, 1);
  c.expect(r.ok(), r.summary());
  c.expect(r.count_of("ogroth.skipped") == 0, "inputs skipped");
  const double s = seconds_since(t0);
  c.expect(s < 300, "took " + fmt_seconds(s));
  c.detail(std::to_string(corpus.lax.size()) + " lax functors, " + std::to_string(corpus.ofibs.size()) +
           " fibrations, " + std::to_string(corpus.lax_cells.size() + corpus.ofib_cells.size()) + " 1-cells, " +
           fmt_seconds(s));
}

void restriction(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const CheckReport r = restriction_report(ocorpus(), 1);
  c.expect(r.ok(), r.summary());
  c.expect(r.count_of("restrict.lax_cells") > 0, "no lax cells restricted");
  c.detail(std::to_string(ocorpus().operad_morphisms.size()) + " operad morphisms, " +
           std::to_string(r.count_of("restrict.lax_cells")) + " restricted lax cells, " +
           fmt_seconds(seconds_since(t0)));
}

void cli_contract(Criterion& c) {
  std::size_t runs = 0;
  auto expect_exit = [&](const std::vector<std::string>& args, int code) {
    ++runs;
    const RunResult r = run(args);
    std::string joined;
    for (const auto& a : args) joined += " " + a.substr(a.rfind('/') + 1);
    c.expect(r.code == code, "exit " + std::to_string(r.code) + " for" + joined);
  };
  for (const auto& [file, doc] : fx::shipped_documents()) expect_exit({"check", fixture(file)}, 0);
  for (const auto& v : fx::broken_variants()) expect_exit({"check", fixture(v.file)}, v.expected_exit);
  for (const auto& m : mutations()) expect_exit({m.command, apply(m, "acc8")}, 1);
  expect_exit({"roundtrip", fixture("corpus_small.spec")}, 0);
  expect_exit({"check", write_scratch("acc8_syntax.cat", "[category c]\nobjects = a\nf : a b\n")}, 2);
  expect_exit({"check", write_scratch("acc8_kind.spec", "[frobnicate c]\n")}, 2);
  expect_exit({"check", fixture("no_such_file.cat")}, 2);
  expect_exit({"factorize", "3", "2", "2,1,1"}, 0);
  expect_exit({"factorize", "3", "2", "2,3,1"}, 2);
  expect_exit({"frobnicate"}, 2);

  std::size_t compared = 0;
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"check", fixture("sections.spec")},
        std::vector<std::string>{"check", fixture("grade_nu.laxtoset")},
        std::vector<std::string>{"--report", "json", "check", apply(mutations()[0], "acc8jobs")},
        std::vector<std::string>{"roundtrip", fixture("corpus_small.spec")},
        std::vector<std::string>{"oroundtrip", fixture("ocorpus_small.spec")}}) {
    std::vector<std::string> one{"--jobs", "1"}, four{"--jobs", "4"};
    one.insert(one.end(), args.begin(), args.end());
    four.insert(four.end(), args.begin(), args.end());
    const RunResult a = run(one), b = run(four);
    c.expect(a.code == b.code && a.out == b.out && a.err == b.err, "--jobs changes output of " + args.back());
    ++compared;
  }
  c.detail(std::to_string(runs) + " exit codes, " + std::to_string(compared) + " jobs comparisons");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Criterion&)>> criteria[] = {
      {"operad axiom suite", operad_axioms},
      {"factorization uniqueness", factorization},
      {"classical round trip", classical_roundtrip},
      {"coherence checkers", coherence},
      {"unbiased translation", unbiased_translation},
      {"monoidal Grothendieck construction", monoidal_groth},
      {"restriction along operad morphisms", restriction},
      {"CLI contract", cli_contract},
  };
  int failed = 0, k = 0;
  for (const auto& [name, body] : criteria) {
    Criterion c;
    try {
      body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << ++k << " " << (c.ok() ? "PASS" : "FAIL") << " " << name << ": " << c.text()
              << std::endl;
    failed += c.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
