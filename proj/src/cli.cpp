#include "opgroth/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "opgroth/finmap.hpp"
#include "opgroth/groth.hpp"
#include "opgroth/ogroth.hpp"
#include "opgroth/spec.hpp"

namespace opgroth {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::size_t max_arity = 3;
  std::string report = "text";
  std::uint64_t seed = 20240229;
  unsigned jobs = 1;
};

// Writes report records and tracks the exit status.
class Emitter {
 public:
  Emitter(const GlobalOptions& g, std::ostream& out, std::ostream& err)
      : json_(g.report == "json"), out_(out), err_(err) {}

  bool json_mode() const { return json_; }

  void fail(int code) { exit_ = std::max(exit_, code); }
  int exit_code() const { return exit_; }

  // Usage or I/O problem, outside any report scope.
  int usage_error(const std::string& msg) {
    err_ << "error: " << msg << "\n";
    if (json_) record({{"record", "error"}, {"message", msg}});
    fail(2);
    return exit_;
  }

  void diagnostics(const std::string& file, const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds) {
      err_ << file << ":" << d.text() << "\n";
      if (json_)
        record({{"record", "diagnostic"},
                {"file", file},
                {"line", d.line},
                {"column", d.column},
                {"section", d.section},
                {"message", d.message}});
    }
    if (!ds.empty()) fail(2);
  }

  void report(const std::string& scope, const CheckReport& r) {
    fail(r.has_structural() ? 2 : r.ok() ? 0 : 1);
    const std::size_t suppressed = r.size() - r.findings().size();
    if (json_) {
      for (const auto& f : r.findings())
        record({{"record", "finding"},
                {"scope", scope},
                {"severity", std::string(to_string(f.severity))},
                {"check", f.check},
                {"witness", f.witness},
                {"location", f.location}});
      if (suppressed) record({{"record", "suppressed"}, {"scope", scope}, {"count", suppressed}});
      for (const auto& [k, v] : r.counts()) record({{"record", "count"}, {"scope", scope}, {"key", k}, {"value", v}});
      for (const auto& [k, v] : r.notes()) record({{"record", "note"}, {"scope", scope}, {"key", k}, {"value", v}});
      record({{"record", "scope"}, {"scope", scope}, {"status", r.ok() ? "ok" : "fail"}, {"findings", r.size()}});
      return;
    }
    out_ << scope << ": " << (r.ok() ? "ok" : "FAIL (" + std::to_string(r.size()) + " findings)") << "\n";
    for (const auto& f : r.findings()) {
      out_ << "  " << to_string(f.severity) << " " << f.check << " " << f.witness;
      if (!f.location.empty()) out_ << " @ " << f.location;
      out_ << "\n";
    }
    if (suppressed) out_ << "  " << suppressed << " further findings suppressed\n";
    for (const auto& [k, v] : r.counts()) out_ << "  count " << k << " = " << v << "\n";
    for (const auto& [k, v] : r.notes()) out_ << "  note " << k << " = " << v << "\n";
  }

  int finish(const std::string& command) {
    const char* status = exit_ == 0 ? "ok" : exit_ == 1 ? "fail" : "error";
    if (json_)
      record({{"record", "summary"}, {"command", command}, {"status", status}, {"exit", exit_}});
    else
      out_ << "status: " << status << "\n";
    return exit_;
  }

  void record(json j) {
    j["version"] = kReportVersion;
    out_ << j.dump() << "\n";
  }

  std::ostream& out() { return out_; }

 private:
  bool json_;
  std::ostream& out_;
  std::ostream& err_;
  int exit_ = 0;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses `file`, reporting diagnostics. nullopt when unreadable.
std::optional<SpecDocument> load(const std::string& file, const GlobalOptions& g, Emitter& em) {
  auto text = read_file(file);
  if (!text) {
    em.usage_error("cannot read " + file);
    return std::nullopt;
  }
  SpecDocument doc = parse_spec_file(*text, ParseOptions{g.max_arity});
  em.diagnostics(file, doc.diagnostics);
  return doc;
}

std::string scope_of(const Section& s) { return std::string(to_string(s.kind())) + " " + s.name; }

int cmd_check(const GlobalOptions& g, const std::string& file, const std::string& only, Emitter& em) {
  auto doc = load(file, g, em);
  if (!doc) return em.finish("check");
  if (!only.empty()) {
    const Section* s = doc->find(only);
    if (!s) {
      if (doc->ok()) em.usage_error("no section named '" + only + "'");
      return em.finish("check");
    }
    em.report(scope_of(*s), check_section(*s, g.jobs));
    return em.finish("check");
  }
  for (const auto& s : doc->sections) em.report(scope_of(s), check_section(s, g.jobs));
  return em.finish("check");
}

// Loads the input section `name` of kind T, checks it and reports.
// Returns nullptr when the construction must not run.
template <class T>
const T* checked_input(const SpecDocument& doc, const std::string& name, SectionKind kind, const GlobalOptions& g,
                       Emitter& em) {
  const Section* s = doc.find(name);
  if (!s || s->kind() != kind) {
    if (doc.ok()) em.usage_error("no " + std::string(to_string(kind)) + " section named '" + name + "'");
    return nullptr;
  }
  const CheckReport r = check_section(*s, g.jobs);
  em.report("input " + scope_of(*s), r);
  return r.ok() ? &std::get<T>(s->value) : nullptr;
}

int write_output(const SpecDocument& input, const std::string& name, SectionValue value, const std::string& out_path,
                 const GlobalOptions& g, Emitter& em, const std::string& command) {
  SpecDocument result;
  const std::string used = result.add(name, std::move(value), &input);
  em.report("output " + scope_of(*result.find(used)), check_section(*result.find(used), g.jobs));
  std::ofstream os(out_path, std::ios::binary);
  if (!os || !(os << write_spec(result))) em.usage_error("cannot write " + out_path);
  return em.finish(command);
}

template <class In, class Build>
int cmd_construct(const GlobalOptions& g, const std::string& file, const std::string& name, SectionKind kind,
                  const std::string& out_path, Emitter& em, const std::string& command, Build&& build) {
  auto doc = load(file, g, em);
  if (!doc) return em.finish(command);
  const In* x = checked_input<In>(*doc, name, kind, g, em);
  if (!x) return em.finish(command);
  return write_output(*doc, name, build(*x), out_path, g, em, command);
}

int cmd_roundtrip(const GlobalOptions& g, const std::string& file, Emitter& em) {
  auto doc = load(file, g, em);
  if (!doc) return em.finish("roundtrip");
  std::vector<ISetPtr> isets;
  std::vector<DFibPtr> dfibs;
  for (const auto& s : doc->sections) {
    if (s.kind() != SectionKind::iset && s.kind() != SectionKind::fibration) continue;
    const CheckReport r = check_section(s, g.jobs);
    if (!r.ok()) {
      em.report("input " + scope_of(s), r);
      continue;
    }
    if (const auto* F = std::get_if<ISetPtr>(&s.value)) isets.push_back(*F);
    if (const auto* p = std::get_if<DFibPtr>(&s.value)) dfibs.push_back(*p);
  }
  CorpusParams params;
  params.seed = g.seed;
  const GrothCorpus corpus = generate_cells(std::move(isets), std::move(dfibs), params);
  em.report("roundtrip", roundtrip_report(corpus, g.jobs));
  return em.finish("roundtrip");
}

int cmd_oroundtrip(const GlobalOptions& g, const std::string& file, Emitter& em) {
  auto doc = load(file, g, em);
  if (!doc) return em.finish("oroundtrip");
  OCorpus corpus;
  corpus.seed = g.seed;
  std::vector<OFibPtr> extra;
  for (const auto& s : doc->sections) {
    if (s.kind() != SectionKind::laxtoset && s.kind() != SectionKind::ofib) continue;
    const CheckReport r = check_section(s, g.jobs);
    if (!r.ok()) {
      em.report("input " + scope_of(s), r);
      continue;
    }
    if (const auto* x = std::get_if<LaxToSetPtr>(&s.value)) {
      corpus.lax.push_back(*x);
      corpus.ofibs.push_back(omon_groth(*x));
    }
    if (const auto* y = std::get_if<OFibPtr>(&s.value)) extra.push_back(*y);
  }
  corpus.ofibs.insert(corpus.ofibs.end(), extra.begin(), extra.end());
  auto add_operad = [&](const OperadPtr& o) {
    for (const auto& k : corpus.operads)
      if (*k == *o) return;
    corpus.operads.push_back(o);
  };
  for (const auto& x : corpus.lax) add_operad(x->index_omon->operad());
  for (const auto& y : corpus.ofibs) add_operad(y->base_omon->operad());
  for (const auto& o : corpus.operads) corpus.operad_morphisms.push_back(identity_morphism(o));
  generate_ocells(corpus, OCorpusParams{}.cells_per_pair);
  CheckReport r = omon_roundtrip_check(corpus, g.jobs);
  r.count("corpus.lax_cells", corpus.lax_cells.size());
  r.count("corpus.ofib_cells", corpus.ofib_cells.size());
  r.count("corpus.two_cells", corpus.lax_2cells.size() + corpus.ofib_2cells.size());
  em.report("oroundtrip", r);
  return em.finish("oroundtrip");
}

int cmd_factorize(std::size_t m, std::size_t n, const std::string& values, Emitter& em) {
  FinMap f;
  try {
    f = parse_finmap(values, n);
  } catch (const std::exception& e) {
    return em.usage_error(std::string("bad map: ") + e.what()), em.finish("factorize");
  }
  if (f.source() != m || f.target() != n) {
    em.usage_error("map " + f.to_string() + " is not a map " + std::to_string(m) + " -> " + std::to_string(n));
    return em.finish("factorize");
  }
  const auto fac = factorize_monotone_perm(f);
  if (em.json_mode())
    em.record({{"record", "factorization"}, {"f", f.to_string()}, {"g", fac.g.to_string()}, {"h", fac.h.to_string()}});
  else
    em.out() << "g=" << fac.g.to_string() << "\nh=" << fac.h.to_string() << "\n";
  return em.finish("factorize");
}

int cmd_operad_table(const GlobalOptions& g, const std::string& file, const std::string& name, Emitter& em) {
  auto doc = load(file, g, em);
  if (!doc) return em.finish("operad-table");
  const OperadPtr* o = doc->get<OperadPtr>(name);
  if (!o) {
    if (doc->ok()) em.usage_error("no operad section named '" + name + "'");
    return em.finish("operad-table");
  }
  auto table = std::make_shared<const Operad>(tabulate(**o));
  if (em.json_mode()) {
    for (const auto& [key, r] : table->entries()) {
      json qs = json::array();
      const auto sizes = fiber_sizes(key.f);
      for (std::size_t i = 0; i < key.qs.size(); ++i) qs.push_back(table->label(sizes[i], key.qs[i]));
      em.record({{"record", "composition"},
                 {"f", key.f.to_string()},
                 {"p", table->label(key.f.target(), key.p)},
                 {"qs", qs},
                 {"value", table->label(key.f.source(), r)}});
    }
    em.record({{"record", "count"}, {"scope", "operad " + name}, {"key", "entries"}, {"value", table->entries().size()}});
    return em.finish("operad-table");
  }
  SpecDocument out;
  out.add(name, OperadPtr(table), doc.operator->());
  em.out() << write_spec(out);
  return em.exit_code();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  GlobalOptions g;
  CLI::App app{"Exhaustive checker for finite Grothendieck constructions", "opgroth"};
  app.require_subcommand(1);
  // CLI11 skips validators for environment values, so the variable is read by hand.
  if (const char* env = std::getenv("OPGROTH_MAX_ARITY")) {
    const std::string_view v(env);
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), g.max_arity);
    if (ec != std::errc() || end != v.data() + v.size() || g.max_arity < 1 || g.max_arity > 9) {
      err << "error: OPGROTH_MAX_ARITY must be an integer in 1..9, got '" << v << "'\n";
      return 2;
    }
  }
  app.add_option("--max-arity", g.max_arity, "Arity bound for operads without max_arity (env OPGROTH_MAX_ARITY)")
      ->check(CLI::Range(1, 9));
  app.add_option("--report", g.report, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", g.seed, "Seed for generated corpus cells");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1u, 256u));

  std::string file, name, section, out_path, values;
  std::size_t m = 0, n = 0;
  auto sub = [&](const char* nm, const char* help) {
    CLI::App* s = app.add_subcommand(nm, help);
    s->fallthrough();
    return s;
  };
  CLI::App* check = sub("check", "Validate every section, or one");
  check->add_option("file", file)->required();
  check->add_option("--section", section);
  struct Construct {
    const char* cmd;
    const char* flag;
    const char* help;
  };
  std::map<std::string, CLI::App*> constructs;
  for (const Construct& c : {Construct{"groth", "--iset", "Category of elements of an indexed set"},
                             Construct{"transpose", "--fib", "Fibers of a discrete fibration"},
                             Construct{"ogroth", "--laxtoset", "Monoidal category of elements"},
                             Construct{"otranspose", "--ofib", "Fibers of a monoidal fibration"}}) {
    CLI::App* s = sub(c.cmd, c.help);
    s->add_option("file", file)->required();
    s->add_option(c.flag, name)->required();
    s->add_option("-o", out_path)->required();
    constructs[c.cmd] = s;
  }
  CLI::App* roundtrip = sub("roundtrip", "Both round trips on the file's indexed sets and fibrations");
  roundtrip->add_option("file", file)->required();
  CLI::App* oroundtrip = sub("oroundtrip", "Monoidal round trips on the file's laxtoset and ofib sections");
  oroundtrip->add_option("file", file)->required();
  CLI::App* factorize = sub("factorize", "Monotone x permutation factorization of a map m -> n");
  factorize->add_option("m", m)->required();
  factorize->add_option("n", n)->required();
  factorize->add_option("values", values)->required();
  CLI::App* table = sub("operad-table", "Print the composition table of an operad");
  table->add_option("file", file)->required();
  table->add_option("--operad", name)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Emitter em(g, out, err);
  try {
    if (*check) return cmd_check(g, file, section, em);
    if (*constructs["groth"])
      return cmd_construct<ISetPtr>(g, file, name, SectionKind::iset, out_path, em, "groth",
                                    [](const ISetPtr& F) { return SectionValue(groth(F)); });
    if (*constructs["transpose"])
      return cmd_construct<DFibPtr>(g, file, name, SectionKind::fibration, out_path, em, "transpose",
                                    [](const DFibPtr& p) { return SectionValue(transpose(p)); });
    if (*constructs["ogroth"])
      return cmd_construct<LaxToSetPtr>(g, file, name, SectionKind::laxtoset, out_path, em, "ogroth",
                                        [](const LaxToSetPtr& x) { return SectionValue(omon_groth(x)); });
    if (*constructs["otranspose"])
      return cmd_construct<OFibPtr>(g, file, name, SectionKind::ofib, out_path, em, "otranspose",
                                    [](const OFibPtr& y) { return SectionValue(omon_transpose(y)); });
    if (*roundtrip) return cmd_roundtrip(g, file, em);
    if (*oroundtrip) return cmd_oroundtrip(g, file, em);
    if (*factorize) return cmd_factorize(m, n, values, em);
    if (*table) return cmd_operad_table(g, file, name, em);
  } catch (const CheckFailure& e) {
    em.report("construction", e.report());
    return em.finish(app.get_subcommands().front()->get_name());
  } catch (const std::exception& e) {
    em.usage_error(e.what());
    return em.finish(app.get_subcommands().front()->get_name());
  }
  return em.usage_error("no command");
}

}  // namespace opgroth
