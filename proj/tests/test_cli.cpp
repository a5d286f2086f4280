#include <doctest.h>

#include <cstdlib>
#include <json.hpp>

#include "cli_support.hpp"
#include "opgroth/fixtures.hpp"
#include "opgroth/spec.hpp"

using namespace opgroth;
using namespace opgroth::testing;
namespace fx = opgroth::fixtures;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("check exits 0 on every shipped fixture") {
  for (const auto& [file, doc] : fx::shipped_documents()) {
    INFO(file);
    const RunResult r = run({"check", fixture(file)});
    CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
    CHECK(r.err.empty());
    CHECK(lines_of(r.out).back() == "status: ok");
  }
}

TEST_CASE("broken variants exit with their recorded status") {
  for (const auto& v : fx::broken_variants()) {
    INFO(v.file);
    const RunResult r = run({"check", fixture(v.file)});
    CHECK(r.code == v.expected_exit);
    if (v.expected_exit == 2) CHECK(r.err.find(v.file + ":") != std::string::npos);
    if (v.expected_exit == 1) CHECK(r.out.find("violation") != std::string::npos);
  }
}

TEST_CASE("single-entry mutations flip a passing fixture to exit 1") {
  for (const auto& m : mutations()) {
    INFO(m.file << ": " << m.from << " -> " << m.to);
    const std::string path = apply(m, "mut");
    REQUIRE(run({m.command, fixture(m.file)}).code == 0);
    const RunResult r = run({m.command, path});
    CHECK_MESSAGE(r.code == 1, std::string(r.out + r.err));
    CHECK(r.out.find(m.witness) != std::string::npos);
  }
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"check", fixture("does_not_exist.cat")}).code == 2);
  CHECK(run({"--max-arity", "12", "check", fixture("walk.cat")}).code == 2);
  CHECK(run({"--report", "xml", "check", fixture("walk.cat")}).code == 2);
  CHECK(run({"check", fixture("walk.cat"), "--section", "nope"}).code == 2);
  CHECK(run({"groth", fixture("walk.cat"), "--iset", "walk", "-o", write_scratch("x.spec", "")}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("check --section restricts the report") {
  const RunResult r = run({"check", fixture("sections.spec"), "--section", "to_top"});
  CHECK(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() >= 2);
  CHECK(ls.front() == "nattrans to_top: ok");
  CHECK(ls.back() == "status: ok");
  for (const auto& line : ls) CHECK((line.rfind("  ", 0) == 0 || line == ls.front() || line == ls.back()));
}

TEST_CASE("groth and transpose write checkable documents") {
  const std::string g = (scratch_dir() / "walk_groth.spec").string();
  RunResult r = run({"groth", fixture("sections.spec"), "--iset", "walk_sets", "-o", g});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  CHECK(r.out.find("input iset walk_sets: ok") != std::string::npos);
  CHECK(r.out.find("output fibration walk_sets: ok") != std::string::npos);
  CHECK(run({"check", g}).code == 0);

  const std::string t = (scratch_dir() / "walk_transpose.spec").string();
  r = run({"transpose", g, "--fib", "walk_sets", "-o", t});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  const SpecDocument back = parse_spec_file(read_text(t));
  REQUIRE(back.ok());
  const SpecDocument orig = parse_spec_file(read_text(fixture("sections.spec")));
  // Transposing the category of elements recovers the indexed set up to relabeling.
  const auto* F = back.get<ISetPtr>("walk_sets");
  REQUIRE(F);
  const auto& G = **orig.get<ISetPtr>("walk_sets");
  REQUIRE((*F)->on_obj.size() == G.on_obj.size());
  for (std::size_t k = 0; k < G.on_obj.size(); ++k) CHECK((*F)->on_obj[k].size() == G.on_obj[k].size());
}

TEST_CASE("ogroth and otranspose write checkable documents") {
  const std::string g = (scratch_dir() / "grade_ogroth.spec").string();
  RunResult r = run({"ogroth", fixture("grade.laxtoset"), "--laxtoset", "grade", "-o", g});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  CHECK(run({"check", g}).code == 0);
  const std::string t = (scratch_dir() / "grade_otranspose.spec").string();
  r = run({"otranspose", g, "--ofib", "grade", "-o", t});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  CHECK(run({"check", t}).code == 0);
  // A construction on an invalid input stops after the input report.
  const std::string bad = fixture("grade_nu.laxtoset");
  r = run({"ogroth", bad, "--laxtoset", "grade", "-o", (scratch_dir() / "unused.spec").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("output") == std::string::npos);
}

TEST_CASE("round trip commands pass on the shipped corpora") {
  RunResult r = run({"roundtrip", fixture("corpus_small.spec")});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  CHECK(r.out.find("count corpus.objects = 8") != std::string::npos);
  r = run({"oroundtrip", fixture("ocorpus_small.spec")});
  CHECK_MESSAGE(r.code == 0, std::string(r.out + r.err));
  CHECK(r.out.find("count corpus.lax_cells") != std::string::npos);
}

TEST_CASE("factorize prints the monotone and permutation parts") {
  RunResult r = run({"factorize", "3", "2", "2,1,1"});
  CHECK(r.code == 0);
  CHECK(r.out == "g=[1,1,2]\nh=[3,1,2]\nstatus: ok\n");
  r = run({"factorize", "3", "2", "[2,1,1]"});
  CHECK(r.code == 0);
  CHECK(run({"factorize", "3", "2", "2,3,1"}).code == 2);
  CHECK(run({"factorize", "4", "2", "2,1,1"}).code == 2);
  CHECK(run({"factorize", "3", "2", "two"}).code == 2);
}

TEST_CASE("operad-table prints a document that reparses to the tabulated operad") {
  const RunResult r = run({"operad-table", fixture("sections.spec"), "--operad", "qconv2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string body = r.out.substr(0, r.out.rfind("status:"));
  const SpecDocument d = parse_spec_file(body);
  REQUIRE(d.ok());
  const SpecDocument src = parse_spec_file(read_text(fixture("sections.spec")));
  CHECK(**d.get<OperadPtr>("qconv2") == tabulate(**src.get<OperadPtr>("qconv2")));
}

TEST_CASE("json reports: every line parses and carries the schema version") {
  const std::vector<std::vector<std::string>> commands = {
      {"--report", "json", "check", fixture("sections.spec")},
      {"--report", "json", "check", fixture("grade_nu.laxtoset")},
      {"--report", "json", "check", fixture("walk_syntax.cat")},
      {"--report", "json", "roundtrip", fixture("corpus_small.spec")},
      {"--report", "json", "factorize", "3", "2", "2,1,1"},
      {"--report", "json", "operad-table", fixture("l2.omon"), "--operad", "comm"},
      {"--report", "json", "check", fixture("missing.cat")},
  };
  for (const auto& args : commands) {
    INFO(args[3]);
    const RunResult r = run(args);
    const auto ls = lines_of(r.out);
    REQUIRE(!ls.empty());
    for (const auto& line : ls) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.at("version") == kReportVersion);
      CHECK(j.contains("record"));
    }
    const auto last = nlohmann::json::parse(ls.back());
    CHECK(last.at("record") == "summary");
    CHECK(last.at("exit") == r.code);
  }
  const auto ls = lines_of(run({"--report", "json", "check", fixture("walk_syntax.cat")}).out);
  const auto d = nlohmann::json::parse(ls.front());
  CHECK(d.at("record") == "diagnostic");
  CHECK(d.at("line") == 3);
}

TEST_CASE("output is independent of --jobs") {
  const std::string mutated = apply(mutations()[0], "jobs");
  const std::vector<std::vector<std::string>> commands = {
      {"check", fixture("sections.spec")},
      {"check", fixture("dz2.omon")},
      {"check", mutated},
      {"roundtrip", fixture("corpus_small.spec")},
      {"--report", "json", "check", fixture("grade_nu.laxtoset")},
  };
  for (const auto& args : commands) {
    INFO(args.back());
    std::vector<std::string> one{"--jobs", "1"}, four{"--jobs", "4"};
    one.insert(one.end(), args.begin(), args.end());
    four.insert(four.end(), args.begin(), args.end());
    const RunResult a = run(one), b = run(four);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}

TEST_CASE("max arity default comes from the environment") {
  const std::string path = write_scratch("bare.spec", "[operad A]\nbuiltin = assoc\n");
  const std::string with_flag = run({"--max-arity", "2", "operad-table", path, "--operad", "A"}).out;
  ::setenv("OPGROTH_MAX_ARITY", "2", 1);
  const RunResult from_env = run({"operad-table", path, "--operad", "A"});
  ::setenv("OPGROTH_MAX_ARITY", "4", 1);
  const RunResult overridden = run({"--max-arity", "2", "operad-table", path, "--operad", "A"});
  ::setenv("OPGROTH_MAX_ARITY", "0", 1);
  const RunResult out_of_range = run({"operad-table", path, "--operad", "A"});
  ::setenv("OPGROTH_MAX_ARITY", "x", 1);
  const RunResult garbage = run({"operad-table", path, "--operad", "A"});
  ::unsetenv("OPGROTH_MAX_ARITY");
  const RunResult fallback = run({"operad-table", path, "--operad", "A"});
  CHECK(from_env.code == 0);
  CHECK(from_env.out == with_flag);
  CHECK(overridden.out == with_flag);
  CHECK(out_of_range.code == 2);
  CHECK(garbage.code == 2);
  CHECK(fallback.out != with_flag);
  CHECK(fallback.out.find("max_arity = 3") != std::string::npos);
}
