#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "opgroth/spec.hpp"
#include "opgroth/tuples.hpp"

namespace opgroth {

namespace {

struct Token {
  bool punct = false;
  bool quoted = false;
  std::string text;
  std::size_t col = 0;
};

struct ParseError {
  std::size_t col;
  std::string message;
};

bool is_punct_char(char ch) {
  return ch == ',' || ch == '(' || ch == ')' || ch == '[' || ch == ']' || ch == '=' || ch == ':';
}

bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v'; }

// Splits one line. '#' outside quotes starts a comment; "->" is a token of
// its own even inside a bare word.
std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t k = 0;
  while (k < line.size()) {
    const char ch = line[k];
    if (is_space(ch)) {
      ++k;
    } else if (ch == '#') {
      break;
    } else if (ch == '-' && k + 1 < line.size() && line[k + 1] == '>') {
      out.push_back({true, false, "->", k + 1});
      k += 2;
    } else if (is_punct_char(ch)) {
      out.push_back({true, false, std::string(1, ch), k + 1});
      ++k;
    } else if (ch == '"') {
      Token t{false, true, {}, k + 1};
      ++k;
      bool closed = false;
      while (k < line.size()) {
        if (line[k] == '\\' && k + 1 < line.size()) {
          t.text += line[k + 1];
          k += 2;
        } else if (line[k] == '"') {
          closed = true;
          ++k;
          break;
        } else {
          t.text += line[k++];
        }
      }
      if (!closed) throw ParseError{t.col, "unterminated quoted label"};
      out.push_back(std::move(t));
    } else {
      Token t{false, false, {}, k + 1};
      while (k < line.size() && !is_space(line[k]) && !is_punct_char(line[k]) && line[k] != '#' &&
             line[k] != '"' && !(line[k] == '-' && k + 1 < line.size() && line[k + 1] == '>'))
        t.text += line[k++];
      out.push_back(std::move(t));
    }
  }
  return out;
}

struct RawLine {
  std::size_t lineno = 0;
  std::vector<Token> toks;
  std::size_t eol = 1;  // column just past the content
};

class Cursor {
 public:
  explicit Cursor(const RawLine& l) : l_(l) {}

  bool at_end() const { return k_ >= l_.toks.size(); }
  std::size_t col() const { return at_end() ? l_.eol : l_.toks[k_].col; }
  bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
    const std::size_t j = k_ + ahead;
    return j < l_.toks.size() && l_.toks[j].punct && l_.toks[j].text == p;
  }
  bool peek_word(std::size_t ahead = 0) const {
    const std::size_t j = k_ + ahead;
    return j < l_.toks.size() && !l_.toks[j].punct;
  }
  const Token& word(std::string_view what) {
    if (!peek_word()) throw ParseError{col(), "expected " + std::string(what)};
    return l_.toks[k_++];
  }
  void punct(std::string_view p) {
    if (!peek_punct(p)) throw ParseError{col(), "expected '" + std::string(p) + "'"};
    ++k_;
  }
  void end() {
    if (!at_end()) throw ParseError{col(), "unexpected '" + l_.toks[k_].text + "'"};
  }
  // Words separated by commas up to the end of the line; may be empty.
  std::vector<const Token*> list_to_end() {
    std::vector<const Token*> out;
    if (at_end()) return out;
    out.push_back(&word("a value"));
    while (!at_end()) {
      punct(",");
      out.push_back(&word("a value"));
    }
    return out;
  }
  // open word (, word)* close, possibly empty.
  std::vector<const Token*> delimited(std::string_view open, std::string_view close) {
    punct(open);
    std::vector<const Token*> out;
    if (peek_punct(close)) {
      ++k_;
      return out;
    }
    out.push_back(&word("a value"));
    while (!peek_punct(close)) {
      punct(",");
      out.push_back(&word("a value"));
    }
    ++k_;
    return out;
  }

 private:
  const RawLine& l_;
  std::size_t k_ = 0;
};

std::size_t parse_number(const Token& t) {
  std::size_t v = 0;
  const char* b = t.text.data();
  const char* e = b + t.text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (t.quoted || ec != std::errc() || ptr != e) throw ParseError{t.col, "expected a number, got '" + t.text + "'"};
  return v;
}

// FinMap literal with 1-based values into `target`.
FinMap finmap_from(const std::vector<const Token*>& vals, std::size_t target) {
  std::vector<std::size_t> zero_based;
  for (const Token* t : vals) {
    const std::size_t v = parse_number(*t);
    if (v < 1 || v > target)
      throw ParseError{t->col, "map value " + t->text + " outside 1.." + std::to_string(target)};
    zero_based.push_back(v - 1);
  }
  return FinMap(target, std::move(zero_based));
}

struct RawSection {
  SectionKind kind{};
  std::string name;
  std::size_t line = 0;
  std::size_t name_col = 0;
  std::vector<RawLine> lines;
};

struct KeyValue {
  const RawLine* line = nullptr;
  std::size_t key_col = 0;
  std::vector<const Token*> values;
};

class Parser;

// Per-section state: diagnostics go to the parser, `failed` marks the
// section as unusable.
class Ctx {
 public:
  Ctx(Parser& p, const RawSection& s) : P(p), S(s) {}

  void error(std::size_t line, std::size_t col, std::string msg);
  void header_error(std::string msg) { error(S.line, S.name_col, std::move(msg)); }

  // Key-value lines with allowed keys go to kv; everything else is an
  // entry line, handled later in order.
  void collect(std::initializer_list<std::string_view> keys) {
    for (const RawLine& l : S.lines) {
      if (l.toks.size() >= 2 && !l.toks[0].punct && l.toks[1].punct && l.toks[1].text == "=") {
        const Token& key = l.toks[0];
        if (std::find(keys.begin(), keys.end(), key.text) == keys.end()) {
          entries.push_back(&l);
          continue;
        }
        if (kv.count(key.text)) {
          error(l.lineno, key.col, "duplicate key '" + key.text + "'");
          continue;
        }
        try {
          Cursor c(l);
          c.word("key");
          c.punct("=");
          kv[key.text] = KeyValue{&l, key.col, c.list_to_end()};
        } catch (const ParseError& e) {
          error(l.lineno, e.col, e.message);
        }
      } else {
        entries.push_back(&l);
      }
    }
  }

  // Exactly one value under `key`; nullptr (with a diagnostic when
  // `required`) otherwise.
  const Token* single(const std::string& key, bool required = true) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) header_error("missing key '" + key + "'");
      return nullptr;
    }
    if (it->second.values.size() != 1) {
      error(it->second.line->lineno, it->second.key_col, "key '" + key + "' takes exactly one value");
      return nullptr;
    }
    return it->second.values[0];
  }

  template <class T>
  const T* ref(const std::string& key, SectionKind want, bool required = true);

  // Runs fn(cursor, line) per entry line; a ParseError costs only that line.
  template <class Fn>
  void each_entry(Fn&& fn) {
    for (const RawLine* l : entries) {
      try {
        Cursor c(*l);
        fn(c, *l);
      } catch (const ParseError& e) {
        error(l->lineno, e.col, e.message);
      }
    }
  }

  Parser& P;
  const RawSection& S;
  bool failed = false;
  std::map<std::string, KeyValue> kv;
  std::vector<const RawLine*> entries;
};

class Parser {
 public:
  Parser(const ParseOptions& opt, SpecDocument& doc) : opt_(opt), doc_(doc) {}

  void run(std::string_view text) {
    split(text);
    state_.assign(raw_.size(), State::fresh);
    values_.resize(raw_.size());
    for (std::size_t k = 0; k < raw_.size(); ++k) resolve(k);
    for (std::size_t k = 0; k < raw_.size(); ++k)
      if (values_[k]) doc_.sections.push_back(Section{raw_[k].name, *values_[k], raw_[k].line});
    std::stable_sort(doc_.diagnostics.begin(), doc_.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.line, a.column) < std::tie(b.line, b.column);
                     });
  }

  void diag(std::size_t line, std::size_t col, std::string section, std::string msg) {
    doc_.diagnostics.push_back(Diagnostic{line, col, std::move(section), std::move(msg)});
  }

  // The value of section `name`, or a ParseError describing why not.
  const SectionValue& lookup(const Token& t, SectionKind want) {
    auto it = by_name_.find(t.text);
    if (it == by_name_.end()) throw ParseError{t.col, "unresolved reference '" + t.text + "'"};
    const std::size_t k = it->second;
    if (raw_[k].kind != want)
      throw ParseError{t.col, "'" + t.text + "' is a " + std::string(to_string(raw_[k].kind)) + " section, expected " +
                                  std::string(to_string(want))};
    if (state_[k] == State::busy) throw ParseError{t.col, "cyclic reference to '" + t.text + "'"};
    resolve(k);
    if (!values_[k]) throw ParseError{t.col, "section '" + t.text + "' is invalid"};
    return *values_[k];
  }

  std::size_t default_max_arity() const { return opt_.default_max_arity; }

 private:
  enum class State { fresh, busy, done };

  void split(std::string_view text) {
    std::size_t lineno = 0;
    RawSection* current = nullptr;
    bool skipping = false;  // inside a section with a bad header
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++lineno;
      const bool last = nl >= text.size();
      pos = nl + 1;
      RawLine rl;
      rl.lineno = lineno;
      try {
        rl.toks = tokenize(line);
      } catch (const ParseError& e) {
        diag(lineno, e.col, current ? current->name : "", e.message);
        if (last) break;
        continue;
      }
      if (!rl.toks.empty()) rl.eol = rl.toks.back().col + rl.toks.back().text.size() + (rl.toks.back().quoted ? 2 : 0);
      if (rl.toks.empty()) {
        if (last) break;
        continue;
      }
      if (rl.toks[0].punct && rl.toks[0].text == "[") {
        current = nullptr;
        skipping = true;
        header(rl, current, skipping);
      } else if (current) {
        current->lines.push_back(std::move(rl));
      } else if (!skipping) {
        diag(lineno, rl.toks[0].col, "", "content outside a section");
        skipping = true;  // one diagnostic per stray block
      }
      if (last) break;
    }
  }

  void header(const RawLine& rl, RawSection*& current, bool& skipping) {
    Cursor c(rl);
    try {
      c.punct("[");
      const Token& kind = c.word("a section kind");
      const Token& name = c.word("a section name");
      c.punct("]");
      c.end();
      const auto k = parse_section_kind(kind.text);
      if (!k || kind.quoted) throw ParseError{kind.col, "unknown section kind '" + kind.text + "'"};
      if (by_name_.count(name.text)) throw ParseError{name.col, "duplicate section name '" + name.text + "'"};
      by_name_[name.text] = raw_.size();
      raw_.push_back(RawSection{*k, name.text, rl.lineno, name.col, {}});
      current = &raw_.back();
      skipping = false;
    } catch (const ParseError& e) {
      diag(rl.lineno, e.col, "", e.message);
    }
  }

  void resolve(std::size_t k);

  const ParseOptions& opt_;
  SpecDocument& doc_;
  std::vector<RawSection> raw_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<State> state_;
  std::vector<std::optional<SectionValue>> values_;
};

void Ctx::error(std::size_t line, std::size_t col, std::string msg) {
  failed = true;
  P.diag(line, col, S.name, std::move(msg));
}

template <class T>
const T* Ctx::ref(const std::string& key, SectionKind want, bool required) {
  const Token* t = single(key, required);
  if (!t) return nullptr;
  try {
    return &std::get<T>(P.lookup(*t, want));
  } catch (const ParseError& e) {
    error(kv[key].line->lineno, e.col, e.message);
    return nullptr;
  }
}

// ---- label lookups --------------------------------------------------------

ObjId object_of(const FinCat& c, const Token& t) {
  if (auto a = c.find_object(t.text)) return *a;
  throw ParseError{t.col, "unknown object '" + t.text + "'"};
}

MorId morphism_of(const FinCat& c, const Token& t) {
  if (auto f = c.find_morphism(t.text)) return *f;
  throw ParseError{t.col, "unknown morphism '" + t.text + "'"};
}

std::size_t element_of(const FinSet& s, const Token& t) {
  if (auto x = s.find(t.text)) return *x;
  throw ParseError{t.col, "unknown element '" + t.text + "'"};
}

OpId operation_of(const Operad& o, std::size_t n, const Token& t) {
  if (n > o.max_arity())
    throw ParseError{t.col, "arity " + std::to_string(n) + " exceeds max_arity " + std::to_string(o.max_arity())};
  if (auto p = o.find(n, t.text)) return *p;
  throw ParseError{t.col, "'" + t.text + "' is not an operation of arity " + std::to_string(n)};
}

// ---- category -------------------------------------------------------------

std::optional<SectionValue> build_category(Ctx& cx) {
  struct PendingArrow {
    const Token* label;
    const Token* src;
    const Token* tgt;
    std::size_t line;
  };
  struct PendingIdentity {
    const Token* object;
    const Token* label;
    std::size_t line;
  };
  struct PendingCompose {
    const Token *g, *f, *h;
    std::size_t line;
  };
  // Morphisms in file order. An "objects" line places the identities of
  // its objects there, unless an "identity" line places them elsewhere.
  std::vector<std::variant<std::vector<std::size_t>, PendingArrow, PendingIdentity>> slots;
  std::vector<std::string> objects;
  std::map<std::string, std::size_t> object_index;
  std::vector<PendingCompose> composes;
  std::set<std::string> explicit_identity;

  for (const RawLine& l : cx.S.lines) {
    try {
      Cursor c(l);
      if (c.peek_word() && c.peek_punct(":", 1)) {
        const Token& label = c.word("an arrow label");
        c.punct(":");
        const Token& a = c.word("a source object");
        c.punct("->");
        const Token& b = c.word("a target object");
        c.end();
        slots.emplace_back(PendingArrow{&label, &a, &b, l.lineno});
        continue;
      }
      const Token& kw = c.word("an entry");
      if (kw.text == "objects" && c.peek_punct("=")) {
        c.punct("=");
        std::vector<std::size_t> added;
        for (const Token* t : c.list_to_end()) {
          if (object_index.count(t->text)) {
            cx.error(l.lineno, t->col, "duplicate object '" + t->text + "'");
            continue;
          }
          object_index[t->text] = objects.size();
          added.push_back(objects.size());
          objects.push_back(t->text);
        }
        slots.emplace_back(std::move(added));
      } else if (kw.text == "compose") {
        const Token& g = c.word("a morphism");
        const Token& f = c.word("a morphism");
        c.punct("=");
        const Token& h = c.word("a morphism");
        c.end();
        composes.push_back({&g, &f, &h, l.lineno});
      } else if (kw.text == "identity") {
        const Token& a = c.word("an object");
        c.punct("=");
        const Token& lbl = c.word("a label");
        c.end();
        if (!explicit_identity.insert(a.text).second)
          throw ParseError{a.col, "duplicate identity for '" + a.text + "'"};
        slots.emplace_back(PendingIdentity{&a, &lbl, l.lineno});
      } else {
        throw ParseError{kw.col, "unknown category entry '" + kw.text + "'"};
      }
    } catch (const ParseError& e) {
      cx.error(l.lineno, e.col, e.message);
    }
  }

  std::vector<Arrow> arrows;
  std::vector<std::optional<MorId>> identity_of(objects.size());
  std::map<std::string, std::size_t> mor_index;
  auto add_label = [&](const std::string& label, std::size_t line, std::size_t col) {
    if (!mor_index.emplace(label, arrows.size()).second)
      cx.error(line, col, "duplicate morphism label '" + label + "'");
  };
  for (const auto& slot : slots) {
    if (const auto* objs = std::get_if<std::vector<std::size_t>>(&slot)) {
      for (std::size_t o : *objs) {
        if (explicit_identity.count(objects[o])) continue;
        identity_of[o] = MorId(arrows.size());
        add_label("id_" + objects[o], cx.S.line, cx.S.name_col);
        arrows.push_back({"id_" + objects[o], ObjId(o), ObjId(o)});
      }
    } else if (const auto* id = std::get_if<PendingIdentity>(&slot)) {
      auto it = object_index.find(id->object->text);
      if (it == object_index.end()) {
        cx.error(id->line, id->object->col, "unknown object '" + id->object->text + "'");
        continue;
      }
      identity_of[it->second] = MorId(arrows.size());
      add_label(id->label->text, id->line, id->label->col);
      arrows.push_back({id->label->text, ObjId(it->second), ObjId(it->second)});
    } else {
      const auto& a = std::get<PendingArrow>(slot);
      auto s = object_index.find(a.src->text);
      auto t = object_index.find(a.tgt->text);
      if (s == object_index.end()) cx.error(a.line, a.src->col, "unknown object '" + a.src->text + "'");
      if (t == object_index.end()) cx.error(a.line, a.tgt->col, "unknown object '" + a.tgt->text + "'");
      if (s == object_index.end() || t == object_index.end()) continue;
      add_label(a.label->text, a.line, a.label->col);
      arrows.push_back({a.label->text, ObjId(s->second), ObjId(t->second)});
    }
  }
  if (cx.failed) return std::nullopt;
  std::vector<MorId> identities;
  for (const auto& id : identity_of) identities.push_back(*id);

  const std::size_t nm = arrows.size();
  std::vector<std::optional<MorId>> table(nm * nm);
  for (std::size_t k = 0; k < nm; ++k) {
    table[identities[arrows[k].tgt.index()].index() * nm + k] = MorId(k);
    table[k * nm + identities[arrows[k].src.index()].index()] = MorId(k);
  }
  auto mor = [&](const Token* t) -> MorId {
    auto it = mor_index.find(t->text);
    if (it == mor_index.end()) throw ParseError{t->col, "unknown morphism '" + t->text + "'"};
    return MorId(it->second);
  };
  for (const auto& c : composes) {
    try {
      const MorId g = mor(c.g), f = mor(c.f), h = mor(c.h);
      table[g.index() * nm + f.index()] = h;
    } catch (const ParseError& e) {
      cx.error(c.line, e.col, e.message);
    }
  }
  if (cx.failed) return std::nullopt;
  return SectionValue(std::make_shared<const FinCat>(objects, arrows, identities, std::move(table)));
}

// ---- functors and transformations ----------------------------------------

// obj/mor entries of a functor between fixed categories; identities
// default to identities. Returns false after reporting a problem.
struct FunctorEntries {
  std::map<std::size_t, ObjId> obj;
  std::map<std::size_t, MorId> mor;

  bool handle(Cursor& c, const Token& kw, const FinCat& C, const FinCat& D, Ctx& cx, std::size_t line) {
    if (kw.text == "obj") {
      const Token& a = c.word("an object");
      c.punct("=");
      const Token& b = c.word("an object");
      c.end();
      const ObjId x = object_of(C, a);
      if (!obj.emplace(x.index(), object_of(D, b)).second) cx.error(line, a.col, "duplicate image of '" + a.text + "'");
      return true;
    }
    if (kw.text == "mor") {
      const Token& f = c.word("a morphism");
      c.punct("=");
      const Token& g = c.word("a morphism");
      c.end();
      const MorId x = morphism_of(C, f);
      if (!mor.emplace(x.index(), morphism_of(D, g)).second) cx.error(line, f.col, "duplicate image of '" + f.text + "'");
      return true;
    }
    return false;
  }

  std::optional<CatFunctor> finish(const CatPtr& C, const CatPtr& D, Ctx& cx) const {
    CatFunctor F{C, D, {}, {}};
    bool ok = true;
    for (std::size_t a = 0; a < C->num_objects(); ++a) {
      auto it = obj.find(a);
      if (it == obj.end()) {
        cx.header_error("no image for object '" + C->label(ObjId(a)) + "'");
        ok = false;
        continue;
      }
      F.on_obj.push_back(it->second);
    }
    if (!ok) return std::nullopt;
    for (std::size_t f = 0; f < C->num_morphisms(); ++f) {
      auto it = mor.find(f);
      if (it != mor.end()) {
        F.on_mor.push_back(it->second);
      } else if (C->is_identity(MorId(f))) {
        F.on_mor.push_back(D->identity(F.on_obj[C->src(MorId(f)).index()]));
      } else {
        cx.header_error("no image for morphism '" + C->label(MorId(f)) + "'");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return F;
  }
};

std::optional<CatFunctor> functor_body(Ctx& cx, const char* dom_key, const char* cod_key) {
  cx.collect({dom_key, cod_key});
  const CatPtr* C = cx.ref<CatPtr>(dom_key, SectionKind::category);
  const CatPtr* D = cx.ref<CatPtr>(cod_key, SectionKind::category);
  if (!C || !D) return std::nullopt;
  FunctorEntries fe;
  cx.each_entry([&](Cursor& c, const RawLine& l) {
    const Token& kw = c.word("an entry");
    if (!fe.handle(c, kw, **C, **D, cx, l.lineno)) throw ParseError{kw.col, "unknown entry '" + kw.text + "'"};
  });
  if (cx.failed) return std::nullopt;
  auto F = fe.finish(*C, *D, cx);
  if (!F || cx.failed) return std::nullopt;
  return F;
}

std::optional<SectionValue> build_functor(Ctx& cx) {
  auto F = functor_body(cx, "dom", "cod");
  if (!F) return std::nullopt;
  return SectionValue(std::move(*F));
}

std::optional<SectionValue> build_fibration(Ctx& cx) {
  auto F = functor_body(cx, "total", "base");
  if (!F) return std::nullopt;
  return SectionValue(std::make_shared<const DiscreteFibration>(DiscreteFibration{std::move(*F)}));
}

// component entries of a transformation between functors C -> D.
std::optional<std::vector<MorId>> components(Ctx& cx, const FinCat& C, const FinCat& D) {
  std::map<std::size_t, MorId> comp;
  cx.each_entry([&](Cursor& c, const RawLine& l) {
    const Token& kw = c.word("an entry");
    if (kw.text != "component") throw ParseError{kw.col, "unknown entry '" + kw.text + "'"};
    const Token& a = c.word("an object");
    c.punct("=");
    const Token& f = c.word("a morphism");
    c.end();
    if (!comp.emplace(object_of(C, a).index(), morphism_of(D, f)).second)
      cx.error(l.lineno, a.col, "duplicate component at '" + a.text + "'");
  });
  if (cx.failed) return std::nullopt;
  std::vector<MorId> out;
  for (std::size_t a = 0; a < C.num_objects(); ++a) {
    auto it = comp.find(a);
    if (it == comp.end()) {
      cx.header_error("no component at '" + C.label(ObjId(a)) + "'");
      continue;
    }
    out.push_back(it->second);
  }
  if (cx.failed) return std::nullopt;
  return out;
}

std::optional<SectionValue> build_nattrans(Ctx& cx) {
  cx.collect({"dom", "cod"});
  const CatFunctor* F = cx.ref<CatFunctor>("dom", SectionKind::functor);
  const CatFunctor* G = cx.ref<CatFunctor>("cod", SectionKind::functor);
  if (!F || !G) return std::nullopt;
  auto comp = components(cx, *F->dom, *F->cod);
  if (!comp) return std::nullopt;
  return SectionValue(NatTransform{*F, *G, std::move(*comp)});
}

// ---- indexed sets and semirings ------------------------------------------

std::optional<SectionValue> build_iset(Ctx& cx) {
  cx.collect({"index"});
  const CatPtr* C = cx.ref<CatPtr>("index", SectionKind::category);
  if (!C) return std::nullopt;
  const FinCat& I = **C;
  std::map<std::size_t, FinSet> sets;
  std::map<std::size_t, std::pair<const RawLine*, std::vector<const Token*>>> maps;
  cx.each_entry([&](Cursor& c, const RawLine& l) {
    const Token& kw = c.word("an entry");
    if (kw.text == "set") {
      const Token& a = c.word("an object");
      c.punct("=");
      FinSet s;
      for (const Token* t : c.list_to_end()) {
        if (s.find(t->text)) throw ParseError{t->col, "duplicate element '" + t->text + "'"};
        s.elements.push_back(t->text);
      }
      if (!sets.emplace(object_of(I, a).index(), std::move(s)).second)
        throw ParseError{a.col, "duplicate set for '" + a.text + "'"};
    } else if (kw.text == "map") {
      const Token& f = c.word("a morphism");
      c.punct("=");
      if (!maps.emplace(morphism_of(I, f).index(), std::make_pair(&l, c.list_to_end())).second)
        throw ParseError{f.col, "duplicate map for '" + f.text + "'"};
    } else {
      throw ParseError{kw.col, "unknown entry '" + kw.text + "'"};
    }
  });
  if (cx.failed) return std::nullopt;
  IndexedSet F{*C, {}, {}};
  for (std::size_t a = 0; a < I.num_objects(); ++a) {
    auto it = sets.find(a);
    if (it == sets.end()) {
      cx.header_error("no set for object '" + I.label(ObjId(a)) + "'");
      continue;
    }
    F.on_obj.push_back(it->second);
  }
  if (cx.failed) return std::nullopt;
  for (std::size_t u = 0; u < I.num_morphisms(); ++u) {
    const FinSet& src = F.on_obj[I.src(MorId(u)).index()];
    const FinSet& tgt = F.on_obj[I.tgt(MorId(u)).index()];
    auto it = maps.find(u);
    FinFunction fn;
    if (it == maps.end()) {
      if (!I.is_identity(MorId(u))) {
        cx.header_error("no map for morphism '" + I.label(MorId(u)) + "'");
        continue;
      }
      for (std::size_t x = 0; x < src.size(); ++x) fn.push_back(x);
    } else {
      const auto& [line, vals] = it->second;
      if (vals.size() != src.size()) {
        cx.error(line->lineno, line->toks[1].col,
                 "map '" + I.label(MorId(u)) + "' needs " + std::to_string(src.size()) + " values");
        continue;
      }
      try {
        for (const Token* t : vals) fn.push_back(element_of(tgt, *t));
      } catch (const ParseError& e) {
        cx.error(line->lineno, e.col, e.message);
        continue;
      }
    }
    F.on_mor.push_back(std::move(fn));
  }
  if (cx.failed) return std::nullopt;
  return SectionValue(std::make_shared<const IndexedSet>(std::move(F)));
}

std::optional<SectionValue> build_semiring(Ctx& cx) {
  cx.collect({"elements", "zero", "one", "add", "mul"});
  cx.each_entry([&](Cursor& c, const RawLine&) {
    throw ParseError{c.col(), "unknown semiring entry"};
  });
  Semiring r;
  r.name = cx.S.name;
  auto el = cx.kv.find("elements");
  if (el == cx.kv.end()) {
    cx.header_error("missing key 'elements'");
    return std::nullopt;
  }
  for (const Token* t : el->second.values) {
    if (r.find(t->text)) cx.error(el->second.line->lineno, t->col, "duplicate element '" + t->text + "'");
    r.elements.push_back(t->text);
  }
  auto elem = [&](const Token* t, std::size_t line) -> std::optional<std::size_t> {
    if (auto x = r.find(t->text)) return *x;
    cx.error(line, t->col, "unknown element '" + t->text + "'");
    return std::nullopt;
  };
  for (const char* key : {"zero", "one"}) {
    const Token* t = cx.single(key);
    if (!t) continue;
    if (auto x = elem(t, cx.kv[key].line->lineno)) (std::string(key) == "zero" ? r.zero : r.one) = *x;
  }
  for (const char* key : {"add", "mul"}) {
    auto it = cx.kv.find(key);
    if (it == cx.kv.end()) {
      cx.header_error(std::string("missing key '") + key + "'");
      continue;
    }
    const auto& vals = it->second.values;
    if (vals.size() != r.size() * r.size()) {
      cx.error(it->second.line->lineno, it->second.key_col,
               std::string(key) + " needs " + std::to_string(r.size() * r.size()) + " entries");
      continue;
    }
    auto& table = std::string(key) == "add" ? r.add : r.mul;
    for (const Token* t : vals)
      if (auto x = elem(t, it->second.line->lineno)) table.push_back(*x);
  }
  if (cx.failed) return std::nullopt;
  return SectionValue(std::move(r));
}

// ---- operads --------------------------------------------------------------

// "mu [f] p q1 .. qn = r" after the keyword.
void operad_entry(Cursor& c, Operad& o) {
  const auto vals = c.delimited("[", "]");
  const Token& p = c.word("an operation");
  std::vector<const Token*> qs;
  while (c.peek_word()) qs.push_back(&c.word("an operation"));
  c.punct("=");
  const Token& r = c.word("an operation");
  c.end();
  const FinMap f = finmap_from(vals, qs.size());
  const auto sizes = fiber_sizes(f);
  CompKey key{f, operation_of(o, f.target(), p), {}};
  for (std::size_t i = 0; i < qs.size(); ++i) key.qs.push_back(operation_of(o, sizes[i], *qs[i]));
  o.set_entry(key, operation_of(o, f.source(), r));
}

std::optional<SectionValue> build_operad(Ctx& cx) {
  cx.collect({"builtin", "max_arity", "semiring", "unit"});
  std::size_t N = cx.P.default_max_arity();
  if (const Token* t = cx.single("max_arity", false)) {
    try {
      N = parse_number(*t);
      if (N > 9) throw ParseError{t->col, "max_arity above 9 is not supported"};
    } catch (const ParseError& e) {
      cx.error(cx.kv["max_arity"].line->lineno, e.col, e.message);
      return std::nullopt;
    }
  }
  const Semiring* R = cx.ref<Semiring>("semiring", SectionKind::semiring, false);
  if (cx.kv.count("semiring") && !R) return std::nullopt;

  std::shared_ptr<Operad> o;
  const Token* b = cx.single("builtin", false);
  if (cx.failed) return std::nullopt;
  if (b) {
    const std::size_t line = cx.kv["builtin"].line->lineno;
    if (cx.kv.count("unit")) cx.error(cx.kv["unit"].line->lineno, cx.kv["unit"].key_col, "builtin operads fix their unit");
    if (b->text == "assoc") {
      o = std::make_shared<Operad>(*build_assoc(N));
    } else if (b->text == "comm") {
      o = std::make_shared<Operad>(*build_comm(N));
    } else if (b->text == "qconv") {
      if (!R) {
        cx.error(line, b->col, "qconv needs a 'semiring' key");
        return std::nullopt;
      }
      try {
        o = std::make_shared<Operad>(*build_qconv(*R, N));
      } catch (const std::invalid_argument& e) {
        cx.error(line, b->col, e.what());
        return std::nullopt;
      }
    } else {
      cx.error(line, b->col, "unknown builtin '" + b->text + "'");
      return std::nullopt;
    }
    if (R && b->text != "qconv") cx.error(cx.kv["semiring"].line->lineno, cx.kv["semiring"].key_col,
                                          "only qconv takes a semiring");
  } else {
    // Table operad: carriers from "arity n = ..." lines.
    std::vector<std::vector<std::string>> carriers(N + 1);
    std::vector<bool> seen(N + 1, false);
    for (const RawLine* l : cx.entries) {
      if (l->toks.empty() || l->toks[0].punct || l->toks[0].text != "arity") continue;
      try {
        Cursor c(*l);
        c.word("arity");
        const Token& n = c.word("an arity");
        const std::size_t a = parse_number(n);
        if (a > N) throw ParseError{n.col, "arity " + n.text + " exceeds max_arity"};
        if (seen[a]) throw ParseError{n.col, "duplicate arity " + n.text};
        seen[a] = true;
        c.punct("=");
        for (const Token* t : c.list_to_end()) {
          if (std::find(carriers[a].begin(), carriers[a].end(), t->text) != carriers[a].end())
            throw ParseError{t->col, "duplicate operation '" + t->text + "'"};
          carriers[a].push_back(t->text);
        }
      } catch (const ParseError& e) {
        cx.error(l->lineno, e.col, e.message);
      }
    }
    const Token* u = cx.single("unit");
    if (!u || cx.failed) return std::nullopt;
    if (N < 1) {
      cx.header_error("table operads need max_arity >= 1");
      return std::nullopt;
    }
    auto it = std::find(carriers[1].begin(), carriers[1].end(), u->text);
    if (it == carriers[1].end()) {
      cx.error(cx.kv["unit"].line->lineno, u->col, "unit '" + u->text + "' is not an operation of arity 1");
      return std::nullopt;
    }
    const OpId unit(static_cast<std::size_t>(it - carriers[1].begin()));
    o = std::make_shared<Operad>(cx.S.name, Operad::Kind::table, N, std::move(carriers), unit);
    if (R) o->set_semiring(*R);
  }
  o->set_name(cx.S.name);
  cx.each_entry([&](Cursor& c, const RawLine&) {
    const Token& kw = c.word("an entry");
    if (kw.text == "arity" && !b) return;
    if (kw.text != "mu") throw ParseError{kw.col, "unknown operad entry '" + kw.text + "'"};
    operad_entry(c, *o);
  });
  if (cx.failed) return std::nullopt;
  return SectionValue(OperadPtr(std::move(o)));
}

// ---- O-monoidal data -------------------------------------------------------

std::vector<ObjId> objects_of(const FinCat& C, const std::vector<const Token*>& ts) {
  std::vector<ObjId> out;
  for (const Token* t : ts) out.push_back(object_of(C, *t));
  return out;
}

std::vector<MorId> morphisms_of(const FinCat& C, const std::vector<const Token*>& ts) {
  std::vector<MorId> out;
  for (const Token* t : ts) out.push_back(morphism_of(C, *t));
  return out;
}

bool all_objects(const FinCat& C, const std::vector<const Token*>& ts) {
  return std::all_of(ts.begin(), ts.end(), [&](const Token* t) { return C.find_object(t->text).has_value(); });
}

std::optional<SectionValue> build_omon(Ctx& cx) {
  cx.collect({"operad", "base"});
  const OperadPtr* O = cx.ref<OperadPtr>("operad", SectionKind::operad);
  const CatPtr* B = cx.ref<CatPtr>("base", SectionKind::category);
  if (!O || !B) return std::nullopt;
  auto c = std::make_shared<OMonCategory>(*O, *B);
  const FinCat& C = **B;
  // (arity, operation, argument codes) already given.
  std::set<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> seen_obj, seen_mor;
  cx.each_entry([&](Cursor& cur, const RawLine&) {
    const Token& kw = cur.word("an entry");
    if (kw.text == "tensor") {
      const Token& p = cur.word("an operation");
      const auto args = cur.delimited("(", ")");
      cur.punct("=");
      const Token& rhs = cur.word("a value");
      cur.end();
      const OpId op = operation_of(**O, args.size(), p);
      // Objects when the value and every argument name objects.
      if (C.find_object(rhs.text) && all_objects(C, args)) {
        const auto objs = objects_of(C, args);
        std::vector<std::size_t> key;
        for (ObjId a : objs) key.push_back(a.index());
        if (!seen_obj.emplace(args.size(), op.index(), key).second)
          throw ParseError{kw.col, "duplicate tensor entry"};
        c->set_tensor_obj(op, objs, object_of(C, rhs));
      } else {
        const auto mors = morphisms_of(C, args);
        std::vector<std::size_t> key;
        for (MorId f : mors) key.push_back(f.index());
        if (!seen_mor.emplace(args.size(), op.index(), key).second)
          throw ParseError{kw.col, "duplicate tensor entry"};
        c->set_tensor_mor(op, mors, morphism_of(C, rhs));
      }
    } else if (kw.text == "phi") {
      const auto vals = cur.delimited("[", "]");
      const Token& p = cur.word("an operation");
      std::vector<const Token*> qs;
      while (cur.peek_word()) qs.push_back(&cur.word("an operation"));
      const auto args = cur.delimited("(", ")");
      cur.punct("=");
      const Token& g = cur.word("a morphism");
      cur.end();
      const FinMap f = finmap_from(vals, qs.size());
      if (args.size() != f.source())
        throw ParseError{g.col, "phi needs " + std::to_string(f.source()) + " objects"};
      const auto sizes = fiber_sizes(f);
      PhiKey key{f, operation_of(**O, f.target(), p), {}, objects_of(C, args)};
      for (std::size_t i = 0; i < qs.size(); ++i) key.qs.push_back(operation_of(**O, sizes[i], *qs[i]));
      if (c->phi_entries().count(key)) throw ParseError{kw.col, "duplicate phi entry"};
      c->set_phi(std::move(key), morphism_of(C, g));
    } else {
      throw ParseError{kw.col, "unknown omon entry '" + kw.text + "'"};
    }
  });
  if (cx.failed) return std::nullopt;
  complete_forced_tensor_morphisms(*c);
  return SectionValue(OMonPtr(std::move(c)));
}

std::optional<SectionValue> build_laxfun(Ctx& cx) {
  cx.collect({"dom", "cod"});
  const OMonPtr* A = cx.ref<OMonPtr>("dom", SectionKind::omon);
  const OMonPtr* Bm = cx.ref<OMonPtr>("cod", SectionKind::omon);
  if (!A || !Bm) return std::nullopt;
  const CatPtr C = (*A)->base(), D = (*Bm)->base();
  const Operad& O = *(*A)->operad();
  FunctorEntries fe;
  LaxOMonFunctor F;
  F.dom = *A;
  F.cod = *Bm;
  cx.each_entry([&](Cursor& cur, const RawLine& l) {
    const Token& kw = cur.word("an entry");
    if (fe.handle(cur, kw, *C, *D, cx, l.lineno)) return;
    if (kw.text != "xi") throw ParseError{kw.col, "unknown laxfun entry '" + kw.text + "'"};
    const Token& p = cur.word("an operation");
    const auto args = cur.delimited("(", ")");
    cur.punct("=");
    const Token& g = cur.word("a morphism");
    cur.end();
    XiKey key{operation_of(O, args.size(), p), objects_of(*C, args)};
    if (!F.xi.emplace(std::move(key), morphism_of(*D, g)).second) throw ParseError{kw.col, "duplicate xi entry"};
  });
  if (cx.failed) return std::nullopt;
  auto fun = fe.finish(C, D, cx);
  if (!fun || cx.failed) return std::nullopt;
  F.F = std::move(*fun);
  return SectionValue(std::move(F));
}

std::optional<SectionValue> build_omontrans(Ctx& cx) {
  cx.collect({"dom", "cod"});
  const LaxOMonFunctor* F = cx.ref<LaxOMonFunctor>("dom", SectionKind::laxfun);
  const LaxOMonFunctor* G = cx.ref<LaxOMonFunctor>("cod", SectionKind::laxfun);
  if (!F || !G) return std::nullopt;
  auto comp = components(cx, *F->F.dom, *F->F.cod);
  if (!comp) return std::nullopt;
  return SectionValue(OMonTransformation{*F, *G, NatTransform{F->F, G->F, std::move(*comp)}});
}

std::optional<SectionValue> build_ofib(Ctx& cx) {
  cx.collect({"fibration", "total", "base"});
  cx.each_entry([&](Cursor& c, const RawLine&) { throw ParseError{c.col(), "unknown ofib entry"}; });
  const DFibPtr* p = cx.ref<DFibPtr>("fibration", SectionKind::fibration);
  const OMonPtr* T = cx.ref<OMonPtr>("total", SectionKind::omon);
  const OMonPtr* B = cx.ref<OMonPtr>("base", SectionKind::omon);
  if (!p || !T || !B || cx.failed) return std::nullopt;
  return SectionValue(std::make_shared<const OFibObject>(OFibObject{*p, *T, *B}));
}

std::optional<SectionValue> build_laxtoset(Ctx& cx) {
  cx.collect({"index", "iset"});
  const OMonPtr* I = cx.ref<OMonPtr>("index", SectionKind::omon);
  const ISetPtr* F = cx.ref<ISetPtr>("iset", SectionKind::iset);
  if (!I || !F) return std::nullopt;
  const OMonCategory& c = **I;
  const IndexedSet& S = **F;
  if (!same_category(c.base(), S.index)) {
    cx.error(cx.kv["iset"].line->lineno, cx.kv["iset"].values[0]->col, "iset is not indexed by the omon's base");
    return std::nullopt;
  }
  auto x = std::make_shared<LaxToSet>();
  x->index_omon = *I;
  x->F = *F;
  cx.each_entry([&](Cursor& cur, const RawLine&) {
    const Token& kw = cur.word("an entry");
    if (kw.text != "nu") throw ParseError{kw.col, "unknown laxtoset entry '" + kw.text + "'"};
    const Token& p = cur.word("an operation");
    const auto args = cur.delimited("(", ")");
    cur.punct("=");
    const std::size_t vcol = cur.col();
    const auto vals = cur.delimited("[", "]");
    cur.end();
    NuKey key{operation_of(*c.operad(), args.size(), p), objects_of(*c.base(), args)};
    const ObjId t = c.tensor_obj(key.p, key.objs);
    if (t == kUnsetObj) throw ParseError{p.col, "tensor of these objects is not set"};
    std::size_t expected = 1;
    for (ObjId a : key.objs) expected *= S.on_obj[a.index()].size();
    if (vals.size() != expected) throw ParseError{vcol, "nu needs " + std::to_string(expected) + " values"};
    FinFunction fn;
    for (const Token* v : vals) fn.push_back(element_of(S.on_obj[t.index()], *v));
    if (!x->nu.emplace(std::move(key), std::move(fn)).second) throw ParseError{kw.col, "duplicate nu entry"};
  });
  if (cx.failed) return std::nullopt;
  return SectionValue(LaxToSetPtr(std::move(x)));
}

void Parser::resolve(std::size_t k) {
  if (state_[k] != State::fresh) return;
  state_[k] = State::busy;
  Ctx cx(*this, raw_[k]);
  std::optional<SectionValue> v;
  try {
    switch (raw_[k].kind) {
      case SectionKind::category: v = build_category(cx); break;
      case SectionKind::functor: v = build_functor(cx); break;
      case SectionKind::nattrans: v = build_nattrans(cx); break;
      case SectionKind::fibration: v = build_fibration(cx); break;
      case SectionKind::iset: v = build_iset(cx); break;
      case SectionKind::semiring: v = build_semiring(cx); break;
      case SectionKind::operad: v = build_operad(cx); break;
      case SectionKind::omon: v = build_omon(cx); break;
      case SectionKind::laxfun: v = build_laxfun(cx); break;
      case SectionKind::omontrans: v = build_omontrans(cx); break;
      case SectionKind::ofib: v = build_ofib(cx); break;
      case SectionKind::laxtoset: v = build_laxtoset(cx); break;
    }
  } catch (const std::exception& e) {
    // Library-level rejection of otherwise well-formed text.
    cx.header_error(e.what());
    v.reset();
  }
  if (cx.failed) v.reset();
  else if (!v) cx.header_error("section could not be built");
  values_[k] = std::move(v);
  state_[k] = State::done;
}

}  // namespace

SpecDocument parse_spec_file(std::string_view text, const ParseOptions& options) {
  SpecDocument doc;
  Parser(options, doc).run(text);
  return doc;
}

}  // namespace opgroth
