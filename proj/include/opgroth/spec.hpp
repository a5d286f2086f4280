#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "opgroth/fib2cat.hpp"
#include "opgroth/fincat.hpp"
#include "opgroth/ogroth.hpp"
#include "opgroth/omon.hpp"
#include "opgroth/operad.hpp"
#include "opgroth/report.hpp"

namespace opgroth {

// Alternative order matches SectionKind.
using SectionValue = std::variant<CatPtr, CatFunctor, NatTransform, DFibPtr, ISetPtr, Semiring, OperadPtr, OMonPtr,
                                  LaxOMonFunctor, OMonTransformation, OFibPtr, LaxToSetPtr>;

enum class SectionKind {
  category,
  functor,
  nattrans,
  fibration,
  iset,
  semiring,
  operad,
  omon,
  laxfun,
  omontrans,
  ofib,
  laxtoset
};

std::string_view to_string(SectionKind k);
std::optional<SectionKind> parse_section_kind(std::string_view s);

struct Section {
  std::string name;
  SectionValue value;
  std::size_t line = 0;  // header line, 0 for sections not read from text

  SectionKind kind() const { return static_cast<SectionKind>(value.index()); }
};

struct Diagnostic {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::string section;
  std::string message;

  std::string text() const;  // "3:7: [walk] message"
};

struct ParseOptions {
  // Used by operad sections without a max_arity key.
  std::size_t default_max_arity = 3;
};

/// Parsed sections in file order. Sections that failed to parse are absent
/// and leave at least one diagnostic behind.
class SpecDocument {
 public:
  std::vector<Section> sections;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  const Section* find(std::string_view name) const;
  template <class T>
  const T* get(std::string_view name) const {
    const Section* s = find(name);
    return s ? std::get_if<T>(&s->value) : nullptr;
  }
  // Name of a section holding `value`: pointer identity first, then value
  // equality.
  std::optional<std::string> name_of(const SectionValue& value) const;

  // Appends `value` as `name`, first adding every value it references that
  // has no section yet. Added dependencies take their name from `hints`
  // when it holds an equal value, otherwise "<name>_<role>". Returns the
  // name actually used (made unique when taken).
  std::string add(std::string name, SectionValue value, const SpecDocument* hints = nullptr);
};

// Same names, kinds and order; values compared by table.
bool table_equal(const SpecDocument& a, const SpecDocument& b);

SpecDocument parse_spec_file(std::string_view text, const ParseOptions& options = {});

// Canonical text. Forced tensor morphism entries and defaulted identity
// images are left out; phi, xi and nu are written entry by entry. Throws
// std::invalid_argument when a referenced value has no section.
std::string write_spec(const SpecDocument& doc);

// The validity check appropriate to the section kind.
CheckReport check_section(const Section& s, unsigned jobs = 1);

}  // namespace opgroth
