#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opgroth {

enum class Severity { violation, structural };

std::string_view to_string(Severity s);

struct Finding {
  Severity severity = Severity::violation;
  std::string check;     // dotted check id, e.g. "category.assoc"
  std::string witness;   // instance description in DSL notation
  std::string location;  // section / corpus item the finding belongs to

  bool operator==(const Finding&) const = default;
};

/// Ordered list of findings plus instance counters.
///
/// Findings keep insertion order, so a checker that iterates its instance
/// space deterministically yields a deterministic report. Only the first
/// `kMaxFindings` are kept; the remainder is tallied in the "suppressed"
/// counter so that `ok()` still reflects the full run.
class CheckReport {
 public:
  static constexpr std::size_t kMaxFindings = 200;

  void violation(std::string check, std::string witness, std::string location = {});
  void structural(std::string check, std::string witness, std::string location = {});
  void add(Finding f);

  void count(const std::string& key, std::size_t n = 1) { counts_[key] += n; }
  void note(const std::string& key, std::string value) { notes_[key] = std::move(value); }

  // Appends everything from `other`. Findings get `prefix` prepended to their location; counts are summed.
  void merge(const CheckReport& other, std::string_view prefix = {});

  bool ok() const { return findings_.empty() && suppressed_ == 0; }
  bool has_structural() const;
  std::size_t size() const { return findings_.size() + suppressed_; }

  const std::vector<Finding>& findings() const { return findings_; }
  const std::map<std::string, std::size_t>& counts() const { return counts_; }
  const std::map<std::string, std::string>& notes() const { return notes_; }
  std::size_t count_of(const std::string& key) const;
  std::string note_of(const std::string& key) const;

  // True when some finding's check id starts with `check_prefix` and its
  // witness contains `witness_fragment`.
  bool mentions(std::string_view check_prefix, std::string_view witness_fragment = {}) const;

  std::string summary() const;

 private:
  std::vector<Finding> findings_;
  std::size_t suppressed_ = 0;
  bool suppressed_structural_ = false;
  std::map<std::string, std::size_t> counts_;
  std::map<std::string, std::string> notes_;
};

// Thrown by constructions whose input failed validation; carries the report.
class CheckFailure : public std::invalid_argument {
 public:
  CheckFailure(std::string what, CheckReport report)
      : std::invalid_argument(std::move(what)), report_(std::move(report)) {}
  const CheckReport& report() const { return report_; }

 private:
  CheckReport report_;
};

}  // namespace opgroth
