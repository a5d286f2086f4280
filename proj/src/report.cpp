#include "opgroth/report.hpp"

#include <sstream>

namespace opgroth {

std::string_view to_string(Severity s) {
  return s == Severity::structural ? "structural" : "violation";
}

void CheckReport::violation(std::string check, std::string witness, std::string location) {
  add({Severity::violation, std::move(check), std::move(witness), std::move(location)});
}

void CheckReport::structural(std::string check, std::string witness, std::string location) {
  add({Severity::structural, std::move(check), std::move(witness), std::move(location)});
}

void CheckReport::add(Finding f) {
  if (findings_.size() >= kMaxFindings) {
    ++suppressed_;
    suppressed_structural_ = suppressed_structural_ || f.severity == Severity::structural;
    return;
  }
  findings_.push_back(std::move(f));
}

void CheckReport::merge(const CheckReport& other, std::string_view prefix) {
  for (const auto& f : other.findings_) {
    Finding copy = f;
    if (!prefix.empty())
      copy.location = copy.location.empty() ? std::string(prefix)
                                            : std::string(prefix) + "/" + copy.location;
    add(std::move(copy));
  }
  suppressed_ += other.suppressed_;
  suppressed_structural_ = suppressed_structural_ || other.suppressed_structural_;
  for (const auto& [k, v] : other.counts_) counts_[k] += v;
  for (const auto& [k, v] : other.notes_) notes_[k] = v;
}

bool CheckReport::has_structural() const {
  if (suppressed_structural_) return true;
  for (const auto& f : findings_)
    if (f.severity == Severity::structural) return true;
  return false;
}

std::size_t CheckReport::count_of(const std::string& key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::string CheckReport::note_of(const std::string& key) const {
  auto it = notes_.find(key);
  return it == notes_.end() ? std::string{} : it->second;
}

bool CheckReport::mentions(std::string_view check_prefix, std::string_view witness_fragment) const {
  for (const auto& f : findings_) {
    if (f.check.compare(0, check_prefix.size(), check_prefix) != 0) continue;
    if (witness_fragment.empty() || f.witness.find(witness_fragment) != std::string::npos)
      return true;
  }
  return false;
}

std::string CheckReport::summary() const {
  std::ostringstream os;
  os << (ok() ? "ok" : "FAILED") << " (" << size() << " findings)";
  for (const auto& f : findings_)
    os << "\n  [" << to_string(f.severity) << "] " << f.check << ": " << f.witness
       << (f.location.empty() ? "" : " @ " + f.location);
  if (suppressed_ > 0) os << "\n  ... " << suppressed_ << " more";
  return os.str();
}

}  // namespace opgroth
