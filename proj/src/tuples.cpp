#include "opgroth/tuples.hpp"

#include <stdexcept>

namespace opgroth {

std::size_t encode_tuple(std::span<const std::size_t> digits, std::span<const std::size_t> radices) {
  if (digits.size() != radices.size()) throw std::invalid_argument("encode_tuple: length mismatch");
  std::size_t code = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] >= radices[k]) throw std::out_of_range("encode_tuple: digit out of range");
    code = code * radices[k] + digits[k];
  }
  return code;
}

std::vector<std::size_t> decode_tuple(std::size_t code, std::span<const std::size_t> radices) {
  std::vector<std::size_t> digits(radices.size());
  for (std::size_t k = radices.size(); k-- > 0;) {
    digits[k] = code % radices[k];
    code /= radices[k];
  }
  return digits;
}

std::size_t tuple_count(std::span<const std::size_t> radices) {
  std::size_t n = 1;
  for (std::size_t r : radices) n *= r;
  return n;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

std::string paren_list(std::span<const std::string> parts) { return "(" + join(parts, ",") + ")"; }

std::string bracket_list(std::span<const std::string> parts) { return "[" + join(parts, ",") + "]"; }

}  // namespace opgroth
