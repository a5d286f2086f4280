#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace opgroth {

// Mixed-radix encoding with position 0 varying slowest (lexicographic).
std::size_t encode_tuple(std::span<const std::size_t> digits, std::span<const std::size_t> radices);
std::vector<std::size_t> decode_tuple(std::size_t code, std::span<const std::size_t> radices);
std::size_t tuple_count(std::span<const std::size_t> radices);

// Calls fn(span<const size_t>) once per tuple in lexicographic order. A
// zero radix produces no tuples; an empty radix list produces one (empty)
// tuple. Returns false as soon as fn returns false.
template <class Fn>
bool for_each_tuple(std::span<const std::size_t> radices, Fn&& fn) {
  for (std::size_t r : radices)
    if (r == 0) return true;
  std::vector<std::size_t> digits(radices.size(), 0);
  while (true) {
    if constexpr (std::is_same_v<decltype(fn(std::span<const std::size_t>(digits))), bool>) {
      if (!fn(std::span<const std::size_t>(digits))) return false;
    } else {
      fn(std::span<const std::size_t>(digits));
    }
    std::size_t k = digits.size();
    while (k > 0) {
      --k;
      if (++digits[k] < radices[k]) break;
      digits[k] = 0;
      if (k == 0) return true;
    }
    if (digits.empty()) return true;
  }
}

std::string join(std::span<const std::string> parts, std::string_view sep);
std::string paren_list(std::span<const std::string> parts);   // "(a,b)"
std::string bracket_list(std::span<const std::string> parts); // "[a,b]"

}  // namespace opgroth
