#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opgroth {

/// A map m -> n in the skeleton of finite sets. Values are 0-based here;
/// the 1-based form appears only in text (to_string, parse_finmap).
struct FinMap {
  std::size_t n = 0;
  std::vector<std::size_t> values;

  FinMap() = default;
  FinMap(std::size_t target, std::vector<std::size_t> vals);

  static FinMap from_one_based(std::size_t target, const std::vector<std::size_t>& vals);

  std::size_t source() const { return values.size(); }
  std::size_t target() const { return n; }
  std::size_t operator()(std::size_t j) const { return values.at(j); }

  std::string to_string() const;  // "[2,1,1]"
  auto operator<=>(const FinMap&) const = default;
};

// Parses "[2,1,1]" or "2,1,1" (1-based); the target defaults to the maximum
// value. Throws std::invalid_argument on malformed text.
FinMap parse_finmap(std::string_view text, std::optional<std::size_t> target = std::nullopt);

FinMap identity_map(std::size_t n);
FinMap terminal_map(std::size_t n);  // t_n : n -> 1
FinMap compose(const FinMap& f, const FinMap& g);  // f∘g
FinMap inverse_permutation(const FinMap& p);

bool is_monotone(const FinMap& f);
bool is_permutation(const FinMap& f);
bool is_surjective(const FinMap& f);

// Positions j with f(j) = i, increasing. Throws std::out_of_range for i >= n.
std::vector<std::size_t> fiber(const FinMap& f, std::size_t i);
std::vector<std::vector<std::size_t>> fibers(const FinMap& f);
std::vector<std::size_t> fiber_sizes(const FinMap& f);

// For g: l -> m and f: m -> n, the map (f∘g)^{-1}(i) -> f^{-1}(i) induced by
// g, both fibers enumerated increasingly.
FinMap induced_fiber_map(const FinMap& f, const FinMap& g, std::size_t i);

// The permutation of m that acts on the fiber over i as taus[i].
FinMap block_permutation(const FinMap& f, std::span<const FinMap> taus);

struct MonotonePermFactorization {
  FinMap g;  // weakly monotone
  FinMap h;  // permutation preserving the order inside each fiber
};

// f = g∘h with g monotone and h fiber-order preserving; both unique.
MonotonePermFactorization factorize_monotone_perm(const FinMap& f);

std::vector<FinMap> all_maps(std::size_t m, std::size_t n);
std::vector<FinMap> all_permutations(std::size_t n);

// ((x_j)_{f(j)=i})_i with blocks in order of i and positions increasing.
template <class T>
std::vector<std::vector<T>> reindex_by_fibers(const FinMap& f, std::span<const T> xs) {
  if (xs.size() != f.source()) throw std::invalid_argument("reindex_by_fibers: length mismatch");
  std::vector<std::vector<T>> out(f.target());
  for (std::size_t j = 0; j < xs.size(); ++j) out[f(j)].push_back(xs[j]);
  return out;
}

template <class T>
std::vector<std::vector<T>> reindex_by_fibers(const FinMap& f, const std::vector<T>& xs) {
  return reindex_by_fibers(f, std::span<const T>(xs));
}

// Inverse of reindex_by_fibers.
template <class T>
std::vector<T> flatten_fibers(const FinMap& f, const std::vector<std::vector<T>>& blocks) {
  if (blocks.size() != f.target()) throw std::invalid_argument("flatten_fibers: block count");
  std::vector<T> out;
  out.reserve(f.source());
  std::vector<std::size_t> next(f.target(), 0);
  for (std::size_t j = 0; j < f.source(); ++j) {
    std::size_t i = f(j);
    if (next[i] >= blocks[i].size()) throw std::invalid_argument("flatten_fibers: block size");
    out.push_back(blocks[i][next[i]++]);
  }
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (next[i] != blocks[i].size()) throw std::invalid_argument("flatten_fibers: block size");
  return out;
}

}  // namespace opgroth
