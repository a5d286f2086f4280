#include "opgroth/finmap.hpp"

#include <algorithm>
#include <numeric>

namespace opgroth {

FinMap::FinMap(std::size_t target, std::vector<std::size_t> vals) : n(target), values(std::move(vals)) {
  for (std::size_t v : values)
    if (v >= n) throw std::out_of_range("FinMap: value out of range");
}

FinMap FinMap::from_one_based(std::size_t target, const std::vector<std::size_t>& vals) {
  std::vector<std::size_t> v;
  v.reserve(vals.size());
  for (std::size_t x : vals) {
    if (x == 0) throw std::out_of_range("FinMap: values are 1-based");
    v.push_back(x - 1);
  }
  return FinMap(target, std::move(v));
}

std::string FinMap::to_string() const {
  std::string s = "[";
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) s += ",";
    s += std::to_string(values[j] + 1);
  }
  return s + "]";
}

FinMap parse_finmap(std::string_view text, std::optional<std::size_t> target) {
  std::string_view t = text;
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw std::invalid_argument("finmap: missing ']'");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::size_t> vals;
  std::size_t pos = 0;
  while (pos < t.size()) {
    std::size_t comma = t.find(',', pos);
    std::string_view tok = t.substr(pos, comma == std::string_view::npos ? t.size() - pos : comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw std::invalid_argument("finmap: expected a positive integer");
    vals.push_back(std::stoul(std::string(tok)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
    if (pos == t.size()) throw std::invalid_argument("finmap: trailing comma");
  }
  const std::size_t n =
      target ? *target : (vals.empty() ? 0 : *std::max_element(vals.begin(), vals.end()));
  for (std::size_t v : vals)
    if (v == 0 || v > n) throw std::invalid_argument("finmap: value out of range");
  return FinMap::from_one_based(n, vals);
}

FinMap identity_map(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return FinMap(n, std::move(v));
}

FinMap terminal_map(std::size_t n) { return FinMap(1, std::vector<std::size_t>(n, 0)); }

FinMap compose(const FinMap& f, const FinMap& g) {
  if (g.target() != f.source()) throw std::invalid_argument("compose: FinMaps not composable");
  std::vector<std::size_t> v;
  v.reserve(g.source());
  for (std::size_t x : g.values) v.push_back(f(x));
  return FinMap(f.target(), std::move(v));
}

FinMap inverse_permutation(const FinMap& p) {
  if (!is_permutation(p)) throw std::invalid_argument("inverse_permutation: not a permutation");
  std::vector<std::size_t> v(p.source());
  for (std::size_t j = 0; j < p.source(); ++j) v[p(j)] = j;
  return FinMap(p.target(), std::move(v));
}

bool is_monotone(const FinMap& f) { return std::is_sorted(f.values.begin(), f.values.end()); }

bool is_permutation(const FinMap& f) {
  if (f.source() != f.target()) return false;
  std::vector<bool> seen(f.target());
  for (std::size_t v : f.values) {
    if (seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

bool is_surjective(const FinMap& f) {
  std::vector<bool> seen(f.target());
  for (std::size_t v : f.values) seen[v] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<std::size_t> fiber(const FinMap& f, std::size_t i) {
  if (i >= f.target()) throw std::out_of_range("fiber: index out of range");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < f.source(); ++j)
    if (f(j) == i) out.push_back(j);
  return out;
}

std::vector<std::vector<std::size_t>> fibers(const FinMap& f) {
  std::vector<std::vector<std::size_t>> out(f.target());
  for (std::size_t j = 0; j < f.source(); ++j) out[f(j)].push_back(j);
  return out;
}

std::vector<std::size_t> fiber_sizes(const FinMap& f) {
  std::vector<std::size_t> out(f.target(), 0);
  for (std::size_t v : f.values) ++out[v];
  return out;
}

FinMap induced_fiber_map(const FinMap& f, const FinMap& g, std::size_t i) {
  if (g.target() != f.source()) throw std::invalid_argument("induced_fiber_map: arity mismatch");
  const auto target_fiber = fiber(f, i);
  std::vector<std::size_t> rank(f.source(), 0);
  for (std::size_t k = 0; k < target_fiber.size(); ++k) rank[target_fiber[k]] = k;
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < g.source(); ++k)
    if (f(g(k)) == i) v.push_back(rank[g(k)]);
  return FinMap(target_fiber.size(), std::move(v));
}

FinMap block_permutation(const FinMap& f, std::span<const FinMap> taus) {
  if (taus.size() != f.target()) throw std::invalid_argument("block_permutation: fiber count");
  const auto fs = fibers(f);
  std::vector<std::size_t> v(f.source());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const FinMap& t = taus[i];
    if (t.source() != fs[i].size() || !is_permutation(t))
      throw std::invalid_argument("block_permutation: tau arity differs from fiber size");
    for (std::size_t k = 0; k < fs[i].size(); ++k) v[fs[i][k]] = fs[i][t(k)];
  }
  return FinMap(f.source(), std::move(v));
}

MonotonePermFactorization factorize_monotone_perm(const FinMap& f) {
  const std::size_t m = f.source();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f(a) < f(b); });
  std::vector<std::size_t> h(m), g(m);
  for (std::size_t k = 0; k < m; ++k) {
    h[order[k]] = k;
    g[k] = f(order[k]);
  }
  return {FinMap(f.target(), std::move(g)), FinMap(m, std::move(h))};
}

std::vector<FinMap> all_maps(std::size_t m, std::size_t n) {
  std::vector<FinMap> out;
  if (n == 0 && m > 0) return out;
  std::vector<std::size_t> v(m, 0);
  while (true) {
    out.emplace_back(n, v);
    std::size_t k = m;
    while (k > 0) {
      --k;
      if (++v[k] < n) break;
      v[k] = 0;
      if (k == 0) return out;
    }
    if (m == 0) return out;
  }
}

std::vector<FinMap> all_permutations(std::size_t n) {
  std::vector<FinMap> out;
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  do {
    out.emplace_back(n, v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace opgroth
