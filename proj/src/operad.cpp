#include "opgroth/operad.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace opgroth {

std::optional<std::size_t> Semiring::find(std::string_view label) const {
  for (std::size_t k = 0; k < elements.size(); ++k)
    if (elements[k] == label) return k;
  return std::nullopt;
}

Semiring boolean_semiring() {
  return Semiring{"bool", {"0", "1"}, {0, 1, 1, 1}, {0, 0, 0, 1}, 0, 1};
}

CheckReport check_semiring(const Semiring& r) {
  CheckReport rep;
  const std::size_t k = r.size();
  if (k == 0 || r.add.size() != k * k || r.mul.size() != k * k || r.zero >= k || r.one >= k) {
    rep.structural("semiring.tables", "table sizes or constants out of range");
    return rep;
  }
  for (std::size_t v : r.add)
    if (v >= k) rep.structural("semiring.tables", "addition value out of range");
  for (std::size_t v : r.mul)
    if (v >= k) rep.structural("semiring.tables", "multiplication value out of range");
  if (rep.has_structural()) return rep;
  const auto& L = r.elements;
  for (std::size_t a = 0; a < k; ++a) {
    if (r.plus(a, r.zero) != a) rep.violation("semiring.add_unit", L[a]);
    if (r.times(a, r.one) != a || r.times(r.one, a) != a) rep.violation("semiring.mul_unit", L[a]);
    if (r.times(a, r.zero) != r.zero || r.times(r.zero, a) != r.zero)
      rep.violation("semiring.zero_absorbing", L[a]);
    for (std::size_t b = 0; b < k; ++b) {
      if (r.plus(a, b) != r.plus(b, a)) rep.violation("semiring.add_comm", L[a] + "," + L[b]);
      for (std::size_t c = 0; c < k; ++c) {
        const std::string w = L[a] + "," + L[b] + "," + L[c];
        if (r.plus(r.plus(a, b), c) != r.plus(a, r.plus(b, c))) rep.violation("semiring.add_assoc", w);
        if (r.times(r.times(a, b), c) != r.times(a, r.times(b, c))) rep.violation("semiring.mul_assoc", w);
        if (r.times(a, r.plus(b, c)) != r.plus(r.times(a, b), r.times(a, c)) ||
            r.times(r.plus(a, b), c) != r.plus(r.times(a, c), r.times(b, c)))
          rep.violation("semiring.distributive", w);
      }
    }
  }
  return rep;
}

std::string_view to_string(Operad::Kind k) {
  switch (k) {
    case Operad::Kind::comm: return "comm";
    case Operad::Kind::assoc: return "assoc";
    case Operad::Kind::qconv: return "qconv";
    case Operad::Kind::table: return "table";
  }
  return "table";
}

Operad::Operad(std::string name, Kind kind, std::size_t max_arity,
               std::vector<std::vector<std::string>> carriers, OpId unit)
    : name_(std::move(name)), kind_(kind), max_arity_(max_arity), carriers_(std::move(carriers)), unit_(unit) {
  if (carriers_.size() != max_arity_ + 1) throw std::invalid_argument("Operad: need carriers O(0..N)");
  if (max_arity_ < 1 || unit_.index() >= carriers_[1].size())
    throw std::invalid_argument("Operad: unit must lie in O(1)");
}

std::optional<OpId> Operad::find(std::size_t n, std::string_view label) const {
  if (n >= carriers_.size()) return std::nullopt;
  for (std::size_t k = 0; k < carriers_[n].size(); ++k)
    if (carriers_[n][k] == label) return OpId(k);
  return std::nullopt;
}

void Operad::set_semiring(Semiring r) { semiring_ = std::move(r); }

OpId Operad::permutation_id(const FinMap& sigma) const {
  auto it = perm_index_.find(sigma);
  if (it == perm_index_.end()) throw std::out_of_range("Operad: not a carrier permutation");
  return it->second;
}

void Operad::set_entry(const CompKey& key, OpId value) {
  const std::size_t m = key.f.source(), n = key.f.target();
  if (m > max_arity_ || n > max_arity_ || key.qs.size() != n || key.p.index() >= arity_size(n))
    throw std::invalid_argument("Operad::set_entry: ill-typed key");
  const auto sizes = fiber_sizes(key.f);
  for (std::size_t i = 0; i < n; ++i)
    if (key.qs[i].index() >= arity_size(sizes[i]))
      throw std::invalid_argument("Operad::set_entry: operand out of carrier");
  if (value.index() >= arity_size(m)) throw std::invalid_argument("Operad::set_entry: value out of carrier");
  entries_[key] = value;
}

std::optional<OpId> Operad::compose(const FinMap& f, OpId p, std::span<const OpId> qs) const {
  const std::size_t m = f.source(), n = f.target();
  if (m > max_arity_ || n > max_arity_) throw std::out_of_range("Operad::compose: arity above truncation");
  if (qs.size() != n || p.index() >= arity_size(n))
    throw std::invalid_argument("Operad::compose: ill-typed operands");
  const auto sizes = fiber_sizes(f);
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[i] == 0 && carriers_[0].empty()) throw std::domain_error("domain-empty");
    if (qs[i].index() >= arity_size(sizes[i]))
      throw std::invalid_argument("Operad::compose: operand out of carrier");
  }
  if (!entries_.empty()) {
    auto it = entries_.find(CompKey{f, p, std::vector<OpId>(qs.begin(), qs.end())});
    if (it != entries_.end()) return it->second;
  }
  return rule(f, p, qs);
}

OpId Operad::compose_checked(const FinMap& f, OpId p, std::span<const OpId> qs) const {
  auto r = compose(f, p, qs);
  if (!r) throw std::logic_error("Operad::compose: no entry for " + entry_text(f, p, qs));
  return *r;
}

std::optional<OpId> Operad::rule(const FinMap& f, OpId p, std::span<const OpId> qs) const {
  switch (kind_) {
    case Kind::comm:
      return OpId(0);
    case Kind::assoc: {
      const FinMap& sigma = permutation(f.target(), p);
      const auto fact = factorize_monotone_perm(opgroth::compose(sigma, f));
      const auto sizes = fiber_sizes(f);
      std::vector<FinMap> taus;
      for (std::size_t i = 0; i < qs.size(); ++i) taus.push_back(permutation(sizes[i], qs[i]));
      return permutation_id(opgroth::compose(fact.h, block_permutation(f, taus)));
    }
    case Kind::qconv: {
      const Semiring& r = *semiring_;
      const auto& alpha = coordinates(f.target(), p);
      const auto sizes = fiber_sizes(f);
      std::vector<std::size_t> next(f.target(), 0), out(f.source());
      for (std::size_t j = 0; j < f.source(); ++j) {
        const std::size_t i = f(j);
        out[j] = r.times(alpha[i], coordinates(sizes[i], qs[i])[next[i]++]);
      }
      const auto& index = coord_index_.at(f.source());
      auto it = index.find(out);
      if (it == index.end()) return std::nullopt;
      return it->second;
    }
    case Kind::table:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string Operad::entry_text(const FinMap& f, OpId p, std::span<const OpId> qs) const {
  std::string s = "mu " + f.to_string() + " " + label(f.target(), p);
  const auto sizes = fiber_sizes(f);
  for (std::size_t i = 0; i < qs.size(); ++i) s += " " + label(sizes[i], qs[i]);
  return s;
}

bool Operad::operator==(const Operad& o) const {
  return kind_ == o.kind_ && max_arity_ == o.max_arity_ && carriers_ == o.carriers_ && unit_ == o.unit_ &&
         entries_ == o.entries_ && semiring_ == o.semiring_;
}

OperadPtr build_comm(std::size_t max_arity) {
  std::vector<std::vector<std::string>> carriers(max_arity + 1, std::vector<std::string>{"e"});
  return std::make_shared<const Operad>("Comm", Operad::Kind::comm, max_arity, std::move(carriers), OpId(0));
}

OperadPtr build_assoc(std::size_t max_arity) {
  if (max_arity > 9) throw std::invalid_argument("build_assoc: arity labels limited to 9");
  std::vector<std::vector<std::string>> carriers(max_arity + 1);
  std::vector<std::vector<FinMap>> perms(max_arity + 1);
  for (std::size_t n = 0; n <= max_arity; ++n) {
    perms[n] = all_permutations(n);
    for (const auto& s : perms[n]) {
      std::string l = "s";
      for (std::size_t v : s.values) l += std::to_string(v + 1);
      carriers[n].push_back(std::move(l));
    }
  }
  auto o = std::make_shared<Operad>("Assoc", Operad::Kind::assoc, max_arity, std::move(carriers), OpId(0));
  for (std::size_t n = 0; n <= max_arity; ++n)
    for (std::size_t k = 0; k < perms[n].size(); ++k) o->perm_index_.emplace(perms[n][k], OpId(k));
  o->perms_ = std::move(perms);
  return o;
}

OperadPtr build_qconv(const Semiring& r, std::size_t max_arity) {
  if (!check_semiring(r).ok()) throw std::invalid_argument("build_qconv: semiring fails its axioms");
  std::vector<std::vector<std::string>> carriers(max_arity + 1);
  std::vector<std::vector<std::vector<std::size_t>>> coords(max_arity + 1);
  std::vector<std::map<std::vector<std::size_t>, OpId>> index(max_arity + 1);
  std::optional<OpId> unit;
  for (std::size_t n = 0; n <= max_arity; ++n) {
    std::vector<std::size_t> radices(n, r.size());
    for_each_tuple(radices, [&](std::span<const std::size_t> d) {
      if (n == 0) return;  // the empty sum is 0, never 1 in a nontrivial semiring
      std::size_t sum = r.zero;
      for (std::size_t a : d) sum = r.plus(sum, a);
      if (sum != r.one) return;
      std::vector<std::string> parts;
      for (std::size_t a : d) parts.push_back(r.elements[a]);
      index[n].emplace(std::vector<std::size_t>(d.begin(), d.end()), OpId(carriers[n].size()));
      if (n == 1 && d[0] == r.one) unit = OpId(carriers[n].size());
      carriers[n].push_back("q" + join(parts, "_"));
      coords[n].emplace_back(d.begin(), d.end());
    });
  }
  if (r.zero == r.one) throw std::invalid_argument("build_qconv: trivial semiring");
  auto o = std::make_shared<Operad>("QConv_" + r.name, Operad::Kind::qconv, max_arity, std::move(carriers),
                                    unit.value_or(OpId(0)));
  o->semiring_ = r;
  o->coords_ = std::move(coords);
  o->coord_index_ = std::move(index);
  return o;
}

CheckReport check_operad_axioms(const Operad& o) {
  CheckReport rep;
  const std::size_t N = o.max_arity();
  const OpId eta = o.unit();
  std::size_t unit_instances = 0, assoc_instances = 0;

  auto missing = [&](const FinMap& f, OpId p, std::span<const OpId> qs) {
    rep.structural("operad.compose_missing", o.entry_text(f, p, qs));
  };

  for (std::size_t n = 0; n <= N; ++n) {
    const FinMap id = identity_map(n), t = terminal_map(n);
    const std::vector<OpId> etas(n, eta);
    for (std::size_t k = 0; k < o.arity_size(n); ++k) {
      const OpId p(k);
      const std::vector<OpId> single{p};
      auto a = o.compose(id, p, etas);
      auto b = o.compose(t, eta, single);
      unit_instances += 2;
      if (!a) missing(id, p, etas);
      else if (*a != p)
        rep.violation("operad.unit_right", o.entry_text(id, p, etas) + " = " + o.label(n, *a) + ", expected " +
                                               o.label(n, p));
      if (!b) missing(t, eta, single);
      else if (*b != p)
        rep.violation("operad.unit_left", o.entry_text(t, eta, single) + " = " + o.label(n, *b) +
                                              ", expected " + o.label(n, p));
    }
  }

  for (std::size_t n = 0; n <= N; ++n)
    for (std::size_t m = 0; m <= N; ++m)
      for (const FinMap& f : all_maps(m, n)) {
        const auto ffib = fibers(f);
        for (std::size_t l = 0; l <= N; ++l)
          for (const FinMap& g : all_maps(l, m)) {
            const FinMap fg = compose(f, g);
            std::vector<FinMap> gi;
            for (std::size_t i = 0; i < n; ++i) gi.push_back(induced_fiber_map(f, g, i));
            for (std::size_t pk = 0; pk < o.arity_size(n); ++pk) {
              const OpId p(pk);
              for_each_operand_tuple(o, f, [&](std::span<const OpId> qs) {
                auto pq = o.compose(f, p, qs);
                if (!pq) {
                  missing(f, p, qs);
                  return;
                }
                for_each_operand_tuple(o, g, [&](std::span<const OpId> rs) {
                  ++assoc_instances;
                  auto left = o.compose(g, *pq, rs);
                  if (!left) {
                    missing(g, *pq, rs);
                    return;
                  }
                  std::vector<OpId> inner(n);
                  for (std::size_t i = 0; i < n; ++i) {
                    std::vector<OpId> ri;
                    for (std::size_t j : ffib[i]) ri.push_back(rs[j]);
                    auto c = o.compose(gi[i], qs[i], ri);
                    if (!c) {
                      missing(gi[i], qs[i], ri);
                      return;
                    }
                    inner[i] = *c;
                  }
                  auto right = o.compose(fg, p, inner);
                  if (!right) {
                    missing(fg, p, inner);
                    return;
                  }
                  if (*left != *right) {
                    std::vector<std::string> ql, rl;
                    const auto fs = fiber_sizes(f), gs = fiber_sizes(g);
                    for (std::size_t i = 0; i < n; ++i) ql.push_back(o.label(fs[i], qs[i]));
                    for (std::size_t j = 0; j < m; ++j) rl.push_back(o.label(gs[j], rs[j]));
                    rep.violation("operad.assoc", "g=" + g.to_string() + " f=" + f.to_string() +
                                                      " p=" + o.label(n, p) + " q=" + paren_list(ql) +
                                                      " r=" + paren_list(rl) + ": " + o.label(l, *left) +
                                                      " vs " + o.label(l, *right));
                  }
                });
              });
            }
          }
      }
  rep.count("operad.unit_instances", unit_instances);
  rep.count("operad.assoc_instances", assoc_instances);
  return rep;
}

namespace {

// mu_g(mu_f(p; qs); rs) and mu_{fg}(p; (mu_{g_i}(q_i; rs|_i))_i), or nullopt
// when an entry is missing.
std::optional<std::pair<OpId, OpId>> assoc_sides(const Operad& o, const FinMap& f, const FinMap& g, OpId p,
                                                 std::span<const OpId> qs, std::span<const OpId> rs) {
  auto pq = o.compose(f, p, qs);
  if (!pq) return std::nullopt;
  auto left = o.compose(g, *pq, rs);
  if (!left) return std::nullopt;
  const auto ffib = fibers(f);
  std::vector<OpId> inner(f.target());
  for (std::size_t i = 0; i < f.target(); ++i) {
    std::vector<OpId> ri;
    for (std::size_t j : ffib[i]) ri.push_back(rs[j]);
    auto c = o.compose(induced_fiber_map(f, g, i), qs[i], ri);
    if (!c) return std::nullopt;
    inner[i] = *c;
  }
  auto right = o.compose(compose(f, g), p, inner);
  if (!right) return std::nullopt;
  return std::pair{*left, *right};
}

}  // namespace

CheckReport check_operad_associativity_sampled(const Operad& o, std::size_t samples, std::uint64_t seed) {
  CheckReport rep;
  rep.note("operad.sample_seed", std::to_string(seed));
  std::mt19937_64 rng(seed);
  const std::size_t N = o.max_arity();
  std::uniform_int_distribution<std::size_t> arity(0, N);
  auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
  auto random_map = [&](std::size_t m, std::size_t n) {
    std::vector<std::size_t> v(m);
    for (auto& x : v) x = pick(n);
    return FinMap(n, std::move(v));
  };
  std::size_t done = 0, attempts = 0;
  while (done < samples && attempts < samples * 100) {
    ++attempts;
    const std::size_t l = arity(rng), m = arity(rng), n = arity(rng);
    if ((m > 0 && n == 0) || (l > 0 && m == 0)) continue;
    const FinMap f = random_map(m, n), g = random_map(l, m);
    if (o.arity_size(n) == 0) continue;
    const auto fs = fiber_sizes(f), gs = fiber_sizes(g);
    if (std::any_of(fs.begin(), fs.end(), [&](std::size_t s) { return o.arity_size(s) == 0; }) ||
        std::any_of(gs.begin(), gs.end(), [&](std::size_t s) { return o.arity_size(s) == 0; }))
      continue;
    const OpId p(pick(o.arity_size(n)));
    std::vector<OpId> qs, rs;
    for (std::size_t s : fs) qs.emplace_back(pick(o.arity_size(s)));
    for (std::size_t s : gs) rs.emplace_back(pick(o.arity_size(s)));
    ++done;
    auto sides = assoc_sides(o, f, g, p, qs, rs);
    if (!sides) rep.structural("operad.compose_missing", "g=" + g.to_string() + " f=" + f.to_string());
    else if (sides->first != sides->second)
      rep.violation("operad.assoc", "g=" + g.to_string() + " f=" + f.to_string() + " p=" + o.label(n, p));
  }
  rep.count("operad.assoc_instances", done);
  return rep;
}

Operad tabulate(const Operad& o) {
  std::vector<std::vector<std::string>> carriers;
  for (std::size_t n = 0; n <= o.max_arity(); ++n) carriers.push_back(o.carrier(n));
  Operad t(o.name(), Operad::Kind::table, o.max_arity(), std::move(carriers), o.unit());
  for (std::size_t n = 0; n <= o.max_arity(); ++n)
    for (std::size_t m = 0; m <= o.max_arity(); ++m)
      for (const FinMap& f : all_maps(m, n))
        for (std::size_t pk = 0; pk < o.arity_size(n); ++pk)
          for_each_operand_tuple(o, f, [&](std::span<const OpId> qs) {
            if (auto r = o.compose(f, OpId(pk), qs))
              t.set_entry(CompKey{f, OpId(pk), std::vector<OpId>(qs.begin(), qs.end())}, *r);
          });
  return t;
}

std::vector<OpId> OperadMorphism::apply(std::span<const OpId> ps, std::span<const std::size_t> arities) const {
  std::vector<OpId> out;
  for (std::size_t k = 0; k < ps.size(); ++k) out.push_back((*this)(arities[k], ps[k]));
  return out;
}

CheckReport check_operad_morphism(const OperadMorphism& h) {
  CheckReport rep;
  if (!h.dom || !h.cod) {
    rep.structural("operad_morphism.refs", "missing domain or codomain");
    return rep;
  }
  const Operad& O = *h.dom;
  const Operad& P = *h.cod;
  const std::size_t N = O.max_arity();
  if (P.max_arity() != N) {
    rep.structural("operad_morphism.arity", "truncations differ");
    return rep;
  }
  if (h.maps.size() != N + 1) {
    rep.structural("operad_morphism.size", "need one map per arity");
    return rep;
  }
  for (std::size_t n = 0; n <= N; ++n) {
    if (h.maps[n].size() != O.arity_size(n)) rep.structural("operad_morphism.size", "arity " + std::to_string(n));
    for (OpId v : h.maps[n])
      if (v.index() >= P.arity_size(n)) rep.structural("operad_morphism.range", "arity " + std::to_string(n));
  }
  if (rep.has_structural()) return rep;
  if (h(1, O.unit()) != P.unit())
    rep.violation("operad_morphism.unit", O.label(1, O.unit()) + " |-> " + P.label(1, h(1, O.unit())));
  std::size_t instances = 0;
  for (std::size_t n = 0; n <= N; ++n)
    for (std::size_t m = 0; m <= N; ++m)
      for (const FinMap& f : all_maps(m, n)) {
        const auto sizes = fiber_sizes(f);
        for (std::size_t pk = 0; pk < O.arity_size(n); ++pk) {
          const OpId p(pk);
          for_each_operand_tuple(O, f, [&](std::span<const OpId> qs) {
            ++instances;
            auto lhs = O.compose(f, p, qs);
            const auto hq = h.apply(qs, sizes);
            auto rhs = P.compose(f, h(n, p), hq);
            if (!lhs || !rhs) {
              rep.structural("operad_morphism.compose_missing", O.entry_text(f, p, qs));
              return;
            }
            if (h(m, *lhs) != *rhs)
              rep.violation("operad_morphism.composition", O.entry_text(f, p, qs) + " |-> " + P.label(m, h(m, *lhs)) +
                                                               " vs " + P.entry_text(f, h(n, p), hq) + " = " +
                                                               P.label(m, *rhs));
          });
        }
      }
  rep.count("operad_morphism.instances", instances);
  return rep;
}

OperadMorphism identity_morphism(const OperadPtr& o) {
  OperadMorphism h{o, o, {}};
  for (std::size_t n = 0; n <= o->max_arity(); ++n) {
    h.maps.emplace_back();
    for (std::size_t k = 0; k < o->arity_size(n); ++k) h.maps.back().emplace_back(k);
  }
  return h;
}

OperadMorphism terminal_morphism(const OperadPtr& o) {
  OperadMorphism h{o, build_comm(o->max_arity()), {}};
  for (std::size_t n = 0; n <= o->max_arity(); ++n) h.maps.emplace_back(o->arity_size(n), OpId(0));
  return h;
}

OperadMorphism compose(const OperadMorphism& b, const OperadMorphism& a) {
  OperadMorphism h{a.dom, b.cod, {}};
  for (std::size_t n = 0; n < a.maps.size(); ++n) {
    h.maps.emplace_back();
    for (OpId p : a.maps[n]) h.maps.back().push_back(b(n, p));
  }
  return h;
}

}  // namespace opgroth
