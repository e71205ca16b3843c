#include "hodgekit/monodromy.hpp"

#include <array>

#include "hodgekit/types.hpp"

namespace hodge {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m{n, std::vector<std::int64_t>(static_cast<std::size_t>(n * n), 0)};
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::optional<IntMatrix> checked_product(const IntMatrix& x, const IntMatrix& y) {
  const int n = x.n;
  IntMatrix out{n, std::vector<std::int64_t>(static_cast<std::size_t>(n * n), 0)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::int64_t acc = 0;
      for (int k = 0; k < n; ++k) {
        std::int64_t t;
        if (__builtin_mul_overflow(x(i, k), y(k, j), &t)) return std::nullopt;
        if (__builtin_add_overflow(acc, t, &acc)) return std::nullopt;
      }
      out(i, j) = acc;
    }
  return out;
}

std::string to_string(SerreVerdict v) {
  switch (v) {
    case SerreVerdict::Trivial: return "Trivial";
    case SerreVerdict::NoFiniteOrderDetected: return "NoFiniteOrderDetected";
    case SerreVerdict::CounterexampleFound: return "CounterexampleFound";
  }
  return "Unknown";
}

SerreResult serre_check(const MonodromyElement& e) {
  if (e.level < 3) throw Error(ErrorKind::LevelTooSmall, "level must be at least 3", e.level);
  const int n = e.g.n;
  if (static_cast<int>(e.g.a.size()) != n * n)
    throw Error(ErrorKind::ShapeMismatch, "matrix entries do not match its size");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::int64_t d = e.g(i, j) - (i == j ? 1 : 0);
      if (d % e.level != 0)
        throw Error(ErrorKind::NotCongruentToIdentity, "g is not congruent to I mod level",
                    i * n + j, static_cast<double>(e.g(i, j)));
    }
  SerreResult r;
  if (e.form) {
    IntMatrix gt{n, e.g.a};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gt(i, j) = e.g(j, i);
    auto gq = checked_product(e.g, *e.form);
    auto gqg = gq ? checked_product(*gq, gt) : std::nullopt;
    r.preserves_form = gqg && *gqg == *e.form;
  }
  const IntMatrix id = IntMatrix::identity(n);
  if (e.g == id) {
    r.verdict = SerreVerdict::Trivial;
    r.order = 1;
    return r;
  }
  IntMatrix power = e.g;
  for (int k = 2; k <= e.order_bound; ++k) {
    auto next = checked_product(power, e.g);
    if (!next) {
      r.overflow = true;
      return r;
    }
    power = std::move(*next);
    if (power == id) {
      r.verdict = SerreVerdict::CounterexampleFound;
      r.order = k;
      return r;
    }
  }
  return r;
}

SerreSweep serre_sweep_2x2(int entry_bound, int level, int order_bound, bool parallel) {
  std::vector<std::array<std::int64_t, 4>> cands;
  auto residues = [&](int target) {
    std::vector<std::int64_t> v;
    for (int x = -entry_bound; x <= entry_bound; ++x)
      if (((x - target) % level + level) % level == 0) v.push_back(x);
    return v;
  };
  const auto ones = residues(1);
  const auto zeros = residues(0);
  for (auto a : ones)
    for (auto b : zeros)
      for (auto c : zeros)
        for (auto d : ones) cands.push_back({a, b, c, d});

  SerreSweep s;
  s.candidates = static_cast<std::int64_t>(cands.size());
  std::int64_t elements = 0, trivial = 0, nofinite = 0, counter = 0;
  const auto count = static_cast<std::int64_t>(cands.size());
  auto visit = [&](std::int64_t i, std::int64_t& el, std::int64_t& tr, std::int64_t& nf,
                   std::int64_t& ce) {
    const auto& c = cands[static_cast<std::size_t>(i)];
    if (c[0] * c[3] - c[1] * c[2] != 1) return;
    ++el;
    MonodromyElement e{IntMatrix{2, {c[0], c[1], c[2], c[3]}}, level, order_bound,
                       IntMatrix{2, {0, 1, -1, 0}}};
    const SerreResult r = serre_check(e);
    if (r.verdict == SerreVerdict::Trivial) ++tr;
    else if (r.verdict == SerreVerdict::CounterexampleFound) ++ce;
    else ++nf;
  };
  if (parallel) {
#pragma omp parallel for schedule(static) reduction(+ : elements, trivial, nofinite, counter)
    for (std::int64_t i = 0; i < count; ++i) visit(i, elements, trivial, nofinite, counter);
  } else {
    for (std::int64_t i = 0; i < count; ++i) visit(i, elements, trivial, nofinite, counter);
  }
  s.elements = elements;
  s.trivial = trivial;
  s.no_finite_order = nofinite;
  s.counterexamples = counter;
  return s;
}

}  // namespace hodge
