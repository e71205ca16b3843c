#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hodge {

/// Square integer matrix, row-major.
struct IntMatrix {
  int n = 0;
  std::vector<std::int64_t> a;

  static IntMatrix identity(int n);
  std::int64_t operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
  std::int64_t& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  bool operator==(const IntMatrix&) const = default;
};

/// Product with overflow detection; nullopt on overflow.
std::optional<IntMatrix> checked_product(const IntMatrix& x, const IntMatrix& y);

struct MonodromyElement {
  IntMatrix g;
  int level = 3;
  int order_bound = 12;
  std::optional<IntMatrix> form;  // integral polarization, if supplied
};

enum class SerreVerdict { Trivial, NoFiniteOrderDetected, CounterexampleFound };
std::string to_string(SerreVerdict v);

struct SerreResult {
  SerreVerdict verdict = SerreVerdict::NoFiniteOrderDetected;
  int order = 0;            // smallest k with g^k = I when found
  bool overflow = false;    // entries left int64 range: order is infinite
  bool preserves_form = true;
};

/// Throws LevelTooSmall (level < 3) and NotCongruentToIdentity.
SerreResult serre_check(const MonodromyElement& element);

struct SerreSweep {
  std::int64_t candidates = 0;  // matrices congruent to I in the entry box
  std::int64_t elements = 0;    // of those, determinant 1
  std::int64_t trivial = 0;
  std::int64_t no_finite_order = 0;
  std::int64_t counterexamples = 0;
};

/// All 2x2 integer matrices with entries in [-entry_bound, entry_bound],
/// congruent to I mod level, determinant 1 (= Sp(2, Z)).
SerreSweep serre_sweep_2x2(int entry_bound, int level, int order_bound, bool parallel);

}  // namespace hodge
