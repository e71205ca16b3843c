#include "doctest.h"

#include <cmath>
#include <set>

#include "hodgekit/kernels.hpp"
#include "hodgekit/monodromy.hpp"
#include "hodgekit/rng.hpp"
#include "hodgekit/scenario.hpp"
#include "support.hpp"

using namespace hodge;
using testing_support::ctx_of;

namespace {

const std::string kScenarios = HODGEKIT_SCENARIO_DIR;

IntMatrix int2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  IntMatrix m;
  m.n = 2;
  m.a = {a, b, c, d};
  return m;
}

}  // namespace

TEST_CASE("splitmix64 reference stream") {
  // reference outputs of SplitMix64 started from state 0
  CounterRng rng(0);
  CHECK(rng.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next_u64() == 0x06C45D188009454FULL);

  // streams are offsets of the same counter
  CounterRng a(9, 3), b(9, 3);
  for (int i = 0; i < 5; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(9, 4);
  CHECK(c.next_u64() != CounterRng(9, 3).next_u64());
}

TEST_CASE("complex normals have unit variance") {
  CounterRng rng(42);
  const int n = 200000;
  double re = 0, im = 0, re2 = 0, im2 = 0, u_min = 1, u_max = 0;
  for (int i = 0; i < n; ++i) {
    const cplx z = rng.complex_normal();
    re += z.real(), im += z.imag();
    re2 += z.real() * z.real(), im2 += z.imag() * z.imag();
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    u_min = std::min(u_min, u), u_max = std::max(u_max, u);
  }
  CHECK(std::abs(re / n) < 0.01);
  CHECK(std::abs(im / n) < 0.01);
  CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(u_min > 0.0);
  CHECK(u_max <= 1.0);
}

TEST_CASE("serre check examples") {
  CHECK(serre_check({IntMatrix::identity(2), 3, 12, std::nullopt}).verdict == SerreVerdict::Trivial);
  const SerreResult u = serre_check({int2(1, 3, 0, 1), 3, 12, std::nullopt});
  CHECK(u.verdict == SerreVerdict::NoFiniteOrderDetected);
  CHECK(u.order == 0);

  CHECK_THROWS_WITH_AS(serre_check({int2(1, 2, 0, 1), 2, 12, std::nullopt}), doctest::Contains("LevelTooSmall"),
                       Error);
  CHECK_THROWS_WITH_AS(serre_check({int2(1, 1, 0, 1), 3, 12, std::nullopt}),
                       doctest::Contains("NotCongruentToIdentity"), Error);

  // the standard symplectic form on Z^2
  const IntMatrix j = int2(0, 1, -1, 0);
  CHECK(serre_check({int2(1, 3, 0, 1), 3, 12, j}).preserves_form);
  CHECK(!serre_check({int2(4, 3, 0, 1), 3, 12, j}).preserves_form);

  // rotation by 90 degrees has order 4 but is not congruent to I mod 3
  CHECK_THROWS_AS(serre_check({int2(0, -1, 1, 0), 3, 12, std::nullopt}), Error);
}

TEST_CASE("serre sweep matches an independent enumeration") {
  // entries of I + 3Z inside [-9, 9]
  const std::vector<std::int64_t> diag = {-8, -5, -2, 1, 4, 7}, off = {-9, -6, -3, 0, 3, 6, 9};
  std::int64_t candidates = 0, elements = 0;
  for (auto a : diag)
    for (auto b : off)
      for (auto c : off)
        for (auto d : diag) {
          ++candidates;
          if (a * d - b * c == 1) ++elements;
        }
  const SerreSweep s = serre_sweep_2x2(9, 3, 12, false);
  CHECK(s.candidates == candidates);
  CHECK(s.candidates == 1764);
  CHECK(s.elements == elements);
  CHECK(s.trivial == 1);
  CHECK(s.no_finite_order == elements - 1);
  CHECK(s.counterexamples == 0);

  const SerreSweep p = serre_sweep_2x2(9, 3, 12, true);
  CHECK(p.candidates == s.candidates);
  CHECK(p.elements == s.elements);
  CHECK(p.no_finite_order == s.no_finite_order);
  CHECK(p.counterexamples == 0);
}

TEST_CASE("density probe") {
  const Context ctx = ctx_of(1, {1, 1});
  const auto r = kernels::density_probe(ctx, 10000, 42, false);
  CHECK(r.samples == 10000);
  CHECK(r.fraction >= 0.999);
  const auto again = kernels::density_probe(ctx, 10000, 42, false);
  CHECK(again.fraction == r.fraction);
  CHECK(again.in_nplus == r.in_nplus);
  const auto par = kernels::density_probe(ctx, 10000, 42, true);
  CHECK(par.in_nplus == r.in_nplus);
  CHECK(par.singular == r.singular);

  // explicit list: coefficient matrix with vanishing leading minor
  Mat f = Mat::Zero(2, 2);
  f(0, 1) = 1.0;
  f(1, 0) = 1.0;
  const auto zero = kernels::density_probe(ctx, std::vector<Mat>{Mat(f * ctx.base())});
  CHECK(zero.samples == 1);
  CHECK(zero.fraction == 0.0);

  for (const auto& s : testing_support::test_shapes()) {
    const Context c = ctx_of(s.weight, s.h);
    CHECK(kernels::density_probe(c, 500, 1, true).fraction >= 0.99);
  }
}

TEST_CASE("scenario parsing") {
  const Scenario s = load_scenario(kScenarios + "/disc_all.json");
  CHECK(s.jobs.size() == 10);
  CHECK(s.seed == 42);
  std::set<std::string> kinds;
  for (const auto& j : s.jobs) kinds.insert(j.kind);
  CHECK(kinds.size() == job_kinds().size());

  // canonical form is a fixed point
  const json canon = to_json(s);
  const Scenario s2 = parse_scenario(canon);
  CHECK(to_json(s2) == canon);
  CHECK(scenario_hash(s2) == scenario_hash(s));
  CHECK(parse_scenario_text(canon.dump(2)).jobs.size() == 10);

  // defaults are filled in
  CHECK(s.jobs[8].params["min_fraction"] == 0.999);
  CHECK(s.jobs[1].params["coords"][0][1] == json::array({0.3, 0.4}));

  json bad = canon;
  bad["jobs"][2]["params"]["matrx"] = json::array();
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("jobs[2].params.matrx"), Error);
  bad = canon;
  bad["jobs"][0]["kind"] = "validation";
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("jobs[0].kind"), Error);
  bad = canon;
  bad["seed"] = -1;
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("seed"), Error);
  bad = canon;
  bad["context"]["hodge"] = 1;
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("context.hodge"), Error);
  bad = canon;
  bad["jobs"][3]["params"]["length_to"] = "far";
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("jobs[3].params.length_to"), Error);

  CHECK_THROWS_WITH_AS(parse_scenario_text("{\n\"seed\": 1,\n\"context\": }"), doctest::Contains("line 3"), Error);
  try {
    parse_scenario(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("single validate job passes") {
  const Report r = run_scenario(load_scenario(kScenarios + "/validate_disc.json"));
  REQUIRE(r.jobs.size() == 1);
  CHECK(r.passed);
  CHECK(r.jobs[0].payload["hr1_residual"] == 0.0);
  CHECK(r.tool_version == HODGEKIT_VERSION);
}

TEST_CASE("mixed disc scenario is deterministic") {
  const Scenario s = load_scenario(kScenarios + "/disc_all.json");
  const Report a = run_scenario(s);
  CHECK(a.jobs.size() == 10);
  for (const auto& j : a.jobs) {
    CAPTURE(j.kind);
    CAPTURE(j.error.value_or(""));
    CHECK(j.passed);
  }
  CHECK(a.passed);
  const Report b = run_scenario(s);
  CHECK(payloads(a) == payloads(b));
  RunOptions par;
  par.parallel = true;
  const Report c = run_scenario(s, par);
  CHECK(payloads(a) == payloads(c));
  CHECK(a.jobs[3].payload["lengths"]["hodge_hs"].get<double>() == doctest::Approx(std::atanh(0.9)).epsilon(1e-9));
}

TEST_CASE("job errors are captured") {
  const json doc = json::parse(R"({
    "context": {"weight": 2, "hodge_numbers": [1, 2, 1]},
    "jobs": [
      {"kind": "curve", "params": {"generator": {"basis": {"grade": -2, "index": 0}}}},
      {"kind": "curve", "params": {"generator": {"basis": {"grade": -1, "index": 5}}},
       "expect_error": "ShapeMismatch"},
      {"kind": "validate", "context": {"weight": 1, "hodge_numbers": [1, 2]},
       "expect_error": "InvalidHodgeNumbers"}
    ]})");
  const Report r = run_scenario(parse_scenario(doc));
  REQUIRE(r.jobs.size() == 3);
  CHECK(!r.jobs[0].passed);
  REQUIRE(r.jobs[0].error);
  CHECK(r.jobs[0].error->find("JobError") == 0);
  CHECK(r.jobs[1].passed);
  CHECK(r.jobs[2].passed);
  CHECK(!r.passed);

  json top = doc;
  top["context"]["hodge_numbers"] = {1, 0, 1};
  CHECK_THROWS_AS(run_scenario(parse_scenario(top)), Error);
}
