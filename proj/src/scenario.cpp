#include "hodgekit/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "hodgekit/affine_chart.hpp"
#include "hodgekit/kernels.hpp"
#include "hodgekit/lie_structure.hpp"
#include "hodgekit/monodromy.hpp"
#include "hodgekit/sampling.hpp"

namespace hodge {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ParseError, path + ": " + what);
}

// ---------------------------------------------------------------- schema

enum class T { Int, UInt, ComplexList, Number, Bool, String, Matrix, IntMatrix, Generator, Generators,
               Matrices, Family, Completeness };

struct Field {
  T type;
  json def;  // null: optional and omitted when absent
};

using Schema = std::map<std::string, Field>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"validate", {}},
      {"membership",
       {{"frame", {T::Matrix, nullptr}},
        {"coords", {T::Matrix, nullptr}},
        {"expect_in_nplus", {T::Bool, nullptr}},
        {"expect_in_D", {T::Bool, nullptr}}}},
      {"lu",
       {{"matrix", {T::Matrix, nullptr}},
        {"sweep_frames", {T::Int, 1000}},
        {"expect_ok", {T::Bool, nullptr}}}},
      {"metric",
       {{"frame", {T::Matrix, nullptr}},
        {"coords", {T::Matrix, nullptr}},
        {"tangent", {T::Generator, json{{"basis", {{"grade", -1}, {"index", 0}}}}}},
        {"mode", {T::String, "hs"}},
        {"expect_speed", {T::Number, nullptr}},
        {"length_to", {T::Number, nullptr}},
        {"length_steps", {T::Int, 64}},
        {"expect_length", {T::Number, nullptr}},
        {"tolerance", {T::Number, 1e-10}}}},
      {"curve",
       {{"generator", {T::Generator, nullptr}},
        {"xi", {T::Generators, nullptr}},
        {"t_end", {T::Number, 1.0}},
        {"steps", {T::Int, 64}},
        {"margin_floor", {T::Number, 1e-3}},
        {"expect_hodge_length", {T::Number, nullptr}},
        {"length_tolerance", {T::Number, 1e-4}}}},
      {"transversality",
       {{"family", {T::Family, nullptr}},
        {"points", {T::Int, 10}},
        {"radius", {T::Number, 1.0}},
        {"batch_families", {T::Int, 100}},
        {"max_generators", {T::Int, 3}},
        {"expect_violation", {T::Bool, false}},
        {"violation_threshold", {T::Number, 1e-2}}}},
      {"theorem1",
       {{"curves", {T::Int, 20}},
        {"degree", {T::Int, 1}},
        {"norm", {T::Number, 0.5}},
        {"t_end", {T::Number, 1.0}},
        {"steps", {T::Int, 200}},
        {"margin_floor", {T::Number, 1e-3}}}},
      {"affine",
       {{"family", {T::Family, json{{"kind", "random_abelian"}}}},
        {"points_per_axis", {T::Int, 10}},
        {"subbundle", {T::String, "first-piece"}},
        {"completeness", {T::Completeness, nullptr}}}},
      {"density",
       {{"samples", {T::Int, 10000}},
        {"frames", {T::Matrices, nullptr}},
        {"min_fraction", {T::Number, 0.999}},
        {"expect_fraction", {T::Number, nullptr}}}},
      {"serre",
       {{"matrix", {T::IntMatrix, nullptr}},
        {"form", {T::IntMatrix, nullptr}},
        {"level", {T::Int, 3}},
        {"order_bound", {T::Int, 12}},
        {"entry_bound", {T::Int, 9}}}},
  };
  return s;
}

const Schema& family_schema() {
  static const Schema s = {
      {"kind", {T::String, "abelian"}},
      {"generators", {T::Generators, nullptr}},
      {"count", {T::Int, -1}},  // -1: dimension of the first piece
      {"radius", {T::Number, 0.5}},
      {"steps", {T::Int, 64}},
      {"stream", {T::UInt, 0}},
  };
  return s;
}

const Schema& completeness_schema() {
  static const Schema s = {
      {"direction", {T::Generator, nullptr}},
      {"t_max", {T::Number, 1.5}},
      {"samples", {T::Int, 300}},
      {"margin_floor", {T::Number, 1e-3}},
      {"threshold", {T::Number, 3.0}},
  };
  return s;
}

json canonical_value(const json& v, T type, const std::string& path);
json canonical_complex(const json& v, const std::string& path);

json canonical_object(const json& v, const Schema& schema, const std::string& path) {
  if (!v.is_object()) parse_fail(path, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it)
    if (!schema.count(it.key())) parse_fail(path + "." + it.key(), "unknown field");
  json out = json::object();
  for (const auto& [key, f] : schema) {
    if (v.contains(key) && !v.at(key).is_null())
      out[key] = canonical_value(v.at(key), f.type, path + "." + key);
    else if (!f.def.is_null())
      out[key] = canonical_value(f.def, f.type, path + "." + key);
  }
  return out;
}

json canonical_complex(const json& v, const std::string& path) {
  if (v.is_number()) return json::array({v.get<double>(), 0.0});
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return json::array({v[0].get<double>(), v[1].get<double>()});
  parse_fail(path, "expected a number or [re, im]");
}

json canonical_matrix(const json& v, const std::string& path) {
  const Mat m = matrix_from_json(v, path);
  return matrix_to_json(m);
}

json canonical_generator(const json& v, const std::string& path) {
  if (v.is_array()) return canonical_matrix(v, path);
  if (!v.is_object() || v.size() != 1) parse_fail(path, "expected a matrix or a one-key generator object");
  const std::string key = v.begin().key();
  const json& body = v.begin().value();
  if (key == "basis") {
    return json{{"basis", canonical_object(body, {{"grade", {T::Int, -1}}, {"index", {T::Int, 0}}},
                                           path + ".basis")}};
  }
  if (key == "graded") {
    json o = canonical_object(body, {{"grade", {T::Int, -1}}, {"coefficients", {T::ComplexList, nullptr}}},
                              path + ".graded");
    if (!o.contains("coefficients")) parse_fail(path + ".graded.coefficients", "missing");
    return json{{"graded", o}};
  }
  if (key == "random_graded") {
    return json{{"random_graded",
                 canonical_object(body,
                                  {{"grade", {T::Int, -1}}, {"stream", {T::UInt, 0}}, {"norm", {T::Number, 1.0}}},
                                  path + ".random_graded")}};
  }
  parse_fail(path + "." + key, "unknown generator form");
}

json canonical_value(const json& v, T type, const std::string& path) {
  switch (type) {
    case T::Int:
      if (!v.is_number_integer()) parse_fail(path, "expected an integer");
      return v.get<std::int64_t>();
    case T::UInt:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        parse_fail(path, "expected a non-negative integer");
      return v.get<std::uint64_t>();
    case T::Number:
      if (!v.is_number()) parse_fail(path, "expected a number");
      return v.get<double>();
    case T::Bool:
      if (!v.is_boolean()) parse_fail(path, "expected a boolean");
      return v;
    case T::String:
      if (!v.is_string()) parse_fail(path, "expected a string");
      return v;
    case T::Matrix:
      return canonical_matrix(v, path);
    case T::ComplexList: {
      if (!v.is_array()) parse_fail(path, "expected an array");
      json out = json::array();
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(canonical_complex(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    }
    case T::IntMatrix: {
      if (!v.is_array() || v.empty()) parse_fail(path, "expected a square integer matrix");
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != v.size())
          parse_fail(path + "[" + std::to_string(i) + "]", "expected a row of length " + std::to_string(v.size()));
        for (std::size_t j = 0; j < v[i].size(); ++j)
          if (!v[i][j].is_number_integer())
            parse_fail(path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]", "expected an integer");
      }
      return v;
    }
    case T::Generator:
      return canonical_generator(v, path);
    case T::Generators:
    case T::Matrices: {
      if (!v.is_array()) parse_fail(path, "expected an array");
      json out = json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        out.push_back(type == T::Generators ? canonical_generator(v[i], p) : canonical_matrix(v[i], p));
      }
      return out;
    }
    case T::Family: {
      json o = canonical_object(v, family_schema(), path);
      const std::string k = o.at("kind");
      if (k != "abelian" && k != "development" && k != "exponential" && k != "random_abelian")
        parse_fail(path + ".kind", "unknown family kind '" + k + "'");
      if (k != "random_abelian" && !o.contains("generators"))
        parse_fail(path + ".generators", "missing");
      return o;
    }
    case T::Completeness:
      return canonical_object(v, completeness_schema(), path);
  }
  parse_fail(path, "unsupported field type");
}

ContextSpec parse_context(const json& v, const std::string& path) {
  if (!v.is_object()) parse_fail(path, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    const auto& k = it.key();
    if (k != "weight" && k != "hodge_numbers" && k != "polarization" && k != "base")
      parse_fail(path + "." + k, "unknown field");
  }
  ContextSpec c;
  if (!v.contains("weight")) parse_fail(path + ".weight", "missing");
  if (!v.at("weight").is_number_integer()) parse_fail(path + ".weight", "expected an integer");
  c.weight = v.at("weight").get<int>();
  if (!v.contains("hodge_numbers")) parse_fail(path + ".hodge_numbers", "missing");
  const json& h = v.at("hodge_numbers");
  if (!h.is_array()) parse_fail(path + ".hodge_numbers", "expected an array");
  c.hodge_numbers.clear();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!h[i].is_number_integer())
      parse_fail(path + ".hodge_numbers[" + std::to_string(i) + "]", "expected an integer");
    c.hodge_numbers.push_back(h[i].get<int>());
  }
  if (v.contains("polarization") && !v.at("polarization").is_null())
    c.polarization = matrix_from_json(v.at("polarization"), path + ".polarization");
  if (v.contains("base") && !v.at("base").is_null())
    c.base = matrix_from_json(v.at("base"), path + ".base");
  return c;
}

std::optional<ErrorKind> error_kind_from(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::JobError); ++k)
    if (name == to_string(static_cast<ErrorKind>(k))) return static_cast<ErrorKind>(k);
  return std::nullopt;
}

// ---------------------------------------------------------------- payloads

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json vec_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json complex_vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

json lengths_json(const LengthReport& r) {
  return {{"hodge_hs", num(r.hodge_hs)},
          {"hodge_l1_lowerbound", num(r.hodge_l1_lowerbound)},
          {"euclidean", num(r.euclidean)},
          {"gram_m", num(r.gram_m)},
          {"gram_M", num(r.gram_M)},
          {"euclidean_superdiagonal", num(r.euclidean_superdiagonal)},
          {"superdiagonal_lengths", vec_json(r.superdiagonal_lengths)},
          {"error_estimate", num(r.error_estimate)},
          {"evaluations", r.evaluations}};
}

json nested_json(const std::vector<std::vector<double>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(vec_json(row));
  return a;
}

// ---------------------------------------------------------------- jobs

struct JobEnv {
  const Context& ctx;
  std::uint64_t seed;
  bool parallel;
  const RunOptions& opts;
};

struct Outcome {
  bool passed = false;
  json payload = json::object();
};

Mat resolve_generator(const JobEnv& env, const json& g) {
  const Context& ctx = env.ctx;
  if (g.is_array()) {
    Mat m = matrix_from_json(g, "generator");
    if (m.rows() != ctx.dim() || m.cols() != ctx.dim())
      throw Error(ErrorKind::ShapeMismatch, "generator must be " + std::to_string(ctx.dim()) + " x " +
                                                std::to_string(ctx.dim()));
    return m;
  }
  if (g.contains("basis")) {
    const int k = g["basis"]["grade"], i = g["basis"]["index"];
    const auto& b = ctx.graded_basis(k);
    if (i < 0 || i >= static_cast<int>(b.size()))
      throw Error(ErrorKind::ShapeMismatch, "basis index out of range for grade " + std::to_string(k), i);
    return b[static_cast<std::size_t>(i)];
  }
  if (g.contains("graded")) {
    const int k = g["graded"]["grade"];
    const auto& b = ctx.graded_basis(k);
    const json& c = g["graded"]["coefficients"];
    if (c.size() != b.size())
      throw Error(ErrorKind::ShapeMismatch, "grade " + std::to_string(k) + " has " + std::to_string(b.size()) +
                                                " basis elements");
    Mat m = Mat::Zero(ctx.dim(), ctx.dim());
    for (std::size_t i = 0; i < b.size(); ++i) m += cplx(c[i][0].get<double>(), c[i][1].get<double>()) * b[i];
    return m;
  }
  const json& r = g["random_graded"];
  CounterRng rng(env.seed, r["stream"].get<std::uint64_t>());
  return sampling::graded_element(ctx, r["grade"].get<int>(), rng, r["norm"].get<double>());
}

std::vector<Mat> resolve_generators(const JobEnv& env, const json& list) {
  std::vector<Mat> out;
  for (const auto& g : list) out.push_back(resolve_generator(env, g));
  return out;
}

HorizontalFamily resolve_family(const JobEnv& env, const json& f) {
  const std::string kind = f["kind"];
  const double radius = f["radius"];
  if (kind == "random_abelian") {
    CounterRng rng(env.seed, f["stream"].get<std::uint64_t>());
    int count = f["count"];
    if (count < 0) {
      const auto& hn = env.ctx.hodge();
      count = hn.weight() > 0 ? hn.block_size(0) * hn.block_size(1) : 0;
    }
    auto gens = sampling::abelian_generators(env.ctx, count, rng);
    if (gens.empty()) throw Error(ErrorKind::ShapeMismatch, "context has no horizontal directions");
    return HorizontalFamily::abelian(env.ctx, std::move(gens), radius);
  }
  auto gens = resolve_generators(env, f["generators"]);
  if (kind == "abelian") return HorizontalFamily::abelian(env.ctx, std::move(gens), radius);
  if (kind == "exponential") return HorizontalFamily::exponential(env.ctx, std::move(gens), radius);
  return HorizontalFamily::development(env.ctx, MatrixPolynomial{std::move(gens)}, f["steps"].get<int>(), radius);
}

Mat frame_param(const JobEnv& env, const json& p) {
  if (p.contains("frame")) return matrix_from_json(p["frame"], "frame");
  if (p.contains("coords")) return matrix_from_json(p["coords"], "coords") * env.ctx.base();
  return env.ctx.base();
}

Outcome job_validate(const JobEnv& env, const json&) {
  const Context& ctx = env.ctx;
  const auto& hn = ctx.hodge();
  Outcome o;
  json graded = json::object();
  for (int k = -hn.weight(); k <= hn.weight(); ++k)
    graded[std::to_string(k)] = ctx.graded_basis(k).size();
  json f = json::array();
  for (int k = 0; k <= hn.weight() + 1; ++k) f.push_back(hn.f(k));
  const double hr1 = check_hr1(ctx, ctx.base());
  const double hr2 = check_hr2(ctx, ctx.base());
  o.payload = {{"weight", hn.weight()},
               {"dim", hn.dim()},
               {"hodge_numbers", hn.h()},
               {"f", f},
               {"graded_dimensions", graded},
               {"algebra_dimension", lie::algebra_dimension(ctx)},
               {"hr1_residual", num(hr1)},
               {"hr2_margin", num(hr2)},
               {"reality_residual", num(reality_residual(ctx, ctx.base()))},
               {"canonical_polarization", ctx.canonical_q()},
               {"canonical_base", ctx.canonical_base()}};
  o.passed = hr1 < ctx.tol().identity * std::max(1.0, max_abs(ctx.q())) && hr2 > 0.0;
  return o;
}

Outcome job_membership(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  const Mat frame = frame_param(env, p);
  if (frame.rows() != ctx.dim() || frame.cols() != ctx.dim())
    throw Error(ErrorKind::ShapeMismatch, "frame must be m x m");
  const MembershipReport r = membership(ctx, frame);
  Outcome o;
  o.payload = {{"in_nplus", r.in_nplus},
               {"minor_margins", vec_json(r.minor_margins)},
               {"in_D", r.in_D},
               {"hr2_margin", num(r.hr2_margin)},
               {"hr1_residual", num(check_hr1(ctx, frame))}};
  if (r.in_nplus) o.payload["coords"] = matrix_to_json(nplus_coords(ctx, frame).phi);
  o.passed = true;
  if (p.contains("expect_in_nplus")) o.passed = o.passed && r.in_nplus == p["expect_in_nplus"].get<bool>();
  if (p.contains("expect_in_D")) o.passed = o.passed && r.in_D == p["expect_in_D"].get<bool>();
  return o;
}

Outcome job_lu(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  Outcome o;
  if (p.contains("matrix")) {
    const Mat a = matrix_from_json(p["matrix"], "matrix");
    if (a.rows() != ctx.dim() || a.cols() != ctx.dim())
      throw Error(ErrorKind::ShapeMismatch, "matrix must be m x m");
    const BlockLu f = block_lu(ctx, a);
    o.payload = {{"ok", f.ok}, {"failed_block", f.failed_block}, {"pivot_margin", num(f.pivot_margin)},
                 {"minor_margins", vec_json(leading_minor_margins(ctx.hodge(), a))}};
    if (f.ok) {
      o.payload["lower"] = matrix_to_json(f.lower);
      o.payload["unipotent"] = matrix_to_json(f.unipotent);
      o.payload["reconstruction"] = num(max_abs(f.lower * f.unipotent - a));
    }
    o.passed = p.contains("expect_ok") ? f.ok == p["expect_ok"].get<bool>() : true;
    return o;
  }
  const auto s = kernels::membership_sweep(ctx, p["sweep_frames"].get<int>(), env.seed, env.parallel);
  o.payload = {{"frames", s.frames},
               {"lu_ok", s.lu_ok},
               {"minors_ok", s.minors_ok},
               {"agree", s.agree},
               {"max_uniqueness", num(s.max_uniqueness)},
               {"max_b_invariance", num(s.max_b_invariance)},
               {"max_reconstruction", num(s.max_reconstruction)}};
  o.passed = s.agree == s.frames && s.max_uniqueness < 1e-10;
  return o;
}

Outcome job_metric(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  const Mat frame = frame_param(env, p);
  const Mat x = resolve_generator(env, p["tangent"]);
  const GramData g = gram_blocks(ctx, frame);
  const HorizontalTangent v = superdiagonal(ctx.hodge(), x);
  const double hs = horizontal_norm(ctx, g, v, NormMode::HilbertSchmidt);
  json l1 = nullptr;
  try {
    l1 = num(horizontal_norm(ctx, g, v, NormMode::ScalarL1));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonScalarGram) throw;
  }
  const std::string mode = p["mode"];
  if (mode != "hs" && mode != "l1") throw Error(ErrorKind::ShapeMismatch, "mode must be hs or l1");
  if (mode == "l1" && l1.is_null()) throw Error(ErrorKind::NonScalarGram, "Grams are not scalar");
  json grams = json::array();
  for (const auto& gb : g.grams) grams.push_back(matrix_to_json(gb));
  Outcome o;
  const double speed = mode == "hs" ? hs : l1.get<double>();
  o.payload = {{"grams", grams},
               {"gram_m", num(g.m_bound)},
               {"gram_M", num(g.M_bound)},
               {"hs", num(hs)},
               {"scalar_l1", l1},
               {"l1_lower", num(l1_lower_integrand(g, v))},
               {"euclidean", num(euclidean_speed(x))},
               {"speed", num(speed)}};
  o.passed = g.min_eigenvalue > 0.0;
  if (p.contains("expect_speed")) {
    const double want = p["expect_speed"];
    o.passed = o.passed && std::abs(speed - want) <= p["tolerance"].get<double>() * std::max(1.0, std::abs(want));
  }
  if (p.contains("length_to")) {
    // length of t -> exp(tX) o on [0, length_to]
    const double T = p["length_to"];
    const int n = p["length_steps"];
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = T * i / n;
    const LengthReport r = curve_lengths(ctx, one_parameter_orbit(ctx, x, grid));
    o.payload["lengths"] = lengths_json(r);
    if (p.contains("expect_length"))
      o.passed = o.passed && std::abs(r.hodge_hs - p["expect_length"].get<double>()) <= ctx.tol().quadrature * 10;
  }
  return o;
}

void write_table(const Context& ctx, const SampledCurve& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ShapeMismatch, "cannot write table " + path);
  const auto& hn = ctx.hodge();
  const int m = hn.dim();
  out << "t";
  for (int a = 0; a < hn.weight(); ++a)
    for (int b = a + 1; b <= hn.weight(); ++b)
      for (int i = 0; i < hn.block_size(a); ++i)
        for (int j = 0; j < hn.block_size(b); ++j)
          out << ",re_" << a << b << "_" << i << j << ",im_" << a << b << "_" << i << j;
  out << ",hr2_margin,hodge_hs,euclidean\n";
  out.precision(17);
  double hs = 0.0, eu = 0.0;
  for (std::size_t s = 0; s < c.samples.size(); ++s) {
    const auto& pt = c.samples[s];
    if (s > 0) {
      const SampledCurve piece = truncate(ctx, c, pt.t);
      const LengthReport r = curve_lengths(ctx, piece);
      hs = r.hodge_hs, eu = r.euclidean;
    }
    double margin = 0.0;
    try {
      margin = check_hr2(ctx, pt.frame);
    } catch (const Error&) {
    }
    out << pt.t;
    for (int a = 0; a < hn.weight(); ++a)
      for (int b = a + 1; b <= hn.weight(); ++b)
        for (int i = 0; i < hn.block_size(a); ++i)
          for (int j = 0; j < hn.block_size(b); ++j) {
            const cplx z = pt.phi.phi(hn.block_offset(a) + i, hn.block_offset(b) + j);
            out << "," << z.real() << "," << z.imag();
          }
    out << "," << margin << "," << hs << "," << eu << "\n";
  }
  (void)m;
}

Outcome job_curve(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  const double t_end = p["t_end"];
  const int steps = p["steps"];
  SampledCurve c;
  if (p.contains("xi")) {
    c = develop(ctx, MatrixPolynomial{resolve_generators(env, p["xi"])}, t_end, steps);
  } else {
    const Mat x = p.contains("generator") ? resolve_generator(env, p["generator"])
                                          : resolve_generator(env, json{{"basis", {{"grade", -1}, {"index", 0}}}});
    std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) grid[static_cast<std::size_t>(i)] = t_end * i / steps;
    c = one_parameter_orbit(ctx, x, grid);
  }
  if (p.contains("margin_floor")) c = restrict_to_domain(ctx, c, p["margin_floor"].get<double>());
  if (c.samples.size() < 2) throw Error(ErrorKind::SampleOutsideChart, "curve has fewer than two samples in D");
  const double horiz = horizontality_residual(ctx, c);
  const LengthReport r = curve_lengths(ctx, c);
  Outcome o;
  o.payload = {{"generator", c.generator},
               {"samples", c.samples.size()},
               {"t_end", num(c.t_end())},
               {"horizontality_residual", num(horiz)},
               {"lengths", lengths_json(r)},
               {"euclidean_le_hodge", r.euclidean <= r.hodge_hs * (1 + ctx.tol().quadrature)}};
  double scale = 1.0;
  for (const auto& s : c.samples) scale = std::max(scale, max_abs(s.phi_dot));
  o.passed = horiz < ctx.tol().residual * scale;
  if (p.contains("expect_hodge_length")) {
    const double want = p["expect_hodge_length"];
    o.passed = o.passed && std::abs(r.hodge_hs - want) <= p["length_tolerance"].get<double>();
  }
  if (!env.opts.table_path.empty()) write_table(ctx, c, env.opts.table_path);
  return o;
}

Outcome job_transversality(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  Outcome o;
  const bool expect_violation = p["expect_violation"];
  const double threshold = p["violation_threshold"];
  if (p.contains("family")) {
    const HorizontalFamily f = resolve_family(env, p["family"]);
    const int N = f.dimension(), points = p["points"];
    CounterRng rng(env.seed, 7);
    double max_res = 0.0, min_res = std::numeric_limits<double>::infinity(), max_fd = 0.0, max_gap = 0.0;
    for (int k = 0; k < points; ++k) {
      std::vector<cplx> z(static_cast<std::size_t>(N));
      // the first point is z = (1, ..., 1) scaled into the polydisc
      for (auto& c : z) {
        if (k == 0) {
          c = f.radius();
        } else {
          const double r = f.radius() * std::sqrt(rng.uniform());
          c = std::polar(r, 2.0 * 3.141592653589793 * rng.uniform());
        }
      }
      for (int mu = 0; mu < N; ++mu) {
        const TransversalityResult t = transversality_residual(ctx, f, z, mu);
        max_res = std::max(max_res, t.residual);
        min_res = std::min(min_res, t.residual);
        max_fd = std::max(max_fd, t.fd_discrepancy);
        if (!expect_violation) max_gap = std::max(max_gap, differential_quotient_gap(ctx, f, z, mu));
      }
    }
    o.payload = {{"evaluations", points * N},
                 {"max_residual", num(max_res)},
                 {"min_residual", num(min_res)},
                 {"max_fd_discrepancy", num(max_fd)},
                 {"max_quotient_gap", num(max_gap)}};
    o.passed = expect_violation ? min_res > threshold : max_res < ctx.tol().residual;
    return o;
  }
  const auto b = kernels::transversality_batch(ctx, p["batch_families"].get<int>(), p["points"].get<int>(),
                                               p["max_generators"].get<int>(), p["radius"].get<double>(),
                                               env.seed, env.parallel);
  o.payload = {{"evaluations", b.evaluations},
               {"max_residual", num(b.max_residual)},
               {"max_fd_discrepancy", num(b.max_fd_discrepancy)}};
  o.passed = b.evaluations > 0 && b.max_residual < ctx.tol().residual;
  return o;
}

Outcome job_theorem1(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  const int curves = p["curves"], degree = p["degree"], steps = p["steps"];
  const double norm = p["norm"], t_end = p["t_end"], floor = p["margin_floor"];
  if (ctx.graded_basis(-1).empty()) throw Error(ErrorKind::ShapeMismatch, "context has no horizontal directions");
  Outcome o;
  json list = json::array();
  bool all = true;
  double L = 0.0;
  for (int c = 0; c < curves; ++c) {
    CounterRng rng(env.seed, 1000 + static_cast<std::uint64_t>(c));
    std::vector<Mat> coeff;
    for (int d = 0; d <= degree; ++d) coeff.push_back(sampling::graded_element(ctx, -1, rng, norm));
    const MatrixPolynomial xi{coeff};
    json entry;
    double stop = t_end;
    SampledCurve curve;
    try {
      curve = develop(ctx, xi, stop, steps);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LeftChart) throw;
      // leaving N_+ is allowed only after leaving D; keep the part before
      stop = 0.95 * e.value();
      entry["left_chart_at"] = num(e.value());
      curve = develop(ctx, xi, stop, steps);
    }
    const SampledCurve in_d = restrict_to_domain(ctx, curve, floor);
    if (in_d.samples.size() < 2) {
      entry["skipped"] = true;
      list.push_back(entry);
      continue;
    }
    const BoundednessReport r = boundedness_experiment(ctx, in_d);
    L = std::max(L, r.lengths.hodge_hs);
    entry["t_end"] = num(in_d.t_end());
    entry["lengths"] = lengths_json(r.lengths);
    entry["block_sup"] = nested_json(r.block_sup);
    entry["chain_bound"] = nested_json(r.chain_bound);
    entry["sup_all"] = num(r.sup_all);
    entry["k_bound"] = num(r.k_bound);
    entry["c_prime"] = num(r.c_prime);
    entry["horizontality"] = num(r.horizontality);
    entry["all_in_nplus"] = r.all_in_nplus;
    entry["chain_ok"] = r.chain_ok;
    entry["superdiagonal_ok"] = r.superdiagonal_ok;
    entry["block_bound_ok"] = r.block_bound_ok;
    entry["theorem1_consistent"] = r.theorem1_consistent;
    all = all && r.theorem1_consistent;
    list.push_back(entry);
  }
  o.payload = {{"curves", list}, {"max_hodge_length", num(L)}};
  o.passed = all;
  return o;
}

Outcome job_affine(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  const HorizontalFamily f = resolve_family(env, p["family"]);
  const int N = f.dimension();
  const AbelianSubalgebra a = tangent_subalgebra(ctx, f);
  const auto grid = polydisc_grid(N, f.radius(), p["points_per_axis"].get<int>());
  Outcome o;
  const TorelliReport t = strong_torelli_check(ctx, f, parse_subbundle(p["subbundle"]), grid);
  const auto reports = kernels::psi_grid(ctx, a, f, grid, env.parallel);
  int rank_ok = 0, domain = 0, image_ok = 0;
  double worst_sv = 0.0, worst_identity = 0.0, min_image_margin = std::numeric_limits<double>::infinity();
  const bool abelian = f.kind() == HorizontalFamily::Kind::Abelian;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PsiReport& r = reports[i];
    if (r.rank == a.dim()) ++rank_ok;
    if (r.domain_in_D) {
      ++domain;
      if (r.in_D) ++image_ok;
      min_image_margin = std::min(min_image_margin, r.hr2_margin);
      for (double s : r.singular_values) worst_sv = std::max(worst_sv, std::abs(s - 1.0));
    }
    if (abelian) {
      // Psi is the identity in the generator basis
      for (int mu = 0; mu < N; ++mu)
        worst_identity = std::max(worst_identity, std::abs(r.psi(mu) - grid[i][static_cast<std::size_t>(mu)]));
    }
  }
  o.payload = {{"dimension", N},
               {"grid_points", grid.size()},
               {"torelli",
                {{"holds", t.holds},
                 {"subbundle", p["subbundle"]},
                 {"subbundle_dim", t.subbundle_dim},
                 {"worst_rank_margin", num(t.worst_rank_margin)},
                 {"worst_image_margin", num(t.worst_image_margin)},
                 {"worst_index", t.worst_index}}},
               {"rank_full", rank_ok},
               {"domain_points", domain},
               {"image_in_D", image_ok},
               {"min_image_margin", num(min_image_margin)},
               {"max_singular_value_defect", num(worst_sv)}};
  if (!reports.empty()) {
    o.payload["psi_at_first"] = complex_vec(reports.front().psi);
    o.payload["psi_at_last"] = complex_vec(reports.back().psi);
  }
  bool ok = t.holds && rank_ok == static_cast<int>(grid.size()) && image_ok == domain;
  if (abelian) {
    o.payload["identity_defect"] = num(worst_identity);
    ok = ok && worst_sv < 1e-8;
  }
  if (p.contains("completeness")) {
    const json& c = p["completeness"];
    Mat x = c.contains("direction") ? resolve_generator(env, c["direction"]) : a.basis.front();
    x /= x.norm();
    const CompletenessReport r = completeness_probe(ctx, a, x, c["t_max"].get<double>(), c["samples"].get<int>(),
                                                    c["margin_floor"].get<double>(), c["threshold"].get<double>());
    o.payload["completeness"] = {{"exited", r.exited},
                                 {"t_exit", num(r.exited ? r.t_exit : std::nan(""))},
                                 {"t_floor", num(r.t_floor)},
                                 {"length_at_floor", num(r.length_at_floor)},
                                 {"final_length", num(r.length.back())},
                                 {"diverges", r.diverges},
                                 {"margin_decreasing", r.margin_decreasing},
                                 {"length_increasing", r.length_increasing}};
    ok = ok && (!r.exited || r.diverges) && r.length_increasing;
  }
  o.passed = ok;
  return o;
}

Outcome job_density(const JobEnv& env, const json& p) {
  const Context& ctx = env.ctx;
  kernels::DensityResult r;
  if (p.contains("frames")) {
    std::vector<Mat> frames;
    for (std::size_t i = 0; i < p["frames"].size(); ++i)
      frames.push_back(matrix_from_json(p["frames"][i], "frames[" + std::to_string(i) + "]"));
    r = kernels::density_probe(ctx, frames);
  } else {
    r = kernels::density_probe(ctx, p["samples"].get<int>(), env.seed, env.parallel);
  }
  Outcome o;
  o.payload = {{"samples", r.samples}, {"singular", r.singular}, {"in_nplus", r.in_nplus},
               {"fraction", num(r.fraction)}};
  o.passed = p.contains("expect_fraction") ? r.fraction == p["expect_fraction"].get<double>()
                                           : r.fraction >= p["min_fraction"].get<double>();
  return o;
}

IntMatrix int_matrix(const json& j) {
  IntMatrix m;
  m.n = static_cast<int>(j.size());
  for (const auto& row : j)
    for (const auto& v : row) m.a.push_back(v.get<std::int64_t>());
  return m;
}

Outcome job_serre(const JobEnv& env, const json& p) {
  (void)env;
  Outcome o;
  if (p.contains("matrix")) {
    MonodromyElement e{int_matrix(p["matrix"]), p["level"].get<int>(), p["order_bound"].get<int>(), std::nullopt};
    if (p.contains("form")) e.form = int_matrix(p["form"]);
    const SerreResult r = serre_check(e);
    o.payload = {{"verdict", to_string(r.verdict)}, {"order", r.order}, {"overflow", r.overflow},
                 {"preserves_form", r.preserves_form}};
    o.passed = r.verdict != SerreVerdict::CounterexampleFound && r.preserves_form;
    return o;
  }
  const SerreSweep s = serre_sweep_2x2(p["entry_bound"].get<int>(), p["level"].get<int>(),
                                       p["order_bound"].get<int>(), env.parallel);
  o.payload = {{"candidates", s.candidates}, {"elements", s.elements}, {"trivial", s.trivial},
               {"no_finite_order", s.no_finite_order}, {"counterexamples", s.counterexamples}};
  o.passed = s.counterexamples == 0;
  return o;
}

using JobFn = Outcome (*)(const JobEnv&, const json&);

const std::map<std::string, JobFn>& job_table() {
  static const std::map<std::string, JobFn> t = {
      {"validate", job_validate}, {"membership", job_membership}, {"lu", job_lu},
      {"metric", job_metric},     {"curve", job_curve},           {"transversality", job_transversality},
      {"theorem1", job_theorem1}, {"affine", job_affine},         {"density", job_density},
      {"serre", job_serre},
  };
  return t;
}

}  // namespace

// ---------------------------------------------------------------- public

json complex_to_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(complex_to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

Mat matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_fail(path + "[0]", "expected a non-empty row");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(rp, "expected a row of length " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      const json z = canonical_complex(j[r][c], rp + "[" + std::to_string(c) + "]");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

const std::vector<std::string>& job_kinds() {
  static const std::vector<std::string> k = {"validate", "membership", "lu",       "metric",  "curve",
                                             "transversality", "theorem1", "affine", "density", "serre"};
  return k;
}

json default_params(const std::string& kind) {
  const auto it = schemas().find(kind);
  if (it == schemas().end()) parse_fail("kind", "unknown job kind '" + kind + "'");
  return canonical_object(json::object(), it->second, "params");
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) parse_fail("$", "expected an object");
  static const std::vector<std::string> top = {"context", "seed", "tolerances", "parallel", "jobs"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (std::find(top.begin(), top.end(), it.key()) == top.end()) parse_fail(it.key(), "unknown field");
  Scenario s;
  if (!doc.contains("context")) parse_fail("context", "missing");
  s.context = parse_context(doc.at("context"), "context");
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      parse_fail("seed", "expected an unsigned 64-bit integer");
    s.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("tolerances")) {
    const json t = canonical_object(doc.at("tolerances"),
                                    {{"minor", {T::Number, 1e-9}},
                                     {"identity", {T::Number, 1e-12}},
                                     {"residual", {T::Number, 1e-8}},
                                     {"quadrature", {T::Number, 1e-6}},
                                     {"rank", {T::Number, 1e-9}}},
                                    "tolerances");
    s.tolerances = {t["minor"], t["identity"], t["residual"], t["quadrature"], t["rank"]};
  }
  if (doc.contains("parallel")) {
    if (!doc.at("parallel").is_boolean()) parse_fail("parallel", "expected a boolean");
    s.parallel = doc.at("parallel");
  }
  if (doc.contains("jobs")) {
    const json& jobs = doc.at("jobs");
    if (!jobs.is_array()) parse_fail("jobs", "expected an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const std::string path = "jobs[" + std::to_string(i) + "]";
      const json& j = jobs[i];
      if (!j.is_object()) parse_fail(path, "expected an object");
      for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (k != "kind" && k != "params" && k != "context" && k != "expect_error")
          parse_fail(path + "." + k, "unknown field");
      }
      if (!j.contains("kind") || !j.at("kind").is_string()) parse_fail(path + ".kind", "missing or not a string");
      JobSpec js;
      js.kind = j.at("kind");
      const auto sc = schemas().find(js.kind);
      if (sc == schemas().end()) parse_fail(path + ".kind", "unknown job kind '" + js.kind + "'");
      js.params = canonical_object(j.contains("params") ? j.at("params") : json::object(), sc->second,
                                   path + ".params");
      if (j.contains("context")) js.context = parse_context(j.at("context"), path + ".context");
      if (j.contains("expect_error")) {
        if (!j.at("expect_error").is_string() || !error_kind_from(j.at("expect_error")))
          parse_fail(path + ".expect_error", "expected an error kind name");
        js.expect_error = j.at("expect_error").get<std::string>();
      }
      s.jobs.push_back(std::move(js));
    }
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i)
      if (text[i] == '\n') ++line;
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

json to_json(const ContextSpec& c) {
  json j = {{"weight", c.weight}, {"hodge_numbers", c.hodge_numbers}};
  if (c.polarization) j["polarization"] = matrix_to_json(*c.polarization);
  if (c.base) j["base"] = matrix_to_json(*c.base);
  return j;
}

json to_json(const Scenario& s) {
  json jobs = json::array();
  for (const auto& j : s.jobs) {
    json o = {{"kind", j.kind}, {"params", j.params}};
    if (j.context) o["context"] = to_json(*j.context);
    if (j.expect_error) o["expect_error"] = *j.expect_error;
    jobs.push_back(o);
  }
  return {{"context", to_json(s.context)},
          {"seed", s.seed},
          {"tolerances",
           {{"minor", s.tolerances.minor},
            {"identity", s.tolerances.identity},
            {"residual", s.tolerances.residual},
            {"quadrature", s.tolerances.quadrature},
            {"rank", s.tolerances.rank}}},
          {"parallel", s.parallel},
          {"jobs", jobs}};
}

std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(s).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Context make_context(const ContextSpec& spec, const Tolerances& tol) {
  return build_context(HodgeNumbers(spec.weight, spec.hodge_numbers), spec.polarization, spec.base, tol);
}

Report run_scenario(const Scenario& s, const RunOptions& opts) {
  const bool parallel = opts.parallel.value_or(s.parallel);
  const Context base_ctx = make_context(s.context, s.tolerances);
  // a failing job-level context fails that job only
  std::vector<std::optional<Context>> contexts;
  std::vector<std::optional<Error>> context_errors;
  for (const auto& j : s.jobs) {
    if (!j.context) {
      contexts.emplace_back(base_ctx);
      context_errors.emplace_back();
      continue;
    }
    try {
      contexts.emplace_back(make_context(*j.context, s.tolerances));
      context_errors.emplace_back();
    } catch (const Error& e) {
      contexts.emplace_back();
      context_errors.emplace_back(e);
    }
  }

  Report rep;
  rep.tool_version = HODGEKIT_VERSION;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(scenario_hash(s)));
  rep.scenario_hash = buf;
  rep.jobs.resize(s.jobs.size());

  auto run_one = [&](std::size_t i, bool inner_parallel) {
    const JobSpec& js = s.jobs[i];
    JobResult& r = rep.jobs[i];
    r.kind = js.kind;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (context_errors[i]) throw *context_errors[i];
      const JobEnv env{*contexts[i], s.seed, inner_parallel, opts};
      const Outcome o = job_table().at(js.kind)(env, js.params);
      r.payload = o.payload;
      r.passed = js.expect_error ? false : o.passed;
      if (js.expect_error) r.error = "expected " + *js.expect_error + " but the job completed";
    } catch (const Error& e) {
      r.payload = {{"error_kind", to_string(e.kind())}, {"index", e.index()}, {"value", num(e.value())}};
      r.passed = js.expect_error && *js.expect_error == to_string(e.kind());
      r.error = std::string("JobError: ") + e.what();
    } catch (const std::exception& e) {
      r.payload = {{"error_kind", "JobError"}};
      r.passed = false;
      r.error = std::string("JobError: ") + e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  if (parallel) {
    const auto n = static_cast<std::int64_t>(s.jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) run_one(static_cast<std::size_t>(i), true);
  } else {
    for (std::size_t i = 0; i < s.jobs.size(); ++i) run_one(i, false);
  }
  rep.passed = true;
  for (const auto& j : rep.jobs) rep.passed = rep.passed && j.passed;
  return rep;
}

json to_json(const Report& r) {
  json jobs = json::array();
  for (const auto& j : r.jobs) {
    json o = {{"kind", j.kind}, {"passed", j.passed}, {"payload", j.payload}, {"wall_ms", j.wall_ms}};
    o["error"] = j.error ? json(*j.error) : json(nullptr);
    jobs.push_back(o);
  }
  return {{"tool_version", r.tool_version}, {"scenario_hash", r.scenario_hash}, {"passed", r.passed},
          {"jobs", jobs}};
}

json payloads(const Report& r) {
  json j = to_json(r);
  for (auto& job : j["jobs"]) job.erase("wall_ms");
  return j;
}

}  // namespace hodge
