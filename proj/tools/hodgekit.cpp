// hodgekit command line: every verb runs one job kind of a scenario.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hodgekit/scenario.hpp"

using namespace hodge;

namespace {

struct Common {
  std::string config;
  std::string params = "{}";
  std::string out;
  std::string table;
  std::optional<std::uint64_t> seed;
  std::optional<int> weight;
  std::vector<int> hodge;
  std::optional<double> tol_minor, tol_identity, tol_residual, tol_quadrature, tol_rank;
  bool parallel = false;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool with_params) {
  app->add_option("--config", c.config, "scenario file (JSON)");
  if (with_params) app->add_option("--params", c.params, "job parameters as inline JSON");
  app->add_option("--out", c.out, "write the report here instead of stdout");
  app->add_option("--table", c.table, "CSV sample table for curve jobs");
  app->add_option("--seed", c.seed, "64-bit seed");
  app->add_option("--weight", c.weight, "weight of the context");
  app->add_option("--hodge", c.hodge, "Hodge numbers h^{n,0} ... h^{0,n}")->delimiter(',');
  app->add_option("--tol-minor", c.tol_minor);
  app->add_option("--tol-identity", c.tol_identity);
  app->add_option("--tol-residual", c.tol_residual);
  app->add_option("--tol-quadrature", c.tol_quadrature);
  app->add_option("--tol-rank", c.tol_rank);
  app->add_flag("--parallel", c.parallel, "run jobs and batch kernels with OpenMP");
  app->add_flag("-q,--quiet", c.quiet, "no summary on stderr");
}

Scenario build(const Common& c, const std::optional<std::string>& kind) {
  Scenario s;
  if (!c.config.empty()) s = load_scenario(c.config);
  if (c.weight || !c.hodge.empty()) {
    if (!c.weight || c.hodge.empty()) throw Error(ErrorKind::ParseError, "--weight and --hodge go together");
    s.context = ContextSpec{*c.weight, c.hodge, std::nullopt, std::nullopt};
  }
  if (c.seed) s.seed = *c.seed;
  if (c.tol_minor) s.tolerances.minor = *c.tol_minor;
  if (c.tol_identity) s.tolerances.identity = *c.tol_identity;
  if (c.tol_residual) s.tolerances.residual = *c.tol_residual;
  if (c.tol_quadrature) s.tolerances.quadrature = *c.tol_quadrature;
  if (c.tol_rank) s.tolerances.rank = *c.tol_rank;
  if (c.parallel) s.parallel = true;
  if (!kind) return s;

  std::vector<JobSpec> keep;
  for (auto& j : s.jobs)
    if (j.kind == *kind) keep.push_back(std::move(j));
  const bool inline_params = c.params != "{}";
  if (keep.empty() || inline_params) {
    json params;
    try {
      params = json::parse(c.params);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ParseError, std::string("--params: ") + e.what());
    }
    // reuse the scenario validator for the inline parameters
    const json doc = {{"context", to_json(s.context)}, {"jobs", {{{"kind", *kind}, {"params", params}}}}};
    Scenario one = parse_scenario(doc);
    keep = {one.jobs.front()};
  }
  s.jobs = std::move(keep);
  return s;
}

int execute(const Common& c, const std::optional<std::string>& kind) {
  Report rep;
  try {
    const Scenario s = build(c, kind);
    RunOptions opts;
    opts.table_path = c.table;
    rep = run_scenario(s, opts);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  const std::string text = to_json(rep).dump(2);
  if (c.out.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(c.out);
    if (!f) {
      std::cerr << "cannot write " << c.out << "\n";
      return 2;
    }
    f << text << "\n";
  }
  if (!c.quiet) {
    for (std::size_t i = 0; i < rep.jobs.size(); ++i) {
      const auto& j = rep.jobs[i];
      std::cerr << (j.passed ? "PASS " : "FAIL ") << "[" << i << "] " << j.kind;
      if (j.error) std::cerr << "  " << *j.error;
      std::cerr << "\n";
    }
  }
  return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hodgekit: period domain numerics"};
  app.set_version_flag("--version", std::string(HODGEKIT_VERSION));
  app.require_subcommand(1);

  Common common;
  std::optional<std::string> selected;

  // verb path -> job kind
  const std::vector<std::tuple<std::string, std::string, std::string, std::string>> verbs = {
      {"ctx", "validate", "validate", "check the context and the Hodge-Riemann relations"},
      {"point", "check", "membership", "N+ and D membership of a frame"},
      {"lu", "", "lu", "block factorization of a matrix or a random sweep"},
      {"metric", "length", "metric", "Hodge norm of a tangent vector and orbit length"},
      {"curve", "develop", "curve", "orbit or development with lengths"},
      {"verify", "transversality", "transversality", "derivative identity on horizontal families"},
      {"verify", "theorem1", "theorem1", "coordinate bounds on random developments"},
      {"affine", "psi", "affine", "affine map, Torelli check, completeness probe"},
      {"probe", "density", "density", "fraction of random frames in N+"},
      {"monodromy", "serre", "serre", "finite order check for level structures"},
  };
  const std::map<std::string, std::string> group_help = {
      {"ctx", "context checks"},          {"point", "single points of the compact dual"},
      {"metric", "Hodge metric"},         {"curve", "horizontal curves"},
      {"verify", "property experiments"}, {"affine", "affine chart"},
      {"probe", "randomized probes"},     {"monodromy", "integral monodromy"},
  };
  std::map<std::string, CLI::App*> groups;
  for (const auto& [group, verb, kind, help] : verbs) {
    CLI::App* target = nullptr;
    if (verb.empty()) {
      target = app.add_subcommand(group, help);
    } else {
      if (!groups.count(group)) {
        groups[group] = app.add_subcommand(group, group_help.at(group));
        groups[group]->require_subcommand(1);
      }
      target = groups[group]->add_subcommand(verb, help);
    }
    add_common(target, common, true);
    const std::string k = kind;
    target->callback([&selected, k] { selected = k; });
  }
  CLI::App* run = app.add_subcommand("run", "run every job of a scenario");
  add_common(run, common, false);
  run->callback([&selected] { selected = std::string{}; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (selected && selected->empty()) {
    if (common.config.empty()) {
      std::cerr << "input error: run needs --config\n";
      return 2;
    }
    return execute(common, std::nullopt);
  }
  return execute(common, selected);
}
