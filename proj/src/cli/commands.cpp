// Copyright 2026 The fair-screen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairscreen/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "fairscreen/cli/io.hpp"
#include "fairscreen/cli/repro.hpp"
#include "fairscreen/eodds.hpp"
#include "fairscreen/errors.hpp"
#include "fairscreen/exact.hpp"
#include "fairscreen/fairness.hpp"
#include "fairscreen/fptas.hpp"
#include "fairscreen/groupblind.hpp"
#include "fairscreen/oracle.hpp"
#include "fairscreen/parallel.hpp"
#include "fairscreen/ratio.hpp"

namespace fairscreen::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string spec_path;
  std::string policy_path;
  std::string method = "exact";
  std::string objective = "linear";
  double alpha = 0.5;
  double eps = 0.1;
  int grid = 10;
  double band = 1e-3;
  std::string constraint = "eo";
  unsigned threads = 0;
  std::string format = "table";
  std::optional<double> tolerance;
  std::uint64_t budget = kDefaultConfigBudget;
  std::string criterion = "both";
  std::string scope = "final";
  std::string example;
  bool list = false;
};

Objective make_objective(const Options& o) {
  if (o.objective == "precision") return Objective::precision();
  if (o.objective == "linear") return Objective::linear(o.alpha);
  return Objective::reciprocal(o.alpha);
}

double tolerance_for(const Options& o, const PipelineSpec& spec) {
  if (o.tolerance) return *o.tolerance;
  return spec.tolerance.value_or(kDefaultFairnessTolerance);
}

void incompatible(const std::string& message) {
  throw Error(ErrorCode::kIncompatibleFlags, message);
}

SolverReport dispatch(const Options& o, const Pipeline& pl, const Objective& obj) {
  const unsigned threads = resolve_threads(o.threads);
  const bool reciprocal = obj.kind() == Objective::Kind::kReciprocal;
  if (o.method == "ratio") {
    if (obj.kind() != Objective::Kind::kPrecision) {
      incompatible("--method ratio requires --objective precision");
    }
    return make_report("ratio", pl, obj, opportunity_ratio(pl));
  }
  if (o.method == "two-approx") {
    if (reciprocal) incompatible("--method two-approx requires a linear objective");
    return two_approx(pl, obj);
  }
  if (o.method == "exact") {
    ExactOptions opts;
    opts.config_budget = o.budget;
    opts.threads = threads;
    return solve_exact(pl, obj, opts);
  }
  if (o.method == "fptas") {
    FptasOptions opts;
    opts.threads = threads;
    return reciprocal ? solve_fptas_g(pl, obj.alpha(), o.eps, opts)
                      : solve_fptas_f(pl, obj.alpha(), o.eps, opts);
  }
  if (o.method == "groupblind") return solve_groupblind(pl, obj, o.eps);
  GridSpec spec;
  spec.g = o.grid;
  spec.band = o.band;
  const GridConstraint c = o.constraint == "none"   ? GridConstraint::kNone
                           : o.constraint == "eodds" ? GridConstraint::kEqualizedOdds
                                                     : GridConstraint::kEqualOpportunity;
  return grid_search(pl, obj, spec, c);
}

void emit(std::ostream& out, const Options& o, const Pipeline& pl, SolverReport& report,
          double tolerance, double wall_ms) {
  report.diagnostics["wall_time_ms"] = wall_ms;
  if (o.format == "json") {
    out << to_json(pl, report, tolerance).dump(2) << "\n";
  } else {
    out << render_table(pl, report, tolerance);
  }
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const PipelineSpec spec = load_pipeline(o.spec_path);
  const Policy policy = load_policy(o.policy_path);
  SolverReport report =
      make_report("evaluate", spec.pipeline, make_objective(o), policy);
  const std::chrono::duration<double, std::milli> elapsed =
      std::chrono::steady_clock::now() - start;
  emit(out, o, spec.pipeline, report, tolerance_for(o, spec), elapsed.count());
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const PipelineSpec spec = load_pipeline(o.spec_path);
  const auto start = std::chrono::steady_clock::now();
  SolverReport report = dispatch(o, spec.pipeline, make_objective(o));
  const std::chrono::duration<double, std::milli> elapsed =
      std::chrono::steady_clock::now() - start;
  emit(out, o, spec.pipeline, report, tolerance_for(o, spec), elapsed.count());
  return kExitOk;
}

json fairness_entry(const FairnessReport& r) {
  return {{"satisfied", r.satisfied},
          {"max_gap", r.max_gap},
          {"stage", r.stage + 1},
          {"witness", {r.witness.first, r.witness.second}}};
}

int cmd_verify(const Options& o, std::ostream& out) {
  const PipelineSpec spec = load_pipeline(o.spec_path);
  const Policy policy = load_policy(o.policy_path);
  const double tol = tolerance_for(o, spec);
  const Scope scope = o.scope == "per-stage" ? Scope::kPerStage : Scope::kFinal;
  json doc = {{"scope", o.scope}, {"tolerance", tol}};
  bool all = true;
  if (o.criterion != "eodds") {
    const FairnessReport r = check_eo(spec.pipeline, policy, tol, scope);
    doc["eo"] = fairness_entry(r);
    all = all && r.satisfied;
  }
  if (o.criterion != "eo") {
    const FairnessReport r = check_eodds(spec.pipeline, policy, tol, scope);
    doc["eodds"] = fairness_entry(r);
    all = all && r.satisfied;
  }
  doc["satisfied"] = all;
  if (o.format == "json") {
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << std::fixed << std::setprecision(6);
  for (const char* key : {"eo", "eodds"}) {
    if (!doc.contains(key)) continue;
    const json& r = doc[key];
    out << std::left << std::setw(7) << key << (r["satisfied"].get<bool>() ? "ok  " : "FAIL")
        << "  gap " << r["max_gap"].get<double>() << "  groups "
        << r["witness"][0].get<std::string>() << "/" << r["witness"][1].get<std::string>()
        << "  stage " << r["stage"].get<int>() << "\n";
  }
  return kExitOk;
}

int cmd_bounds(const Options& o, std::ostream& out) {
  const PipelineSpec spec = load_pipeline(o.spec_path);
  const EoddsBound b = eodds_precision_bound(spec.pipeline);
  const double eo = max_precision(spec.pipeline);
  const json doc = {{"max_precision", eo},
                    {"eodds_precision_bound", b.value},
                    {"rho", b.rho},
                    {"ratio", eo / b.value}};
  if (o.format == "json") {
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << std::fixed << std::setprecision(6) << "max_precision          " << eo << "\n"
      << "eodds_precision_bound  " << b.value << "\n"
      << "rho                    " << b.rho << "\n"
      << "ratio                  " << eo / b.value << "\n";
  return kExitOk;
}

int cmd_repro(const Options& o, std::ostream& out) {
  const std::vector<std::string> ids = repro_ids();
  if (o.list) {
    for (const std::string& id : ids) out << id << "\n";
    return kExitOk;
  }
  if (o.example.empty()) throw CLI::RequiredError("example id");
  std::vector<std::string> chosen = {o.example};
  if (o.example == "all") chosen = ids;
  bool all = true;
  for (const std::string& id : chosen) {
    for (const ReproCheck& c : run_repro(id)) {
      out << (c.pass ? "PASS " : "FAIL ") << id << ": " << c.name << " = "
          << std::setprecision(17) << c.actual << " (expected " << c.expected << ")\n";
      all = all && c.pass;
    }
  }
  return all ? kExitOk : 1;
}

int exit_code(const Error& e) {
  return e.code() == ErrorCode::kSizeLimit ? kExitLimit : kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair multi-stage screening: evaluation, solvers and checks", "fair-screen"};
  app.require_subcommand(1);
  Options o;

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}));
  };
  const auto add_tolerance = [&](CLI::App* sub) {
    sub->add_option("--tolerance", o.tolerance, "Fairness tolerance")
        ->check(CLI::NonNegativeNumber);
  };
  const auto add_objective = [&](CLI::App* sub) {
    sub->add_option("--objective", o.objective, "Objective")
        ->check(CLI::IsMember({"precision", "linear", "reciprocal"}));
    sub->add_option("--alpha", o.alpha, "Precision weight")->check(CLI::Range(0.0, 1.0));
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a policy file");
  evaluate->add_option("spec", o.spec_path, "Pipeline spec")->required();
  evaluate->add_option("policy", o.policy_path, "Policy file")->required();
  add_objective(evaluate);
  add_format(evaluate);
  add_tolerance(evaluate);

  CLI::App* solve = app.add_subcommand("solve", "Optimize an equal-opportunity policy");
  solve->add_option("spec", o.spec_path, "Pipeline spec")->required();
  solve->add_option("--method", o.method, "Solver")
      ->check(CLI::IsMember({"ratio", "two-approx", "exact", "fptas", "groupblind", "oracle"}));
  add_objective(solve);
  solve->add_option("--eps", o.eps, "Approximation parameter");
  solve->add_option("--grid", o.grid, "Oracle grid steps per unit")->check(CLI::PositiveNumber);
  solve->add_option("--band", o.band, "Oracle fairness band")->check(CLI::NonNegativeNumber);
  solve->add_option("--constraint", o.constraint, "Oracle constraint")
      ->check(CLI::IsMember({"none", "eo", "eodds"}));
  solve->add_option("--budget", o.budget, "Configuration budget for exact");
  solve->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  add_format(solve);
  add_tolerance(solve);

  CLI::App* verify = app.add_subcommand("verify", "Check fairness of a policy file");
  verify->add_option("spec", o.spec_path, "Pipeline spec")->required();
  verify->add_option("policy", o.policy_path, "Policy file")->required();
  verify->add_option("--criterion", o.criterion, "Criterion")
      ->check(CLI::IsMember({"eo", "eodds", "both"}));
  verify->add_option("--scope", o.scope, "Scope")
      ->check(CLI::IsMember({"final", "per-stage"}));
  add_format(verify);
  add_tolerance(verify);

  CLI::App* repro = app.add_subcommand("repro", "Run a built-in example");
  repro->add_option("example", o.example, "Example id or 'all'");
  repro->add_flag("--list", o.list, "List example ids");

  CLI::App* bounds = app.add_subcommand("bounds", "Precision ceilings");
  bounds->add_option("spec", o.spec_path, "Pipeline spec")->required();
  add_format(bounds);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*evaluate) return cmd_evaluate(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*repro) return cmd_repro(o, out);
    return cmd_bounds(o, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace fairscreen::cli
