// diffeoflow command-line front end.

#include "diffeoflow/descriptor.hpp"
#include "diffeoflow/dff_io.hpp"
#include "diffeoflow/diffeo.hpp"
#include "diffeoflow/errors.hpp"
#include "diffeoflow/evolution.hpp"
#include "diffeoflow/json_text.hpp"
#include "diffeoflow/seminorm.hpp"
#include "diffeoflow/verification.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace diffeoflow;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kVerification = 2, kNonDiffeo = 3, kFlow = 4 };

struct RunConfig {
  std::string command;
  int dim = 1;
  double half_width = 8.0;
  int points = 513;
  std::string decay_class;
  std::vector<std::string> descriptors;
  std::vector<std::string> inputs;
  double t_final = 1.0;
  double dt = 1.0 / 64;
  int order_cap = kGroupOrderCap;
  int weight_cap = kGroupWeightCap;
  std::optional<double> tol;
  std::uint64_t seed = VerifyConfig{}.seed;
  std::vector<int> criteria;
  std::string out;
};

/// Report that ends the run with a given exit code.
struct Outcome {
  Json report;
  int code = kOk;
};

Json multi_index_json(const MultiIndex& alpha, int dim) {
  Json a = Json::array();
  for (int k = 0; k < dim; ++k) a.push_back(alpha[static_cast<std::size_t>(k)]);
  return a;
}

Json grid_json(const Grid& g) {
  return {{"dim", g.dim()}, {"half_width", g.half_width()}, {"points_per_axis", g.points_per_axis()},
          {"spacing", g.spacing()}};
}

Json seminorm_json(const SeminormReport& r, int dim) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"kind", std::string(to_string(e.kind))},
                       {"component", e.component},
                       {"alpha", multi_index_json(e.alpha, dim)},
                       {"m", e.weight},
                       {"value", e.value},
                       {"non_decaying", e.non_decaying}});
  Json rates = Json::array();
  for (const auto& f : r.decay_rates)
    rates.push_back({{"component", f.component}, {"alpha", multi_index_json(f.alpha, dim)}, {"exponent", f.exponent}});
  return {{"inferred_class", std::string(to_string(r.inferred_class))},
          {"max_order", r.max_order},
          {"max_weight", r.max_weight},
          {"annulus_radii", r.annulus_radii},
          {"decay_rates", rates},
          {"entries", entries},
          {"rationale", r.rationale}};
}

std::optional<DecayClass> requested_class(const RunConfig& cfg) {
  if (cfg.decay_class.empty()) return std::nullopt;
  const auto c = parse_decay_class(cfg.decay_class);
  if (!c) throw InvalidArgument("unknown decay class '" + cfg.decay_class + "'");
  return c;
}

Grid config_grid(const RunConfig& cfg) { return Grid(cfg.dim, cfg.half_width, cfg.points); }

/// Operands from --descriptor (sampled on the config grid) or else --input files.
std::vector<Diffeo> load_diffeos(const RunConfig& cfg, std::size_t count) {
  const auto cls = requested_class(cfg);
  std::vector<Diffeo> out;
  if (!cfg.descriptors.empty()) {
    if (cfg.descriptors.size() != count)
      throw InvalidArgument(cfg.command + " needs " + std::to_string(count) + " descriptor(s)");
    const Grid grid = config_grid(cfg);
    for (const auto& d : cfg.descriptors) {
      const auto g = sample(VectorDescriptor::parse(d, cfg.dim), grid);
      const DecayClass c = cls ? *cls : classify_decay(g, cfg.order_cap, cfg.weight_cap).inferred_class;
      out.emplace_back(g, c);
    }
    return out;
  }
  if (cfg.inputs.size() != count)
    throw InvalidArgument(cfg.command + " needs " + std::to_string(count) + " input file(s)");
  for (const auto& path : cfg.inputs) {
    auto phi = read_diffeo(path);
    out.push_back(cls ? Diffeo(phi.displacement(), *cls) : phi);
  }
  return out;
}

InvertOptions invert_options(const RunConfig& cfg) {
  InvertOptions o;
  if (cfg.tol) o.tolerance = *cfg.tol;
  return o;
}

void write_result(const RunConfig& cfg, const Diffeo& phi, Json& report) {
  if (cfg.out.empty()) return;
  fs::create_directories(cfg.out);
  const std::string path = (fs::path(cfg.out) / "result.dff").string();
  write_diffeo(path, phi);
  report["output"] = path;
}

Json diffeo_json(const Diffeo& phi) {
  return {{"decay_class", std::string(to_string(phi.decay_class()))},
          {"epsilon", phi.epsilon()},
          {"sup_displacement", phi.displacement().sup_norm()}};
}

Outcome cmd_classify(const RunConfig& cfg) {
  DisplacementField field = DisplacementField::zeros(config_grid(cfg));
  if (!cfg.descriptors.empty()) {
    if (cfg.descriptors.size() != 1) throw InvalidArgument("classify takes one descriptor");
    field = sample(VectorDescriptor::parse(cfg.descriptors.front(), cfg.dim), config_grid(cfg));
  } else if (cfg.inputs.size() == 1) {
    field = read_dff(cfg.inputs.front()).displacement();
  } else {
    throw InvalidArgument("classify needs --descriptor or one --input");
  }
  Outcome o;
  o.report = {{"command", "classify"}, {"grid", grid_json(field.grid())}};
  try {
    const auto rep = classify_decay(field, cfg.order_cap, cfg.weight_cap);
    o.report["report"] = seminorm_json(rep, field.dim());
    bool ok = true;
    if (const auto cls = requested_class(cfg)) {
      ok = contained_in(rep.inferred_class, *cls);
      o.report["requested_class"] = std::string(to_string(*cls));
    }
    o.report["passed"] = ok;
    o.code = ok ? kOk : kVerification;
  } catch (const InsufficientAnnuli& e) {
    o.report["passed"] = false;
    o.report["error"] = "InsufficientAnnuli";
    o.report["message"] = e.what();
    o.code = kVerification;
  }
  return o;
}

Outcome cmd_compose(const RunConfig& cfg) {
  const auto ops = load_diffeos(cfg, 2);
  const auto result = compose(ops[0], ops[1]);
  Outcome o;
  o.report = {{"command", "compose"}, {"grid", grid_json(result.grid())}, {"result", diffeo_json(result)}};
  write_result(cfg, result, o.report);
  return o;
}

Outcome cmd_invert(const RunConfig& cfg) {
  const auto ops = load_diffeos(cfg, 1);
  InversionReport rep;
  const auto result = invert(ops[0], invert_options(cfg), &rep);
  Outcome o;
  o.report = {{"command", "invert"},
              {"grid", grid_json(result.grid())},
              {"result", diffeo_json(result)},
              {"residual", rep.residual},
              {"fixed_point_iterations", rep.fixed_point_iterations},
              {"newton_used", rep.newton_used},
              {"lipschitz", rep.lipschitz}};
  write_result(cfg, result, o.report);
  return o;
}

Outcome cmd_conjugate(const RunConfig& cfg) {
  const auto ops = load_diffeos(cfg, 2);
  ConjugationReport rep;
  const auto result = conjugate(ops[0], ops[1], &rep, invert_options(cfg));
  Outcome o;
  o.report = {{"command", "conjugate"},
              {"grid", grid_json(result.grid())},
              {"outer_class", std::string(to_string(ops[0].decay_class()))},
              {"inner_class", std::string(to_string(ops[1].decay_class()))},
              {"result", diffeo_json(result)},
              {"classified_class", std::string(to_string(rep.classification.inferred_class))},
              {"normal", rep.normal},
              {"remainder_defect", rep.remainder_defect}};
  write_result(cfg, result, o.report);
  o.code = rep.normal ? kOk : kVerification;
  return o;
}

Json inequality_json(const InequalityReport& r) {
  return {{"holds", r.holds},
          {"violations", r.violations},
          {"min_margin", r.min_margin},
          {"final_bound", r.bound.back()},
          {"final_measured", r.measured.back()}};
}

Outcome cmd_evolve(const RunConfig& cfg) {
  if (cfg.descriptors.size() != 1) throw InvalidArgument("evolve takes one --descriptor for X(t, x)");
  const Grid grid = config_grid(cfg);
  auto cls = requested_class(cfg);
  if (!cls) {
    const auto x0 = sample(VectorDescriptor::parse(cfg.descriptors.front(), cfg.dim, true), grid);
    cls = classify_decay(x0, cfg.order_cap, cfg.weight_cap).inferred_class;
  }
  const auto X = TimeDependentVectorField::parse(cfg.descriptors.front(), cfg.dim, *cls, cfg.t_final);
  const auto flow = evolve(X, grid, cfg.t_final, cfg.dt);
  const auto sup = displacement_sup_bound(flow, X);
  const auto gron = gronwall_bound(flow, X);
  SobolevTrackingOptions sopt;
  sopt.max_weight = cfg.weight_cap;
  const auto sob = sobolev_tracking(flow, X, sopt);
  const auto final_class = classify_decay(flow.snapshots.back(), cfg.order_cap, cfg.weight_cap).inferred_class;

  Outcome o;
  o.report = {{"command", "evolve"},
              {"grid", grid_json(grid)},
              {"X", cfg.descriptors.front()},
              {"decay_class", std::string(to_string(*cls))},
              {"t_final", cfg.t_final},
              {"dt", cfg.dt},
              {"snapshots", flow.snapshots.size()},
              {"final_sup_displacement", flow.snapshots.back().sup_norm()},
              {"final_min_det", flow.diagnostics.back().min_det},
              {"final_class", std::string(to_string(final_class))},
              {"displacement_sup_bound", inequality_json(sup)},
              {"gronwall_bound", inequality_json(gron.inequality)},
              {"sobolev_tracking",
               {{"holds", sob.ok()},
                {"finite", sob.finite},
                {"enlargement_checked", sob.enlargement_checked},
                {"enlargement_defect", sob.enlargement_defect},
                {"weighted_enlargement_defect", sob.weighted_enlargement_defect},
                {"edge_checked", sob.edge_checked},
                {"edge_sup", sob.edge_sup}}}};
  if (flow.snapshots.size() >= 5) {
    const double defect = log_derivative_defect(right_log_derivative(flow), X);
    o.report["log_derivative_defect"] = defect;
  }
  const bool class_kept = contained_in(final_class, *cls);
  o.report["class_preserved"] = class_kept;
  const bool ok = sup.holds && gron.inequality.holds && sob.ok() && class_kept;
  o.report["passed"] = ok;
  o.code = ok ? kOk : kVerification;

  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    const auto csv = (fs::path(cfg.out) / "flow.csv").string();
    std::ofstream f(csv);
    if (!f) throw IoError("cannot open " + csv);
    write_flow_csv(f, flow, sup, gron, sob);
    const auto final_path = (fs::path(cfg.out) / "final.dff").string();
    write_diffeo(final_path, flow.diffeo(flow.snapshots.size() - 1));
    o.report["csv"] = csv;
    o.report["output"] = final_path;
  }
  return o;
}

Outcome cmd_verify(const RunConfig& cfg) {
  Outcome o;
  o.report = {{"command", "verify"}, {"seed", cfg.seed}};
  if (cfg.tol && !(*cfg.tol > 0.0)) {
    o.report["passed"] = false;
    o.report["error"] = "InvalidTolerance";
    o.report["message"] = "tolerance must be positive";
    o.code = kVerification;
    return o;
  }
  bool ok = true;
  if (!cfg.inputs.empty()) {
    Json files = Json::array();
    for (const auto& path : cfg.inputs) {
      const auto phi = read_diffeo(path);
      const auto m = membership_check(phi.displacement(), phi.decay_class(), cfg.order_cap, cfg.weight_cap);
      files.push_back({{"path", path},
                       {"decay_class", std::string(to_string(phi.decay_class()))},
                       {"member", m.ok},
                       {"epsilon", m.epsilon},
                       {"reason", m.reason}});
      ok = ok && m.ok;
    }
    o.report["inputs"] = files;
  }
  VerifyConfig vc;
  vc.seed = cfg.seed;
  Json criteria = Json::array();
  for (const auto& r : run_acceptance(vc, cfg.criteria)) {
    criteria.push_back(to_json(r));
    ok = ok && r.passed;
  }
  o.report["criteria"] = criteria;
  o.report["passed"] = ok;
  o.code = ok ? kOk : kVerification;
  return o;
}

Outcome dispatch(const RunConfig& cfg) {
  if (cfg.command == "classify") return cmd_classify(cfg);
  if (cfg.command == "compose") return cmd_compose(cfg);
  if (cfg.command == "invert") return cmd_invert(cfg);
  if (cfg.command == "conjugate") return cmd_conjugate(cfg);
  if (cfg.command == "evolve") return cmd_evolve(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  throw InvalidArgument("unknown command '" + cfg.command + "'");
}

Json error_report(const RunConfig& cfg, const char* kind, const std::exception& e) {
  return {{"command", cfg.command}, {"passed", false}, {"error", kind}, {"message", e.what()}};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Diffeomorphism group engine: classify, compose, invert, conjugate, evolve, verify"};
  app.add_option("--command", cfg.command, "classify | compose | invert | conjugate | evolve | verify")
      ->required()
      ->check(CLI::IsMember({"classify", "compose", "invert", "conjugate", "evolve", "verify"}));
  app.add_option("--dim", cfg.dim, "Dimension n")->check(CLI::Range(1, 3));
  app.add_option("--half-width", cfg.half_width, "Box half width L")->check(CLI::PositiveNumber);
  app.add_option("--points", cfg.points, "Points per axis N (odd, >= 16)")->check(CLI::Range(16, 1 << 20));
  app.add_option("--class", cfg.decay_class, "CompactSupport | Schwartz | SobolevInfinity | BoundedAll");
  app.add_option("--descriptor", cfg.descriptors, "Closed-form field, components separated by ';' (repeatable)");
  app.add_option("--input", cfg.inputs, "dff-v1 field file (repeatable)");
  app.add_option("--t-final", cfg.t_final, "Final time T");
  app.add_option("--dt", cfg.dt, "RK4 step")->check(CLI::PositiveNumber);
  app.add_option("--order-cap", cfg.order_cap, "Derivative order cap for classification")->check(CLI::Range(0, 6));
  app.add_option("--weight-cap", cfg.weight_cap, "Weight exponent cap for classification")->check(CLI::Range(0, 16));
  app.add_option("--tol", cfg.tol, "Inversion tolerance (must be positive)");
  app.add_option("--seed", cfg.seed, "Seed for randomized sweeps");
  app.add_option("--criteria", cfg.criteria, "Acceptance criteria to run (default: all)")->delimiter(',');
  app.add_option("--out", cfg.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIo;
  }

  Outcome o;
  try {
    o = dispatch(cfg);
  } catch (const ParseError& e) {
    o = {error_report(cfg, "ParseError", e), kIo};
  } catch (const IoError& e) {
    o = {error_report(cfg, "IoError", e), kIo};
  } catch (const InvalidArgument& e) {
    o = {error_report(cfg, "InvalidArgument", e), kIo};
  } catch (const fs::filesystem_error& e) {
    o = {error_report(cfg, "IoError", e), kIo};
  } catch (const UnderResolved& e) {
    o = {error_report(cfg, "UnderResolved", e), kNonDiffeo};
  } catch (const NonDiffeomorphic& e) {
    o = {error_report(cfg, "NonDiffeomorphic", e), kNonDiffeo};
  } catch (const FlowFailure& e) {
    o = {error_report(cfg, "FlowFailure", e), kFlow};
  } catch (const Error& e) {
    o = {error_report(cfg, "Error", e), kVerification};
  }
  const std::string text = dump_json(o.report) + "\n";
  std::cout << text;
  if (!cfg.out.empty() && o.report.contains("command")) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    std::ofstream f(fs::path(cfg.out) / (cfg.command + ".json"));
    if (f) f << text;
  }
  return o.code;
}
