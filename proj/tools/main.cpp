// Command-line front end: check | solve | fluct | diagnose | recode.
// JSON config in, JSON/CSV out. Exit codes: 0 success, 2 validation/usage,
// 3 infeasible model, 4 internal numerical failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sftdim/ballmass.hpp"
#include "sftdim/config.hpp"
#include "sftdim/solver.hpp"

using nlohmann::json;
using namespace sftdim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Infeasible:
      return kExitInfeasible;
    case ErrorCode::Numeric:
    case ErrorCode::Io:
      return kExitNumeric;
    default:
      return kExitUsage;
  }
}

struct CommonOpts {
  bool as_json = false;
  std::string kernel = "auto";
  int threads = 0;
};

KernelOptions kernel_options(const CommonOpts& c) {
  KernelOptions k;
  if (c.kernel == "scalar")
    k.kind = KernelKind::Scalar;
  else if (c.kernel == "avx2")
    k.kind = KernelKind::Avx2;
  else if (c.kernel == "auto")
    k.kind = KernelKind::Auto;
  else
    throw Error(ErrorCode::Schema, "unknown kernel '" + c.kernel + "'");
  k.threads = c.threads;
  return k;
}

std::vector<int> parse_grid(const std::string& spec) {
  int a = 0, b = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%d:%d:%d", &a, &b, &step) != 3 || a < 1 || b < a || step < 1)
    throw Error(ErrorCode::BadGrid, "grid must be a:b:step with 1 <= a <= b, step >= 1");
  std::vector<int> grid;
  for (int n = a; n <= b; n += step) grid.push_back(n);
  return grid;
}

json load_doc(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open config " + path);
  try {
    json doc;
    f >> doc;
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, std::string("config is not valid JSON: ") + e.what());
  }
}

void emit(const CommonOpts& common, const json& report, const std::string& text) {
  if (common.as_json)
    std::cout << report.dump(2) << "\n";
  else
    std::cout << text;
}

json report_skeleton(const std::string& command, const std::string& digest, json params) {
  return json{{"command", command},
              {"config_digest", digest},
              {"params", std::move(params)},
              {"results", json::object()}};
}

json matrix_json(const MarkovMeasure& m) {
  json P = json::array();
  for (int i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.n(); ++j) row.push_back(m.p(i, j));
    P.push_back(std::move(row));
  }
  return P;
}

json stats_json(const FlowStats& s) {
  return json{{"h_flow", s.h_flow},       {"lambda", s.lambda},
              {"dim", s.dim},             {"a", s.a},
              {"b", s.b},                 {"roof_mean", s.roof_mean},
              {"fs_mean", s.fs_mean},     {"entropy_exceeds_exponent", s.entropy_exceeds_exponent},
              {"fs_mean_mismatch", s.fs_mean_mismatch}};
}

// Bowen root of the model's F^u, recoding to depth <= 2 first if necessary.
double model_bowen_root(const Model& model, int* ell_out) {
  if (model.fu.depth() <= 2) {
    if (ell_out) *ell_out = 1;
    return bowen_root(model.sft, model.fu);
  }
  LocallyConstantFn fns_in[1] = {model.fu};
  Recoded rec = block_recode(model.sft, std::span<const LocallyConstantFn>(fns_in, 1),
                             model.fu.depth() - 1);
  if (ell_out) *ell_out = model.fu.depth() - 1;
  return bowen_root(rec.sft, rec.fns[0]);
}

int cmd_check(const std::string& config_path, const CommonOpts& common) {
  json doc = load_doc(config_path);
  auto issues = collect_config_issues(doc);
  if (!issues.empty()) {
    json report = report_skeleton("check", config_digest(doc), json{{"config", config_path}});
    json errs = json::array();
    std::string text = "config validation failed:\n";
    for (const auto& issue : issues) {
      errs.push_back(json{{"code", issue.code}, {"detail", issue.detail}});
      text += "  [" + issue.code + "] " + issue.detail + "\n";
    }
    report["results"]["errors"] = std::move(errs);
    emit(common, report, text);
    return kExitUsage;
  }

  Model model = load_model(doc);
  json report = report_skeleton("check", model.digest, json{{"config", config_path}});
  auto mix = mixing_index(model.sft);
  int ell = 1;
  double s_star = model_bowen_root(model, &ell);
  bool feasible = s_star > 0.5 + 1e-10;

  auto& res = report["results"];
  res["alphabet_size"] = model.sft.n;
  res["mixing_index"] = mix ? json(*mix) : json(nullptr);
  res["bowen_root"] = s_star;
  res["bowen_root_ell"] = ell;
  res["dim_two_feasible"] = feasible;
  std::string text = "config ok: " + std::to_string(model.sft.n) + " symbols, mixing index " +
                     (mix ? std::to_string(*mix) : std::string("none")) + "\n";
  text += "bowen root s* = " + std::to_string(s_star) + " (ell=" + std::to_string(ell) + ") -> " +
          (feasible ? "dimension-2 level set is reachable" : "not feasible for dimension 2") + "\n";
  if (model.markov) {
    FlowStats st = flow_stats(*model.markov, model.roof, model.fu, &model.fs);
    DimTwoReport d2 = check_dim_two(st, 1e-10);
    res["stats"] = stats_json(st);
    res["residual_ratio"] = d2.residual_ratio;
    text += "markov block: dim = " + std::to_string(st.dim) +
            ", residual_ratio = " + std::to_string(d2.residual_ratio) + "\n";
  }
  emit(common, report, text);
  return kExitOk;
}

int cmd_solve(const std::string& config_path, const CommonOpts& common, const SolveOptions& opts,
              int count, bool seed_given, const std::string& out_path) {
  Model model = load_model(load_doc(config_path));
  json report = report_skeleton(
      "solve", model.digest,
      json{{"config", config_path}, {"tol", opts.tol}, {"ell_max", opts.ell_max},
           {"count", count}, {"seed", opts.seed}});
  if (count > 1 && !seed_given)
    throw Error(ErrorCode::Schema, "--count > 1 draws random directions; --seed is required");

  auto t0 = std::chrono::steady_clock::now();
  SolveResult res = solve_dimension_two(model.sft, model.roof, model.fu, model.fs, opts);
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  DimTwoReport d2 = check_dim_two(res.stats, opts.tol);

  auto& r = report["results"];
  r["ell_used"] = res.ell_used;
  r["a_ell"] = res.a_ell;
  r["stats"] = stats_json(res.stats);
  r["residual_ratio"] = d2.residual_ratio;
  r["residual_b2a"] = d2.residual_b2a;
  r["is_dim_two"] = d2.is_dim_two;
  r["markov"] = matrix_json(res.measure);
  r["stationary"] = res.measure.v;
  r["elapsed_ms"] = ms;

  std::string text = "solved: dim = " + std::to_string(res.stats.dim) +
                     ", residual_ratio = " + std::to_string(d2.residual_ratio) +
                     ", ell = " + std::to_string(res.ell_used) + " (" + std::to_string(ms) +
                     " ms)\n";

  if (count > 1) {
    auto measures = level_set_sample(model.sft, model.fu, count, opts);
    json blocks = json::array();
    for (const auto& m : measures) {
      FlowStats st = flow_stats(m, res.roof, res.fu, &res.fs);
      DimTwoReport dd = check_dim_two(st, opts.tol);
      blocks.push_back(json{{"markov", matrix_json(m)}, {"residual_ratio", dd.residual_ratio}});
    }
    r["level_set"] = std::move(blocks);
    text += "level set: " + std::to_string(measures.size()) + " distinct measures\n";
  }

  if (!out_path.empty()) {
    Model solved;
    solved.sft = res.sft;
    solved.roof = res.roof;
    solved.fu = res.fu;
    solved.fs = res.fs;
    solved.fs_defaulted = model.fs_defaulted;
    solved.markov = res.measure;
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + out_path + " for writing");
    f << model_to_json(solved).dump(2) << "\n";
    r["out"] = out_path;
    text += "solved config written to " + out_path + "\n";
  }
  emit(common, report, text);
  return kExitOk;
}

int cmd_fluct(const std::string& config_path, const CommonOpts& common, int l_max,
              int64_t samples, bool seed_given, uint64_t seed, const std::string& grid_spec,
              double big_d, double c_tilde, const std::string& q_side) {
  Model model = load_model(load_doc(config_path));
  if (!model.markov)
    throw Error(ErrorCode::Schema, "fluct needs a markov block (run solve --out first)");
  if (samples > 0 && !seed_given)
    throw Error(ErrorCode::Schema, "sampling requires --seed (use --samples 0 for exact-only)");

  const MarkovMeasure& m = *model.markov;
  json report = report_skeleton(
      "fluct", model.digest,
      json{{"config", config_path}, {"l_max", l_max}, {"samples", samples},
           {"seed", seed}, {"big_d", big_d}, {"c_tilde", c_tilde}, {"q_side", q_side}});
  auto& r = report["results"];

  double a = shift_entropy(m);
  double b = integrate(m, model.fu);
  r["a"] = a;
  r["b"] = b;

  auto q_json = [](const CovarianceQ& q) {
    return json{{"q", {{q.q[0][0], q.q[0][1]}, {q.q[1][0], q.q[1][1]}}},
                {"lag_used", q.lag_used},
                {"truncation_residual", q.truncation_residual},
                {"det", q.det()}};
  };

  NonsingularityReport ns = nonsingularity_check(m, model.fu, l_max);
  if (q_side == "u" || q_side == "both") r["q_unstable"] = q_json(ns.q);
  if (q_side == "s" || q_side == "both")
    r["q_stable"] = q_json(green_kubo_covariance(m, model.fu, {}, ObsSide::Stable, &model.fs));

  auto verdict_json = [&](const CoboundaryVerdict& v) {
    json j{{"is_degenerate", v.is_degenerate}, {"max_abs_sum", v.max_abs_sum}};
    if (v.witness) {
      std::string cyc;
      for (int s : v.witness->syms) {
        if (!cyc.empty()) cyc += ',';
        cyc += m.sft.name(s);
      }
      j["witness_cycle"] = cyc;
      j["witness_sum"] = v.witness_sum;
    }
    return j;
  };
  CoboundaryVerdict cob_fu = coboundary_test(m.sft, model.fu, b, l_max);
  CoboundaryVerdict cob_g = coboundary_test(m.sft, potential_G(m), -a, l_max);
  r["coboundary_fu_minus_b"] = verdict_json(cob_fu);
  r["coboundary_negG_minus_a"] = verdict_json(cob_g);
  r["rank_cycles"] = ns.rank_cycles;
  r["det_q"] = ns.det_q;
  r["nonsingular"] = ns.nonsingular;

  std::string text = "a = " + std::to_string(a) + ", b = " + std::to_string(b) + "\n";
  text += "Q det = " + std::to_string(ns.det_q) + ", cycle rank = " +
          std::to_string(ns.rank_cycles) + ", nonsingular = " +
          (ns.nonsingular ? "yes" : "no") + "\n";
  text += std::string("F^u - b coboundary: ") + (cob_fu.is_degenerate ? "degenerate" : "no") +
          (cob_fu.witness ? " (witness " + std::string(r["coboundary_fu_minus_b"]["witness_cycle"]) + ")"
                          : "") +
          "\n";

  if (samples > 0) {
    auto grid = parse_grid(grid_spec);
    std::vector<int32_t> grid32(grid.begin(), grid.end());
    TailEventStats tail = asip_harness(m, model.fu, model.fs, grid32, samples, big_d, c_tilde,
                                       seed, kernel_options(common));
    json rows = json::array();
    text += "tail events (D=" + std::to_string(big_d) + ", C~=" + std::to_string(c_tilde) + "):\n";
    for (size_t g = 0; g < tail.n_grid.size(); ++g) {
      rows.push_back(json{{"n", tail.n_grid[g]},
                          {"freq_u", tail.freq_u[g]},
                          {"freq_s", tail.freq_s[g]},
                          {"freq_joint", tail.freq_joint[g]},
                          {"rho_pred", tail.rho_pred[g]}});
      char line[160];
      std::snprintf(line, sizeof line, "  n=%5d freq_u=%.6f freq_s=%.6f joint=%.6f pred=%.6f\n",
                    tail.n_grid[g], tail.freq_u[g], tail.freq_s[g], tail.freq_joint[g],
                    tail.rho_pred[g]);
      text += line;
    }
    r["tail_events"] = std::move(rows);
    r["q_near_singular"] = tail.q_near_singular;
    if (tail.q_near_singular)
      text += "warning: Q is numerically singular; tail predictions are degenerate\n";
  }
  emit(common, report, text);
  return kExitOk;
}

int cmd_diagnose(const std::string& config_path, const CommonOpts& common, int64_t samples,
                 bool seed_given, uint64_t seed, const std::string& grid_spec, double big_d,
                 double offset_c, const std::string& out_path) {
  Model model = load_model(load_doc(config_path));
  if (!model.markov)
    throw Error(ErrorCode::Schema, "diagnose needs a markov block (run solve --out first)");
  if (!seed_given) throw Error(ErrorCode::Schema, "diagnose samples paths; --seed is required");

  auto grid = parse_grid(grid_spec);
  DiagnosticSeries series = singularity_series(*model.markov, model.fu, model.fs, big_d,
                                               offset_c, grid, samples, seed,
                                               kernel_options(common));
  export_series(series, out_path);

  json report = report_skeleton(
      "diagnose", model.digest,
      json{{"config", config_path}, {"samples", samples}, {"seed", seed},
           {"n_grid", grid_spec}, {"big_d", big_d}, {"offset_c", offset_c}, {"out", out_path}});
  auto& r = report["results"];

  int ups = 0, downs = 0;
  for (size_t i = 1; i < series.rows.size(); ++i) {
    double diff = series.rows[i].max_log_ratio - series.rows[i - 1].max_log_ratio;
    ups += diff > 0 ? 1 : 0;
    downs += diff < 0 ? 1 : 0;
  }
  std::string verdict = "mixed";
  if (series.rows.size() >= 2 && downs == 0)
    verdict = "increasing";
  else if (series.rows.size() >= 2 && ups == 0)
    verdict = "decreasing";

  json rows = json::array();
  std::string text;
  if (series.dim_two_warning) {
    text += "warning: measure is off the dimension-2 level set (residual " +
            std::to_string(series.residual_ratio) + "); the blow-up statistic is only "
            "meaningful on the level set\n";
  }
  text += "n      epsilon              max_log_ratio  q90_log_ratio  frac_exceed\n";
  for (const auto& row : series.rows) {
    rows.push_back(json{{"n", row.n},
                        {"epsilon", row.epsilon_str},
                        {"max_log_ratio", row.max_log_ratio},
                        {"q90_log_ratio", row.q90_log_ratio},
                        {"frac_exceed", row.frac_exceed}});
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-20s %14.6f %14.6f %12.6f\n", row.n,
                  row.epsilon_str.c_str(), row.max_log_ratio, row.q90_log_ratio,
                  row.frac_exceed);
    text += line;
  }
  r["rows"] = std::move(rows);
  r["growth_verdict"] = verdict;
  r["dim_two_warning"] = series.dim_two_warning;
  r["residual_ratio"] = series.residual_ratio;
  r["b"] = series.b;
  text += "growth verdict: max_log_ratio is " + verdict + "\n";
  text += "series written to " + out_path + "\n";
  emit(common, report, text);
  return kExitOk;
}

int cmd_recode(const std::string& config_path, const CommonOpts& common, int ell,
               const std::string& out_path) {
  json doc = load_doc(config_path);
  Model model = load_model(doc);
  json recoded = recode_config(model, ell);
  json report = report_skeleton("recode", model.digest,
                                json{{"config", config_path}, {"ell", ell}, {"out", out_path}});
  report["results"]["alphabet_size"] = recoded["alphabet"].size();
  std::string text = "recoded at ell=" + std::to_string(ell) + ": " +
                     std::to_string(recoded["alphabet"].size()) + " symbols\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + out_path + " for writing");
    f << recoded.dump(2) << "\n";
    text += "recoded config written to " + out_path + "\n";
  } else if (!common.as_json) {
    text += recoded.dump(2) + "\n";
  } else {
    report["results"]["config"] = recoded;
  }
  emit(common, report, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov measures on subshifts of finite type: dimension-2 suspension flows, "
               "fluctuation statistics, and ball-mass diagnostics"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_flag("--json", common.as_json, "emit a single JSON report on stdout");
  app.add_option("--kernel", common.kernel, "sampling kernel: auto|scalar|avx2")
      ->default_val("auto");
  app.add_option("--threads", common.threads, "worker threads for sampling (0 = auto)");

  std::string config_path;

  auto* check = app.add_subcommand("check", "validate a config and report feasibility");
  check->add_option("config", config_path, "model config (JSON)")->required();

  auto* solve = app.add_subcommand("solve", "find a Markov measure with dimension exactly 2");
  SolveOptions sopts;
  int count = 1;
  std::string solve_out;
  bool solve_seed_given = false;
  solve->add_option("config", config_path)->required();
  solve->add_option("--tol", sopts.tol, "level-set residual tolerance");
  solve->add_option("--ell-max", sopts.ell_max, "deepest block recoding");
  solve->add_option("--delta", sopts.delta_interior, "interior smoothing of the endpoint");
  solve->add_option("--count", count, "number of distinct level-set measures");
  solve->add_option("--seed", sopts.seed, "RNG seed for level-set directions")
      ->trigger_on_parse()
      ->each([&](const std::string&) { solve_seed_given = true; });
  solve->add_option("--out", solve_out, "write the solved config here");

  auto* fluct = app.add_subcommand("fluct", "exact covariance, degeneracy tests, tail events");
  int l_max = 8;
  int64_t fl_samples = 100000;
  uint64_t fl_seed = 0;
  bool fl_seed_given = false;
  std::string fl_grid = "250:2000:250";
  double fl_d = 1.5, fl_ct = 5.0;
  std::string q_side = "u";
  fluct->add_option("config", config_path)->required();
  fluct->add_option("--l-max", l_max, "max periodic-orbit length");
  fluct->add_option("--samples", fl_samples, "MC sample count (0 = exact-only)");
  fluct->add_option("--seed", fl_seed)->trigger_on_parse()->each([&](const std::string&) {
    fl_seed_given = true;
  });
  fluct->add_option("--n-grid", fl_grid, "a:b:step horizon grid");
  fluct->add_option("--big-d", fl_d, "D in the tail events (D > 1)");
  fluct->add_option("--c-tilde", fl_ct, "C~ offset in the tail events");
  fluct->add_option("--q-side", q_side, "covariance side: u|s|both");

  auto* diagnose = app.add_subcommand("diagnose", "ball-mass blow-up series (CSV)");
  int64_t dg_samples = 100000;
  uint64_t dg_seed = 0;
  bool dg_seed_given = false;
  std::string dg_grid = "250:2000:250";
  double dg_d = 1.5, dg_c = 0.0;
  std::string dg_out = "diagnostic_series.csv";
  diagnose->add_option("config", config_path)->required();
  diagnose->add_option("--samples", dg_samples, "paths per grid point");
  diagnose->add_option("--seed", dg_seed)->trigger_on_parse()->each([&](const std::string&) {
    dg_seed_given = true;
  });
  diagnose->add_option("--n-grid", dg_grid, "a:b:step grid for eps(n) = e^{-n b}");
  diagnose->add_option("--big-d", dg_d, "D in the exceedance threshold");
  diagnose->add_option("--offset-c", dg_c, "additive constant C in the stopping threshold");
  diagnose->add_option("--out", dg_out, "CSV destination");

  auto* recode = app.add_subcommand("recode", "emit the l-block recoded config");
  int ell = 2;
  std::string rc_out;
  recode->add_option("config", config_path)->required();
  recode->add_option("--ell", ell, "block length (>= 2)")->required();
  recode->add_option("--out", rc_out, "write the recoded config here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(config_path, common);
    if (*solve) return cmd_solve(config_path, common, sopts, count, solve_seed_given, solve_out);
    if (*fluct)
      return cmd_fluct(config_path, common, l_max, fl_samples, fl_seed_given, fl_seed, fl_grid,
                       fl_d, fl_ct, q_side);
    if (*diagnose)
      return cmd_diagnose(config_path, common, dg_samples, dg_seed_given, dg_seed, dg_grid, dg_d,
                          dg_c, dg_out);
    if (*recode) return cmd_recode(config_path, common, ell, rc_out);
  } catch (const Error& e) {
    json err{{"error", error_code_name(e.code())},
             {"detail", e.what()},
             {"i", e.index_i()},
             {"j", e.index_j()},
             {"value", e.value()}};
    if (common.as_json)
      std::cout << err.dump(2) << "\n";
    else
      std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
