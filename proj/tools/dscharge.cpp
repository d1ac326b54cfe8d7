// dscharge: batch front end for de Sitter charge/horizon/constraint/chart
// computations. One job per process; reports are deterministic for a fixed
// (config, seed).
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "dscharge/config.hpp"
#include "dscharge/report.hpp"
#include "dscharge/verify.hpp"

namespace {

using dsc::ordered_json;

void write_output(const std::string& path, const std::string& content) {
  const char* tail = (!content.empty() && content.back() == '\n') ? "" : "\n";
  if (path.empty() || path == "-") {
    std::cout << content << tail;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw dsc::parameter_error("cannot open output file: " + path);
  f << content << tail;
}

// flags override config-file fields (documented precedence: defaults < file < flags)
struct Cli {
  std::string config_path;
  std::string model_name;
  double m = -1e308, a = -1e308, lambda = -1e308, t = -1e308;
  std::string psi_range, chart_name;
  std::string out_path, csv_path;
  long long seed = -1;
  int threads = -1;
  int n_theta = -1, n_psi = -1;
  double C1 = -1e308, C2 = -1e308;
  // chart task
  std::string from, to;
  double chart_t = -1e308, chart_r = -1e308;
  // horizon task
  double br_lo = -1e308, br_hi = -1e308;
  std::string sign;
  // verify task
  double lambda_offset = -1e308;

  bool set(double v) const { return v != -1e308; }
};

dsc::JobConfig merge(const Cli& cli, const std::string& task) {
  nlohmann::json file = nlohmann::json::object();
  if (!cli.config_path.empty()) {
    std::ifstream f(cli.config_path);
    if (!f) throw dsc::parameter_error("config: cannot open file " + cli.config_path);
    try {
      f >> file;
    } catch (const nlohmann::json::exception& e) {
      throw dsc::parameter_error(std::string("config: JSON parse failure: ") + e.what());
    }
  }
  dsc::JobConfig c = dsc::JobConfig::from_json(file);
  c.task = task;
  if (!cli.model_name.empty()) c.model["model"] = cli.model_name;
  if (cli.set(cli.m)) c.model["m"] = cli.m;
  if (cli.set(cli.a)) c.model["a"] = cli.a;
  if (cli.set(cli.lambda)) c.model["lambda"] = cli.lambda;
  if (cli.set(cli.t)) c.model["t"] = cli.t;
  if (!cli.psi_range.empty()) c.model["psi_range"] = cli.psi_range;
  if (!cli.chart_name.empty()) c.model["chart"] = cli.chart_name;
  if (!cli.out_path.empty()) c.out_path = cli.out_path;
  if (!cli.csv_path.empty()) c.csv_path = cli.csv_path;
  if (cli.seed >= 0) c.seed = static_cast<unsigned long long>(cli.seed);
  if (cli.threads >= 0) c.threads = cli.threads;
  if (cli.n_theta > 0) c.quadrature.n_theta = cli.n_theta;
  if (cli.n_psi > 0) c.quadrature.n_psi = cli.n_psi;
  if (cli.set(cli.C1)) c.C1 = cli.C1;
  if (cli.set(cli.C2)) c.C2 = cli.C2;
  if (!cli.from.empty()) c.chart_from = cli.from;
  if (!cli.to.empty()) c.chart_to = cli.to;
  if (cli.set(cli.chart_t)) c.chart_t = cli.chart_t;
  if (cli.set(cli.chart_r)) c.chart_r = cli.chart_r;
  if (cli.set(cli.lambda) && task == "chart") c.chart_lambda = cli.lambda;
  if (cli.set(cli.br_lo)) c.horizon_lo = cli.br_lo;
  if (cli.set(cli.br_hi)) c.horizon_hi = cli.br_hi;
  if (!cli.sign.empty()) c.horizon_sign = cli.sign;
  if (cli.set(cli.lambda_offset)) c.lambda_offset = cli.lambda_offset;
  return c;
}

int run_charges(const dsc::JobConfig& cfg) {
  const auto desc = dsc::parse_model(cfg.model);
  const auto d = desc.build();
  dsc::ChargeReport rep;
  if (d.conformal.kind == dsc::ConformalClass::Hyperbolic) {
    rep = dsc::charge_report_hyperbolic(d, cfg.quadrature, cfg.extrapolation);
  } else {
    if (!d.has_end)
      throw dsc::parameter_error("charges: model slice has no asymptotic end (chart " +
                                 std::string(cfg.model.value("chart", "?")) + ")");
    auto quad_at = [&](double r) {
      dsc::QuadratureSpec q = cfg.quadrature;
      if (std::holds_alternative<dsc::KerrDSParams>(desc.params)) {
        const auto& kp = std::get<dsc::KerrDSParams>(desc.params);
        std::tie(q.psi_start, q.psi_end) = dsc::kerr_psi_interval(kp, r);
      }
      return q;
    };
    rep = dsc::charge_report_planar(d, quad_at, cfg.extrapolation, dsc::EpsilonConvention::Flat,
                                    cfg.C1, cfg.C2);
    if (std::holds_alternative<dsc::KerrDSParams>(desc.params))
      rep.psi_range = std::get<dsc::KerrDSParams>(desc.params).psi_range == dsc::PsiRange::Shifted
                          ? "shifted"
                          : "standard";
  }
  ordered_json j = dsc::report_to_json(rep);
  j["meta"]["seed"] = cfg.seed;
  j["meta"]["n_theta"] = cfg.quadrature.n_theta;
  j["meta"]["n_psi"] = cfg.quadrature.n_psi;
  write_output(cfg.out_path, j.dump(2));
  if (!cfg.csv_path.empty()) write_output(cfg.csv_path, dsc::report_to_csv(rep));
  return 0;
}

int run_horizon(const dsc::JobConfig& cfg) {
  const auto desc = dsc::parse_model(cfg.model);
  const auto d = desc.build();
  double lo = cfg.horizon_lo, hi = cfg.horizon_hi;
  if (lo == 0.0 && hi == 0.0) {
    if (std::holds_alternative<dsc::McVittieParams>(desc.params)) {
      const auto& p = std::get<dsc::McVittieParams>(desc.params);
      if (p.m > 0.0) {
        const double rho = p.m / (2.0 * p.A());
        lo = 0.3 * rho;
        hi = 3.0 * rho;
      }
    }
    if (lo == 0.0 && hi == 0.0)
      throw dsc::parameter_error("horizon: no bracket given (field \"horizon.bracket\")");
  }
  const auto sign =
      cfg.horizon_sign == "past" ? dsc::HorizonSign::Past : dsc::HorizonSign::Future;
  const double r = dsc::find_horizon_spherical(d, sign, lo, hi);
  ordered_json j;
  j["model"] = d.name;
  j["sign"] = cfg.horizon_sign;
  j["bracket"] = {lo, hi};
  j["radius"] = r;
  j["residual"] = dsc::horizon_residual(d, {0, 0, 0}, r, sign);
  write_output(cfg.out_path, j.dump(2));
  return 0;
}

int run_constraints(const dsc::JobConfig& cfg) {
  const auto desc = dsc::parse_model(cfg.model);
  const auto d = desc.build();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ordered_json samples = ordered_json::array();
  const double Lam = d.Lambda() + cfg.lambda_offset;
  double lo = cfg.annulus_lo, hi = cfg.annulus_hi;
  if (lo == 5.0 && hi == 50.0 &&
      std::holds_alternative<std::pair<dsc::ChartId, double>>(desc.params)) {
    // chart-appropriate default sampling annuli for the polar charts
    switch (std::get<std::pair<dsc::ChartId, double>>(desc.params).first) {
      case dsc::ChartId::Global: lo = 0.3; hi = 2.8; break;
      case dsc::ChartId::StaticInner: lo = 0.3 * desc.lambda; hi = 0.9 * desc.lambda; break;
      case dsc::ChartId::Hyperbolic: lo = 0.5 * desc.lambda; hi = 3.0 * desc.lambda; break;
      default: break;
    }
  }
  double worst00 = 0.0, worst0i = 0.0;
  for (int i = 0; i < cfg.constraint_points; ++i) {
    dsc::Vec3 x;
    if (d.g.coords == dsc::CoordSystem::Cartesian) {
      const double rr = lo + (hi - lo) * u(rng);
      const double th = std::acos(2.0 * u(rng) - 1.0);
      const double ps = 2.0 * dsc::kPi * u(rng);
      x = {rr * std::sin(th) * std::cos(ps), rr * std::sin(th) * std::sin(ps), rr * std::cos(th)};
    } else {
      x = {lo + (hi - lo) * u(rng), 0.3 + (dsc::kPi - 0.6) * u(rng),
           2.0 * dsc::kPi * u(rng) * 0.95};
    }
    const auto s = dsc::constraints(d.g, d.K, Lam, x);
    worst00 = std::max(worst00, std::abs(s.T00));
    worst0i = std::max(worst0i, s.T0i_norm);
    ordered_json row;
    row["x"] = {x[0], x[1], x[2]};
    row["T00"] = s.T00;
    row["T0i"] = {s.T0i[0], s.T0i[1], s.T0i[2]};
    row["T0i_norm"] = s.T0i_norm;
    row["dec_margin"] = s.dec_margin;
    row["mc_margin"] = s.mc_margin;
    samples.push_back(row);
  }
  ordered_json j;
  j["model"] = d.name;
  j["lambda_offset"] = cfg.lambda_offset;
  j["max_abs_T00"] = worst00;
  j["max_T0i_norm"] = worst0i;
  j["samples"] = samples;
  write_output(cfg.out_path, j.dump(2));
  return 0;
}

int run_chart(const dsc::JobConfig& cfg) {
  ordered_json j;
  j["lambda"] = cfg.chart_lambda;
  if ((cfg.chart_from == "planar-upper" || cfg.chart_from == "planar") &&
      (cfg.chart_to == "static" || cfg.chart_to == "static-inner" ||
       cfg.chart_to == "static-outer")) {
    const auto s = dsc::planar_to_static(cfg.chart_t, cfg.chart_r, cfg.chart_lambda);
    j["from"] = {{"chart", "planar-upper"}, {"t", cfg.chart_t}, {"r", cfg.chart_r}};
    j["to"] = {{"chart", s.branch == dsc::StaticCoords::Inner ? "static-inner" : "static-outer"},
               {"t", s.t_static},
               {"r", s.r_static}};
  } else if ((cfg.chart_from == "static" || cfg.chart_from == "static-inner" ||
              cfg.chart_from == "static-outer") &&
             (cfg.chart_to == "planar" || cfg.chart_to == "planar-upper")) {
    const auto [t, r] = dsc::static_to_planar(cfg.chart_t, cfg.chart_r, cfg.chart_lambda);
    j["from"] = {{"chart", cfg.chart_from}, {"t", cfg.chart_t}, {"r", cfg.chart_r}};
    j["to"] = {{"chart", "planar-upper"}, {"t", t}, {"r", r}};
  } else {
    throw dsc::parameter_error("chart: unsupported transition \"" + cfg.chart_from + "\" -> \"" +
                               cfg.chart_to + "\" (fields chart.from/chart.to)");
  }
  write_output(cfg.out_path, j.dump(2));
  return 0;
}

int run_verify_task(const dsc::JobConfig& cfg) {
  dsc::VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.quadrature = cfg.quadrature;
  opt.lambda_offset = cfg.lambda_offset;
  const auto results = dsc::run_verify(opt);
  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    std::printf("%-28s %s  measured=%.3e  tolerance=%.3e%s%s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.measured, r.tolerance,
                r.warning.empty() ? "" : "  ", r.warning.c_str());
    ordered_json row;
    row["name"] = r.name;
    row["pass"] = r.pass;
    row["measured"] = r.measured;
    row["tolerance"] = r.tolerance;
    if (!r.warning.empty()) row["warning"] = r.warning;
    checks.push_back(row);
  }
  if (!cfg.out_path.empty()) {
    ordered_json j;
    j["checks"] = checks;
    j["all_pass"] = all_pass;
    write_output(cfg.out_path, j.dump(2));
  }
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dscharge: conserved charges of asymptotically de Sitter initial data"};
  app.require_subcommand(1);

  Cli cli;
  std::string task;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "JSON job config (flags override file fields)");
    sub->add_option("--out", cli.out_path, "output report path (default: stdout)");
    sub->add_option("--seed", cli.seed, "seed for randomized sample points");
    sub->add_option("--threads", cli.threads, "max worker threads (0 = auto)");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", cli.model_name, "mcvittie | kerr-ds | de-sitter");
    sub->add_option("--m", cli.m, "mass parameter");
    sub->add_option("--a", cli.a, "spin parameter (kerr-ds)");
    sub->add_option("--lambda", cli.lambda, "de Sitter radius (Lambda = 3/lambda^2)");
    sub->add_option("--t", cli.t, "slice time");
    sub->add_option("--psi-range", cli.psi_range, "standard | shifted (kerr-ds)");
    sub->add_option("--chart", cli.chart_name, "chart name (de-sitter)");
    sub->add_option("--n-theta", cli.n_theta, "Gauss-Legendre nodes in cos(theta)");
    sub->add_option("--n-psi", cli.n_psi, "azimuthal nodes");
  };

  auto* c_charges = app.add_subcommand("charges", "total energy, momentum, angular momentum");
  add_common(c_charges);
  add_model(c_charges);
  c_charges->add_option("--csv", cli.csv_path, "CSV of (radius, raw charge) samples");
  c_charges->add_option("--C1", cli.C1, "coefficient in E >= |C1 P + C2 J|");
  c_charges->add_option("--C2", cli.C2, "coefficient in E >= |C1 P + C2 J|");
  c_charges->callback([&] { task = "charges"; });

  auto* c_horizon = app.add_subcommand("horizon", "spherical apparent-horizon finder");
  add_common(c_horizon);
  add_model(c_horizon);
  c_horizon->add_option("--bracket-lo", cli.br_lo, "bisection bracket lower radius");
  c_horizon->add_option("--bracket-hi", cli.br_hi, "bisection bracket upper radius");
  c_horizon->add_option("--sign", cli.sign, "future | past");
  c_horizon->callback([&] { task = "horizon"; });

  auto* c_constraints = app.add_subcommand("constraints", "Gauss/Codazzi constraint densities");
  add_common(c_constraints);
  add_model(c_constraints);
  c_constraints->add_option("--lambda-offset", cli.lambda_offset,
                            "offset added to Lambda (checker self-test)");
  c_constraints->callback([&] { task = "constraints"; });

  auto* c_chart = app.add_subcommand("chart", "coordinate transitions between charts");
  add_common(c_chart);
  c_chart->add_option("--from", cli.from, "source chart");
  c_chart->add_option("--to", cli.to, "target chart");
  c_chart->add_option("--t", cli.chart_t, "source time coordinate");
  c_chart->add_option("--r", cli.chart_r, "source radius");
  c_chart->add_option("--lambda", cli.lambda, "de Sitter radius");
  c_chart->callback([&] { task = "chart"; });

  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(c_verify);
  c_verify->add_option("--n-theta", cli.n_theta, "quadrature resolution override");
  c_verify->add_option("--n-psi", cli.n_psi, "quadrature resolution override");
  c_verify->add_option("--lambda-offset", cli.lambda_offset,
                       "corrupt the constraint Lambda (self-test; makes the suite fail)");
  c_verify->callback([&] { task = "verify"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    const dsc::JobConfig cfg = merge(cli, task);
    if (cfg.threads > 0) dsc::set_max_threads(cfg.threads);
    if (task == "charges") return run_charges(cfg);
    if (task == "horizon") return run_horizon(cfg);
    if (task == "constraints") return run_constraints(cfg);
    if (task == "chart") return run_chart(cfg);
    if (task == "verify") return run_verify_task(cfg);
    throw dsc::parameter_error("unknown task: " + task);
  } catch (const dsc::parameter_error& e) {
    ordered_json j;
    j["error"] = e.what();
    j["kind"] = "config";
    std::cerr << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = e.what();
    j["kind"] = "domain";
    std::cerr << j.dump(2) << "\n";
    return 2;
  }
}
