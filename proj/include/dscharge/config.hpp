#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <variant>

#include "dscharge/charges.hpp"
#include "dscharge/models.hpp"

namespace dsc {

// Model descriptor as it appears in config files:
//   {"model": "kerr-ds", "m": 1.0, "a": 0.5, "lambda": 10.0, "t": 0.0,
//    "psi_range": "standard"}
//   {"model": "mcvittie", "m": 1.0, "lambda": 10.0, "t": 0.0}
//   {"model": "de-sitter", "chart": "planar-upper", "lambda": 10.0, "t": 0.0}
struct ModelDescriptor {
  std::variant<McVittieParams, KerrDSParams, std::pair<ChartId, double>> params;
  double lambda = 10.0;
  std::string name;

  InitialDataSet build() const {
    if (std::holds_alternative<McVittieParams>(params))
      return mcvittie_slice(std::get<McVittieParams>(params));
    if (std::holds_alternative<KerrDSParams>(params))
      return kerr_planar_slice(std::get<KerrDSParams>(params));
    const auto& [chart, time] = std::get<std::pair<ChartId, double>>(params);
    return de_sitter_data(chart, time, lambda);
  }
};

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& key, double fallback,
                          bool required = false) {
  if (!j.contains(key)) {
    if (required) throw parameter_error("config: missing required field \"" + key + "\"");
    return fallback;
  }
  if (!j.at(key).is_number())
    throw parameter_error("config: field \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

}  // namespace detail

inline ModelDescriptor parse_model(const nlohmann::json& j) {
  if (!j.contains("model") || !j.at("model").is_string())
    throw parameter_error("config: missing model name field \"model\"");
  const std::string name = j.at("model").get<std::string>();
  ModelDescriptor out;
  out.name = name;
  out.lambda = detail::json_number(j, "lambda", 10.0);
  if (!(out.lambda > 0.0)) throw parameter_error("config: field \"lambda\" must be positive");
  if (name == "mcvittie") {
    McVittieParams p;
    p.m = detail::json_number(j, "m", 1.0);
    p.lambda = out.lambda;
    p.t = detail::json_number(j, "t", 0.0);
    p.validate();
    out.params = p;
  } else if (name == "kerr-ds") {
    KerrDSParams p;
    p.m = detail::json_number(j, "m", 1.0);
    p.a = detail::json_number(j, "a", 0.5);
    p.lambda = out.lambda;
    p.t = detail::json_number(j, "t", 0.0);
    if (j.contains("psi_range")) {
      const std::string pr = j.at("psi_range").get<std::string>();
      if (pr == "standard")
        p.psi_range = PsiRange::Standard;
      else if (pr == "shifted")
        p.psi_range = PsiRange::Shifted;
      else
        throw parameter_error("config: field \"psi_range\" must be \"standard\" or \"shifted\"");
    }
    p.validate();
    out.params = p;
  } else if (name == "de-sitter") {
    const std::string chart = j.contains("chart") ? j.at("chart").get<std::string>() : "planar-upper";
    out.params = std::make_pair(chart_from_string(chart), detail::json_number(j, "t", 0.0));
  } else {
    throw parameter_error("config: unknown model \"" + name + "\" in field \"model\"");
  }
  return out;
}

struct JobConfig {
  std::string task;
  nlohmann::json model = {{"model", "mcvittie"}};
  QuadratureSpec quadrature;
  ExtrapolationSpec extrapolation;
  std::string out_path;
  std::string csv_path;
  unsigned long long seed = 1;
  int threads = 0;
  // task extras
  double horizon_lo = 0.0, horizon_hi = 0.0;  // 0,0 = auto bracket
  std::string horizon_sign = "future";
  int constraint_points = 20;
  double annulus_lo = 5.0, annulus_hi = 50.0;
  std::string chart_from = "planar-upper";
  std::string chart_to = "static";
  double chart_t = 0.0, chart_r = 5.0, chart_lambda = 10.0;
  double lambda_offset = 0.0;  // verify self-test knob
  double C1 = 1.0, C2 = 1.0;

  static JobConfig from_json(const nlohmann::json& j) {
    JobConfig c;
    if (j.contains("task")) c.task = j.at("task").get<std::string>();
    if (j.contains("model")) c.model = j.at("model");
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("n_theta")) c.quadrature.n_theta = q.at("n_theta").get<int>();
      if (q.contains("n_psi")) c.quadrature.n_psi = q.at("n_psi").get<int>();
    }
    if (j.contains("extrapolation")) {
      const auto& e = j.at("extrapolation");
      if (e.contains("radii")) c.extrapolation.radii = e.at("radii").get<std::vector<double>>();
      if (e.contains("count")) c.extrapolation.count = e.at("count").get<int>();
    }
    if (j.contains("out")) c.out_path = j.at("out").get<std::string>();
    if (j.contains("csv")) c.csv_path = j.at("csv").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long long>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("horizon")) {
      const auto& h = j.at("horizon");
      if (h.contains("bracket")) {
        const auto b = h.at("bracket").get<std::vector<double>>();
        if (b.size() != 2) throw parameter_error("config: field \"horizon.bracket\" needs 2 values");
        c.horizon_lo = b[0];
        c.horizon_hi = b[1];
      }
      if (h.contains("sign")) c.horizon_sign = h.at("sign").get<std::string>();
    }
    if (j.contains("constraints")) {
      const auto& k = j.at("constraints");
      if (k.contains("points")) c.constraint_points = k.at("points").get<int>();
      if (k.contains("annulus")) {
        const auto b = k.at("annulus").get<std::vector<double>>();
        if (b.size() != 2) throw parameter_error("config: field \"constraints.annulus\" needs 2 values");
        c.annulus_lo = b[0];
        c.annulus_hi = b[1];
      }
    }
    if (j.contains("chart")) {
      const auto& ch = j.at("chart");
      if (ch.contains("from")) c.chart_from = ch.at("from").get<std::string>();
      if (ch.contains("to")) c.chart_to = ch.at("to").get<std::string>();
      c.chart_t = detail::json_number(ch, "t", 0.0);
      c.chart_r = detail::json_number(ch, "r", 5.0);
      c.chart_lambda = detail::json_number(ch, "lambda", 10.0);
    }
    if (j.contains("verify")) {
      const auto& v = j.at("verify");
      c.lambda_offset = detail::json_number(v, "lambda_offset", 0.0);
    }
    if (j.contains("inequalities")) {
      const auto& q = j.at("inequalities");
      c.C1 = detail::json_number(q, "C1", 1.0);
      c.C2 = detail::json_number(q, "C2", 1.0);
    }
    return c;
  }
};

}  // namespace dsc
