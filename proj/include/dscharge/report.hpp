#pragma once

#include <json.hpp>
#include <string>

#include "dscharge/charges.hpp"

namespace dsc {

using ordered_json = nlohmann::ordered_json;

inline ordered_json fit_to_json(const PowerLawFit& f) {
  ordered_json j;
  j["s"] = f.s;
  j["c"] = f.c;
  j["residual"] = f.rms;
  j["cond"] = f.cond;
  j["s_pinned"] = f.s_pinned;
  j["exact"] = f.exact;
  j["warn"] = f.warn;
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

inline ordered_json decay_to_json(const DecayFit& f) {
  ordered_json j;
  j["tau_hat"] = f.tau_hat;
  j["residual"] = f.residual;
  j["exact"] = f.exact;
  j["fit_failed"] = f.fit_failed;
  j["clears_threshold"] = f.clears_threshold;
  return j;
}

// Report schema: every reported limit carries its per-radius raw values and
// fit diagnostics; no bare numbers.
inline ordered_json report_to_json(const ChargeReport& rep) {
  ordered_json j;
  j["model"] = rep.model;
  j["convention"]["conformal"] = rep.conformal_kind;
  j["convention"]["conformal_factor"] = rep.conformal_factor;
  j["convention"]["psi_range"] = rep.psi_range;
  j["convention"]["epsilon"] = rep.epsilon;
  j["convention"]["z"] = {rep.z[0], rep.z[1], rep.z[2]};
  if (rep.has_planar) {
    j["charges"]["E"] = rep.E.value;
    j["charges"]["P"] = {rep.P[0].value, rep.P[1].value, rep.P[2].value};
    j["charges"]["J"] = {rep.J[0].value, rep.J[1].value, rep.J[2].value};
  }
  if (rep.has_hyperbolic) {
    j["charges"]["EH"] = {rep.EH[0].value, rep.EH[1].value, rep.EH[2].value, rep.EH[3].value};
  }
  j["diagnostics"]["radii"] = rep.radii;
  if (rep.has_planar) {
    j["diagnostics"]["raw"]["E"] = rep.E.raw;
    j["diagnostics"]["fit"]["E"] = fit_to_json(rep.E.fit);
    const char* pn[3] = {"P1", "P2", "P3"};
    const char* jn[3] = {"J1", "J2", "J3"};
    for (int k = 0; k < 3; ++k) {
      j["diagnostics"]["raw"][pn[k]] = rep.P[k].raw;
      j["diagnostics"]["raw"][jn[k]] = rep.J[k].raw;
      j["diagnostics"]["fit"][pn[k]] = fit_to_json(rep.P[k].fit);
      j["diagnostics"]["fit"][jn[k]] = fit_to_json(rep.J[k].fit);
    }
    j["diagnostics"]["decay"]["metric"] = decay_to_json(rep.decay.metric);
    j["diagnostics"]["decay"]["momentum"] = decay_to_json(rep.decay.momentum);
  }
  if (rep.has_hyperbolic) {
    const char* en[4] = {"EH0", "EH1", "EH2", "EH3"};
    for (int nu = 0; nu < 4; ++nu) {
      j["diagnostics"]["raw"][en[nu]] = rep.EH[nu].raw;
      j["diagnostics"]["fit"][en[nu]] = fit_to_json(rep.EH[nu].fit);
    }
  }
  if (rep.margins.planar_valid) {
    j["inequalities"]["E_minus_P"] = rep.margins.energy_momentum;
    j["inequalities"]["E_minus_C1P_plus_C2J"] = rep.margins.energy_momentum_angular;
    j["inequalities"]["C1"] = rep.margins.C1;
    j["inequalities"]["C2"] = rep.margins.C2;
  }
  if (rep.margins.hyperbolic_valid) {
    j["inequalities"]["EH0_minus_EHspatial"] = rep.margins.hyperbolic;
  }
  return j;
}

// plot-ready CSV: one row per radius, one column per raw charge sequence
inline std::string report_to_csv(const ChargeReport& rep) {
  std::string out;
  if (rep.has_planar) {
    out = "radius,E,P1,P2,P3,J1,J2,J3\n";
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
      char buf[320];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    rep.radii[i], rep.E.raw[i], rep.P[0].raw[i], rep.P[1].raw[i], rep.P[2].raw[i],
                    rep.J[0].raw[i], rep.J[1].raw[i], rep.J[2].raw[i]);
      out += buf;
    }
  } else {
    out = "radius,EH0,EH1,EH2,EH3\n";
    for (std::size_t i = 0; i < rep.radii.size(); ++i) {
      char buf[200];
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", rep.radii[i],
                    rep.EH[0].raw[i], rep.EH[1].raw[i], rep.EH[2].raw[i], rep.EH[3].raw[i]);
      out += buf;
    }
  }
  return out;
}

}  // namespace dsc
