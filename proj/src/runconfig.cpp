#include "simplechar/runconfig.hpp"

#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

namespace simplechar {

using json = nlohmann::json;

Preset preset_from_name(const std::string& name) {
  if (name == "helmholtz") return Preset::Helmholtz;
  if (name == "bilaplacian") return Preset::Bilaplacian;
  if (name == "faddeev") return Preset::Faddeev;
  if (name == "quartic") return Preset::Quartic;
  if (name == "dirac") return Preset::Dirac;
  if (name == "laplacian") return Preset::Laplacian;
  if (name == "custom") return Preset::Custom;
  throw ConfigError("unknown preset: " + name);
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::Helmholtz: return "helmholtz";
    case Preset::Bilaplacian: return "bilaplacian";
    case Preset::Faddeev: return "faddeev";
    case Preset::Quartic: return "quartic";
    case Preset::Dirac: return "dirac";
    case Preset::Laplacian: return "laplacian";
    case Preset::Custom: return "custom";
  }
  return "?";
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

StudySpec parse_study(const json& s) {
  reject_unknown(s, {"type", "params", "angles", "shifts", "R", "placements"}, "study");
  StudySpec sp;
  sp.type = s.value("type", "");
  static const std::set<std::string> kinds = {"scaling", "invariance", "multiball",
                                             "counterexample"};
  if (!kinds.count(sp.type)) throw ConfigError("unknown study type: " + sp.type);
  if (s.contains("params")) sp.params = s["params"].get<std::vector<double>>();
  if (s.contains("angles")) sp.angles = s["angles"].get<std::vector<double>>();
  if (s.contains("shifts")) sp.shifts = s["shifts"].get<std::vector<std::vector<int>>>();
  sp.R = s.value("R", 64.0);
  sp.placements = s.value("placements", 20);
  return sp;
}

}  // namespace

RunConfig parse_runconfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(j,
                 {"command", "preset", "param", "resolution", "n", "symbol", "eps", "r0",
                  "mode", "route", "seed", "out", "threads", "emit_pieces", "study"},
                 "config");
  RunConfig rc;
  rc.command = j.value("command", "");
  static const std::set<std::string> cmds = {"analyze", "solve", "verify", "study",
                                             "report"};
  if (!cmds.count(rc.command)) throw ConfigError("unknown command: " + rc.command);
  if (j.contains("preset")) rc.preset = preset_from_name(j["preset"].get<std::string>());
  rc.param = j.value("param", 1.0);
  rc.resolution = j.value("resolution", 256);
  rc.n = j.value("n", 2);
  rc.symbol_text = j.value("symbol", "");
  rc.eps = j.value("eps", 0.0);
  rc.r0 = j.value("r0", 0.0);
  if (j.contains("mode")) {
    std::string m = j["mode"].get<std::string>();
    if (m == "pc")
      rc.mode = QuadMode::PiecewiseConstant;
    else if (m == "cubic")
      rc.mode = QuadMode::Cubic;
    else if (m == "spectral")
      rc.mode = QuadMode::Spectral;
    else
      throw ConfigError("mode must be 'pc', 'cubic' or 'spectral'");
  }
  if (j.contains("route")) {
    std::string r = j["route"].get<std::string>();
    if (r == "generic")
      rc.route = PoleRoute::Generic;
    else if (r == "closed_form")
      rc.route = PoleRoute::ClosedForm;
    else
      throw ConfigError("route must be 'generic' or 'closed_form'");
  }
  rc.seed = j.value("seed", uint64_t(1));
  rc.out_dir = j.value("out", ".");
  rc.threads = j.value("threads", 1);
  rc.emit_pieces = j.value("emit_pieces", false);
  if (rc.resolution < 8 || rc.resolution > 4096)
    throw ConfigError("resolution out of range [8, 4096]");
  if (rc.n < 1 || rc.n > 3) throw ConfigError("n out of range [1, 3]");
  if (rc.threads < 1) throw ConfigError("threads must be positive");
  if (rc.preset == Preset::Custom && rc.symbol_text.empty() && rc.command != "report")
    throw ConfigError("custom preset needs a 'symbol' string");
  if (j.contains("study")) rc.study = parse_study(j["study"]);
  if (rc.command == "study" && rc.study.type.empty())
    throw ConfigError("study command needs a 'study' block");
  return rc;
}

Scenario scenario_from_config(const RunConfig& rc) {
  Scenario sc = make_scenario(rc.preset, rc.param, rc.resolution, rc.n);
  if (rc.preset == Preset::Custom) {
    sc.symbol = MultiPoly::parse(rc.symbol_text, rc.n);
    sc.dims.assign(rc.n, rc.resolution);
    sc.box.assign(rc.n, 64.0);
  }
  if (rc.eps > 0) sc.eps = rc.eps;
  if (rc.r0 > 0) sc.r0 = rc.r0;
  sc.mode = rc.mode;
  sc.route = rc.route;
  sc.seed = rc.seed;
  return sc;
}

std::string report_to_json(const SolveReport& rep) {
  json j;
  j["multiplier_norms"] = rep.multiplier_norms;
  j["direction_ratios"] = rep.direction_ratios;
  j["decomposition_error"] = rep.decomposition_error;
  if (std::isfinite(rep.residual_fd)) j["residual_fd"] = rep.residual_fd;
  j["u_norm"] = rep.u_norm;
  j["f_norm"] = rep.f_norm;
  j["d_r"] = rep.d_r;
  j["d_s"] = rep.d_s;
  if (rep.f_norm > 0)
    j["ratio"] = rep.ratio;
  else
    j["ratio"] = "not-applicable";
  j["rotation_residual"] = rep.rotation_residual;
  j["eps_used"] = rep.eps_used;
  j["r0_used"] = rep.r0_used;
  j["seconds"] = rep.seconds;
  std::ostringstream out;
  out << j.dump(2) << "\n";
  return out.str();
}

}  // namespace simplechar
