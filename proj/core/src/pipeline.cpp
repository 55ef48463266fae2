#include "ahm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ahm/curvature.hpp"
#include "ahm/seed.hpp"
#include "ahm/util.hpp"

namespace ahm {

namespace {

using Json = nlohmann::ordered_json;

// ------------------------------------------------------------------ config

struct KvFile {
  std::map<std::string, std::string> kv;

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  void parse(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: expected key = value, got '" + line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      kv[section.empty() ? key : section + "." + key] = val;
    }
  }

  bool has(const std::string& k) const { return kv.count(k) != 0; }
  std::string str(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (...) {
      throw ConfigError("config: bad number for " + k + ": '" + it->second + "'");
    }
  }
  bool flag(const std::string& k, bool dflt) const {
    const std::string v = str(k, dflt ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for " + k + ": '" + v + "'");
  }
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = KvFile::trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

SeedParams seed_from(const KvFile& f, const std::string& prefix, const SeedParams& dflt) {
  SeedParams sp = dflt;
  sp.m = f.num(prefix + ".m", dflt.m);
  sp.cap_depth = f.num(prefix + ".cap_depth", dflt.cap_depth);
  sp.dip_amp = f.num(prefix + ".dip_amp", dflt.dip_amp);
  sp.dip_lo = f.num(prefix + ".dip_lo", dflt.dip_lo);
  sp.dip_hi = f.num(prefix + ".dip_hi", dflt.dip_hi);
  sp.delta = f.num(prefix + ".delta", dflt.delta);
  return sp;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  KvFile f;
  f.parse(text);
  RunConfig cfg;
  cfg.schema = int(f.num("schema", 1));
  if (cfg.schema != 1) throw ConfigError("config: unsupported schema version");
  cfg.K = int(f.num("run.k", 1));
  if (cfg.K < 1 || cfg.K > 16) throw ConfigError("config: violated 1 <= K <= 16");
  cfg.tau = f.num("run.tau", 4.0);
  const std::string mode = f.str("run.mode", "superposition");
  if (mode == "superposition")
    cfg.mode = GlueMode::Superposition;
  else if (mode == "three_zone")
    cfg.mode = GlueMode::ThreeZone;
  else
    throw ConfigError("config: run.mode must be superposition or three_zone");
  cfg.symmetrize = f.flag("run.symmetrize", true);
  cfg.rho_bar = f.num("run.rho_bar", 0.0);
  cfg.c_cal = f.num("run.c_cal", 0.0);
  cfg.rho_max = f.num("grid.rho_max", 0.0);

  SeedParams dflt;
  dflt = seed_from(f, "seed", dflt);
  for (int i = 0; i < cfg.K; ++i)
    cfg.seeds.push_back(seed_from(f, "seed." + std::to_string(i + 1), dflt));

  cfg.grid.n_theta = int(f.num("grid.n_theta", 128));
  cfg.grid.h_fine = f.num("grid.h_fine", 0.02);
  cfg.grid.h_mid = f.num("grid.h_mid", 0.05);
  cfg.grid.h_far = f.num("grid.h_far", 0.08);
  cfg.grid.fine_halfwidth = f.num("grid.fine_halfwidth", 1.8);

  cfg.solve.newton_tol = f.num("solve.newton_tol", 1e-9);
  cfg.solve.cg_tol = f.num("solve.cg_tol", 1e-11);
  cfg.solve.cauchy_tol = f.num("solve.cauchy_tol", 1e-8);
  cfg.solve.max_newton = int(f.num("solve.max_newton", 30));
  if (f.has("solve.exhaustion")) cfg.solve.exhaustion_radii = parse_list(f.str("solve.exhaustion", ""));

  cfg.horizons.n_omega = int(f.num("horizons.n_omega", 64));
  cfg.horizons.bisect_tol = f.num("horizons.bisect_tol", 1e-8);
  cfg.horizons.fd_step = f.num("horizons.fd_step", 1e-5);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream out;
  out << "schema=1 K=" << cfg.K << " tau=" << fmt17(cfg.tau)
      << " mode=" << (cfg.mode == GlueMode::Superposition ? "superposition" : "three_zone");
  for (size_t i = 0; i < cfg.seeds.size(); ++i) {
    const SeedParams& s = cfg.seeds[i];
    out << " seed" << i + 1 << "=(m=" << fmt17(s.m) << ",cap=" << fmt17(s.cap_depth)
        << ",dip=" << fmt17(s.dip_amp) << ",delta=" << fmt17(s.delta) << ")";
  }
  return out.str();
}

namespace {

// ---------------------------------------------------------------- assembly

struct Assembled {
  double rho_max;
  GlueConfig glue_cfg;
  PolarGrid grid;
};

Assembled assemble(const RunConfig& cfg) {
  Assembled a;
  a.rho_max = cfg.rho_max > 0.0 ? cfg.rho_max
                                : (cfg.K > 1 ? 3.0 * cfg.tau + 4.0 : 14.0);
  a.glue_cfg.mode = cfg.mode;
  a.glue_cfg.tau = cfg.tau;
  for (int i = 0; i < cfg.K; ++i) {
    const double s = (cfg.K == 1) ? 0.0 : cfg.tau * (cfg.K - 1) - 2.0 * cfg.tau * i;
    a.glue_cfg.centers.push_back(s);
    a.glue_cfg.profiles.push_back(cfg.seeds[i].m == 0.0
                                      ? seed::trivial_profile(a.rho_max)
                                      : seed::build_seed(cfg.seeds[i], a.rho_max));
    a.glue_cfg.deltas.push_back(cfg.seeds[i].delta);
  }
  validate(a.glue_cfg);

  const GluedField probe(a.glue_cfg);
  std::vector<double> centers_abs;
  std::vector<CenterRefine> refine;
  for (int i = 0; i < cfg.K; ++i) {
    const double s = std::abs(a.glue_cfg.centers[i]);
    centers_abs.push_back(s);
    const double pin = probe.pin_radius(i);
    if (pin > 0.0)
      refine.push_back(
          {s, std::min(pin / 2.0, cfg.grid.h_fine), std::max(3.0 * pin, 6.0 * cfg.grid.h_fine)});
  }
  a.grid = build_grid(cfg.grid, centers_abs, a.rho_max, refine);
  return a;
}

bool symmetric_two_center(const RunConfig& cfg) {
  if (cfg.K != 2) return false;
  const SeedParams& a = cfg.seeds[0];
  const SeedParams& b = cfg.seeds[1];
  return a.m == b.m && a.cap_depth == b.cap_depth && a.dip_amp == b.dip_amp &&
         a.dip_lo == b.dip_lo && a.dip_hi == b.dip_hi && a.delta == b.delta;
}

void add_check(PipelineResult& res, const std::string& name, bool ok, bool hard, double value,
               const std::string& note = "") {
  res.checks.push_back({name, ok, hard, value, note});
  if (hard && !ok && res.exit_code == 0) res.exit_code = 2;
}

Json checks_json(const PipelineResult& res) {
  Json arr = Json::array();
  for (const CheckResult& c : res.checks) {
    Json j;
    j["name"] = c.name;
    j["ok"] = c.ok;
    j["hard"] = c.hard;
    j["value"] = c.value;
    if (!c.note.empty()) j["note"] = c.note;
    arr.push_back(j);
  }
  return arr;
}

Json horizon_json(const HorizonReport& rep) {
  Json out;
  out["families_disjoint"] = rep.families_disjoint;
  out["min_family_separation"] = rep.min_family_separation;
  Json centers = Json::array();
  for (const CenterReport& cr : rep.centers) {
    Json c;
    c["center"] = cr.center;
    c["delta"] = cr.delta;
    c["scan"] = {cr.scan_lo, cr.scan_hi};
    c["all_found"] = cr.all_found;
    c["nested"] = cr.nested;
    c["placement_ok"] = cr.placement_ok;
    c["annulus_ok"] = cr.annulus_ok;
    auto dump_target = [](const std::vector<CrossingRecord>& recs, int primary) {
      Json t = Json::array();
      for (size_t i = 0; i < recs.size(); ++i) {
        const CrossingRecord& r = recs[i];
        Json e;
        e["found"] = r.found;
        if (r.found) {
          e["mean_radius"] = r.mean_radius;
          e["roundness"] = r.roundness;
          e["certified"] = r.certified;
          e["bracket"] = {r.bracket_lo, r.bracket_hi};
          e["primary"] = int(i) == primary;
        } else {
          e["scan"] = {r.scan_lo, r.scan_hi};
          e["h_range"] = {r.h_min, r.h_max};
        }
        t.push_back(e);
      }
      return t;
    };
    c["H_minus2"] = dump_target(cr.minus2, cr.primary_minus2);
    c["H_zero"] = dump_target(cr.zero, cr.primary_zero);
    c["H_plus2"] = dump_target(cr.plus2, cr.primary_plus2);
    centers.push_back(c);
  }
  out["centers"] = centers;
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir, bool quiet) {
  PipelineResult res;
  const Assembled a = assemble(cfg);
  const GluedField gf(a.glue_cfg);
  const bool sym = symmetric_two_center(cfg);

  namespace fs = std::filesystem;
  if (!out_dir.empty()) fs::create_directories(out_dir);
  auto say = [&](const std::string& s) {
    if (!quiet) std::printf("%s\n", s.c_str());
  };

  // ---- seeds
  const double floor = std::pow(5.0, -0.25);
  for (int i = 0; i < cfg.K; ++i) {
    const RadialProfile& p = a.glue_cfg.profiles[i];
    double wmin = 1e300;
    for (double v : p.w) wmin = std::min(wmin, v);
    add_check(res, "seed" + std::to_string(i + 1) + "_coercivity_floor", wmin > floor, true,
              wmin);
    if (cfg.seeds[i].m > 0.0) {
      const RadialAspect ra = fit_aspect_radial(p);
      add_check(res, "seed" + std::to_string(i + 1) + "_decay_slope",
                !ra.degenerate && ra.slope > -3.15 && ra.slope < -2.85, true, ra.slope);
    }
    if (!out_dir.empty()) save_profile(out_dir + "/seed_" + std::to_string(i + 1) + ".txt", p);
  }

  // ---- glue
  const ConformalField glued = glue(gf, a.grid);
  const DefectSummary defect = curvature_defect(gf, a.grid);
  res.defect_annulus = defect.max_annulus;
  res.defect_exact_zone = defect.max_exact;
  add_check(res, "glue_defect_exact_zone", true, false, defect.max_exact,
            "curvature defect outside annuli and cores");
  add_check(res, "glue_defect_annulus", true, false, defect.max_annulus,
            "max at rho=" + fmt17(defect.annulus_rho) + " theta=" + fmt17(defect.annulus_theta));
  if (!out_dir.empty()) {
    save_field(out_dir + "/glued.txt", glued, config_echo(cfg));
    export_csv(out_dir + "/glued.csv", glued);
  }
  say("glued: annulus defect " + std::to_string(defect.max_annulus));

  // ---- solve
  SolveResult solved;
  try {
    solved = exhaust(gf, a.grid, cfg.solve);
  } catch (const SolveError& e) {
    add_check(res, "solve_converged", false, false, 0.0, e.what());
    res.exit_code = 3;
    res.summary_json = Json{{"error", e.what()}, {"checks", checks_json(res)}}.dump(2);
    if (!out_dir.empty()) write_text(out_dir + "/summary.json", res.summary_json);
    return res;
  }
  add_check(res, "solve_converged",
            solved.final_residual <= cfg.solve.newton_tol * 1.01 || solved.increment_converged,
            false, solved.final_residual,
            std::to_string(solved.newton_iterations) + " newton iterations" +
                (solved.increment_converged ? ", increment-converged at the readout floor" : ""));
  add_check(res, "solve_min_w_floor", solved.min_w > floor, true, solved.min_w);
  for (size_t i = 0; i < solved.exhaustion_diffs.size(); ++i)
    add_check(res, "exhaustion_diff_" + std::to_string(i + 1), true, false,
              solved.exhaustion_diffs[i]);

  // raw reflection asymmetry, then the symmetry projection
  if (sym) {
    double asym = 0.0;
    const PolarGrid& g = a.grid;
    for (size_t j = 0; j < g.nr(); ++j)
      for (size_t k = 0; k < g.nt(); ++k)
        asym = std::max(asym,
                        std::abs(solved.u.at(j, k) - solved.u.at(j, g.nt() - 1 - k)));
    res.aspect_asym_raw = asym;
    add_check(res, "solve_symmetry_raw", asym < 1e-10, false, asym,
              "max |u - u_reflected| before projection");
    if (cfg.symmetrize) {
      // symmetry projection: the continuum solution is reflection symmetric;
      // averaging removes solver- and rounding-level asymmetry bitwise
      for (auto* field : {&solved.u, &solved.w})
        for (size_t j = 0; j < g.nr(); ++j)
          for (size_t k = 0; 2 * k + 1 < g.nt(); ++k) {
            const double avg = 0.5 * (field->at(j, k) + field->at(j, g.nt() - 1 - k));
            field->at(j, k) = avg;
            field->at(j, g.nt() - 1 - k) = avg;
          }
    }
  }

  res.sup_dev = solved.sup_dev;
  add_check(res, "sup_dev", true, false, solved.sup_dev, "sup |u - 1| over the active region");
  res.solved_defect =
      solved_defect_sup(gf, a.grid, solved.u.w, solved.exhaustion_radii.back());
  add_check(res, "solved_curvature_defect", true, false, res.solved_defect,
            "discrete |R + 6| of the solved field");

  if (!out_dir.empty()) {
    save_field(out_dir + "/solved.txt", solved.w, config_echo(cfg));
    export_csv(out_dir + "/solved.csv", solved.w);
    std::ostringstream hist;
    hist << "iterate,residual_sup\n";
    for (size_t i = 0; i < solved.residual_history.size(); ++i)
      hist << i << ',' << fmt17(solved.residual_history[i]) << '\n';
    write_text(out_dir + "/residuals.csv", hist.str());
  }
  say("solved: sup_dev " + std::to_string(solved.sup_dev));

  // ---- barrier
  const double rho_bar =
      cfg.rho_bar > 0.0 ? cfg.rho_bar
                        : (cfg.K > 1 ? 3.0 * cfg.tau + 2.0 : a.rho_max - 4.0);
  const Barrier barrier = Barrier::standard(rho_bar);
  const BarrierReport brep = barrier_check(solved, gf, barrier);
  res.barrier_margin = brep.worst_margin;
  add_check(res, "barrier_envelope", brep.holds, true, brep.worst_margin,
            "lambda=e^{3 rho_bar}, rho_bar=" + fmt17(rho_bar));
  add_check(res, "barrier_lf_minus_min", brep.lf_minus_min > 0.0, false, brep.lf_minus_min,
            "positivity fails for rho_bar > artanh(2/3) by the quadratic term");
  add_check(res, "barrier_lf_plus_max", brep.lf_plus_max < 0.0, false, brep.lf_plus_max);
  add_check(res, "barrier_coth_inequality", brep.coth_inequality_ok, false,
            brep.coth_inequality_ok ? 1.0 : 0.0);

  // ---- horizons
  struct GlueAdapter : FieldEvaluator {
    const GluedField* g;
    double value(double rho, double theta) const override { return g->value(rho, theta); }
  } glued_eval;
  glued_eval.g = &gf;
  const SolvedField solved_eval(solved.u, gf);

  bool any_seed_structure = false;
  for (const SeedParams& s : cfg.seeds)
    if (s.m > 0.0 || s.dip_amp != 0.0) any_seed_structure = true;

  res.horizons = find_horizons(solved_eval, gf, cfg.horizons);
  for (const CenterReport& cr : res.horizons.centers) {
    const std::string tag = "center" + std::to_string(cr.center + 1);
    const bool expect_found = cfg.seeds[cr.center].m > 0.0;
    add_check(res, tag + "_all_targets_found", cr.all_found == expect_found, false,
              double(cr.all_found ? 3 : 0),
              expect_found ? "" : "trivial seed: absence certificates expected");
    if (cr.all_found) {
      add_check(res, tag + "_nested", cr.nested, true, double(cr.nested));
      add_check(res, tag + "_placement_in_delta", cr.placement_ok, false,
                double(cr.placement_ok));
      add_check(res, tag + "_annulus_placement", cr.annulus_ok, false, double(cr.annulus_ok));
      const bool certified = cr.minus2[cr.primary_minus2].certified &&
                             cr.zero[cr.primary_zero].certified &&
                             cr.plus2[cr.primary_plus2].certified;
      add_check(res, tag + "_bracketing_certified", certified, false, double(certified));
    }
  }
  if (cfg.K > 1 && any_seed_structure)
    add_check(res, "families_disjoint", res.horizons.families_disjoint, true,
              res.horizons.min_family_separation);

  res.displacements = persistence(glued_eval, solved_eval, gf, cfg.horizons);
  for (const Displacement& d : res.displacements) {
    if (!d.persisted) continue;  // absence handled via the found-checks
    add_check(res,
              "persistence_c" + std::to_string(d.center + 1) + "_H" +
                  (d.target < 0 ? "m2" : (d.target > 0 ? "p2" : "0")),
              true, false, d.shift);
  }

  if (!out_dir.empty()) {
    write_text(out_dir + "/horizons.json", horizon_json(res.horizons).dump(2));
    // radial H profiles per center for plotting
    for (size_t c = 0; c < a.glue_cfg.centers.size(); ++c) {
      const auto& cr = res.horizons.centers[c];
      std::ostringstream csv;
      csv << "rho,H\n";
      const int n = 200;
      for (int i = 0; i <= n; ++i) {
        const double r = cr.scan_lo + (cr.scan_hi - cr.scan_lo) * i / n;
        csv << fmt17(r) << ','
            << fmt17(mean_curvature_sphere(solved_eval, a.glue_cfg.centers[c], r, 0.7,
                                           cfg.horizons.fd_step))
            << '\n';
      }
      write_text(out_dir + "/h_profile_center" + std::to_string(c + 1) + ".csv", csv.str());
    }
  }

  // ---- mass
  // the increment-based Newton acceptance leaves u within ~0.1 tol of the
  // discrete solution, so a floor a few tolerances up is conservative
  const double fit_floor = 3.0 * cfg.solve.newton_tol;
  const double c_cal = cfg.c_cal > 0.0 ? cfg.c_cal : calibrate();
  const AspectFit aspect = fit_aspect(solved.w, fit_floor);
  const MassReport mass = asymptotic_mass(aspect, c_cal);
  res.mass = mass.mass;
  add_check(res, "mass", true, false, mass.mass, mass.degenerate ? "degenerate tail" : "");
  add_check(res, "mass_radicand_nonnegative", !mass.radicand_negative, false,
            mass.radicand_negative ? 0.0 : 1.0);
  add_check(res, "mass_aspect_symmetry", true, false, mass.aspect_asymmetry,
            "after the symmetry projection");
  if (!aspect.degenerate) {
    // slope verification samples only the genuine far field, beyond every
    // seed ball and gluing annulus
    const double structural =
        (cfg.K > 1) ? 2.0 * cfg.tau + 2.5
                    : *std::max_element(a.glue_cfg.deltas.begin(), a.glue_cfg.deltas.end()) + 2.0;
    const AspectFit tail = fit_aspect(solved.w, fit_floor, 1e-3, 3.0, structural);
    double smin = 1e300, smax = -1e300;
    for (size_t k = 0; k < tail.slope.size(); ++k) {
      if (tail.amplitude[k] == 0.0) continue;
      smin = std::min(smin, tail.slope[k]);
      smax = std::max(smax, tail.slope[k]);
    }
    if (smin <= smax) {
      res.decay_slope_min = smin;
      res.decay_slope_max = smax;
      add_check(res, "solved_decay_slope", smin > -3.15 && smax < -2.85, false,
                0.5 * (smin + smax), "far-field fit beyond rho=" + fmt17(structural));
    } else {
      add_check(res, "solved_decay_slope", false, false, 0.0,
                "tail below the solver noise floor beyond the structural radius");
    }
  }

  // ---- summary
  Json summary;
  summary["config"] = config_echo(cfg);
  summary["grid"] = {{"nr", a.grid.nr()}, {"nt", a.grid.nt()}, {"rho_max", a.rho_max}};
  summary["defect"] = {{"core", defect.max_core},
                       {"annulus", defect.max_annulus},
                       {"exact_zone", defect.max_exact}};
  summary["solve"] = {{"residual", solved.final_residual},
                      {"sup_dev", solved.sup_dev},
                      {"min_w", solved.min_w},
                      {"radii", solved.exhaustion_radii},
                      {"diffs", solved.exhaustion_diffs},
                      {"solved_defect", res.solved_defect}};
  summary["barrier"] = {{"rho_bar", rho_bar},
                        {"lambda", barrier.lambda},
                        {"holds", brep.holds},
                        {"worst_margin", brep.worst_margin},
                        {"lf_minus_min", brep.lf_minus_min},
                        {"lf_plus_max", brep.lf_plus_max},
                        {"coth_inequality", brep.coth_inequality_ok}};
  summary["mass"] = {{"M", mass.mass},
                     {"monopole", mass.monopole},
                     {"dipole_z", mass.dipole[2]},
                     {"c_cal", c_cal},
                     {"aspect_asymmetry", mass.aspect_asymmetry},
                     {"raw_field_asymmetry", res.aspect_asym_raw},
                     {"degenerate", mass.degenerate}};
  summary["horizons"] = horizon_json(res.horizons);
  {
    Json disp = Json::array();
    for (const Displacement& d : res.displacements)
      disp.push_back({{"center", d.center},
                      {"target", d.target},
                      {"persisted", d.persisted},
                      {"before", d.before},
                      {"after", d.after},
                      {"shift", d.shift}});
    summary["persistence"] = disp;
  }
  summary["checks"] = checks_json(res);
  summary["exit_code"] = res.exit_code;
  res.summary_json = summary.dump(2);
  if (!out_dir.empty()) {
    write_text(out_dir + "/summary.json", res.summary_json);
    write_text(out_dir + "/mass.json", summary["mass"].dump(2));
  }
  return res;
}

SweepResult sweep_tau(RunConfig cfg, const std::vector<double>& taus,
                      const std::string& out_dir, bool quiet) {
  if (taus.size() < 3) throw ConfigError("sweep: need >= 3 tau values for a slope fit");
  SweepResult out;
  namespace fs = std::filesystem;
  if (!out_dir.empty()) fs::create_directories(out_dir);

  for (double tau : taus) {
    RunConfig c = cfg;
    c.tau = tau;
    c.rho_max = 0.0;  // re-derive from tau
    SweepRow row;
    row.tau = tau;
    try {
      char sub[64];
      std::snprintf(sub, sizeof sub, "tau_%g", tau);
      const PipelineResult r =
          run_pipeline(c, out_dir.empty() ? "" : out_dir + "/" + sub, quiet);
      if (r.exit_code == 3) throw SolveError("member solve failed");
      row.ok = true;
      row.defect_annulus = r.defect_annulus;
      row.sup_dev = r.sup_dev;
      row.mass = r.mass;
      for (const Displacement& d : r.displacements) {
        if (!d.persisted) continue;
        if (d.target < 0) row.disp_minus2 = std::max(row.disp_minus2, d.shift);
        else if (d.target > 0) row.disp_plus2 = std::max(row.disp_plus2, d.shift);
        else row.disp_zero = std::max(row.disp_zero, d.shift);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      if (out.exit_code == 0) out.exit_code = 2;
      if (!quiet) std::printf("sweep member tau=%g failed: %s\n", tau, e.what());
    }
    out.rows.push_back(row);
  }

  // ln-slope fits over members with live signals
  std::vector<double> ts, ld, lu, lp;
  for (const SweepRow& r : out.rows) {
    if (!r.ok) continue;
    if (r.defect_annulus > 1e-13 && r.sup_dev > 1e-13) {
      ts.push_back(r.tau);
      ld.push_back(std::log(r.defect_annulus));
      lu.push_back(std::log(r.sup_dev));
      lp.push_back(r.disp_zero > 0 ? std::log(r.disp_zero) : 0.0);
    }
  }
  out.slopes_valid = ts.size() >= 3;
  if (out.slopes_valid) {
    out.slope_defect = fit_line(ts, ld).slope;
    out.slope_supdev = fit_line(ts, lu).slope;
    bool disp_live = true;
    for (double v : lp)
      if (v == 0.0) disp_live = false;
    out.slope_disp = disp_live ? fit_line(ts, lp).slope : 0.0;
  }

  std::ostringstream csv;
  csv << "tau,defect_annulus,sup_dev,disp_m2,disp_0,disp_p2,mass,ok\n";
  for (const SweepRow& r : out.rows)
    csv << fmt17(r.tau) << ',' << fmt17(r.defect_annulus) << ',' << fmt17(r.sup_dev) << ','
        << fmt17(r.disp_minus2) << ',' << fmt17(r.disp_zero) << ',' << fmt17(r.disp_plus2) << ','
        << fmt17(r.mass) << ',' << (r.ok ? 1 : 0) << '\n';
  out.csv = csv.str();
  if (!out_dir.empty()) {
    write_text(out_dir + "/study.csv", out.csv);
    Json j;
    j["slopes_valid"] = out.slopes_valid;
    j["slope_defect"] = out.slope_defect;
    j["slope_supdev"] = out.slope_supdev;
    j["slope_displacement"] = out.slope_disp;
    j["exit_code"] = out.exit_code;
    write_text(out_dir + "/sweep.json", j.dump(2));
  }
  return out;
}

RefineResult refine_study(RunConfig cfg, int levels, bool mms, const std::string& out_dir,
                          bool quiet, size_t node_budget) {
  if (levels < 2) throw ConfigError("refine: need >= 2 levels");
  RefineResult out;
  namespace fs = std::filesystem;
  if (!out_dir.empty()) fs::create_directories(out_dir);

  // fixed probe points for solution-change estimates
  std::vector<std::pair<double, double>> probes;
  for (double rho : {1.0, 2.5, 4.0, 5.5, 7.0})
    for (double th : {0.3, 1.2, 2.2}) probes.push_back({rho, th});

  std::vector<std::vector<double>> probe_values;
  std::vector<double> stencil_errs, h0_radii, changes;

  for (int lev = 0; lev < levels; ++lev) {
    RunConfig c = cfg;
    const double scale = std::pow(2.0, lev);
    c.grid.n_theta = int(cfg.grid.n_theta * scale);
    c.grid.h_fine = cfg.grid.h_fine / scale;
    c.grid.h_mid = cfg.grid.h_mid / scale;
    c.grid.h_far = cfg.grid.h_far / scale;

    const Assembled a = assemble(c);
    if (a.grid.size() > node_budget)
      throw ConfigError("refine: violated node budget (" + std::to_string(a.grid.size()) + " > " +
                        std::to_string(node_budget) + ")");
    RefineRow row;
    row.level = lev;
    row.nodes = a.grid.size();

    if (mms) {
      // manufactured radial field: stencil curvature error against the exact law
      std::vector<double> w(a.grid.size());
      for (size_t j = 0; j < a.grid.nr(); ++j)
        for (size_t k = 0; k < a.grid.nt(); ++k)
          w[a.grid.idx(j, k)] = 1.0 + std::exp(-3.0 * a.grid.rho[j]);
      const auto R = scalar_curvature_stencil(a.grid, w);
      double err = 0.0;
      RadialProfile manufactured;
      manufactured.complete = true;
      manufactured.decay_amplitude = 1.0;
      for (double rho = 0.0; rho <= a.rho_max + 1e-9; rho += 0.05) {
        const double e3 = std::exp(-3.0 * rho);
        manufactured.knots.push_back(rho);
        manufactured.w.push_back(1.0 + e3);
        manufactured.dw.push_back(-3.0 * e3);
        manufactured.d2w.push_back(9.0 * e3);
      }
      for (size_t j = 1; j + 1 < a.grid.nr(); ++j) {
        if (a.grid.rho[j] < 0.5 || a.grid.rho[j] > a.rho_max - 1.0) continue;
        const double exact = scalar_curvature_radial(manufactured, a.grid.rho[j]);
        for (size_t k = 0; k < a.grid.nt(); ++k)
          err = std::max(err, std::abs(R[a.grid.idx(j, k)] - exact));
      }
      row.stencil_defect_err = err;
      stencil_errs.push_back(err);
    } else {
      const GluedField gf(a.glue_cfg);
      SolveResult solved = exhaust(gf, a.grid, c.solve);

      // independent u-form residual over the smooth zone
      const auto ures = residual_eq31(solved.u, gf);
      double sup = 0.0;
      for (size_t j = 1; j + 1 < a.grid.nr(); ++j)
        for (size_t k = 0; k < a.grid.nt(); ++k) {
          bool smooth = true;
          for (size_t cc = 0; cc < a.glue_cfg.num_centers(); ++cc)
            if (gf.center_dist(cc, a.grid.rho[j], a.grid.theta[k]) <
                a.glue_cfg.deltas[cc] + 1.0)
              smooth = false;
          if (smooth) sup = std::max(sup, std::abs(ures[a.grid.idx(j, k)]));
        }
      row.eq31_sup = sup;

      // stencil-vs-exact curvature error of the glued field
      const ConformalField glued = glue(gf, a.grid);
      const auto Rst = scalar_curvature_stencil(a.grid, glued.w);
      double gerr = 0.0;
      for (size_t j = 1; j + 1 < a.grid.nr(); ++j)
        for (size_t k = 0; k < a.grid.nt(); ++k) {
          bool smooth = true;
          for (size_t cc = 0; cc < a.glue_cfg.num_centers(); ++cc)
            if (gf.center_dist(cc, a.grid.rho[j], a.grid.theta[k]) <
                a.glue_cfg.deltas[cc] + 1.0)
              smooth = false;
          if (!smooth) continue;
          gerr = std::max(gerr, std::abs(Rst[a.grid.idx(j, k)] -
                                         gf.full(a.grid.rho[j], a.grid.theta[k]).R));
        }
      row.stencil_defect_err = gerr;
      stencil_errs.push_back(gerr);

      const SolvedField se(solved.u, gf);
      const HorizonReport hr = find_horizons(se, gf, c.horizons);
      if (!hr.centers.empty() && hr.centers[0].primary_zero >= 0)
        row.horizon_rho0 = hr.centers[0].zero[hr.centers[0].primary_zero].mean_radius;
      h0_radii.push_back(row.horizon_rho0);

      std::vector<double> pv;
      for (auto [rho, th] : probes)
        pv.push_back(rho <= a.rho_max ? interp(solved.w, rho, th) : 1.0);
      if (!probe_values.empty()) {
        double ch = 0.0;
        for (size_t i = 0; i < pv.size(); ++i)
          ch = std::max(ch, std::abs(pv[i] - probe_values.back()[i]));
        row.probe_change = ch;
        changes.push_back(ch);
      }
      probe_values.push_back(pv);
    }
    out.rows.push_back(row);
  }

  if (changes.size() >= 2 && changes.back() > 0.0)
    out.order_probe = std::log2(changes[changes.size() - 2] / changes.back());
  if (stencil_errs.size() >= 2 && stencil_errs.back() > 0.0)
    out.order_stencil = std::log2(stencil_errs[stencil_errs.size() - 2] / stencil_errs.back());

  std::ostringstream csv;
  csv << "level,nodes,eq31_sup,stencil_defect_err,horizon_rho0,probe_change\n";
  for (const RefineRow& r : out.rows)
    csv << r.level << ',' << r.nodes << ',' << fmt17(r.eq31_sup) << ','
        << fmt17(r.stencil_defect_err) << ',' << fmt17(r.horizon_rho0) << ','
        << fmt17(r.probe_change) << '\n';
  out.csv = csv.str();
  if (!out_dir.empty()) {
    write_text(out_dir + "/refine.csv", out.csv);
    Json j;
    j["order_probe"] = out.order_probe;
    j["order_stencil"] = out.order_stencil;
    j["exit_code"] = out.exit_code;
    write_text(out_dir + "/refine.json", j.dump(2));
  }
  (void)quiet;
  return out;
}

}  // namespace ahm
