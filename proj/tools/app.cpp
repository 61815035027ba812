#include "app.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "mu3/curve_io.hpp"
#include "mu3/errors.hpp"

namespace mu3::cli {

using nlohmann::json;

json defaults_table() {
  return {{"version", Defaults::version},
          {"lk_n", Defaults::lk_n},
          {"mu_n", Defaults::mu_n},
          {"subtorus_n", Defaults::subtorus_n},
          {"tol_exact", Defaults::tol_exact},
          {"run_log", Defaults::run_log},
          {"tube_radius", Defaults::tube_radius},
          {"profile_r0", Defaults::profile_r0},
          {"profile_smoothness", Defaults::profile_smoothness},
          {"samples", Defaults::samples},
          {"T_periods", Defaults::T_periods},
          {"steps_per_period", Defaults::steps_per_period},
          {"grid_n", Defaults::grid_n},
          {"energy_n", Defaults::energy_n},
          {"energy_mc", Defaults::energy_mc}};
}

json to_json(const RunRecord& r) {
  json results = json::object();
  for (const auto& [name, v] : r.results) {
    results[name] = {{"raw", v.raw}, {"rounded", v.rounded}, {"residual", v.residual}};
  }
  return {{"timestamp", r.timestamp}, {"command", r.command},   {"config", r.config},
          {"config_hash", r.config_hash}, {"grid_n", r.grid_n},     {"seed", r.seed},
          {"results", results},         {"timings_ms", r.timings_ms}, {"artifacts", r.artifacts},
          {"extra", r.extra},           {"defaults_version", Defaults::version}};
}

std::string config_hash(const json& config) {
  const std::string text = config.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void append_run_log(const std::filesystem::path& path, const RunRecord& r) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open run log " + path.string());
  out << to_json(r).dump() << '\n';
  if (!out) throw IoError("cannot write run log " + path.string());
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string now_utc() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                   std::chrono::system_clock::now())));
}

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

ErgodicConfig ErgodicConfig::from_json(const json& doc) {
  static const std::set<std::string> known = {
      "tubes",   "radius", "fluxes", "profile", "samples",  "T_periods",   "T",        "steps_per_period",
      "dt",      "seed",   "grid_n", "closure", "mode",     "deformation", "pairwise", "energy_n",
      "energy_mc", "orbits_csv"};
  if (!doc.is_object()) throw IoError("ergodic config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw IoError("unknown config key '" + key + "'");
  }
  ErgodicConfig c;
  try {
    c.tubes = doc.value("tubes", c.tubes);
    c.radius = doc.value("radius", c.radius);
    if (doc.contains("fluxes")) c.fluxes = doc["fluxes"].get<std::vector<double>>();
    if (doc.contains("profile")) {
      const json& p = doc["profile"];
      c.profile.name = p.value("name", c.profile.name);
      c.profile.r0 = p.value("r0", c.profile.r0);
      c.profile.smoothness = p.value("smoothness", c.profile.smoothness);
    }
    c.samples = doc.value("samples", c.samples);
    c.T_periods = doc.value("T_periods", c.T_periods);
    if (doc.contains("T")) c.T = doc["T"].get<double>();
    c.steps_per_period = doc.value("steps_per_period", c.steps_per_period);
    if (doc.contains("dt")) c.dt = doc["dt"].get<double>();
    c.seed = doc.value("seed", c.seed);
    c.grid_n = doc.value("grid_n", c.grid_n);
    const std::string closure = doc.value("closure", std::string("short"));
    if (closure == "short") {
      c.closure = ClosureFamily::Short;
    } else if (closure == "long") {
      c.closure = ClosureFamily::Long;
    } else {
      throw IoError("closure must be 'short' or 'long'");
    }
    const std::string mode = doc.value("mode", std::string("covering"));
    if (mode == "covering") {
      c.mode = EstimatorMode::Covering;
    } else if (mode == "direct") {
      c.mode = EstimatorMode::Direct;
    } else {
      throw IoError("mode must be 'covering' or 'direct'");
    }
    if (doc.contains("deformation") && !doc["deformation"].is_null()) {
      const json& d = doc["deformation"];
      SwirlDeformation g;
      if (d.contains("center")) g.center = vec3_from(d["center"]);
      if (d.contains("axis")) g.axis = vec3_from(d["axis"]).normalized();
      g.radius = d.value("radius", g.radius);
      g.amplitude = d.value("amplitude", g.amplitude);
      g.substeps = d.value("substeps", g.substeps);
      c.deformation = g;
    }
    c.pairwise = doc.value("pairwise", c.pairwise);
    c.energy_n = doc.value("energy_n", c.energy_n);
    c.energy_mc = doc.value("energy_mc", c.energy_mc);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad ergodic config: ") + e.what());
  }
  if (c.fluxes.size() != 3) throw IoError("fluxes must list 3 values");
  if (c.profile.name != "flat_top") throw IoError("unknown profile '" + c.profile.name + "'");
  return c;
}

ErgodicConfig ErgodicConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

json ErgodicConfig::to_json() const {
  json j = {{"tubes", tubes},
            {"radius", radius},
            {"fluxes", fluxes},
            {"profile", {{"name", profile.name}, {"r0", profile.r0}, {"smoothness", profile.smoothness}}},
            {"samples", samples},
            {"T_periods", T_periods},
            {"steps_per_period", steps_per_period},
            {"seed", seed},
            {"grid_n", grid_n},
            {"closure", closure == ClosureFamily::Short ? "short" : "long"},
            {"mode", mode == EstimatorMode::Covering ? "covering" : "direct"},
            {"pairwise", pairwise},
            {"energy_n", energy_n},
            {"energy_mc", energy_mc}};
  if (T) j["T"] = *T;
  if (dt) j["dt"] = *dt;
  if (deformation) {
    j["deformation"] = {{"center", vec3_json(deformation->center)},
                        {"axis", vec3_json(deformation->axis)},
                        {"radius", deformation->radius},
                        {"amplitude", deformation->amplitude},
                        {"substeps", deformation->substeps}};
  }
  return j;
}

std::shared_ptr<const VectorFieldSpec> build_field(const ErgodicConfig& cfg) {
  if (cfg.tubes != "borromean") throw UnknownLink("tube system '" + cfg.tubes + "'");
  std::shared_ptr<const VectorFieldSpec> base = build_borromean_tubes(cfg.radius, cfg.fluxes, cfg.profile);
  if (!cfg.deformation) return base;
  return std::make_shared<PushedForwardField>(base, *cfg.deformation);
}

ErgodicReport run_ergodic(const ErgodicConfig& cfg, std::shared_ptr<const VectorFieldSpec> field) {
  if (!field) field = build_field(cfg);
  ErgodicReport rep;
  rep.time = time_grid(*field, cfg.T_periods, cfg.steps_per_period);
  if (cfg.T) rep.time.T = *cfg.T;
  if (cfg.dt) rep.time.dt = *cfg.dt;

  EstimatorOptions o;
  o.samples = cfg.samples;
  o.T = rep.time.T;
  o.dt = rep.time.dt;
  o.seed = cfg.seed;
  o.grid_n = cfg.grid_n;
  o.closure = cfg.closure;
  o.mode = cfg.mode;

  auto t0 = std::chrono::steady_clock::now();
  const Link cores{"cores",
                   {field->fiber_curve(field->point({0, 0.0, 0.0, 0.0})),
                    field->fiber_curve(field->point({1, 0.0, 0.0, 0.0})),
                    field->fiber_curve(field->point({2, 0.0, 0.0, 0.0}))}};
  PipelineOptions po;
  po.n = cfg.grid_n;
  rep.core_mu = static_cast<int>(mu123(cores, po).rounded);
  rep.prediction = h123_flux_formula(field->system(), MuTable{{{1, 1, 1}, rep.core_mu}});
  rep.timings_ms["flux_formula"] = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  rep.estimate = asymptotic_mu123(*field, o);
  rep.timings_ms["ergodic"] = ms_since(t0);

  if (cfg.pairwise) {
    t0 = std::chrono::steady_clock::now();
    rep.pairwise = pairwise_helicity_check(*field, o);
    rep.has_pairwise = true;
    rep.timings_ms["pairwise"] = ms_since(t0);
  }

  t0 = std::chrono::steady_clock::now();
  rep.energy = energy_l2(*field, cfg.energy_n, cfg.energy_mc);
  rep.timings_ms["energy"] = ms_since(t0);
  rep.ratio = rep.energy.value > 0.0 ? std::abs(rep.estimate.estimate) / std::pow(rep.energy.value, 1.5) : 0.0;
  return rep;
}

namespace {

struct LinkSource {
  Link link;
  std::array<int, 3> multiplicity{1, 1, 1};
};

LinkSource load_source(const json& src) {
  if (src.contains("catalog")) {
    auto entry = catalog(src["catalog"].get<std::string>(), src.value("twist", 1));
    return {entry.link, entry.axis_multiplicity};
  }
  if (src.contains("curves")) return {load_link(src["curves"].get<std::string>()), {1, 1, 1}};
  throw IoError("link source needs 'catalog' or 'curves'");
}

json source_json(const std::string& catalog_name, int twist, const std::string& curves) {
  if (!curves.empty()) return {{"curves", curves}};
  json j = {{"catalog", catalog_name}};
  if (catalog_name == "borromean_n") j["twist"] = twist;
  return j;
}

RunRecord new_record(const std::string& command, const json& config) {
  RunRecord r;
  r.timestamp = now_utc();
  r.command = command;
  r.config = config;
  r.config_hash = config_hash(config);
  return r;
}

RunRecord execute_lk(const json& cfg) {
  RunRecord r = new_record("lk", cfg);
  const LinkSource src = load_source(cfg["link"]);
  const auto pair = cfg["pair"].get<std::array<int, 2>>();
  for (int p : pair) {
    if (p < 1 || p > static_cast<int>(src.link.size())) throw std::invalid_argument("pair index out of range");
  }
  if (pair[0] == pair[1]) throw std::invalid_argument("pair needs two distinct components");
  r.grid_n = cfg["n"].get<int>();
  const auto t0 = std::chrono::steady_clock::now();
  r.results[fmt::format("lk{}{}", pair[0], pair[1])] =
      linking_number(src.link[pair[0] - 1], src.link[pair[1] - 1], r.grid_n);
  r.timings_ms["linking_number"] = ms_since(t0);
  return r;
}

RunRecord execute_mu123(const json& cfg) {
  RunRecord r = new_record("mu123", cfg);
  const LinkSource src = load_source(cfg["link"]);
  if (src.link.size() != 3) throw std::invalid_argument("mu123 needs a 3-component link");
  PipelineOptions po;
  po.n = cfg["n"].get<int>();
  po.multiplicity = src.multiplicity;
  po.tol_exact = cfg["tol_exact"].get<double>();
  po.diff = cfg["diff"].get<std::string>() == "spectral" ? Differentiation::Spectral : Differentiation::FourthOrder;
  r.grid_n = po.n;

  if (cfg.value("diagnostics", false)) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sub = subtorus_degrees(src.link, cfg["subtorus_n"].get<int>());
    r.results["subtorus_12"] = sub[0];
    r.results["subtorus_13"] = sub[1];
    r.results["subtorus_23"] = sub[2];
    r.timings_ms["subtorus"] = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const GridField3 field = sample_on_grid(ConfMap3(src.link), GridShape::scaled(po.n, po.multiplicity));
    const PreimageLink pre = extract_preimage_auto(field);
    json classes = json::array();
    for (const auto& pl : pre.polylines) classes.push_back(pl.homology_class);
    r.extra["preimage"] = {{"regular_value", vec3_json(pre.regular_value)},
                           {"polylines", pre.polylines.size()},
                           {"classes", classes},
                           {"total_class", pre.total_class()}};
    if (cfg.contains("preimage_csv") && !cfg["preimage_csv"].is_null()) {
      const std::string path = cfg["preimage_csv"].get<std::string>();
      write_preimage_csv(path, pre);
      r.artifacts.push_back(path);
    }
    r.timings_ms["preimage"] = ms_since(t1);
  }

  const HopfReport rep = hopf_degree_report(src.link, po);
  r.results["hopf"] = rep.hopf;
  r.results["mu123"] = mu123_from_hopf(rep.hopf);
  for (const auto& [stage, ms] : rep.timings_ms) r.timings_ms[stage] = ms;
  r.extra["harmonic_degrees"] = rep.harmonic.degrees;
  r.extra["closedness_residual"] = rep.closedness_residual;
  r.extra["max_cell_variation"] = rep.max_cell_variation;
  r.extra["grid"] = {rep.hopf.grid.ns, rep.hopf.grid.nt, rep.hopf.grid.nu};
  r.extra["indeterminate"] = rep.hopf.flags.indeterminate;
  return r;
}

json estimate_json(const Estimate& e) {
  return {{"estimate", e.estimate}, {"stderr", e.stderr_}, {"used", e.used}, {"skipped", e.skipped}};
}

RunRecord execute_ergodic(const json& cfg) {
  RunRecord r = new_record("ergodic", cfg);
  const ErgodicConfig c = ErgodicConfig::from_json(cfg);
  r.grid_n = c.grid_n;
  r.seed = c.seed;
  const auto field = build_field(c);
  const ErgodicReport rep = run_ergodic(c, field);
  const GridShape g = GridShape::cubic(c.grid_n);
  r.results["H123_ergodic"] = InvariantResult::from_raw(rep.estimate.estimate, g);
  r.results["H123_flux"] = InvariantResult::from_raw(rep.prediction, g);
  if (rep.has_pairwise) {
    static const char* names[3] = {"H12_ergodic", "H13_ergodic", "H23_ergodic"};
    for (int k = 0; k < 3; ++k) {
      r.results[names[k]] = InvariantResult::from_raw(rep.pairwise[k].estimate, g);
      r.extra[names[k]] = estimate_json(rep.pairwise[k]);
    }
  }
  r.results["E2"] = InvariantResult::from_raw(rep.energy.value, g);
  r.results["ratio"] = InvariantResult::from_raw(rep.ratio, g);
  r.extra["H123_ergodic"] = estimate_json(rep.estimate);
  r.extra["T"] = rep.time.T;
  r.extra["dt"] = rep.time.dt;
  r.extra["core_mu123"] = rep.core_mu;
  r.extra["E2_error_estimate"] = rep.energy.error_estimate;
  r.extra["E2_monte_carlo"] = {rep.energy.monte_carlo, rep.energy.monte_carlo_stderr};
  r.timings_ms = rep.timings_ms;

  if (cfg.contains("orbits_csv") && !cfg["orbits_csv"].is_null()) {
    // orbit triple of sample 0
    const std::string path = cfg["orbits_csv"].get<std::string>();
    auto rng = sample_rng(c.seed, 0);
    std::vector<ClosedOrbit> orbits;
    std::array<Vec3, 3> x;
    for (std::size_t i = 0; i < 3; ++i) x[i] = field->sample_point(i, rng);
    for (std::size_t i = 0; i < 3; ++i) {
      orbits.push_back(close_orbit(integrate_orbit(*field, x[i], rep.time.T, rep.time.dt), *field, c.closure));
    }
    write_orbits_csv(path, orbits);
    r.artifacts.push_back(path);
  }
  return r;
}

RunRecord execute(const std::string& command, const json& cfg) {
  try {
    if (command == "lk") return execute_lk(cfg);
    if (command == "mu123") return execute_mu123(cfg);
    if (command == "ergodic") return execute_ergodic(cfg);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad config: ") + e.what());
  }
  throw IoError("unknown command '" + command + "'");
}

void print_result(std::ostream& out, const std::string& name, const InvariantResult& v) {
  out << fmt::format("{:<14} raw {:+.6f}  rounded {:+d}  residual {:.3e}\n", name, v.raw, v.rounded, v.residual);
}

void print_record(std::ostream& out, const RunRecord& r) {
  if (r.command == "ergodic") {
    const json& e = r.extra["H123_ergodic"];
    out << fmt::format("T = {:.6g}  dt = {:.6g}  seed {}  samples used {} skipped {}\n", r.extra["T"].get<double>(),
                       r.extra["dt"].get<double>(), r.seed, e["used"].get<int>(), e["skipped"].get<int>());
    out << fmt::format("ergodic H123     {:+.6f} +- {:.6f}\n", e["estimate"].get<double>(),
                       e["stderr"].get<double>());
    out << fmt::format("flux formula     {:+.6f}  (core mu123 {:+d})\n", r.results.at("H123_flux").raw,
                       r.extra["core_mu123"].get<int>());
    for (const char* name : {"H12_ergodic", "H13_ergodic", "H23_ergodic"}) {
      if (!r.extra.contains(name)) continue;
      const json& p = r.extra[name];
      out << fmt::format("pairwise {}  {:+.3e} +- {:.3e}\n", std::string(name).substr(1, 2),
                         p["estimate"].get<double>(), p["stderr"].get<double>());
    }
    out << fmt::format("E2               {:.6f}  (quadrature error {:.2e}, monte carlo {:.4f} +- {:.4f})\n",
                       r.results.at("E2").raw, r.extra["E2_error_estimate"].get<double>(),
                       r.extra["E2_monte_carlo"][0].get<double>(), r.extra["E2_monte_carlo"][1].get<double>());
    out << fmt::format("|H123| / E2^1.5  {:.6f}\n", r.results.at("ratio").raw);
  } else {
    for (const auto& [name, v] : r.results) print_result(out, name, v);
    if (r.extra.contains("harmonic_degrees")) {
      const auto d = r.extra["harmonic_degrees"];
      out << fmt::format("harmonic degrees ({:+.2e}, {:+.2e}, {:+.2e})  closedness {:.2e}  cell variation {:.3f}\n",
                         d[0].get<double>(), d[1].get<double>(), d[2].get<double>(),
                         r.extra["closedness_residual"].get<double>(), r.extra["max_cell_variation"].get<double>());
    }
    if (r.extra.contains("preimage")) {
      const json& p = r.extra["preimage"];
      out << fmt::format("preimage: {} polylines, classes {}, total {}\n", p["polylines"].get<int>(),
                         p["classes"].dump(), p["total_class"].dump());
    }
  }
  double total = 0.0;
  for (const auto& [stage, ms] : r.timings_ms) total += ms;
  out << fmt::format("time {:.1f} ms\n", total);
}

// Re-runs the config of a logged record and compares raw values bitwise.
int replay(const std::filesystem::path& log, int index, std::ostream& out) {
  std::ifstream in(log);
  if (!in) throw IoError("cannot open " + log.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw IoError("run log is empty");
  if (index < 0) index += static_cast<int>(lines.size());
  if (index < 0 || index >= static_cast<int>(lines.size())) throw IoError("record index out of range");
  json rec;
  try {
    rec = json::parse(lines[index]);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad run record: ") + e.what());
  }
  const RunRecord again = execute(rec.at("command").get<std::string>(), rec.at("config"));
  int mismatches = 0;
  for (const auto& [name, v] : rec.at("results").items()) {
    const double before = v.at("raw").get<double>();
    const auto it = again.results.find(name);
    const bool same = it != again.results.end() && it->second.raw == before;
    if (!same) ++mismatches;
    out << fmt::format("{:<14} {:+.17g}  {}\n", name, before, same ? "identical" : "DIFFERS");
  }
  return mismatches == 0 ? 0 : 3;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mu3: triple linking, Hopf degrees and third-order helicity"};
  app.require_subcommand(1);
  app.fallthrough();

  bool as_json = false;
  std::string log_path = Defaults::run_log;
  bool no_log = false;
  app.add_flag("--json", as_json, "print the run record as JSON");
  app.add_option("--log", log_path, "JSON-lines run log")->capture_default_str();
  app.add_flag("--no-log", no_log, "do not append to the run log");

  std::string catalog_name, curves;
  int twist = 1;
  auto add_source = [&](CLI::App* sub) {
    auto* c = sub->add_option("--catalog", catalog_name, "catalog link name");
    auto* f = sub->add_option("--curves", curves, "JSON curve document");
    c->excludes(f);
    sub->add_option("--twist", twist, "twist count for borromean_n")->capture_default_str();
  };

  auto* lk = app.add_subcommand("lk", "linking number of two components");
  add_source(lk);
  std::vector<int> pair{1, 2};
  int lk_n = Defaults::lk_n;
  lk->add_option("--pair", pair, "1-based components i,j")->delimiter(',')->expected(2);
  lk->add_option("--n", lk_n, "grid size per axis")->capture_default_str();

  auto* mu = app.add_subcommand("mu123", "Milnor triple linking number via the Hopf degree of F_L");
  add_source(mu);
  int mu_n = Defaults::mu_n, subtorus_n = Defaults::subtorus_n;
  double tol_exact = Defaults::tol_exact;
  bool diagnostics = false, spectral = false;
  std::string preimage_csv;
  mu->add_option("--n", mu_n, "grid size per axis")->capture_default_str();
  mu->add_option("--tol-exact", tol_exact, "harmonic degree tolerance")->capture_default_str();
  mu->add_flag("--spectral", spectral, "spectral instead of 4th-order differences");
  mu->add_flag("--diagnostics", diagnostics, "subtorus degrees and preimage classes");
  mu->add_option("--subtorus-n", subtorus_n, "grid size for subtorus degrees")->capture_default_str();
  mu->add_option("--preimage-csv", preimage_csv, "write preimage polylines (with --diagnostics)");

  auto* erg = app.add_subcommand("ergodic", "ergodic third-order helicity of a tube field");
  std::string config_path, orbits_csv;
  std::optional<int> samples, grid_n;
  std::optional<std::uint64_t> seed;
  std::optional<double> periods;
  erg->add_option("config", config_path, "JSON config")->required();
  erg->add_option("--samples", samples, "override sample count");
  erg->add_option("--seed", seed, "override seed");
  erg->add_option("--T-periods", periods, "override T in core periods");
  erg->add_option("--grid-n", grid_n, "override pipeline grid");
  erg->add_option("--orbits-csv", orbits_csv, "write the orbit triple of sample 0");

  auto* cat = app.add_subcommand("catalog", "list catalog links or export one as curves");
  std::string export_name, export_out;
  int export_samples = 256, export_twist = 1;
  cat->add_option("--export", export_name, "catalog name to export");
  cat->add_option("--twist", export_twist, "twist count for borromean_n")->capture_default_str();
  cat->add_option("--samples", export_samples, "samples per component")->capture_default_str();
  cat->add_option("--out", export_out, "output file (stdout when empty)");

  auto* rep = app.add_subcommand("replay", "re-run a logged record and compare raw values");
  std::string replay_log = Defaults::run_log;
  int replay_index = -1;
  rep->add_option("log", replay_log, "run log")->capture_default_str();
  rep->add_option("--index", replay_index, "record index, negative counts from the end")->capture_default_str();

  auto* defs = app.add_subcommand("defaults", "print the defaults table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (defs->parsed()) {
      out << defaults_table().dump(2) << '\n';
      return 0;
    }
    if (cat->parsed()) {
      if (export_name.empty()) {
        for (const auto& name : catalog_names()) {
          const auto e = catalog(name);
          out << fmt::format("{:<18} lk ({:+d}, {:+d}, {:+d})  mu123 {}\n", name, e.expected_pairwise_lk[0],
                             e.expected_pairwise_lk[1], e.expected_pairwise_lk[2],
                             e.expected_mu123 ? fmt::format("{:+d}", *e.expected_mu123) : "undefined");
        }
        return 0;
      }
      const auto e = catalog(export_name, export_twist);
      if (export_out.empty()) {
        out << link_to_json(e.link, export_samples).dump() << '\n';
      } else {
        save_link(export_out, e.link, export_samples);
      }
      return 0;
    }
    if (rep->parsed()) return replay(replay_log, replay_index, out);

    std::string command;
    json cfg;
    if (lk->parsed() || mu->parsed()) {
      if (catalog_name.empty() == curves.empty()) throw std::invalid_argument("give exactly one of --catalog, --curves");
      cfg["link"] = source_json(catalog_name, twist, curves);
    }
    if (lk->parsed()) {
      command = "lk";
      cfg["pair"] = pair;
      cfg["n"] = lk_n;
    } else if (mu->parsed()) {
      command = "mu123";
      cfg["n"] = mu_n;
      cfg["tol_exact"] = tol_exact;
      cfg["diff"] = spectral ? "spectral" : "fd4";
      cfg["diagnostics"] = diagnostics;
      cfg["subtorus_n"] = subtorus_n;
      if (!preimage_csv.empty()) cfg["preimage_csv"] = preimage_csv;
    } else {
      command = "ergodic";
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open " + config_path);
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw IoError("cannot parse " + config_path + ": " + e.what());
      }
      // normalize so the record can be replayed on its own
      ErgodicConfig c = ErgodicConfig::from_json(cfg);
      if (samples) c.samples = *samples;
      if (seed) c.seed = *seed;
      if (periods) c.T_periods = *periods;
      if (grid_n) c.grid_n = *grid_n;
      cfg = c.to_json();
      if (!orbits_csv.empty()) cfg["orbits_csv"] = orbits_csv;
    }

    RunRecord r = execute(command, cfg);
    if (!no_log) {
      r.artifacts.push_back(log_path);
      append_run_log(log_path, r);
    }
    if (as_json) {
      out << to_json(r).dump(2) << '\n';
    } else {
      print_record(out, r);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mu3::cli
