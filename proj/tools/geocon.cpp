// geocon command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geocon/geocon.hpp"

using namespace geocon;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;

// Errors that come from bad input rather than failed checks.
bool is_usage_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument:
    case ErrorKind::parse:
    case ErrorKind::empty_space:
    case ErrorKind::unsupported_dimension:
      return true;
    default:
      return false;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
Json optional_json(const std::optional<double>& x) { return x ? finite_or_null(*x) : Json(nullptr); }

std::string fmt17(double x) { return detail::fmt17(x); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// verify-structures

struct VerifyArgs {
  bool all_3d = false;
  int n = 0;
  int p = -1;
  std::string sign;
  int points = 100;
  int charts = 20;
  std::string json_path;
};

std::string space_label(int n, int p, int sign) {
  const std::string s = sign > 0 ? "+" : "-";
  if (n == 2) {
    for (const auto& row : kReferenceStructureTable)
      if (row.p == p && row.sign == sign) return std::string(row.geodesic_space);
  }
  return "L" + s + "(X" + std::to_string(n + 1) + "_" + std::to_string(p) + ")";
}

int run_verify(const VerifyArgs& a) {
  std::vector<int> signs;
  if (a.sign.empty()) {
    signs = {1, -1};
  } else if (a.sign == "+" || a.sign == "+1" || a.sign == "1") {
    signs = {1};
  } else if (a.sign == "-" || a.sign == "-1") {
    signs = {-1};
  } else {
    throw UsageError("--sign must be + or -");
  }
  struct Tuple {
    int n, p, sign;
  };
  std::vector<Tuple> tuples;
  if (a.all_3d) {
    if (a.n != 0 || a.p >= 0 || !a.sign.empty()) throw UsageError("--all-3d cannot be combined with --n, --p or --sign");
    for (const auto& row : kReferenceStructureTable) tuples.push_back({2, row.p, row.sign});
  } else {
    if (a.n == 0) throw UsageError("give --all-3d or --n");
    if (a.n != 2 && a.n != 3) throw UsageError("--n must be 2 or 3");
    const int pmax = a.n + 2;
    if (a.p > pmax) throw UsageError("--p must lie in 0.." + std::to_string(pmax));
    for (int p = 0; p <= pmax; ++p) {
      if (a.p >= 0 && p != a.p) continue;
      for (int s : signs) {
        if (geodesic_space_nonempty(a.n, p, s)) {
          tuples.push_back({a.n, p, s});
        } else if (a.p >= 0 && !a.sign.empty()) {
          throw GeoError(ErrorKind::empty_space, "L" + std::string(s > 0 ? "+" : "-") + " is empty for n = " +
                                                     std::to_string(a.n) + ", p = " + std::to_string(p));
        }
      }
    }
    // Spaces with p > n+1 are anti-isometric copies (X_{p,1} empty); keep the
    // sweep to the quadrics that carry the eps_quadric = 1 model.
    std::erase_if(tuples, [](const Tuple& t) { return t.p > t.n + 1; });
    if (tuples.empty()) throw GeoError(ErrorKind::empty_space, "no non-empty geodesic space matches the request");
  }

  BatteryOptions opts;
  opts.points = a.points;
  opts.charts = a.charts;
  Json report = Json::array();
  bool all_pass = true;
  std::printf("%-10s %2s %2s %4s %10s  %s\n", "space", "n", "p", "sign", "scalar", "result");
  for (const auto& t : tuples) {
    const auto r = structure_battery(t.n, t.p, t.sign, opts);
    all_pass = all_pass && r.pass();
    std::printf("%-10s %2d %2d %4s %10.6f  %s\n", space_label(t.n, t.p, t.sign).c_str(), t.n, t.p,
                t.sign > 0 ? "+" : "-", r.scalar_observed, r.pass() ? "PASS" : "FAIL");
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      std::printf("    %-18s %-4s %.3e %s %.1e\n", c.name.c_str(), c.pass ? "ok" : "FAIL", c.value, c.below ? "<" : ">",
                  c.threshold);
      checks.push_back(Json{{"name", c.name}, {"value", finite_or_null(c.value)}, {"threshold", c.threshold},
                            {"comparison", c.below ? "<" : ">"}, {"pass", c.pass}});
    }
    report.push_back(Json{{"space", space_label(t.n, t.p, t.sign)}, {"n", t.n}, {"p", t.p}, {"sign", t.sign},
                          {"scalar_expected", r.scalar_expected}, {"scalar_observed", r.scalar_observed},
                          {"pass", r.pass()}, {"checks", checks}});
  }
  if (!a.json_path.empty()) write_text(a.json_path, report.dump(2) + "\n");
  return all_pass ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------------------
// Surface specifications

double constant_expr(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const ExprPtr e = parse(v.get<std::string>(), 1);
    const double unused = 0.0;
    return eval(*e, std::span<const double>(&unused, 1));
  }
  throw UsageError(what + " must be a number or an expression string");
}

CatalogParams params_from_json(const Json& j) {
  CatalogParams out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw UsageError("\"params\" must be an object");
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else if (v.is_number()) {
      out[k] = fmt17(v.get<double>());
    } else {
      throw UsageError("parameter '" + k + "' must be a number or a string");
    }
  }
  return out;
}

std::vector<int> parse_grid(const std::string& text, int n) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(cell, &used);
      if (used != cell.size()) throw UsageError("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--grid expects integers, got '" + text + "'");
    }
  }
  if (out.size() == 1) out.assign(static_cast<std::size_t>(n), out.front());
  if (static_cast<int>(out.size()) != n) throw UsageError("grid needs one count or one count per axis");
  for (int c : out)
    if (c < 8) throw UsageError("grid counts must be at least 8");
  return out;
}

std::vector<int> grid_from_json(const Json& g, int n, const std::string& fallback) {
  if (g.is_null()) return parse_grid(fallback, n);
  if (g.is_number_integer()) return parse_grid(std::to_string(g.get<int>()), n);
  if (!g.is_array()) throw UsageError("\"grid\" must be an integer or an array");
  std::string joined;
  for (const auto& c : g) {
    if (!c.is_number_integer()) throw UsageError("\"grid\" entries must be integers");
    joined += (joined.empty() ? "" : ",") + std::to_string(c.get<int>());
  }
  return parse_grid(joined, n);
}

Immersion surface_from_json(const Json& spec) {
  if (!spec.is_object()) throw UsageError("surface spec must be a JSON object");
  const int p = spec.contains("p") ? spec.at("p").get<int>() : -1;
  if (spec.contains("catalog")) {
    return catalog_surface(spec.at("catalog").get<std::string>(), params_from_json(spec.value("params", Json())), p);
  }
  if (!spec.contains("components") || !spec.contains("domain")) {
    throw UsageError("surface spec needs \"catalog\" or both \"components\" and \"domain\"");
  }
  if (p < 0) throw UsageError("inline surface spec needs \"p\"");
  std::vector<std::string> comps;
  for (const auto& c : spec.at("components")) comps.push_back(c.get<std::string>());
  Domain d;
  for (const auto& ax : spec.at("domain")) {
    d.lo.push_back(constant_expr(ax.at("min"), "domain min"));
    d.hi.push_back(constant_expr(ax.at("max"), "domain max"));
    d.periodic.push_back(ax.value("periodic", false));
  }
  if (comps.size() != d.lo.size() + 2) throw UsageError("need n+2 components for an n-dimensional domain");
  return expression_immersion(p, comps, d);
}

// ---------------------------------------------------------------------------
// surface-report

struct ReportArgs {
  std::string catalog_name;
  std::vector<std::string> params;
  int p = -1;
  std::string spec_path;
  std::string grid;
  std::string json_path;
  std::string csv_path;
  std::string frames_path;
  unsigned threads = 0;
};

struct Threshold {
  const char* name;
  double value;
  double limit;
};

Json summary_json(const CongruenceReport& rep, const std::vector<Threshold>& checks, bool pass) {
  const auto& s = rep.summary;
  Json flags{{"umbilic", s.umbilic},
             {"totally_geodesic", s.totally_geodesic},
             {"minimal_G", s.minimal_G},
             {"minimal_Gprime", s.minimal_Gprime},
             {"flat_G", s.flat_G},
             {"flat_Gprime", s.flat_Gprime},
             {"weingarten", s.weingarten},
             {"marginally_trapped_G", s.marginally_trapped_G},
             {"marginally_trapped_Gprime", s.marginally_trapped_Gprime},
             {"trapped_degenerate_Gprime", s.trapped_degenerate_Gprime},
             {"gbar_degenerate", s.gbar_degenerate},
             {"gbar_prime_degenerate", s.gbar_prime_degenerate}};
  Json residuals{{"lagrangian", s.max_lagrangian},
                 {"gbar_gap", s.max_gbar_gap},
                 {"gbar_prime_gap", s.max_gbar_prime_gap},
                 {"hbar_gap", s.max_hbar_gap},
                 {"trisymmetry", s.max_trisymmetry},
                 {"hvec_gap", s.max_hvec_gap},
                 {"omega_shared", s.max_omega_shared},
                 {"codazzi", s.max_codazzi},
                 {"gauss", s.max_gauss}};
  Json maxima{{"hbar", s.max_hbar},
              {"nabla_h", s.max_nabla_h},
              {"hvec", s.max_hvec},
              {"hvec_G", s.max_hvec_G},
              {"hvec_prime", s.max_hvec_prime},
              {"hvec_prime_Gprime", s.max_hvec_prime_Gprime},
              {"weingarten", s.max_weingarten},
              {"curvature_gbar", s.max_curvature_gbar},
              {"curvature_gbar_prime", s.max_curvature_gbar_prime}};
  Json mp;
  if (s.minimal_parallel) {
    const auto& m = *s.minimal_parallel;
    mp = Json{{"t0", m.t0},           {"on_polar", m.on_polar},       {"branch", m.branch},
              {"ratio", finite_or_null(m.ratio)}, {"infinite_ratio", m.infinite_ratio}, {"max_trace", m.max_trace}};
  } else {
    mp = Json{{"t0", nullptr}, {"note", s.minimal_parallel_note}};
  }
  Json chk = Json::array();
  for (const auto& c : checks) {
    chk.push_back(Json{{"name", c.name}, {"value", c.value}, {"threshold", c.limit}, {"pass", c.value < c.limit}});
  }
  Json classes = Json::array();
  std::stringstream cls(s.shape_classes);
  for (std::string c; std::getline(cls, c, ',');) classes.push_back(c);
  return Json{{"surface", rep.surface},
              {"n", static_cast<int>(rep.counts.size())},
              {"p", rep.p},
              {"grid", rep.counts},
              {"config", Json{{"jet_order", rep.config.jet_order}, {"tol", rep.config.tol}}},
              {"rows", s.rows},
              {"masked", s.masked},
              {"eps", s.eps},
              {"shape_classes", classes},
              {"flags", flags},
              {"residuals", residuals},
              {"maxima", maxima},
              {"beta", Json{{"min", optional_json(s.beta_min)}, {"max", optional_json(s.beta_max)}}},
              {"minimal_parallel", mp},
              {"checks", chk},
              {"pass", pass}};
}

std::string grid_csv(const CongruenceReport& rep) {
  const auto n = rep.counts.size();
  static const char* idx[] = {"i", "j", "k"};
  static const char* crd[] = {"u", "v", "w"};
  std::ostringstream out;
  for (std::size_t a = 0; a < n; ++a) out << idx[a] << ',';
  for (std::size_t a = 0; a < n; ++a) out << crd[a] << ',';
  out << "H,K,class,beta,beta_unwrapped,lagrangian,gbar_gap,gbar_prime_gap,hbar_gap,trisymmetry,hvec_gap,"
         "omega_shared,codazzi,gauss,hvec_norm,hvec_G,hvec_prime_norm,hvec_prime_Gprime,weingarten,"
         "curvature_gbar,curvature_gbar_prime,umbilic,gbar_degenerate,gbar_prime_degenerate,masked,reason\n";
  auto num = [](const std::optional<double>& x) { return x && std::isfinite(*x) ? fmt17(*x) : std::string(); };
  for (const auto& r : rep.rows) {
    for (int i : r.index) out << i << ',';
    for (double x : r.u) out << fmt17(x) << ',';
    if (!r.point) {
      out << std::string(21, ',') << "0,0,0,1,\"";
      for (char c : r.reason) out << (c == '"' ? std::string("\"\"") : std::string(1, c));
      out << "\"\n";
      continue;
    }
    const auto& cp = *r.point;
    const std::string cls = cp.geometry.classification ? std::string(class_name(*cp.geometry.classification)) : "n/a";
    std::optional<double> beta;
    if (cp.beta && cp.beta->value) beta = cp.beta->value;
    out << fmt17(cp.geometry.H) << ',' << fmt17(cp.geometry.K) << ',' << cls << ',' << num(beta) << ','
        << num(r.beta_unwrapped) << ',' << fmt17(cp.lagrangian) << ',' << fmt17(cp.gbar_gap) << ','
        << fmt17(cp.gbar_prime_gap) << ',' << num(cp.hbar ? std::optional(cp.hbar->gap) : std::nullopt) << ','
        << num(cp.hbar ? std::optional(cp.hbar->trisymmetry) : std::nullopt) << ',' << fmt17(cp.hvec_gap) << ','
        << fmt17(cp.omega_shared) << ',' << fmt17(cp.codazzi) << ',' << fmt17(cp.gauss) << ',' << fmt17(cp.hvec_norm)
        << ',' << fmt17(cp.hvec_G) << ',' << num(cp.hvec_prime ? std::optional(cp.hvec_prime_norm) : std::nullopt)
        << ',' << num(cp.hvec_prime ? std::optional(cp.hvec_prime_Gprime) : std::nullopt) << ','
        << num(cp.weingarten) << ',' << num(cp.curvature_gbar) << ',' << num(cp.curvature_gbar_prime) << ','
        << int(cp.connection.umbilic) << ',' << int(cp.gbar_degenerate) << ',' << int(cp.gbar_prime_degenerate)
        << ",0,\n";
  }
  return out.str();
}

int run_report(const ReportArgs& a, const Config& config) {
  std::optional<Immersion> imm;
  std::vector<int> grid;
  const std::string grid_text = a.grid.empty() ? "32" : a.grid;
  if (!a.spec_path.empty()) {
    if (!a.catalog_name.empty() || !a.params.empty()) throw UsageError("--spec cannot be combined with --catalog/--param");
    std::ifstream in(a.spec_path);
    if (!in) throw UsageError("cannot read '" + a.spec_path + "'");
    Json spec;
    try {
      spec = Json::parse(in);
    } catch (const Json::exception& e) {
      throw GeoError(ErrorKind::parse, std::string("spec file: ") + e.what());
    }
    try {
      imm = surface_from_json(spec);
      grid = a.grid.empty() ? grid_from_json(spec.value("grid", Json()), imm->n(), grid_text)
                            : parse_grid(grid_text, imm->n());
    } catch (const Json::exception& e) {
      throw GeoError(ErrorKind::parse, std::string("spec file: ") + e.what());
    }
  } else if (!a.catalog_name.empty()) {
    CatalogParams params;
    for (const auto& kv : a.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
      params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    imm = catalog_surface(a.catalog_name, params, a.p);
    grid = parse_grid(grid_text, imm->n());
  } else {
    throw UsageError("give --catalog NAME or --spec FILE");
  }

  const auto rep = congruence_report(*imm, grid, config, a.threads);
  const auto& s = rep.summary;
  const std::vector<Threshold> checks{{"lagrangian", s.max_lagrangian, 1e-8},
                                      {"gbar_gap", s.max_gbar_gap, 1e-6},
                                      {"gbar_prime_gap", s.max_gbar_prime_gap, 1e-6},
                                      {"hbar_gap", s.max_hbar_gap, 1e-5},
                                      {"trisymmetry", s.max_trisymmetry, 1e-6},
                                      {"hvec_gap", s.max_hvec_gap, 1e-5},
                                      {"omega_shared", s.max_omega_shared, 1e-8}};
  bool pass = s.masked < s.rows;
  for (const auto& c : checks) pass = pass && c.value < c.limit;

  const std::string summary = summary_json(rep, checks, pass).dump(2) + "\n";
  if (a.json_path.empty()) {
    std::cout << summary;
  } else {
    write_text(a.json_path, summary);
  }
  if (!a.csv_path.empty()) write_text(a.csv_path, grid_csv(rep));
  if (!a.frames_path.empty()) {
    if (imm->n() != 2) throw UsageError("--emit-frames needs a surface (n = 2)");
    std::ostringstream frames;
    write_frames_csv(frames, gauss_frames(*imm, {grid[0], grid[1]}));
    write_text(a.frames_path, frames.str());
  }
  if (!pass) std::cerr << "surface-report: consistency check failed\n";
  return pass ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructArgs {
  std::string frames_path;
  std::string out_path;
  std::string json_path;
  std::string frames_out;
  double base_t = 0.0;
  int base_i = 0;
  int base_j = 0;
  double closed_tol = 1e-4;
};

int run_reconstruct(const ReconstructArgs& a) {
  std::ifstream in(a.frames_path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + a.frames_path + "'");
  const FrameGrid fg = read_frames_csv(in);
  if (!a.frames_out.empty()) {
    std::ostringstream again;
    write_frames_csv(again, fg);
    write_text(a.frames_out, again.str());
  }
  ReconstructOptions opts;
  opts.base_t = a.base_t;
  opts.base_index = {a.base_i, a.base_j};
  opts.closed_tol = a.closed_tol;
  const auto rec = reconstruct_hypersurface(fg, opts);
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
  Json mono = Json::array();
  for (const auto& m : rec.monodromy) mono.push_back(optional_json(m));
  const Json summary{{"frames", a.frames_path},
                     {"p", rec.p},
                     {"eps", rec.eps},
                     {"grid", {fg.count(0), fg.count(1)}},
                     {"base_t", a.base_t},
                     {"base_index", {a.base_i, a.base_j}},
                     {"closedness_residual", rec.closedness_residual},
                     {"closed_tol", a.closed_tol},
                     {"curl_residual", rec.curl_residual},
                     {"quadric_residual", rec.quadric_residual},
                     {"monodromy", mono},
                     {"warnings", rec.warnings}};
  if (a.json_path.empty()) {
    std::cout << summary.dump(2) << '\n';
  } else {
    write_text(a.json_path, summary.dump(2) + "\n");
  }
  if (!a.out_path.empty()) {
    std::ostringstream out;
    write_reconstruction_csv(out, rec);
    write_text(a.out_path, out.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int list_catalog() {
  Json list = Json::array();
  for (const auto& e : catalog::entries()) {
    list.push_back(Json{{"name", e.name}, {"signatures", e.signatures}, {"parameters", e.parameters}});
  }
  std::cout << list.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal congruences of hypersurfaces in pseudo-Riemannian space forms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "geocon 0.1.0");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-structures", "Curvature, structure and closedness battery on L(X)");
  verify->add_flag("--all-3d", va.all_3d, "the six spaces over three-dimensional space forms");
  verify->add_option("--n", va.n, "hypersurface dimension (2 or 3)");
  verify->add_option("--p", va.p, "signature index of the space form");
  verify->add_option("--sign", va.sign, "+ (spacelike geodesics) or - (timelike)");
  verify->add_option("--points", va.points, "random geodesics per space")->check(CLI::PositiveNumber);
  verify->add_option("--charts", va.charts, "random charts for the closedness test")->check(CLI::PositiveNumber);
  verify->add_option("--json", va.json_path, "write the results as JSON");

  ReportArgs ra;
  auto* report = app.add_subcommand("surface-report", "Congruence geometry of a surface on a grid");
  report->add_option("--catalog", ra.catalog_name, "catalog surface name (see `geocon catalog`)");
  report->add_option("--param", ra.params, "catalog parameter key=value (repeatable)");
  report->add_option("--p", ra.p, "signature index for catalog surfaces");
  report->add_option("--spec", ra.spec_path, "JSON surface spec file");
  report->add_option("--grid", ra.grid, "samples per axis: N or N,M (default 32)");
  report->add_option("--json", ra.json_path, "summary JSON path (default: stdout)");
  report->add_option("--csv", ra.csv_path, "per-point CSV path");
  report->add_option("--emit-frames", ra.frames_path, "write the Gauss-map frame CSV");
  report->add_option("--threads", ra.threads, "worker threads (default: hardware)");

  ReconstructArgs ca;
  auto* recon = app.add_subcommand("reconstruct", "Recover a hypersurface from a frame CSV");
  recon->add_option("frames", ca.frames_path, "frame CSV (as written by surface-report --emit-frames)")->required();
  recon->add_option("--base-t", ca.base_t, "integration constant at the base point");
  recon->add_option("--base-i", ca.base_i, "base row index");
  recon->add_option("--base-j", ca.base_j, "base column index");
  recon->add_option("--closed-tol", ca.closed_tol, "largest accepted path-independence residual")
      ->check(CLI::PositiveNumber);
  recon->add_option("--out", ca.out_path, "reconstructed surface CSV");
  recon->add_option("--json", ca.json_path, "summary JSON path (default: stdout)");
  recon->add_option("--frames-out", ca.frames_out, "re-export the frames as read (normalised CSV)");

  auto* cat = app.add_subcommand("catalog", "List catalog surfaces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(va);
    if (report->parsed()) return run_report(ra, Config::from_env());
    if (recon->parsed()) return run_reconstruct(ca);
    if (cat->parsed()) return list_catalog();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GeoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_usage_error(e.kind()) ? kExitUsage : kExitCheck;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheck;
  }
  return kExitUsage;
}
