// berrydiag command-line driver: JSON config in, JSON + CSV out.
// exit codes: 0 ok, 1 configuration error, 2 point-level error, verify failure -> 3
#include "berrydiag/covariant.hpp"
#include "berrydiag/diagonalizer.hpp"
#include "berrydiag/models/config.hpp"
#include "berrydiag/verify.hpp"
#include "berrydiag/weyl/suite.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* schema_version = "1.0";

struct cli_flags {
  std::string config;
  std::optional<int> order;
  std::optional<double> hbar;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string suite = "all";
  int jobs = 1;
};

// ---- config helpers ------------------------------------------------------------------------

json load_config(const std::string& path) {
  if (path.empty()) throw bd::config_error("--config is required");
  std::ifstream in(path);
  if (!in) throw bd::config_error("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw bd::config_error(std::string("invalid JSON: ") + e.what());
  }
}

double get_hbar(const json& cfg, const cli_flags& f) {
  double h = f.hbar ? *f.hbar : bd::detail::read_num(cfg, "hbar", 0.01);
  if (!(h > 0)) throw bd::config_error("hbar must be > 0");
  return h;
}

std::uint64_t get_seed(const json& cfg, const cli_flags& f) {
  if (f.seed) return *f.seed;
  if (!cfg.contains("seed")) return 1;
  if (!cfg.at("seed").is_number_unsigned()) throw bd::config_error("'seed' must be a non-negative integer");
  return cfg.at("seed").get<std::uint64_t>();
}

bd::tolerances get_tolerances(const json& cfg) {
  bd::tolerances t;
  if (!cfg.contains("tolerances")) return t;
  const json& j = cfg.at("tolerances");
  if (!j.is_object()) throw bd::config_error("'tolerances' must be an object");
  t.degeneracy = bd::detail::read_num(j, "degeneracy", t.degeneracy);
  t.gap = bd::detail::read_num(j, "gap", t.gap);
  t.overlap = bd::detail::read_num(j, "overlap", t.overlap);
  t.fd.rel_step = bd::detail::read_num(j, "fd_step", t.fd.rel_step);
  const double ord = bd::detail::read_num(j, "fd_order", 4);
  if (ord != 2 && ord != 4) throw bd::config_error("fd_order must be 2 or 4");
  t.fd.fourth_order = ord == 4;
  if (!(t.fd.rel_step > 0)) throw bd::config_error("fd_step must be > 0");
  return t;
}

std::vector<bd::phase_point> get_points(const json& cfg) {
  std::vector<bd::phase_point> pts;
  if (cfg.contains("points")) {
    if (!cfg.at("points").is_array()) throw bd::config_error("'points' must be an array");
    for (const auto& p : cfg.at("points"))
      pts.push_back({bd::detail::read_vec3(p, "R"), bd::detail::read_vec3(p, "P")});
  }
  if (cfg.contains("grid")) {
    const json& g = cfg.at("grid");
    std::array<double, 6> lo{}, hi{};
    std::array<int, 6> cnt{1, 1, 1, 1, 1, 1};
    for (int part = 0; part < 2; ++part) {
      const char* key = part == 0 ? "R" : "P";
      if (!g.contains(key)) continue;
      const json& a = g.at(key);
      bd::vec3 mn = bd::detail::read_vec3(a, "min"), mx = bd::detail::read_vec3(a, "max", mn);
      std::array<int, 3> c = bd::detail::read_pow(a, "count");
      for (int i = 0; i < 3; ++i) {
        if (c[i] < 1) throw bd::config_error("grid counts must be >= 1");
        lo[3 * part + i] = mn[i];
        hi[3 * part + i] = mx[i];
        cnt[3 * part + i] = c[i];
      }
    }
    std::array<int, 6> idx{};
    for (;;) {
      bd::vec6 v;
      for (int k = 0; k < 6; ++k)
        v[k] = cnt[k] == 1 ? lo[k] : lo[k] + (hi[k] - lo[k]) * idx[k] / (cnt[k] - 1);
      pts.push_back(bd::phase_point::from(v));
      int k = 5;
      while (k >= 0 && ++idx[k] == cnt[k]) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  if (pts.empty()) throw bd::config_error("no phase points: give 'points' or 'grid'");
  return pts;
}

// ---- serialization -------------------------------------------------------------------------

json mat_json(const bd::cmat& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

json point_json(const bd::phase_point& x) {
  return {{"R", {x.R[0], x.R[1], x.R[2]}}, {"P", {x.P[0], x.P[1], x.P[2]}}};
}

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

void write_file(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o) throw bd::config_error("cannot write '" + p.string() + "'");
  o << s;
}

// results in input order regardless of the worker count
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int jobs, F f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = f(i);
  };
  const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

struct point_result {
  bool ok = false;
  std::string error;
  json record;
  std::vector<std::string> csv;
};

// ---- subcommands ---------------------------------------------------------------------------

int cmd_diagonalize(const cli_flags& f) {
  json cfg = load_config(f.config);
  auto m = bd::parse_model(cfg);
  const double hbar = get_hbar(cfg, f);
  const int order = f.order ? *f.order : static_cast<int>(bd::detail::read_num(cfg, "order", 2));
  if (order < 0 || order > 2) throw bd::config_error("order must be 0, 1 or 2");
  const auto tol = get_tolerances(cfg);
  const auto pts = get_points(cfg);
  if (order == 2) bd::check_supported(*m);
  const int n = m->dim();

  auto res = parallel_map<point_result>(pts.size(), f.jobs, [&](std::size_t i) {
    point_result r;
    const auto& x = pts[i];
    try {
      bd::frame_field ff(*m, x, tol);
      bd::energy_report e = bd::diagonalize(ff, x, order, hbar);
      const double scale = std::max(bd::max_abs(e.total), 1e-300);
      const double herm = bd::max_abs(e.total - e.total.adjoint()) / scale;
      const double off = bd::max_abs(bd::project(e.total, ff.group(), false)) / scale;
      Eigen::SelfAdjointEigenSolver<bd::cmat> es(0.5 * (e.total + e.total.adjoint()));
      std::vector<double> bands(es.eigenvalues().data(), es.eigenvalues().data() + n);
      std::sort(bands.rbegin(), bands.rend());
      r.record = {{"point", point_json(x)},
                  {"hbar", hbar},
                  {"order", order},
                  {"zeroth", mat_json(e.zeroth)},
                  {"first", mat_json(e.first)},
                  {"second", mat_json(e.second)},
                  {"bracket", mat_json(e.bracket)},
                  {"total", mat_json(e.total)},
                  {"bands", bands},
                  {"partial", e.partial},
                  {"note", e.note},
                  {"hermiticity", herm},
                  {"block_offdiag", off}};
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      row += num(hbar) + "," + std::to_string(order);
      for (const bd::cmat* c : {&e.zeroth, &e.first, &e.second, &e.bracket})
        for (int k = 0; k < n; ++k) row += "," + num((*c)(k, k).real());
      for (double b : bands) row += "," + num(b);
      row += "," + std::string(e.partial ? "1" : "0") + "," + num(herm) + "," + num(off) + ",";
      r.csv.push_back(row);
      r.ok = true;
    } catch (const bd::point_error& e) {
      r.error = e.what();
    } catch (const std::invalid_argument& e) {
      r.error = e.what();
    }
    if (!r.ok) {
      r.record = {{"point", point_json(x)}, {"error", r.error}};
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      row += num(hbar) + "," + std::to_string(order);
      for (int k = 0; k < 5 * n + 3; ++k) row += ",";
      row += "\"" + r.error + "\"";
      r.csv.push_back(row);
    }
    return r;
  });

  std::string head = "R_x,R_y,R_z,P_x,P_y,P_z,hbar,order";
  for (const char* tag : {"e0", "e1", "e2", "bracket", "band"})
    for (int k = 0; k < n; ++k) head += std::string(",") + tag + "_" + std::to_string(k);
  head += ",partial,hermiticity,block_offdiag,error\n";
  std::string csv = head;
  json recs = json::array(), errors = json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    for (const auto& row : res[i].csv) csv += row + "\n";
    recs.push_back(res[i].record);
    if (!res[i].ok) errors.push_back({{"index", i}, {"point", point_json(pts[i])}, {"error", res[i].error}});
  }
  json report = {{"schema_version", schema_version},
                 {"command", "diagonalize"},
                 {"model", m->name()},
                 {"groups", m->groups()},
                 {"hbar", hbar},
                 {"order", order},
                 {"records", recs},
                 {"errors", errors}};
  write_file(fs::path(f.out) / "energies.csv", csv);
  write_file(fs::path(f.out) / "energies.json", report.dump(2) + "\n");
  for (const auto& e : errors) std::cerr << "point " << e["index"] << ": " << e["error"].get<std::string>() << "\n";
  return errors.empty() ? 0 : 2;
}

int cmd_connections(const cli_flags& f) {
  json cfg = load_config(f.config);
  auto m = bd::parse_model(cfg);
  const auto tol = get_tolerances(cfg);
  const auto pts = get_points(cfg);
  const double hbar = get_hbar(cfg, f);
  const bool corrected = (f.order ? *f.order : 1) >= 2;
  auto res = parallel_map<point_result>(pts.size(), f.jobs, [&](std::size_t i) {
    point_result r;
    const auto& x = pts[i];
    try {
      bd::frame_field ff(*m, x, tol);
      bd::conn6 A;
      bd::cmat B;
      if (corrected) {
        bd::second_order_data s = bd::second_order(ff, x.x());
        A = bd::corrected_connections(s, hbar, x).A;
        B = s.B;
      } else {
        bd::local_data d = bd::local(ff, x.x());
        A = d.A;
        B = bd::b_matrix(d, ff.group(), ff.gap_abs(x));
      }
      double fd_vs = -1;
      if (auto ana = m->analytic_connections(x); ana && !corrected) {
        fd_vs = 0;
        for (int k = 0; k < 6; ++k)
          fd_vs = std::max(fd_vs, bd::max_abs(A[k] - (*ana)[k]) / std::max(bd::max_abs((*ana)[k]), 1.0));
      }
      json a = json::array();
      for (int k = 0; k < 6; ++k) a.push_back(bd::max_abs(A[k]));
      r.record = {{"point", point_json(x)}, {"corrected", corrected}, {"B", mat_json(B)}};
      const char* names[6] = {"A_R_x", "A_R_y", "A_R_z", "A_P_x", "A_P_y", "A_P_z"};
      for (int k = 0; k < 6; ++k) r.record[names[k]] = mat_json(A[k]);
      if (fd_vs >= 0) r.record["fd_vs_analytic"] = fd_vs;
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      for (int k = 0; k < 6; ++k) row += num(bd::max_abs(A[k])) + ",";
      row += num(bd::max_abs(B)) + "," + (fd_vs >= 0 ? num(fd_vs) : std::string()) + ",";
      r.csv.push_back(row);
      r.ok = true;
    } catch (const bd::point_error& e) {
      r.error = e.what();
      r.record = {{"point", point_json(x)}, {"error", r.error}};
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      r.csv.push_back(row + ",,,,,,,,\"" + r.error + "\"");
    }
    return r;
  });
  std::string csv = "R_x,R_y,R_z,P_x,P_y,P_z,maxabs_A_R_x,maxabs_A_R_y,maxabs_A_R_z,maxabs_A_P_x,maxabs_A_P_y,"
                    "maxabs_A_P_z,maxabs_B,fd_vs_analytic,error\n";
  json recs = json::array();
  int bad = 0;
  for (const auto& r : res) {
    csv += r.csv[0] + "\n";
    recs.push_back(r.record);
    if (!r.ok) {
      ++bad;
      std::cerr << r.error << "\n";
    }
  }
  json report = {{"schema_version", schema_version}, {"command", "connections"}, {"model", m->name()},
                 {"hbar", hbar},                     {"records", recs}};
  write_file(fs::path(f.out) / "connections.csv", csv);
  write_file(fs::path(f.out) / "connections.json", report.dump(2) + "\n");
  return bad ? 2 : 0;
}

int cmd_curvature(const cli_flags& f) {
  json cfg = load_config(f.config);
  auto m = bd::parse_model(cfg);
  const auto tol = get_tolerances(cfg);
  const auto pts = get_points(cfg);
  const double hbar = get_hbar(cfg, f);
  auto res = parallel_map<point_result>(pts.size(), f.jobs, [&](std::size_t i) {
    point_result r;
    const auto& x = pts[i];
    try {
      bd::frame_field ff(*m, x, tol);
      bd::curvature_set c = bd::curvatures(ff, x, hbar);
      json rr = json::array(), pp = json::array(), pr = json::array();
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          rr.push_back(mat_json(c.rr[a][b]));
          pp.push_back(mat_json(c.pp[a][b]));
          pr.push_back(mat_json(c.pr[a][b]));
        }
      r.record = {{"point", point_json(x)}, {"Theta_rr", rr}, {"Theta_pp", pp}, {"Theta_pr", pr}};
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      auto v = c.rr_vector();
      // positive-group trace per component, the scalar most often plotted
      for (int k = 0; k < 3; ++k)
        row += num(bd::project(v[k], ff.group(), true).topLeftCorner(m->groups()[0], m->groups()[0]).trace().real()) +
               ",";
      r.csv.push_back(row);
      r.ok = true;
    } catch (const bd::point_error& e) {
      r.error = e.what();
      r.record = {{"point", point_json(x)}, {"error", r.error}};
      std::string row;
      for (int k = 0; k < 3; ++k) row += num(x.R[k]) + ",";
      for (int k = 0; k < 3; ++k) row += num(x.P[k]) + ",";
      r.csv.push_back(row + ",,,\"" + r.error + "\"");
    }
    return r;
  });
  std::string csv = "R_x,R_y,R_z,P_x,P_y,P_z,tr_Theta_rr_x,tr_Theta_rr_y,tr_Theta_rr_z,error\n";
  json recs = json::array();
  int bad = 0;
  for (const auto& r : res) {
    csv += r.csv[0] + "\n";
    recs.push_back(r.record);
    if (!r.ok) {
      ++bad;
      std::cerr << r.error << "\n";
    }
  }
  json report = {{"schema_version", schema_version}, {"command", "curvature"}, {"model", m->name()},
                 {"hbar", hbar},                     {"records", recs}};
  write_file(fs::path(f.out) / "curvature.csv", csv);
  write_file(fs::path(f.out) / "curvature.json", report.dump(2) + "\n");
  return bad ? 2 : 0;
}

int cmd_trajectory(const cli_flags& f) {
  json cfg = load_config(f.config);
  auto m = bd::parse_model(cfg);
  auto* nm = dynamic_cast<const bd::neutrino_model*>(m.get());
  if (!nm) throw bd::config_error("trajectory needs model 'neutrino_metric'");
  const double hbar = get_hbar(cfg, f);
  if (!cfg.contains("trajectory") || !cfg.at("trajectory").is_object())
    throw bd::config_error("missing 'trajectory' section");
  const json& t = cfg.at("trajectory");
  const bd::vec3 r0 = bd::detail::read_vec3(t, "r0");
  const bd::vec3 P0 = bd::detail::read_vec3(t, "P0");
  const double dt = bd::detail::read_num(t, "dt", 1e-3);
  const double steps_d = bd::detail::read_num(t, "steps", 1000);
  const double every_d = bd::detail::read_num(t, "record_every", 1);
  const double spin = bd::detail::read_num(t, "spin", 0.5);
  const std::string meth = t.value("method", "rk4");
  if (!(dt > 0)) throw bd::config_error("dt must be > 0");
  if (steps_d < 1 || every_d < 1) throw bd::config_error("steps and record_every must be >= 1");
  if (meth != "rk4" && meth != "rk45") throw bd::config_error("method must be rk4 or rk45");
  std::vector<double> lambdas{1.0, -1.0};
  if (t.contains("lambda")) {
    lambdas.clear();
    const json& l = t.at("lambda");
    for (const auto& v : l.is_array() ? l : json::array({l})) {
      if (!v.is_number() || std::abs(std::abs(v.get<double>()) - 1) > 0) throw bd::config_error("lambda must be +1 or -1");
      lambdas.push_back(v.get<double>());
    }
  }
  auto runs = parallel_map<std::pair<std::optional<bd::trajectory>, std::string>>(
      lambdas.size(), f.jobs, [&](std::size_t i) -> std::pair<std::optional<bd::trajectory>, std::string> {
        bd::neutrino_band b{nm, lambdas[i], hbar, spin};
        try {
          return {bd::integrate(b, r0, P0, dt, static_cast<int>(steps_d),
                                meth == "rk4" ? bd::method::rk4 : bd::method::rk45, static_cast<int>(every_d)),
                  ""};
        } catch (const bd::point_error& e) {
          return {std::nullopt, e.what()};
        }
      });
  json manifest = {{"schema_version", schema_version},
                   {"command", "trajectory"},
                   {"config", cfg},
                   {"hbar", hbar},
                   {"dt", dt},
                   {"steps", static_cast<int>(steps_d)},
                   {"method", meth},
                   {"runs", json::array()}};
  int bad = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string name = std::string("trajectory_lambda") + (lambdas[i] > 0 ? "+1" : "-1") + ".csv";
    if (!runs[i].first) {
      ++bad;
      std::cerr << runs[i].second << "\n";
      manifest["runs"].push_back({{"lambda", lambdas[i]}, {"error", runs[i].second}});
      continue;
    }
    const auto& tr = *runs[i].first;
    std::string csv = "t,r_x,r_y,r_z,P_x,P_y,P_z,lambda,eps,|v|,helicity\n";
    for (const auto& s : tr.states) {
      csv += num(s.t);
      for (int k = 0; k < 3; ++k) csv += "," + num(s.r[k]);
      for (int k = 0; k < 3; ++k) csv += "," + num(s.P[k]);
      csv += "," + num(s.lambda) + "," + num(s.eps) + "," + num(s.speed) + "," + num(s.helicity) + "\n";
    }
    write_file(fs::path(f.out) / name, csv);
    manifest["runs"].push_back({{"lambda", lambdas[i]},
                                {"file", name},
                                {"helicity_drift", tr.helicity_drift},
                                {"energy_drift", tr.energy_drift}});
  }
  write_file(fs::path(f.out) / "trajectory.json", manifest.dump(2) + "\n");
  return bad ? 2 : 0;
}

int cmd_verify(const cli_flags& f) {
  json cfg = f.config.empty() ? json::object() : load_config(f.config);
  bd::verify::options o;
  o.seed = get_seed(cfg, f);
  if (f.hbar) o.hbar = *f.hbar;
  if (cfg.contains("verify")) {
    const json& v = cfg.at("verify");
    if (!v.is_object()) throw bd::config_error("'verify' must be an object");
    o.points = static_cast<int>(bd::detail::read_num(v, "points", o.points));
    o.curvature_points = static_cast<int>(bd::detail::read_num(v, "curvature_points", o.curvature_points));
    o.symbolic_cases = static_cast<int>(bd::detail::read_num(v, "symbolic_cases", o.symbolic_cases));
    o.symbolic_degree = static_cast<int>(bd::detail::read_num(v, "symbolic_degree", o.symbolic_degree));
    o.hbar = bd::detail::read_num(v, "hbar", o.hbar);
    if (o.points < 2 || o.curvature_points < 1 || o.symbolic_cases < 1) throw bd::config_error("verify counts too small");
    if (o.symbolic_degree > 8) throw bd::config_error("symbolic degree exceeds cap 8");
    if (v.contains("tolerances")) {
      const json& t = v.at("tolerances");
      auto& th = o.tol;
      for (auto [key, ref] : std::initializer_list<std::pair<const char*, double*>>{
               {"oracle", &th.oracle},       {"pauli", &th.pauli},           {"curvature", &th.curvature},
               {"helicity", &th.helicity},   {"spin_hall", &th.spin_hall},   {"energy", &th.energy},
               {"velocity", &th.velocity},   {"slope", &th.slope},           {"free_field", &th.free_field},
               {"connections", &th.connections}, {"round_trip", &th.round_trip}, {"rk4_slope", &th.rk4_slope},
               {"runtime", &th.runtime}})
        *ref = bd::detail::read_num(t, key, *ref);
    }
  }
  std::vector<std::string> suites;
  if (f.suite == "all") {
    suites = bd::verify::suite_names();
  } else {
    const auto& all = bd::verify::suite_names();
    if (std::find(all.begin(), all.end(), f.suite) == all.end()) throw bd::config_error("unknown suite '" + f.suite + "'");
    suites = {f.suite};
  }
  auto res = parallel_map<std::vector<bd::verify::check>>(suites.size(), f.jobs, [&](std::size_t i) {
    return bd::verify::run_suite(suites[i], o);
  });
  json checks = json::array(), failures = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < suites.size(); ++i)
    for (const auto& c : res[i]) {
      checks.push_back({{"suite", suites[i]},
                        {"id", c.id},
                        {"name", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"bound", c.tol},
                        {"detail", c.detail},
                        {"diagnostic", c.diagnostic}});
      if (!c.diagnostic && !c.pass) {
        ok = false;
        failures.push_back(c.id + ": " + c.name);
      }
      std::printf("%s %-4s %s: %.3e (bound %.1e)\n", c.diagnostic ? "DIAG" : (c.pass ? "PASS" : "FAIL"),
                  c.id.c_str(), c.name.c_str(), c.value, c.tol);
    }
  json report = {{"schema_version", schema_version}, {"command", "verify"}, {"seed", o.seed},
                 {"suites", suites},                 {"pass", ok},        {"checks", checks},
                 {"failures", failures}};
  write_file(fs::path(f.out) / "verify.json", report.dump(2) + "\n");
  return ok ? 0 : 3;
}

int cmd_bracket_check(const cli_flags& f) {
  json cfg = f.config.empty() ? json::object() : load_config(f.config);
  const std::uint64_t seed = get_seed(cfg, f);
  int cases = 200, degree = 6;
  std::vector<std::size_t> dims{1, 2};
  if (cfg.contains("bracket_check")) {
    const json& b = cfg.at("bracket_check");
    cases = static_cast<int>(bd::detail::read_num(b, "cases", cases));
    degree = static_cast<int>(bd::detail::read_num(b, "max_degree", degree));
    if (b.contains("dims")) {
      dims.clear();
      for (const auto& d : b.at("dims")) {
        if (!d.is_number_integer() || d.get<int>() < 1 || d.get<int>() > 4) throw bd::config_error("dims must be 1..4");
        dims.push_back(d.get<std::size_t>());
      }
    }
  }
  if (cases < 1) throw bd::config_error("cases must be >= 1");
  if (degree < 0 || degree > 8) throw bd::config_error("max_degree exceeds the degree cap 8");
  if (dims.empty()) throw bd::config_error("dims must not be empty");
  std::vector<bd::weyl::suite_result> res = {bd::weyl::product_rule_suite(seed, cases, degree, dims),
                                             bd::weyl::invariance_suite(seed + 1, cases, degree, dims),
                                             bd::weyl::symmetric_bracket_suite(seed + 2, cases, degree, dims)};
  json suites = json::array();
  bool ok = true;
  for (const auto& r : res) {
    suites.push_back({{"name", r.name}, {"cases", r.cases}, {"exact", r.exact}, {"failures", r.failures}});
    ok = ok && r.pass();
    std::printf("%s %d/%d exact\n", r.name.c_str(), r.exact, r.cases);
  }
  json report = {{"schema_version", schema_version}, {"command", "bracket-check"}, {"seed", seed},
                 {"max_degree", degree},             {"dims", dims},               {"suites", suites},
                 {"pass", ok}};
  write_file(fs::path(f.out) / "bracket_check.json", report.dump(2) + "\n");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"berrydiag: semiclassical band diagonalization"};
  app.require_subcommand(1);
  cli_flags f;
  std::uint64_t seed_in = 0;
  double hbar_in = 0;
  int order_in = 0;
  std::vector<CLI::Option*> o_order, o_hbar, o_seed;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", f.config, "JSON configuration file");
    o_order.push_back(sc->add_option("--order", order_in, "expansion order 0|1|2"));
    o_hbar.push_back(sc->add_option("--hbar", hbar_in, "hbar (overrides config)"));
    o_seed.push_back(sc->add_option("--seed", seed_in, "random seed (overrides config)"));
    sc->add_option("--out", f.out, "output directory");
    sc->add_option("--suite", f.suite, "verify suite name or 'all'");
    sc->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  std::vector<std::pair<CLI::App*, int (*)(const cli_flags&)>> cmds;
  cmds.emplace_back(app.add_subcommand("diagonalize", "band energies at phase points"), cmd_diagonalize);
  cmds.emplace_back(app.add_subcommand("connections", "Berry connections and B at phase points"), cmd_connections);
  cmds.emplace_back(app.add_subcommand("curvature", "Berry curvatures at phase points"), cmd_curvature);
  cmds.emplace_back(app.add_subcommand("trajectory", "integrate ray equations for both helicities"), cmd_trajectory);
  cmds.emplace_back(app.add_subcommand("verify", "run verification suites"), cmd_verify);
  cmds.emplace_back(app.add_subcommand("bracket-check", "exact symbolic bracket identities"), cmd_bracket_check);
  for (auto& [sc, fn] : cmds) add_common(sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  auto given = [](const std::vector<CLI::Option*>& v) {
    return std::any_of(v.begin(), v.end(), [](CLI::Option* o) { return o->count() > 0; });
  };
  if (given(o_order)) f.order = order_in;
  if (given(o_hbar)) f.hbar = hbar_in;
  if (given(o_seed)) f.seed = seed_in;
  if (f.order && (*f.order < 0 || *f.order > 2)) {
    std::cerr << "config error: order must be 0, 1 or 2\n";
    return 1;
  }
  if (f.hbar && !(*f.hbar > 0)) {
    std::cerr << "config error: hbar must be > 0\n";
    return 1;
  }
  try {
    for (auto& [sc, fn] : cmds)
      if (sc->parsed()) return fn(f);
  } catch (const bd::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const bd::point_error& e) {
    std::cerr << "point error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
