#include "ght/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ght/assembly.hpp"
#include "ght/errors.hpp"
#include "ght/evolver.hpp"
#include "ght/nets.hpp"
#include "ght/period_solver.hpp"
#include "ght/spatial.hpp"
#include "ght/suites.hpp"

namespace ght {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sidecar_path(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".json";
  return path.substr(0, dot) + ".json";
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << j.dump(2) << '\n';
}

json sidecar(const std::string& subcommand, const json& config) {
  return {{"schema_version", 1}, {"subcommand", subcommand}, {"config", config}};
}

json mat_json(const Mat3& L) {
  json cols = json::array();
  for (int j = 0; j < 3; ++j) cols.push_back({L(0, j), L(1, j), L(2, j)});
  return cols;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Subcommand options, filled by CLI11.
struct Options {
  std::string out;
  double re_tau = 0.5;
  int trace = 0;
  double tol = 1e-9;
  std::string theta = "auto";
  int res = 64;
  std::vector<int> cells = {1, 1, 1};
  std::string net = "qtz";
  double c_over_a = 1.0;
  double radius = 0.15;
  int segments = 8;
  int iters = 2000;
  double energy_tol = 1e-7;
  int target = 20000;
  bool fd = false;
  std::string fixture;
  std::string suite = "all";
  unsigned seed = 1;
  std::string relaxed;
};

int cmd_solve(const Options& o, std::ostream& out) {
  if (!(o.tol > 0)) throw UsageError("--tol must be positive");
  std::vector<double> re;
  if (o.trace > 0)
    for (int k = 1; k <= o.trace; ++k) re.push_back(double(k) / (o.trace + 1));
  else
    re.push_back(o.re_tau);
  const auto tr = trace_curve(re, o.tol);
  std::ostringstream csv;
  csv << "re_tau,im_tau,theta_h,theta_v,residual,psi_re,psi_im\n";
  json rows = json::array();
  for (const auto& p : tr.points) {
    csv << g17(p.tau.real()) << ',' << g17(p.tau.imag()) << ',' << g17(p.theta_h) << ',' << g17(p.theta_v) << ','
        << g17(p.residual) << ',' << g17(p.psi.real()) << ',' << g17(p.psi.imag()) << '\n';
    rows.push_back({{"re_tau", p.tau.real()}, {"im_tau", p.tau.imag()}, {"theta_h", p.theta_h},
                    {"theta_v", p.theta_v},   {"residual", p.residual}, {"psi", {p.psi.real(), p.psi.imag()}}});
  }
  const std::string path = o.out.empty() ? "solve.csv" : o.out;
  std::ofstream(path) << csv.str();
  json j = sidecar("solve", {{"re_tau", o.re_tau}, {"trace", o.trace}, {"tol", o.tol}, {"out", path}});
  j["rows"] = rows;
  j["multi_root_warning"] = tr.multi_root_warning;
  write_json(sidecar_path(path), j);
  out << "wrote " << tr.points.size() << " rows to " << path << '\n';
  return 0;
}

WeierstrassData member(const Options& o) {
  WeierstrassData d = WeierstrassData::on_curve(o.re_tau);
  if (o.theta != "auto") {
    try {
      d.theta = std::stod(o.theta);
    } catch (const std::exception&) {
      throw UsageError("--theta must be 'auto' or a number in radians");
    }
  }
  return d;
}

int cmd_patch(const Options& o, std::ostream& out) {
  const auto d = member(o);
  const auto patch = build_patch(d, o.res, o.res);
  const std::string path = o.out.empty() ? "patch.obj" : o.out;
  save_mesh(path, patch);
  json j = sidecar("patch", {{"re_tau", o.re_tau}, {"theta", o.theta}, {"res", o.res}, {"out", path}});
  j["tau"] = {d.tau.real(), d.tau.imag()};
  j["theta_radians"] = d.theta;
  j["vertices"] = patch.num_vertices();
  j["triangles"] = patch.num_triangles();
  write_json(sidecar_path(path), j);
  out << "wrote patch with " << patch.num_vertices() << " vertices to " << path << '\n';
  return 0;
}

int cmd_mesh(const Options& o, std::ostream& out) {
  if (o.cells.size() != 3) throw UsageError("--cells takes three counts a,b,c");
  const auto d = member(o);
  const auto cell = build_unit_cell(d, o.res);
  const auto& m = cell.mesh;
  const auto top = mesh_topology(m);
  const TriangleGrid grid(m);
  const double screw = symmetry_residual(grid, screw_symmetry(d).motion());
  double axes = 0;
  for (const auto& ax : order2_axes(d)) axes = std::max(axes, symmetry_residual(grid, ax.motion()));
  const auto H = mean_curvature_field(m), K = gauss_curvature_field(m);
  std::vector<int> source;
  const PeriodicMesh rep = replicate(m, o.cells[0], o.cells[1], o.cells[2], &source);
  std::vector<double> Hr, Kr;
  for (int v : source) {
    Hr.push_back(H[v]);
    Kr.push_back(K[v]);
  }
  const std::string path = o.out.empty() ? "mesh.obj" : o.out;
  save_mesh(path, rep, &Hr, &Kr);
  double hmax = 0;
  for (double h : H) hmax = std::max(hmax, std::abs(h));
  json j = sidecar("mesh", {{"re_tau", o.re_tau}, {"theta", o.theta}, {"res", o.res}, {"cells", o.cells}, {"out", path}});
  j["tau"] = {d.tau.real(), d.tau.imag()};
  j["lattice_vectors"] = mat_json(cell.lattice.vectors);
  j["a"] = cell.lattice.a;
  j["c"] = cell.lattice.c;
  j["c_over_a"] = cell.lattice.c_over_a();
  j["chi"] = top.euler;
  j["closed"] = top.closed;
  j["vertices"] = m.num_vertices();
  j["triangles"] = m.num_triangles();
  j["residuals"] = {{"screw", screw},
                    {"order2", axes},
                    {"closure", cell.lattice.closure_error},
                    {"weld", cell.worst_weld},
                    {"max_abs_H_times_h", hmax * mean_edge_length(m)}};
  write_json(sidecar_path(path), j);
  out << "chi = " << top.euler << ", c/a = " << cell.lattice.c_over_a() << "; wrote " << path << '\n';
  return 0;
}

int cmd_nets(const Options& o, std::ostream& out) {
  if (o.net != "qtz" && o.net != "qzd") throw UsageError("--net must be qtz or qzd");
  const CrystalNet net = o.net == "qtz" ? generate_qtz(o.c_over_a) : generate_qzd(o.c_over_a);
  json verts = json::array(), edges = json::array();
  for (const auto& v : net.vertices) verts.push_back({v.x(), v.y(), v.z()});
  for (const auto& e : net.edges)
    edges.push_back({{"u", e.u}, {"v", e.v}, {"offset", {e.offset[0], e.offset[1], e.offset[2]}}, {"orbit", e.orbit}});
  json j = sidecar("nets", {{"net", o.net}, {"c_over_a", o.c_over_a}, {"out", o.out}});
  j["name"] = net.name;
  j["a"] = net.a;
  j["c"] = net.c;
  j["lattice_vectors"] = mat_json(net.lattice());
  j["vertices_fractional"] = verts;
  j["edges"] = edges;
  j["degrees"] = net.degrees();
  j["edge_orbits"] = net.edge_orbit_count();
  j["symmetry_closed"] = symmetry_closed(net);
  j["min_nonadjacent_distance"] = min_nonadjacent_distance(net);
  if (o.net == "qzd") j["edge_angle"] = qzd_edge_angle(net);
  j["warnings"] = net.warnings;
  const std::string path = o.out.empty() ? o.net + ".json" : o.out;
  write_json(path, j);
  for (const auto& w : net.warnings) out << "warning: " << w << '\n';
  out << net.name << ": " << net.vertices.size() << " vertices, " << net.edges.size() << " edges; wrote " << path << '\n';
  return 0;
}

int cmd_evolve(const Options& o, std::ostream& out) {
  if (!(o.energy_tol > 0)) throw UsageError("--tol must be positive");
  const CrystalNet net = generate_qtz(o.c_over_a);
  const CrystalNet dual = generate_qzd(o.c_over_a);
  RelaxConfig cfg;
  cfg.max_iters = o.iters;
  cfg.energy_tol = o.energy_tol;
  cfg.target_vertices = o.target;
  cfg.finite_difference = o.fd;
  const RelaxState st = relax_multilevel(tubular_mesh(net, o.radius, o.segments), cfg);
  const std::string path = o.out.empty() ? "evolve.obj" : o.out;
  save_mesh(path, st.mesh);
  if (!o.fixture.empty()) {
    std::ofstream f(o.fixture);
    write_periodic(f, st.mesh);
  }
  const TriangleGrid grid(st.mesh);
  json residuals = json::array();
  double worst = 0;
  for (const auto& op : net.ops) {
    const double r = symmetry_residual(grid, net.cartesian_op(op));
    residuals.push_back(r);
    worst = std::max(worst, r);
  }
  json j = sidecar("evolve", {{"c_over_a", o.c_over_a},
                              {"radius", o.radius},
                              {"segments", o.segments},
                              {"iters", o.iters},
                              {"tol", o.energy_tol},
                              {"target_vertices", o.target},
                              {"finite_difference", o.fd},
                              {"out", path},
                              {"fixture", o.fixture}});
  j["lattice_vectors"] = mat_json(*st.mesh.lattice);
  j["energy"] = st.energy;
  j["gradient_norm"] = st.grad_norm;
  j["iterations"] = st.iteration;
  j["converged"] = st.converged;
  j["vertices"] = st.mesh.num_vertices();
  j["trace"] = st.trace;
  j["level_starts"] = st.level_starts;
  j["symmetry_residuals"] = residuals;
  j["unseparated_pairs"] = unseparated_pairs(st.mesh, net, dual);
  write_json(sidecar_path(path), j);
  out << "f = " << st.energy << " after " << st.iteration << " iterations, " << st.mesh.num_vertices()
      << " vertices, max symmetry residual " << worst << "; wrote " << path << '\n';
  return st.converged ? 0 : 1;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<std::string> names;
  if (o.suite == "all")
    names = suite_names();
  else
    names.push_back(o.suite);
  for (const auto& n : names)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw UsageError("unknown suite '" + n + "'");
  SuiteOptions so;
  so.seed = o.seed;
  so.res = o.res;
  so.fixture = o.fixture;
  bool all = true;
  json results = json::array();
  for (const auto& n : names) {
    SuiteResult r = run_suite(n, so);
    all = all && r.passed;
    out << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.summary << " ("
        << r.seconds << " s)\n";
    // Wall-clock times stay out of the sidecar so that reruns are byte-identical.
    r.metrics.erase("seconds");
    r.metrics.erase("seconds_total");
    results.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"metrics", r.metrics}});
  }
  if (!o.out.empty()) {
    json j = sidecar("verify", {{"suite", o.suite}, {"seed", o.seed}, {"res", o.res}, {"fixture", o.fixture}});
    j["results"] = results;
    j["passed"] = all;
    write_json(o.out, j);
  }
  return all ? 0 : 1;
}

int cmd_xval(const Options& o, std::ostream& out) {
  PeriodicMesh relaxed;
  if (!o.relaxed.empty()) {
    std::ifstream in(o.relaxed);
    if (!in) throw UsageError("cannot read " + o.relaxed);
    relaxed = read_periodic(in);
  } else {
    RelaxConfig cfg;
    cfg.energy_tol = 1e-7;
    cfg.target_vertices = o.target;
    relaxed = relax_multilevel(tubular_mesh(generate_qtz(o.c_over_a), o.radius, o.segments), cfg).mesh;
  }
  if (!relaxed.lattice) throw UsageError("the relaxed mesh has no lattice");
  const double ca = relaxed.lattice->col(2).norm() / relaxed.lattice->col(0).norm();
  const double re = re_tau_for_c_over_a(ca, 0.47);
  const auto d = WeierstrassData::on_curve(re);
  const auto cell = build_unit_cell(d, o.res);
  const auto xv = cross_validate(relaxed, cell.mesh, screw_symmetry(d).axis_point);
  json j = sidecar("xval", {{"relaxed", o.relaxed},
                            {"c_over_a", o.c_over_a},
                            {"radius", o.radius},
                            {"segments", o.segments},
                            {"target_vertices", o.target},
                            {"res", o.res}});
  j["re_tau"] = re;
  j["c_over_a_relaxed"] = xv.c_over_a_relaxed;
  j["c_over_a_analytic"] = xv.c_over_a_analytic;
  j["z_shift"] = xv.z_shift;
  j["hausdorff_over_a"] = xv.hausdorff;
  const std::string path = o.out.empty() ? "xval.json" : o.out;
  write_json(path, j);
  out << "Re tau = " << re << ", normalized Hausdorff distance " << xv.hausdorff << "; wrote " << path << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gyrating H'-T minimal surfaces: period curve, Weierstrass meshes, qtz tube relaxation"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Solve the period problem at one Re tau or trace the family curve (CSV)");
  solve->add_option("--re-tau", o.re_tau, "Re tau in (0, 1)")->capture_default_str();
  solve->add_option("--trace", o.trace, "Number of evenly spaced Re tau samples in (0, 1)")->check(CLI::PositiveNumber);
  solve->add_option("--tol", o.tol, "Residual tolerance (radians)")->capture_default_str();
  solve->add_option("--out", o.out, "CSV path (default solve.csv); the JSON sidecar sits next to it");

  auto* patch = app.add_subcommand("patch", "Weierstrass patch of one member (OBJ)");
  patch->add_option("--re-tau", o.re_tau, "Re tau of the member")->capture_default_str();
  patch->add_option("--theta", o.theta, "Associate angle: auto (solved member) or radians")->capture_default_str();
  patch->add_option("--res", o.res, "Grid resolution")->check(CLI::Range(4, 4096))->capture_default_str();
  patch->add_option("--out", o.out, "OBJ path (default patch.obj)");

  auto* mesh = app.add_subcommand("mesh", "Assembled unit cell (OBJ or binary PLY with H and K) and JSON sidecar");
  mesh->add_option("--re-tau", o.re_tau, "Re tau of the member")->capture_default_str();
  mesh->add_option("--theta", o.theta, "Associate angle: auto or radians")->capture_default_str();
  mesh->add_option("--res", o.res, "Grid resolution")->check(CLI::Range(4, 4096))->capture_default_str();
  mesh->add_option("--cells", o.cells, "Replication counts a,b,c")->delimiter(',')->expected(3)->check(CLI::PositiveNumber);
  mesh->add_option("--out", o.out, "Output path, .obj or .ply (default mesh.obj)");

  auto* nets = app.add_subcommand("nets", "qtz or qzd periodic graph (JSON)");
  nets->add_option("--net", o.net, "qtz or qzd")->check(CLI::IsMember({"qtz", "qzd"}))->capture_default_str();
  nets->add_option("--c-over-a", o.c_over_a, "Crystallographic c/a")->capture_default_str();
  nets->add_option("--out", o.out, "JSON path (default <net>.json)");

  auto* evolve = app.add_subcommand("evolve", "Relax the qtz tube to a minimal surface (OBJ/PLY plus JSON trace)");
  evolve->add_option("--c-over-a", o.c_over_a, "Crystallographic c/a")->capture_default_str();
  evolve->add_option("--radius", o.radius, "Initial tube radius in units of a")->capture_default_str();
  evolve->add_option("--segments", o.segments, "Points per tube ring")->check(CLI::Range(3, 64))->capture_default_str();
  evolve->add_option("--iters", o.iters, "Maximum CG iterations per level")->check(CLI::PositiveNumber)->capture_default_str();
  evolve->add_option("--tol", o.energy_tol, "Stop a level when f < tol")->capture_default_str();
  evolve->add_option("--target-vertices", o.target, "Subdivide until at least this many vertices")->capture_default_str();
  evolve->add_flag("--fd", o.fd, "Central-difference gradient instead of the analytic one");
  evolve->add_option("--fixture", o.fixture, "Also write the periodic mesh (lattice and offsets) here");
  evolve->add_option("--out", o.out, "Mesh path, .obj or .ply (default evolve.obj)");

  auto* verify = app.add_subcommand("verify", "Run acceptance suites and print PASS/FAIL lines");
  verify->add_option("--suite", o.suite, "Suite name or 'all'")->capture_default_str();
  verify->add_option("--seed", o.seed, "Seed for randomized sampling")->capture_default_str();
  verify->add_option("--res", o.res, "Mesh resolution for the surface suites")->capture_default_str();
  verify->add_option("--fixture", o.fixture, "Relaxed-mesh fixture written by 'nets' and read by 'xval'");
  verify->add_option("--out", o.out, "JSON report path");
  o.res = 96;

  auto* xval = app.add_subcommand("xval", "Cross-validate a relaxed qtz surface against the Weierstrass member");
  xval->add_option("--relaxed", o.relaxed, "Periodic mesh written by 'evolve --fixture' (relaxes afresh if absent)");
  xval->add_option("--c-over-a", o.c_over_a, "c/a used when relaxing afresh")->capture_default_str();
  xval->add_option("--radius", o.radius, "Tube radius used when relaxing afresh")->capture_default_str();
  xval->add_option("--segments", o.segments, "Ring points used when relaxing afresh")->capture_default_str();
  xval->add_option("--target-vertices", o.target, "Vertex target used when relaxing afresh")->capture_default_str();
  xval->add_option("--res", o.res, "Resolution of the Weierstrass mesh")->capture_default_str();
  xval->add_option("--out", o.out, "JSON path (default xval.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  if (!patch->parsed() && !mesh->parsed() && !xval->parsed() && !verify->parsed()) o.res = 64;
  try {
    if (solve->parsed()) return cmd_solve(o, out);
    if (patch->parsed()) return cmd_patch(o, out);
    if (mesh->parsed()) return cmd_mesh(o, out);
    if (nets->parsed()) return cmd_nets(o, out);
    if (evolve->parsed()) return cmd_evolve(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (xval->parsed()) return cmd_xval(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ght
