#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "magflow/chars.hpp"
#include "magflow/claws.hpp"
#include "magflow/families.hpp"
#include "magflow/flow.hpp"
#include "magflow/parallel.hpp"
#include "magflow/sampling.hpp"
#include "magflow/semiham.hpp"
#include "magflow/system.hpp"

using namespace magflow;

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", x);
  return buf;
}

std::pair<double, double> parse_xy(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ValidationError("expected 'x,y' with a comma: " + s);
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ValidationError("cannot parse coordinates '" + s + "'");
  }
}

OmegaMode parse_omega(const std::string& s) {
  if (s == "derive") return OmegaMode::derive();
  if (s.rfind("const:", 0) == 0) return OmegaMode::constant(std::stod(s.substr(6)));
  if (s.rfind("scale:", 0) == 0) return OmegaMode::scaled(std::stod(s.substr(6)));
  throw ValidationError("--omega expects 'derive', 'const:W' or 'scale:F'");
}

// Field points drawn at seeded random torus positions, kept only when they
// meet the requested hyperbolicity margins.
std::vector<FieldPoint> points_from_spec(const FourierFieldSpec& spec, int count,
                                         std::uint64_t seed, const SampleOptions& margins) {
  Rng rng(seed);
  std::vector<FieldPoint> pts;
  for (long tries = 0; static_cast<int>(pts.size()) < count; ++tries) {
    if (tries > 20000L * count)
      throw NumericalError("could not find enough margin-satisfying points on this field");
    const double x = rng.uniform(0, spec.Lx), y = rng.uniform(0, spec.Ly);
    const FieldPoint p = eval_jet(spec, x, y).point;
    try {
      const TrigPoly f = trig_poly(p);
      if (classify(f) != Hyperbolicity::StrictlyHyperbolic) continue;
      const CriticalSet cs = critical_points(f);
      bool ok = true;
      const int m = cs.size();
      for (int i = 0; i < m && ok; ++i) {
        const double next = cs.angles[(i + 1) % m] + (i + 1 == m ? 2 * std::numbers::pi : 0.0);
        if (next - cs.angles[i] < margins.min_angle_gap) ok = false;
        if (margins.min_cos > 0 && std::abs(std::cos(cs.angles[i])) < margins.min_cos) ok = false;
        if (margins.min_value_gap > 0 &&
            std::abs(eval(f, cs.angles[i]) - eval(f, cs.angles[(i + 1) % m])) <
                margins.min_value_gap)
          ok = false;
        if (margins.min_speed_gap > 0)
          for (int j = 0; j < m; ++j)
            if (j != i && std::abs(std::tan(cs.angles[i]) - std::tan(cs.angles[j])) <
                              margins.min_speed_gap)
              ok = false;
      }
      if (ok) pts.push_back(p);
    } catch (const NumericalError&) {
    }
  }
  return pts;
}

std::vector<FieldPoint> gather_points(const std::string& spec_path, int n_fallback, int count,
                                      std::uint64_t seed, const SampleOptions& margins) {
  if (!spec_path.empty()) return points_from_spec(load_spec(spec_path), count, seed, margins);
  Rng rng(seed);
  std::vector<FieldPoint> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(sample_hyperbolic_point(rng, n_fallback, margins));
  return pts;
}

double min_adjacent_gap(const CharData& cd) {
  const int m = static_cast<int>(cd.invariants.size());
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k)
    gap = std::min(gap, std::abs(cd.invariants[k] - cd.invariants[(k + 1) % m]));
  return gap;
}

int cmd_validate(const std::string& spec_path, const std::string& grid_path) {
  if (spec_path.empty() == grid_path.empty())
    throw ValidationError("validate needs exactly one of --spec or --grid");
  if (!spec_path.empty()) {
    const FourierFieldSpec spec = load_spec(spec_path);
    std::cout << "OK: MAGFLOW-SPEC v1, N=" << spec.N << ", periods " << g17(spec.Lx) << " x "
              << g17(spec.Ly) << "\n";
  } else {
    const FieldGrid grid = load_grid(grid_path);
    std::cout << "OK: MAGFLOW-GRID v1, N=" << grid.N << ", " << grid.NX << "x" << grid.NY
              << " sites\n";
  }
  return 0;
}

int cmd_derive(const std::string& spec_path, const std::string& grid_path, int nx, int ny,
               const std::string& out_path) {
  std::optional<FieldGrid> grid;
  std::optional<FourierFieldSpec> spec;
  if (spec_path.empty() == grid_path.empty())
    throw ValidationError("derive needs exactly one of --spec or --grid");
  if (!spec_path.empty())
    spec = load_spec(spec_path);
  else
    grid = load_grid(grid_path);

  const int NX = grid ? grid->NX : nx, NY = grid ? grid->NY : ny;
  const double LX = grid ? grid->Lx : spec->Lx, LY = grid ? grid->Ly : spec->Ly;

  std::ostringstream csv;
  csv << "x,y,omega,consistency,residual_inf\n";
  double max_cons = 0, max_res = 0;
  for (int j = 0; j < NY; ++j)
    for (int i = 0; i < NX; ++i) {
      const double x = i * LX / NX, y = j * LY / NY;
      const Jet jet = grid ? grid_jet(*grid, i, j) : eval_jet(*spec, x, y);
      const OmegaResult w = omega(jet);
      const double res = system_residual(jet).cwiseAbs().maxCoeff();
      max_cons = std::max(max_cons, std::abs(w.consistency));
      max_res = std::max(max_res, res);
      csv << g17(x) << "," << g17(y) << "," << g17(w.omega) << "," << g17(w.consistency) << ","
          << g17(res) << "\n";
    }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open " + out_path + " for writing");
    out << csv.str();
  }
  std::cout << "derive: " << NX << "x" << NY << " sites, max |consistency| = " << sci(max_cons)
            << ", max residual = " << sci(max_res) << "\n";
  return 0;
}

int cmd_chars(const std::string& spec_path, const std::string& at) {
  const FourierFieldSpec spec = load_spec(spec_path);
  const auto [x, y] = parse_xy(at);
  const CharData cd = char_data(eval_jet(spec, x, y).point);
  std::cout << "# characteristic data at (" << g17(x) << ", " << g17(y) << ")\n";
  std::cout << "k,phi,kind,r,lambda\n";
  for (int k = 0; k < cd.angles.size(); ++k) {
    const char* kind = cd.kinds[k] == CriticalKind::Maximum   ? "max"
                       : cd.kinds[k] == CriticalKind::Minimum ? "min"
                                                              : "degenerate";
    std::cout << (k + 1) << "," << g17(cd.angles[k]) << "," << kind << ","
              << g17(cd.invariants[k]) << ","
              << (cd.speed_valid[k] ? g17(cd.speeds[k]) : std::string("vertical")) << "\n";
  }
  if (cd.value_collision) std::cout << "# note: coincident critical values\n";
  return 0;
}

int cmd_jacobian(const std::string& spec_path, int n_fallback, int count, std::uint64_t seed) {
  SampleOptions margins;
  const std::vector<FieldPoint> pts = gather_points(spec_path, n_fallback, count, seed, margins);
  std::cout << "# seed: " << seed << "\n";
  std::cout << "point,|detM|,rel_identity_gap,|det_fd|,fd_vs_modulus\n";
  double worst_gap = 0, worst_fd = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const JacobianIdentity ji = jacobian_complex(pts[i]);
    const double fd = jacobian_real(pts[i]);
    const double gap = std::abs(ji.det_m - ji.rhs) / std::abs(ji.det_m);
    const double factor = std::pow(2.0, pts[i].N - 1);
    const double fd_gap =
        std::abs(std::abs(fd) - factor * std::abs(ji.det_m)) / (factor * std::abs(ji.det_m));
    worst_gap = std::max(worst_gap, gap);
    worst_fd = std::max(worst_fd, fd_gap);
    std::cout << i << "," << sci(std::abs(ji.det_m)) << "," << sci(gap) << ","
              << sci(std::abs(fd)) << "," << sci(fd_gap) << "\n";
  }
  std::cout << "jacobian: worst identity gap " << sci(worst_gap) << ", worst FD gap "
            << sci(worst_fd) << (worst_gap <= 1e-8 ? " PASS" : " FAIL") << "\n";
  return 0;
}

int cmd_check_laws(const std::string& spec_path, int n_fallback, int count, std::uint64_t seed,
                   double eps_scale) {
  SampleOptions margins;
  margins.asymmetric = spec_path.empty();
  margins.min_angle_gap = 0.15;
  margins.min_value_gap = 0.05;
  margins.min_cos = 0.1;
  const std::vector<FieldPoint> pts = gather_points(spec_path, n_fallback, count, seed, margins);
  const int n = pts.front().N;

  std::vector<DensityPair> laws = explicit_laws(n);
  laws.push_back(power_law(2));
  laws.push_back(power_law(3));
  if (n == 2)
    for (auto& l : n2_laws()) laws.push_back(l);

  struct Row {
    std::string name;
    double analytic = 0, fd = 0;
  };
  std::vector<Row> rows(laws.size());
  std::vector<double> g_analytic(pts.size(), 0.0), g_fd(pts.size(), 0.0);
  std::vector<double> fake(pts.size(), 0.0);

  // per-point slots, aggregated afterwards in index order so the report is
  // byte-identical for any thread count
  std::vector<std::vector<double>> a_vals(laws.size(), std::vector<double>(pts.size()));
  std::vector<std::vector<double>> f_vals(laws.size(), std::vector<double>(pts.size()));
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    for (size_t l = 0; l < laws.size(); ++l) {
      a_vals[l][i] = validity_check(pts[i], laws[l], GradientMode::Analytic);
      f_vals[l][i] = validity_check(pts[i], laws[l], GradientMode::FiniteDifference);
    }
    const CharData cd = char_data(pts[i]);
    for (const auto& g : g_densities(pts[i], eps_scale * min_adjacent_gap(cd))) {
      g_analytic[i] = std::max(g_analytic[i], validity_check(pts[i], g, GradientMode::Analytic));
      g_fd[i] = std::max(g_fd[i], validity_check(pts[i], g, GradientMode::FiniteDifference));
    }
    fake[i] = validity_check(pts[i], fake_law(), GradientMode::Analytic);
  });
  for (size_t l = 0; l < laws.size(); ++l) {
    rows[l].name = laws[l].name;
    for (size_t i = 0; i < pts.size(); ++i) {
      rows[l].analytic = std::max(rows[l].analytic, a_vals[l][i]);
      rows[l].fd = std::max(rows[l].fd, f_vals[l][i]);
    }
  }

  std::cout << "# seed: " << seed << ", points: " << pts.size() << ", N=" << n
            << ", eps-scale: " << g17(eps_scale) << "\n";
  std::cout << "law,analytic_max,fd_max,verdict\n";
  bool all_pass = true;
  auto emit = [&](const std::string& name, double a, double f) {
    const bool pass = a <= 1e-10 && f <= 1e-6;
    all_pass &= pass;
    std::cout << name << "," << sci(a) << "," << sci(f) << "," << (pass ? "PASS" : "FAIL") << "\n";
  };
  for (const Row& r : rows) emit(r.name, r.analytic, r.fd);
  double ga = 0, gf = 0, fk = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i) {
    ga = std::max(ga, g_analytic[i]);
    gf = std::max(gf, g_fd[i]);
    fk = std::min(fk, fake[i]);
  }
  emit("G_k", ga, gf);
  const bool control_ok = fk >= 1e-3;
  all_pass &= control_ok;
  std::cout << "fake:L,0," << sci(fk) << ",-," << (control_ok ? "CONTROL-OK" : "CONTROL-FAIL")
            << "\n";
  std::cout << "check-laws: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return 0;
}

int cmd_glaws(const std::string& spec_path, const std::string& at, double eps_scale) {
  const FourierFieldSpec spec = load_spec(spec_path);
  const auto [x, y] = parse_xy(at);
  const FieldPoint p = eval_jet(spec, x, y).point;
  const CharData cd = char_data(p);
  const double gap = min_adjacent_gap(cd);
  const double eps = eps_scale * gap;

  const LevelPoints lp = level_points(p, eps);
  const auto gs = g_densities(p, eps);
  std::cout << "# level points at (" << g17(x) << ", " << g17(y) << "), eps = " << g17(eps)
            << "\n";
  std::cout << "k,phi_crit,phi_level,target,G\n";
  for (int k = 0; k < lp.angles.size(); ++k)
    std::cout << (k + 1) << "," << g17(cd.angles[k]) << "," << g17(lp.angles[k]) << ","
              << g17(lp.targets[k]) << "," << g17(gs[k].P(p)) << "\n";

  const GIndependence gi = g_independence(p, eps);
  std::cout << "independence determinant: " << g17(gi.det_fd) << "\n";
  std::cout << "eps_scale,|bracket-detM|/|detM|\n";
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double last = 0;
  for (double s : {1e-2, 1e-3, 1e-4}) {
    const GIndependence g = g_independence(p, s * gap);
    last = std::abs(g.det_bracket - g.det_m) / std::abs(g.det_m);
    monotone &= last < prev;
    prev = last;
    std::cout << g17(s) << "," << sci(last) << "\n";
  }
  std::cout << "glaws: bracket converges "
            << ((monotone && last <= 1e-3) ? "PASS" : "FAIL") << "\n";
  return 0;
}

int cmd_check_semiham(const std::string& spec_path, int count, std::uint64_t seed) {
  SampleOptions margins;
  margins.asymmetric = spec_path.empty();
  margins.min_angle_gap = 0.2;
  margins.min_cos = 0.15;
  margins.min_value_gap = 0.05;
  margins.min_speed_gap = 0.1;
  const std::vector<FieldPoint> pts = gather_points(spec_path, 2, count, seed, margins);

  struct ChartRow {
    double worst_ratio = 0, floor_over_scale = 0, lame_gap = 0;
    bool pass = false;
  };
  std::vector<ChartRow> rows(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int c) {
    const DiagonalChart chart(pts[c]);
    const DiagonalModel m = chart.model();
    const double R = chart.radius();
    double chart_scale = 0, max_floor = 0, ratio = 0;
    for (int k = 0; k < m.n; ++k)
      for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j) {
          if (i == k || j == k) continue;
          const SemihamResidual r =
              semiham_residual(m, chart.base_r(), i, j, k, 0.1 * R, 0.2 * R);
          chart_scale = std::max(chart_scale, r.scale);
          max_floor = std::max(max_floor, r.floor);
          ratio = std::max(ratio, r.value / r.floor);
        }
    const double d = 0.35 * R, h = 0.05 * R;
    Eigen::VectorXd ra = chart.base_r(), rb = chart.base_r(), r1 = chart.base_r();
    ra[1] += d;
    rb[2] += d;
    r1[1] += d;
    r1[2] += d;
    const double ha = lame_integrate(m, {chart.base_r(), ra, r1}, 0, h);
    const double hb = lame_integrate(m, {chart.base_r(), rb, r1}, 0, h);
    rows[c].worst_ratio = ratio;
    rows[c].floor_over_scale = max_floor / chart_scale;
    rows[c].lame_gap = std::abs(ha - hb) / std::abs(hb);
    rows[c].pass = ratio <= 1.0 && rows[c].floor_over_scale <= 1e-4 && rows[c].lame_gap <= 1e-3;
  });

  std::cout << "# seed: " << seed << ", charts: " << pts.size() << "\n";
  std::cout << "chart,residual_over_floor,floor_over_scale,lame_two_path,verdict\n";
  bool all = true;
  for (size_t c = 0; c < rows.size(); ++c) {
    all &= rows[c].pass;
    std::cout << c << "," << sci(rows[c].worst_ratio) << "," << sci(rows[c].floor_over_scale)
              << "," << sci(rows[c].lame_gap) << "," << (rows[c].pass ? "PASS" : "FAIL") << "\n";
  }
  std::cout << "check-semiham: " << (all ? "PASS" : "FAIL") << "\n";
  return 0;
}

int cmd_egorov(const std::string& spec_path, int count, std::uint64_t seed) {
  SampleOptions margins;
  margins.asymmetric = spec_path.empty();
  const std::vector<FieldPoint> pts = gather_points(spec_path, 2, count, seed, margins);
  const PtPatternReport rep = pt_pattern_check(pts);
  std::cout << "# seed: " << seed << ", points: " << pts.size() << "\n";
  std::cout << "first law residual:  " << sci(rep.max_residual_eq10) << "\n";
  std::cout << "second law residual: " << sci(rep.max_residual_eq11) << "\n";
  std::cout << "shared density gap:  " << sci(rep.shared_identity) << "\n";
  std::cout << "perturbed control:   " << sci(rep.control_residual) << "\n";
  std::cout << rep.conclusion << "\n";
  return rep.pass ? 0 : 2;
}

int cmd_simulate(const std::string& spec_path, const std::string& omega_str, double x0, double y0,
                 double phi0, double total_time, double dt, const std::string& out_path) {
  const FourierFieldSpec spec = load_spec(spec_path);
  const FlowField field = make_flow(spec, parse_omega(omega_str));
  const Trajectory traj = integrate({x0, y0, phi0}, field, total_time, dt);
  const DriftResult d = drift(traj);
  if (!out_path.empty()) save_trajectory_csv(traj, out_path);
  std::cout << "simulate: " << traj.samples() << " samples, maxDrift = " << g17(d.max_drift)
            << "\n";
  return 0;
}

int cmd_geodesic_matrix(const std::string& coeffs) {
  std::vector<double> a;
  std::stringstream ss(coeffs);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      a.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ValidationError("cannot parse coefficient '" + tok + "'");
    }
  }
  if (a.size() < 3) throw ValidationError("need at least a_0,a_1,a_2");
  if (a.back() != 1.0) throw ValidationError("the leading coefficient a_n must be 1");
  const GeodesicMatrixResult r =
      geodesic_matrix(Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()));
  std::cout << "matrix:\n";
  for (int i = 0; i < r.matrix.rows(); ++i) {
    for (int j = 0; j < r.matrix.cols(); ++j)
      std::cout << (j ? " " : "") << g17(r.matrix(i, j));
    std::cout << "\n";
  }
  std::cout << "eigenvalues:\n";
  for (int i = 0; i < r.eigenvalues.size(); ++i)
    std::cout << g17(r.eigenvalues[i].real()) << (r.eigenvalues[i].imag() < 0 ? " - " : " + ")
              << g17(std::abs(r.eigenvalues[i].imag())) << "i\n";
  const char* cls = r.classification == EigenClassification::Hyperbolic   ? "Hyperbolic"
                    : r.classification == EigenClassification::Elliptic   ? "Elliptic"
                                                                          : "Borderline";
  std::cout << "classification: " << cls << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magflow: diagnostics for polynomial-in-momenta integrals of magnetic "
               "geodesic flows on the 2-torus"};
  app.require_subcommand(1);

  std::string spec_path, grid_path, at = "0,0", out_path, omega_str = "derive";
  std::string coeffs;
  int points = 20, nx = 32, ny = 32, n_fallback = 2;
  std::uint64_t seed = 1;
  double eps_scale = 1e-3, x0 = 0, y0 = 0, phi0 = 0.3, total_time = 50.0, dt = 1e-3;

  auto* validate = app.add_subcommand("validate", "lint a MAGFLOW-SPEC or MAGFLOW-GRID file");
  validate->add_option("--spec", spec_path);
  validate->add_option("--grid", grid_path);

  auto* derive = app.add_subcommand("derive", "magnetic field and system residuals over the torus");
  derive->add_option("--spec", spec_path);
  derive->add_option("--grid", grid_path);
  derive->add_option("--nx", nx);
  derive->add_option("--ny", ny);
  derive->add_option("--out", out_path);

  auto* chars_cmd = app.add_subcommand("chars", "critical angles, invariants and speeds at a point");
  chars_cmd->add_option("--spec", spec_path)->required();
  chars_cmd->add_option("--at", at)->required();

  auto* jac = app.add_subcommand("jacobian", "determinant identity report at sampled points");
  jac->add_option("--spec", spec_path);
  jac->add_option("--n", n_fallback);
  jac->add_option("--points", points);
  jac->add_option("--seed", seed);

  // The level-law eps sits well inside the regular regime here: the
  // finite-difference gradient path degrades near the critical points, while
  // the independence sweep in glaws wants the smaller default.
  double laws_eps_scale = 1e-2;
  auto* laws = app.add_subcommand("check-laws", "validity matrix of the conservation-law catalog");
  laws->add_option("--spec", spec_path);
  laws->add_option("--n", n_fallback);
  laws->add_option("--points", points);
  laws->add_option("--seed", seed);
  laws->add_option("--eps-scale", laws_eps_scale);

  auto* glaws = app.add_subcommand("glaws", "level points, G laws and the independence sweep");
  glaws->add_option("--spec", spec_path)->required();
  glaws->add_option("--at", at)->required();
  glaws->add_option("--eps-scale", eps_scale);

  auto* semiham = app.add_subcommand("check-semiham", "symmetry residuals and Lame compatibility");
  semiham->add_option("--spec", spec_path);
  semiham->add_option("--points", points);
  semiham->add_option("--seed", seed);

  auto* egorov = app.add_subcommand("egorov", "gradient-pair structure report for N = 2");
  egorov->add_option("--spec", spec_path);
  egorov->add_option("--points", points);
  egorov->add_option("--seed", seed);

  auto* sim = app.add_subcommand("simulate", "integrate the flow and measure integral drift");
  sim->add_option("--spec", spec_path)->required();
  sim->add_option("--omega", omega_str);
  sim->add_option("--x0", x0);
  sim->add_option("--y0", y0);
  sim->add_option("--phi0", phi0);
  sim->add_option("--T", total_time);
  sim->add_option("--dt", dt);
  sim->add_option("--out", out_path);

  auto* geo = app.add_subcommand("geodesic-matrix", "coefficient matrix of the geodesic case");
  geo->add_option("--coeffs", coeffs)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return cmd_validate(spec_path, grid_path);
    if (derive->parsed()) return cmd_derive(spec_path, grid_path, nx, ny, out_path);
    if (chars_cmd->parsed()) return cmd_chars(spec_path, at);
    if (jac->parsed()) return cmd_jacobian(spec_path, n_fallback, points, seed);
    if (laws->parsed()) return cmd_check_laws(spec_path, n_fallback, points, seed, laws_eps_scale);
    if (glaws->parsed()) return cmd_glaws(spec_path, at, eps_scale);
    if (semiham->parsed()) return cmd_check_semiham(spec_path, points, seed);
    if (egorov->parsed()) return cmd_egorov(spec_path, points, seed);
    if (sim->parsed())
      return cmd_simulate(spec_path, omega_str, x0, y0, phi0, total_time, dt, out_path);
    if (geo->parsed()) return cmd_geodesic_matrix(coeffs);
  } catch (const Error& e) {
    std::cerr << "magflow: " << e.what() << "\n";
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "magflow: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
