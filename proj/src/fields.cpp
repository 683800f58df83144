#include "magflow/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace magflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FieldPoint::FieldPoint(int n, double lam, Eigen::VectorXd u_, Eigen::VectorXd v_)
    : N(n), lambda(lam), u(std::move(u_)), v(std::move(v_)) {
  if (N < 1) throw ValidationError("FieldPoint degree must be >= 1");
  if (!(lambda > 0)) throw ValidationError("FieldPoint requires Lambda > 0");
  if (u.size() != N || v.size() != N)
    throw ValidationError("FieldPoint needs u_0..u_{N-1} and v_0..v_{N-1}");
  if (v[0] != 0.0) throw ValidationError("FieldPoint requires v_0 = 0");
}

Eigen::VectorXd FieldPoint::as_vector() const {
  Eigen::VectorXd c(2 * N);
  c[0] = lambda;
  c[1] = u[0];
  for (int k = 1; k < N; ++k) {
    c[2 * k] = u[k];
    c[2 * k + 1] = v[k];
  }
  return c;
}

FieldPoint FieldPoint::from_vector(int n, const Eigen::VectorXd& c) {
  if (c.size() != 2 * n) throw ValidationError("component vector must have length 2N");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  u[0] = c[1];
  for (int k = 1; k < n; ++k) {
    u[k] = c[2 * k];
    v[k] = c[2 * k + 1];
  }
  return FieldPoint(n, c[0], std::move(u), std::move(v));
}

double lambda_pow_half(double lambda, int p) {
  const bool odd = p % 2 != 0;
  int whole = p / 2;  // truncates toward zero
  double r = 1.0;
  double base = lambda;
  int e = std::abs(whole);
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  if (whole < 0) r = 1.0 / r;
  if (odd) r *= (p > 0) ? std::sqrt(lambda) : 1.0 / std::sqrt(lambda);
  return r;
}

Complex coeff_a(const FieldPoint& p, int k) {
  const int a = std::abs(k);
  if (a > p.N) return {0.0, 0.0};
  Complex val;
  if (a == p.N)
    val = Complex(lambda_pow_half(p.lambda, p.N), 0.0);
  else
    val = Complex(p.u[a], p.v[a]);
  return k >= 0 ? val : std::conj(val);
}

TrigPoly trig_poly(const FieldPoint& p) {
  Eigen::VectorXcd c(p.N + 1);
  for (int k = 0; k <= p.N; ++k) c[k] = coeff_a(p, k);
  return TrigPoly(p.N, std::move(c));
}

Jet::Jet(FieldPoint p, Eigen::VectorXd dx_, Eigen::VectorXd dy_)
    : point(std::move(p)), dx(std::move(dx_)), dy(std::move(dy_)) {
  if (dx.size() != point.components() || dy.size() != point.components())
    throw ValidationError("Jet derivative vectors must have length 2N");
}

Complex Jet::da(int k, int axis) const {
  const Eigen::VectorXd& d = axis == 0 ? dx : dy;
  const int a = std::abs(k);
  const int n = point.N;
  if (a > n) return {0.0, 0.0};
  Complex val;
  if (a == n) {
    // d(Lambda^{N/2}) = (N/2) Lambda^{N/2-1} dLambda
    val = Complex(0.5 * n * lambda_pow_half(point.lambda, n - 2) * d[0], 0.0);
  } else if (a == 0) {
    val = Complex(d[1], 0.0);
  } else {
    val = Complex(d[2 * a], d[2 * a + 1]);
  }
  return k >= 0 ? val : std::conj(val);
}

FourierFieldSpec::FourierFieldSpec(int n, double lx, double ly)
    : N(n), Lx(lx), Ly(ly), u_modes(n), v_modes(n) {}

namespace {

void validate_mode_list(const std::vector<FourierMode>& modes, const std::string& name) {
  for (size_t i = 0; i < modes.size(); ++i) {
    for (size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i].m == modes[j].m && modes[i].n == modes[j].n)
        throw ValidationError("duplicate mode (" + std::to_string(modes[i].m) + "," +
                              std::to_string(modes[i].n) + ") in field " + name);
    if (modes[i].m == 0 && modes[i].n == 0) {
      if (std::abs(modes[i].c.imag()) > 1e-12 * (1.0 + std::abs(modes[i].c)))
        throw ValidationError("constant mode of field " + name + " must be real");
      continue;
    }
    bool partner = false;
    for (size_t j = 0; j < modes.size(); ++j) {
      if (modes[j].m == -modes[i].m && modes[j].n == -modes[i].n) {
        if (std::abs(modes[j].c - std::conj(modes[i].c)) > 1e-12 * (1.0 + std::abs(modes[i].c)))
          throw ValidationError("mode (" + std::to_string(modes[i].m) + "," +
                                std::to_string(modes[i].n) + ") of field " + name +
                                " breaks Hermitian symmetry");
        partner = true;
        break;
      }
    }
    if (!partner)
      throw ValidationError("mode (" + std::to_string(modes[i].m) + "," +
                            std::to_string(modes[i].n) + ") of field " + name +
                            " lacks its conjugate partner");
  }
}

struct ScalarJet {
  double val = 0, dx = 0, dy = 0;
};

ScalarJet eval_modes(const std::vector<FourierMode>& modes, double x, double y, double lx,
                     double ly) {
  Complex s{}, sx{}, sy{};
  for (const auto& mode : modes) {
    const Complex e = std::polar(1.0, kTwoPi * (mode.m * x / lx + mode.n * y / ly));
    const Complex term = mode.c * e;
    s += term;
    sx += Complex(0.0, kTwoPi * mode.m / lx) * term;
    sy += Complex(0.0, kTwoPi * mode.n / ly) * term;
  }
  return {s.real(), sx.real(), sy.real()};
}

}  // namespace

void FourierFieldSpec::validate() const {
  if (N < 1) throw ValidationError("spec degree must be >= 1");
  if (!(Lx > 0) || !(Ly > 0)) throw ValidationError("spec periods must be positive");
  if (static_cast<int>(u_modes.size()) != N || static_cast<int>(v_modes.size()) != N)
    throw ValidationError("spec needs mode lists for u_0..u_{N-1} and v_1..v_{N-1}");
  if (!v_modes[0].empty()) throw ValidationError("v_0 is identically zero and takes no modes");
  validate_mode_list(log_lambda, "LOGLAMBDA");
  for (int k = 0; k < N; ++k) {
    validate_mode_list(u_modes[k], "U" + std::to_string(k));
    if (k > 0) validate_mode_list(v_modes[k], "V" + std::to_string(k));
  }
}

Jet eval_jet(const FourierFieldSpec& spec, double x, double y) {
  const int n = spec.N;
  Eigen::VectorXd c(2 * n), dx(2 * n), dy(2 * n);

  const ScalarJet s = eval_modes(spec.log_lambda, x, y, spec.Lx, spec.Ly);
  const double lambda = std::exp(s.val);
  c[0] = lambda;
  dx[0] = lambda * s.dx;
  dy[0] = lambda * s.dy;

  for (int k = 0; k < n; ++k) {
    const ScalarJet uj = eval_modes(spec.u_modes[k], x, y, spec.Lx, spec.Ly);
    const int iu = k == 0 ? 1 : 2 * k;
    c[iu] = uj.val;
    dx[iu] = uj.dx;
    dy[iu] = uj.dy;
    if (k > 0) {
      const ScalarJet vj = eval_modes(spec.v_modes[k], x, y, spec.Lx, spec.Ly);
      c[2 * k + 1] = vj.val;
      dx[2 * k + 1] = vj.dx;
      dy[2 * k + 1] = vj.dy;
    }
  }
  return Jet(FieldPoint::from_vector(n, c), std::move(dx), std::move(dy));
}

FieldPoint FieldGrid::at(int i, int j) const {
  return FieldPoint::from_vector(N, data.row(site(i, j)).transpose());
}

void FieldGrid::validate() const {
  if (N < 1) throw ValidationError("grid degree must be >= 1");
  if (NX < 8 || NY < 8) throw GridTooSmall("grid needs NX, NY >= 8");
  if (!(Lx > 0) || !(Ly > 0)) throw ValidationError("grid periods must be positive");
  if (data.rows() != static_cast<long>(NX) * NY || data.cols() != 2 * N)
    throw ValidationError("grid data must be (NX*NY) x 2N");
  for (int j = 0; j < NY; ++j)
    for (int i = 0; i < NX; ++i)
      if (!(data(site(i, j), 0) > 0))
        throw ValidationError("Lambda <= 0 at site i=" + std::to_string(i) +
                              " j=" + std::to_string(j));
}

FieldGrid sample_grid(const FourierFieldSpec& spec, int nx, int ny) {
  spec.validate();
  FieldGrid g;
  g.N = spec.N;
  g.NX = nx;
  g.NY = ny;
  g.Lx = spec.Lx;
  g.Ly = spec.Ly;
  g.data.resize(static_cast<long>(nx) * ny, 2 * spec.N);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Jet jet = eval_jet(spec, i * spec.Lx / nx, j * spec.Ly / ny);
      g.data.row(g.site(i, j)) = jet.point.as_vector().transpose();
    }
  g.validate();
  return g;
}

Jet grid_jet(const FieldGrid& grid, int i, int j) {
  if (grid.NX < 8 || grid.NY < 8) throw GridTooSmall("grid_jet needs NX, NY >= 8");
  const int nx = grid.NX, ny = grid.NY;
  const double hx = grid.Lx / nx, hy = grid.Ly / ny;
  const int cols = 2 * grid.N;
  Eigen::VectorXd dx(cols), dy(cols);
  auto wrap = [](int a, int m) { return ((a % m) + m) % m; };
  for (int c = 0; c < cols; ++c) {
    const double xp2 = grid.data(grid.site(wrap(i + 2, nx), j), c);
    const double xp1 = grid.data(grid.site(wrap(i + 1, nx), j), c);
    const double xm1 = grid.data(grid.site(wrap(i - 1, nx), j), c);
    const double xm2 = grid.data(grid.site(wrap(i - 2, nx), j), c);
    dx[c] = (-xp2 + 8.0 * xp1 - 8.0 * xm1 + xm2) / (12.0 * hx);
    const double yp2 = grid.data(grid.site(i, wrap(j + 2, ny)), c);
    const double yp1 = grid.data(grid.site(i, wrap(j + 1, ny)), c);
    const double ym1 = grid.data(grid.site(i, wrap(j - 1, ny)), c);
    const double ym2 = grid.data(grid.site(i, wrap(j - 2, ny)), c);
    dy[c] = (-yp2 + 8.0 * yp1 - 8.0 * ym1 + ym2) / (12.0 * hy);
  }
  return Jet(grid.at(i, j), std::move(dx), std::move(dy));
}

Eigen::VectorXd grid_deriv_x(const Eigen::VectorXd& field, int nx, int ny, double lx) {
  if (field.size() != static_cast<long>(nx) * ny)
    throw GridMismatch("grid_deriv_x: field size does not match grid");
  const double h = lx / nx;
  Eigen::VectorXd out(field.size());
  auto wrap = [nx](int a) { return ((a % nx) + nx) % nx; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out[j * nx + i] = (-field[j * nx + wrap(i + 2)] + 8.0 * field[j * nx + wrap(i + 1)] -
                         8.0 * field[j * nx + wrap(i - 1)] + field[j * nx + wrap(i - 2)]) /
                        (12.0 * h);
  return out;
}

Eigen::VectorXd grid_deriv_y(const Eigen::VectorXd& field, int nx, int ny, double ly) {
  if (field.size() != static_cast<long>(nx) * ny)
    throw GridMismatch("grid_deriv_y: field size does not match grid");
  const double h = ly / ny;
  Eigen::VectorXd out(field.size());
  auto wrap = [ny](int a) { return ((a % ny) + ny) % ny; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out[j * nx + i] = (-field[wrap(j + 2) * nx + i] + 8.0 * field[wrap(j + 1) * nx + i] -
                         8.0 * field[wrap(j - 1) * nx + i] + field[wrap(j - 2) * nx + i]) /
                        (12.0 * h);
  return out;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Reads the next non-comment, non-blank line; returns false at EOF.
bool next_line(std::istream& in, std::string& line, long& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  return false;
}

}  // namespace

void save_grid(const FieldGrid& grid, const std::string& path) {
  grid.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "MAGFLOW-GRID v1\n";
  out << "N " << grid.N << " NX " << grid.NX << " NY " << grid.NY << " LX " << fmt17(grid.Lx)
      << " LY " << fmt17(grid.Ly) << "\n";
  for (int j = 0; j < grid.NY; ++j)
    for (int i = 0; i < grid.NX; ++i) {
      const auto row = grid.data.row(grid.site(i, j));
      for (int c = 0; c < row.size(); ++c) out << (c ? " " : "") << fmt17(row[c]);
      out << "\n";
    }
  if (!out) throw IoError("write failed for " + path);
}

FieldGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  long lineno = 0;
  std::string line;
  if (!next_line(in, line, lineno) || line != "MAGFLOW-GRID v1")
    throw ParseError("expected header 'MAGFLOW-GRID v1'", lineno);

  FieldGrid g;
  if (!next_line(in, line, lineno)) throw ParseError("missing grid dimensions", lineno);
  {
    std::istringstream is(line);
    std::string kn, knx, kny, klx, kly;
    if (!(is >> kn >> g.N >> knx >> g.NX >> kny >> g.NY >> klx >> g.Lx >> kly >> g.Ly) ||
        kn != "N" || knx != "NX" || kny != "NY" || klx != "LX" || kly != "LY")
      throw ParseError("malformed dimension line, expected 'N <n> NX <nx> NY <ny> LX <lx> LY <ly>'",
                       lineno);
  }
  if (g.N < 1) throw ParseError("grid degree must be >= 1", lineno);
  if (g.NX < 8 || g.NY < 8) throw GridTooSmall("grid needs NX, NY >= 8");
  g.data.resize(static_cast<long>(g.NX) * g.NY, 2 * g.N);

  for (long r = 0; r < static_cast<long>(g.NX) * g.NY; ++r) {
    if (!next_line(in, line, lineno))
      throw ParseError("unexpected end of file, expected " +
                           std::to_string(static_cast<long>(g.NX) * g.NY) + " data lines",
                       lineno);
    std::istringstream is(line);
    for (int c = 0; c < 2 * g.N; ++c)
      if (!(is >> g.data(r, c)))
        throw ParseError("expected " + std::to_string(2 * g.N) + " values per data line", lineno);
    double extra;
    if (is >> extra) throw ParseError("too many values on data line", lineno);
  }
  g.validate();
  return g;
}

void save_spec(const FourierFieldSpec& spec, const std::string& path) {
  spec.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "MAGFLOW-SPEC v1\n";
  out << "N " << spec.N << "\n";
  out << "PERIOD " << fmt17(spec.Lx) << " " << fmt17(spec.Ly) << "\n";
  auto dump = [&out](const std::string& name, const std::vector<FourierMode>& modes) {
    if (modes.empty()) return;
    out << "FIELD " << name << "\n";
    for (const auto& mode : modes)
      out << mode.m << " " << mode.n << " " << fmt17(mode.c.real()) << " " << fmt17(mode.c.imag())
          << "\n";
  };
  dump("LOGLAMBDA", spec.log_lambda);
  for (int k = 0; k < spec.N; ++k) {
    dump("U" + std::to_string(k), spec.u_modes[k]);
    if (k > 0) dump("V" + std::to_string(k), spec.v_modes[k]);
  }
  out << "END\n";
  if (!out) throw IoError("write failed for " + path);
}

FourierFieldSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  long lineno = 0;
  std::string line;
  if (!next_line(in, line, lineno) || line != "MAGFLOW-SPEC v1")
    throw ParseError("expected header 'MAGFLOW-SPEC v1'", lineno);

  int n = 0;
  if (!next_line(in, line, lineno)) throw ParseError("missing 'N <n>' line", lineno);
  {
    std::istringstream is(line);
    std::string key;
    if (!(is >> key >> n) || key != "N" || n < 1) throw ParseError("expected 'N <n>'", lineno);
  }
  double lx = 0, ly = 0;
  if (!next_line(in, line, lineno)) throw ParseError("missing 'PERIOD <lx> <ly>' line", lineno);
  {
    std::istringstream is(line);
    std::string key;
    if (!(is >> key >> lx >> ly) || key != "PERIOD")
      throw ParseError("expected 'PERIOD <lx> <ly>'", lineno);
  }
  FourierFieldSpec spec(n, lx, ly);

  std::vector<FourierMode>* current = nullptr;
  bool ended = false;
  while (next_line(in, line, lineno)) {
    std::istringstream is(line);
    std::string head;
    is >> head;
    if (head == "END") {
      ended = true;
      break;
    }
    if (head == "FIELD") {
      std::string name;
      if (!(is >> name)) throw ParseError("FIELD needs a name", lineno);
      if (name == "LOGLAMBDA") {
        current = &spec.log_lambda;
      } else if (name.size() >= 2 && (name[0] == 'U' || name[0] == 'V')) {
        int k = -1;
        try {
          k = std::stoi(name.substr(1));
        } catch (...) {
          throw ParseError("unknown field name '" + name + "'", lineno);
        }
        if (k < 0 || k >= n || (name[0] == 'V' && k == 0))
          throw ParseError("field '" + name + "' out of range for N=" + std::to_string(n), lineno);
        current = name[0] == 'U' ? &spec.u_modes[k] : &spec.v_modes[k];
      } else {
        throw ParseError("unknown field name '" + name + "'", lineno);
      }
      if (!current->empty()) throw ParseError("duplicate FIELD block '" + name + "'", lineno);
      continue;
    }
    if (current == nullptr) throw ParseError("mode line before any FIELD block", lineno);
    FourierMode mode;
    double re = 0, im = 0;
    std::istringstream ms(line);
    if (!(ms >> mode.m >> mode.n >> re >> im))
      throw ParseError("expected mode line 'm n re im'", lineno);
    mode.c = Complex(re, im);
    current->push_back(mode);
  }
  if (!ended) throw ParseError("missing END terminator", lineno);
  spec.validate();
  return spec;
}

}  // namespace magflow
