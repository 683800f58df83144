#include "magflow/flow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>

namespace magflow {

namespace {

std::function<double(const Jet&)> omega_fn(OmegaMode mode) {
  switch (mode.kind) {
    case OmegaMode::Kind::Constant:
      return [w = mode.value](const Jet&) { return w; };
    case OmegaMode::Kind::ScaledDerive:
      return [f = mode.value](const Jet& j) { return f * omega(j).omega; };
    case OmegaMode::Kind::Derive:
    default:
      return [](const Jet& j) { return omega(j).omega; };
  }
}

}  // namespace

FlowField make_flow(const FourierFieldSpec& spec, OmegaMode mode) {
  spec.validate();
  FlowField f;
  f.Lx = spec.Lx;
  f.Ly = spec.Ly;
  f.jet_at = [spec](double x, double y) { return eval_jet(spec, x, y); };
  f.omega_at = omega_fn(mode);
  return f;
}

FlowField make_flow(std::function<Jet(double, double)> jets, OmegaMode mode, double lx,
                    double ly) {
  FlowField f;
  f.Lx = lx;
  f.Ly = ly;
  f.jet_at = std::move(jets);
  f.omega_at = omega_fn(mode);
  return f;
}

FlowField make_flow(const FieldGrid& grid, OmegaMode mode) {
  grid.validate();
  struct Tables {
    FieldGrid grid;
    std::vector<Eigen::VectorXd> dx, dy;  // per component
  };
  auto tab = std::make_shared<Tables>();
  tab->grid = grid;
  for (int c = 0; c < 2 * grid.N; ++c) {
    tab->dx.push_back(grid_deriv_x(grid.data.col(c), grid.NX, grid.NY, grid.Lx));
    tab->dy.push_back(grid_deriv_y(grid.data.col(c), grid.NX, grid.NY, grid.Ly));
  }

  FlowField f;
  f.Lx = grid.Lx;
  f.Ly = grid.Ly;
  f.jet_at = [tab](double x, double y) {
    const FieldGrid& g = tab->grid;
    const double hx = g.Lx / g.NX, hy = g.Ly / g.NY;
    double fx = x / hx, fy = y / hy;
    fx -= std::floor(fx / g.NX) * g.NX;
    fy -= std::floor(fy / g.NY) * g.NY;
    const int i0 = static_cast<int>(std::floor(fx)) % g.NX;
    const int j0 = static_cast<int>(std::floor(fy)) % g.NY;
    const double tx = fx - std::floor(fx), ty = fy - std::floor(fy);
    const int i1 = (i0 + 1) % g.NX, j1 = (j0 + 1) % g.NY;

    auto blend = [&](auto&& value) {
      return (1 - tx) * (1 - ty) * value(i0, j0) + tx * (1 - ty) * value(i1, j0) +
             (1 - tx) * ty * value(i0, j1) + tx * ty * value(i1, j1);
    };
    const int m = 2 * g.N;
    Eigen::VectorXd comps(m), dx(m), dy(m);
    for (int c = 0; c < m; ++c) {
      comps[c] = blend([&](int i, int j) { return g.data(g.site(i, j), c); });
      dx[c] = blend([&](int i, int j) { return tab->dx[c][g.site(i, j)]; });
      dy[c] = blend([&](int i, int j) { return tab->dy[c][g.site(i, j)]; });
    }
    if (!(comps[0] > 0)) throw BlowUp("interpolated Lambda lost positivity");
    return Jet(FieldPoint::from_vector(g.N, comps), std::move(dx), std::move(dy));
  };
  f.omega_at = omega_fn(mode);
  return f;
}

Eigen::Vector3d flow_rhs(const FlowState& state, const FlowField& field) {
  const Jet jet = field.jet_at(state.x, state.y);
  const double lam = jet.point.lambda;
  const double sq = std::sqrt(lam);
  const double c = std::cos(state.phi), s = std::sin(state.phi);
  const double w = field.omega_at(jet);
  return {c / sq, s / sq,
          jet.lambda_y() * c / (2.0 * lam * sq) - jet.lambda_x() * s / (2.0 * lam * sq) - w};
}

Trajectory integrate(const FlowState& start, const FlowField& field, double total_time,
                     double dt) {
  if (!(dt > 0) || total_time < dt) throw ValidationError("integrate requires dt > 0, T >= dt");
  const long steps = std::lround(total_time / dt);

  Trajectory traj;
  traj.dt = dt;
  traj.t.reserve(steps + 1);

  auto record = [&](double t, const FlowState& s) {
    traj.t.push_back(t);
    double wx = std::fmod(s.x, field.Lx);
    if (wx < 0) wx += field.Lx;
    double wy = std::fmod(s.y, field.Ly);
    if (wy < 0) wy += field.Ly;
    traj.x.push_back(wx);
    traj.y.push_back(wy);
    traj.phi.push_back(wrap_angle(s.phi));
    const Jet jet = field.jet_at(s.x, s.y);
    traj.F.push_back(eval(trig_poly(jet.point), s.phi));
  };

  FlowState s = start;
  record(0.0, s);
  for (long n = 1; n <= steps; ++n) {
    const Eigen::Vector3d k1 = flow_rhs(s, field);
    const FlowState s2{s.x + 0.5 * dt * k1[0], s.y + 0.5 * dt * k1[1], s.phi + 0.5 * dt * k1[2]};
    const Eigen::Vector3d k2 = flow_rhs(s2, field);
    const FlowState s3{s.x + 0.5 * dt * k2[0], s.y + 0.5 * dt * k2[1], s.phi + 0.5 * dt * k2[2]};
    const Eigen::Vector3d k3 = flow_rhs(s3, field);
    const FlowState s4{s.x + dt * k3[0], s.y + dt * k3[1], s.phi + dt * k3[2]};
    const Eigen::Vector3d k4 = flow_rhs(s4, field);
    s.x += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    s.y += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    s.phi += dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
    record(n * dt, s);
  }
  return traj;
}

DriftResult drift(const Trajectory& traj) {
  DriftResult out;
  const int n = traj.samples();
  out.series.resize(n);
  for (int i = 0; i < n; ++i) {
    out.series[i] = traj.F[i] - traj.F[0];
    out.max_drift = std::max(out.max_drift, std::abs(out.series[i]));
  }
  return out;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,x,y,phi,F\n";
  char buf[200];
  for (int i = 0; i < traj.samples(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.t[i], traj.x[i],
                  traj.y[i], traj.phi[i], traj.F[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace magflow
