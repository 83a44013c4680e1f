#include "mplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mplan {

namespace {
constexpr double kMinSpacing = 1e-6;

// Gaussian elimination with partial pivoting for the small boundary systems.
template <int N>
std::array<double, N> solve_linear(std::array<std::array<double, N>, N> a,
                                   std::array<double, N> b) {
  for (int col = 0; col < N; ++col) {
    int pivot = col;
    for (int r = col + 1; r < N; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, N> x{};
  for (int r = N - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < N; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}
}  // namespace

double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

ReferencePath build_reference_path(const std::vector<Vec2>& pts) {
  if (pts.size() < 2) throw TooFewPoints("reference path needs at least 2 points");

  ReferencePath path;
  path.points_ = pts;
  const int n = static_cast<int>(pts.size());

  path.cum_arclength_.resize(n, 0.0);
  path.seg_headings_.resize(n - 1, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const Vec2 d = pts[i + 1] - pts[i];
    const double len = d.norm();
    if (len <= kMinSpacing) {
      throw DuplicatePoint("consecutive points " + std::to_string(i) + "," +
                           std::to_string(i + 1) + " closer than 1e-6 m");
    }
    path.cum_arclength_[i + 1] = path.cum_arclength_[i] + len;
    path.seg_headings_[i] = std::atan2(d.y, d.x);
  }

  path.headings_.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    const Vec2 d = pts[hi] - pts[lo];
    path.headings_[i] = std::atan2(d.y, d.x);
  }

  path.curvatures_.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 1);
    const int hi = std::min(n - 1, i + 1);
    const double ds = path.cum_arclength_[hi] - path.cum_arclength_[lo];
    if (hi > lo && ds > kMinSpacing) {
      path.curvatures_[i] = normalize_angle(path.headings_[hi] - path.headings_[lo]) / ds;
    }
  }
  return path;
}

int ReferencePath::segment_for_s(double s) const {
  const auto it = std::upper_bound(cum_arclength_.begin(), cum_arclength_.end(), s);
  int i = static_cast<int>(it - cum_arclength_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(points_.size()) - 2);
  // A joint belongs to the lower segment, matching the projection tie-break.
  if (i > 0 && s == cum_arclength_[i]) --i;
  return i;
}

Vec2 ReferencePath::position_at(double s) const {
  const int i = segment_for_s(s);
  const double seg_len = cum_arclength_[i + 1] - cum_arclength_[i];
  const double t = (s - cum_arclength_[i]) / seg_len;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

double ReferencePath::heading_at(double s) const { return seg_headings_[segment_for_s(s)]; }

double ReferencePath::curvature_at(double s) const {
  const int i = segment_for_s(s);
  const double seg_len = cum_arclength_[i + 1] - cum_arclength_[i];
  const double t = (s - cum_arclength_[i]) / seg_len;
  return curvatures_[i] + (curvatures_[i + 1] - curvatures_[i]) * t;
}

ReferencePath::Projection ReferencePath::project(const Vec2& p) const {
  if (points_.size() < 2) throw GeometryError("reference path not initialized");
  const int nseg = static_cast<int>(points_.size()) - 1;
  double best_dist = std::numeric_limits<double>::infinity();
  int best_i = 0;
  double best_t = 0.0;

  for (int i = 0; i < nseg; ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double len2 = d.dot(d);
    const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    const Vec2 foot = a + d * t;
    const double dist = (p - foot).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best_i = i;
      best_t = t;
    }
  }

  const Vec2 a = points_[best_i];
  const Vec2 d = points_[best_i + 1] - a;
  if (best_i == 0 && best_t == 0.0 && (p - a).dot(d) < 0.0) {
    throw OutOfPathExtent("projection falls before the path start");
  }
  if (best_i == nseg - 1 && best_t == 1.0 && (p - points_.back()).dot(d) > 0.0) {
    throw OutOfPathExtent("projection falls past the path end");
  }

  const double seg_len = cum_arclength_[best_i + 1] - cum_arclength_[best_i];
  Projection proj;
  proj.segment = best_i;
  proj.t = best_t;
  proj.s = cum_arclength_[best_i] + best_t * seg_len;
  const Vec2 foot = a + d * best_t;
  const double side = d.cross(p - foot);
  proj.lateral = (side >= 0.0 ? 1.0 : -1.0) * best_dist;
  return proj;
}

FrenetState cartesian_to_frenet(const ReferencePath& path, const CartesianState& state) {
  const auto proj = path.project({state.x, state.y});
  const double theta_r = path.segment_heading(proj.segment);
  const double dtheta = normalize_angle(state.theta - theta_r);
  if (std::fabs(dtheta) >= M_PI / 2.0) {
    throw OutOfPathExtent("heading misaligned with path by >= pi/2");
  }
  const double kappa_r = path.curvature_at(proj.s);
  const double one_minus = 1.0 - kappa_r * proj.lateral;
  if (std::fabs(one_minus) < 1e-6) {
    throw OutOfPathExtent("state at the path's center of curvature");
  }

  FrenetState fs;
  fs.s = proj.s;
  fs.l = proj.lateral;
  fs.s_d = state.v * std::cos(dtheta) / one_minus;
  fs.l_d = state.v * std::sin(dtheta);
  fs.s_dd = state.a * std::cos(dtheta) / one_minus;
  fs.l_dd = state.a * std::sin(dtheta);
  return fs;
}

CartesianChannels frenet_to_cartesian(const ReferencePath& path, const FrenetState& fs) {
  if (fs.s < -1e-9 || fs.s > path.length() + 1e-9) {
    throw OutOfPathExtent("s outside the path extent");
  }
  const double s = std::clamp(fs.s, 0.0, path.length());
  const int seg = path.segment_for_s(s);
  const double theta_r = path.segment_heading(seg);
  const double kappa_r = path.curvature_at(s);
  const double one_minus = 1.0 - kappa_r * fs.l;

  const Vec2 tangent{std::cos(theta_r), std::sin(theta_r)};
  const Vec2 pos = path.position_at(s) + tangent.perp() * fs.l;

  const double t_c = fs.s_d * one_minus;  // tangential velocity component
  const double n_c = fs.l_d;              // normal velocity component
  const double speed = std::hypot(t_c, n_c);

  CartesianChannels out;
  out.x = pos.x;
  out.y = pos.y;
  out.theta = speed < 1e-12 ? theta_r : normalize_angle(theta_r + std::atan2(n_c, t_c));
  out.v = speed;

  // Treat path curvature as locally constant when differentiating.
  const double t_c_dot = fs.s_dd * one_minus - kappa_r * fs.s_d * fs.l_d;
  if (speed > 1e-9) {
    out.a = (t_c * t_c_dot + n_c * fs.l_dd) / speed;
    const double cross =
        t_c * fs.l_dd + kappa_r * fs.s_d * (t_c * t_c + n_c * n_c) - n_c * t_c_dot;
    out.kappa = cross / (speed * speed * speed);
  } else {
    out.a = fs.s_dd;
    out.kappa = 0.0;
  }
  return out;
}

namespace {
double poly_eval(const double* c, int n, double t) {
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) acc = acc * t + c[i];
  return acc;
}
}  // namespace

double QuinticPoly::value(double t) const { return poly_eval(c.data(), 6, t); }
double QuinticPoly::d1(double t) const {
  const double d[5] = {c[1], 2 * c[2], 3 * c[3], 4 * c[4], 5 * c[5]};
  return poly_eval(d, 5, t);
}
double QuinticPoly::d2(double t) const {
  const double d[4] = {2 * c[2], 6 * c[3], 12 * c[4], 20 * c[5]};
  return poly_eval(d, 4, t);
}
double QuinticPoly::d3(double t) const {
  const double d[3] = {6 * c[3], 24 * c[4], 60 * c[5]};
  return poly_eval(d, 3, t);
}

double QuarticPoly::value(double t) const { return poly_eval(c.data(), 5, t); }
double QuarticPoly::d1(double t) const {
  const double d[4] = {c[1], 2 * c[2], 3 * c[3], 4 * c[4]};
  return poly_eval(d, 4, t);
}
double QuarticPoly::d2(double t) const {
  const double d[3] = {2 * c[2], 6 * c[3], 12 * c[4]};
  return poly_eval(d, 3, t);
}
double QuarticPoly::d3(double t) const { return 6 * c[3] + 24 * c[4] * t; }

QuinticPoly solve_quintic(double l0, double l_d0, double l_dd0, double lT, double l_dT,
                          double l_ddT, double T) {
  if (T <= 0.0) throw NonpositiveDuration("quintic duration must be > 0");
  QuinticPoly p;
  p.duration = T;
  p.c[0] = l0;
  p.c[1] = l_d0;
  p.c[2] = l_dd0 / 2.0;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const std::array<std::array<double, 3>, 3> a{{{T3, T4, T5},
                                                {3 * T2, 4 * T3, 5 * T4},
                                                {6 * T, 12 * T2, 20 * T3}}};
  const std::array<double, 3> b{lT - (p.c[0] + p.c[1] * T + p.c[2] * T2),
                                l_dT - (p.c[1] + 2 * p.c[2] * T),
                                l_ddT - 2 * p.c[2]};
  const auto x = solve_linear<3>(a, b);
  p.c[3] = x[0];
  p.c[4] = x[1];
  p.c[5] = x[2];
  return p;
}

QuarticPoly solve_quartic(double s0, double s_d0, double s_dd0, double s_dT, double s_ddT,
                          double T) {
  if (T <= 0.0) throw NonpositiveDuration("quartic duration must be > 0");
  QuarticPoly p;
  p.duration = T;
  p.c[0] = s0;
  p.c[1] = s_d0;
  p.c[2] = s_dd0 / 2.0;
  const double T2 = T * T, T3 = T2 * T;
  const std::array<std::array<double, 2>, 2> a{{{3 * T2, 4 * T3}, {6 * T, 12 * T2}}};
  const std::array<double, 2> b{s_dT - (p.c[1] + 2 * p.c[2] * T), s_ddT - 2 * p.c[2]};
  const auto x = solve_linear<2>(a, b);
  p.c[3] = x[0];
  p.c[4] = x[1];
  return p;
}

TrajectorySample make_sample(const ReferencePath& path, double t, double s, double s_d,
                             double s_dd, double s_ddd, double l, double l_d, double l_dd,
                             double l_ddd) {
  FrenetState fs;
  fs.s = s;
  fs.s_d = s_d;
  fs.s_dd = s_dd;
  fs.l = l;
  fs.l_d = l_d;
  fs.l_dd = l_dd;
  const auto ch = frenet_to_cartesian(path, fs);

  TrajectorySample sample;
  sample.t = t;
  sample.x = ch.x;
  sample.y = ch.y;
  sample.theta = ch.theta;
  sample.v = ch.v;
  sample.a = ch.a;
  sample.kappa = ch.kappa;
  sample.s = s;
  sample.s_d = s_d;
  sample.s_dd = s_dd;
  sample.s_ddd = s_ddd;
  sample.l = l;
  sample.l_d = l_d;
  sample.l_dd = l_dd;
  sample.l_ddd = l_ddd;
  return sample;
}

}  // namespace mplan
