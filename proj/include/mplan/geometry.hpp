#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  // 90 degree counter-clockwise rotation (left normal of a unit tangent).
  Vec2 perp() const { return {-y, x}; }

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooFewPoints : GeometryError {
  using GeometryError::GeometryError;
};
struct DuplicatePoint : GeometryError {
  using GeometryError::GeometryError;
};
struct OutOfPathExtent : GeometryError {
  using GeometryError::GeometryError;
};
struct NonpositiveDuration : GeometryError {
  using GeometryError::GeometryError;
};

struct CartesianState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, normalized to (-pi, pi]
  double v = 0.0;      // m/s, >= 0
  double a = 0.0;      // m/s^2, signed longitudinal acceleration
};

struct FrenetState {
  double s = 0.0;     // m along the reference path
  double s_d = 0.0;   // m/s
  double s_dd = 0.0;  // m/s^2
  double l = 0.0;     // m, positive left of the path tangent
  double l_d = 0.0;   // m/s
  double l_dd = 0.0;  // m/s^2
};

/// Piecewise-linear reference path with per-point arclength, heading and an
/// estimated curvature. The same piecewise frame is used by both conversion
/// directions so roundtrips close up to floating-point error.
class ReferencePath {
 public:
  ReferencePath() = default;

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& cum_arclength() const { return cum_arclength_; }
  const std::vector<double>& headings() const { return headings_; }
  double length() const { return cum_arclength_.back(); }

  Vec2 position_at(double s) const;
  double heading_at(double s) const;    // segment (chord) heading
  double curvature_at(double s) const;  // interpolated point curvature

  struct Projection {
    double s = 0.0;
    double lateral = 0.0;  // signed, positive left
    int segment = 0;
    double t = 0.0;  // parameter within the segment, [0, 1]
  };
  /// Nearest-segment perpendicular projection; ties broken by lower segment
  /// index. Throws OutOfPathExtent when the foot falls before the start or
  /// past the end of the path.
  Projection project(const Vec2& p) const;

  int segment_for_s(double s) const;  // joints belong to the lower segment
  double segment_heading(int i) const { return seg_headings_[i]; }

 private:
  friend ReferencePath build_reference_path(const std::vector<Vec2>& pts);
  std::vector<Vec2> points_;
  std::vector<double> cum_arclength_;
  std::vector<double> headings_;       // per-point finite-difference tangents
  std::vector<double> seg_headings_;   // per-segment chord headings
  std::vector<double> curvatures_;     // per-point dtheta/ds estimates
};

/// Chord-length arclength, finite-difference headings (central where
/// possible). Throws TooFewPoints / DuplicatePoint.
ReferencePath build_reference_path(const std::vector<Vec2>& pts);

/// Velocity and acceleration are decomposed along the path tangent/normal via
/// the heading difference; the longitudinal components carry the 1/(1 - k*l)
/// curvature correction. Heading misalignment of at least pi/2 is rejected.
FrenetState cartesian_to_frenet(const ReferencePath& path, const CartesianState& state);

struct CartesianChannels {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double a = 0.0;      // tangential (dv/dt)
  double kappa = 0.0;  // trajectory curvature, path curvature included
};

CartesianChannels frenet_to_cartesian(const ReferencePath& path, const FrenetState& fs);

struct QuinticPoly {
  std::array<double, 6> c{};  // c0 + c1 t + ... + c5 t^5
  double duration = 0.0;

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  double d3(double t) const;
};

struct QuarticPoly {
  std::array<double, 5> c{};
  double duration = 0.0;

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  double d3(double t) const;
};

/// Lateral profile: position/velocity/acceleration fixed at both ends.
QuinticPoly solve_quintic(double l0, double l_d0, double l_dd0, double lT, double l_dT,
                          double l_ddT, double T);

/// Longitudinal velocity-keeping profile: position/velocity/acceleration at
/// t=0, velocity/acceleration at t=T, no terminal position constraint.
QuarticPoly solve_quartic(double s0, double s_d0, double s_dd0, double s_dT, double s_ddT,
                          double T);

struct TrajectorySample {
  double t = 0.0;
  // Cartesian channels
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double a = 0.0;
  double kappa = 0.0;
  // Frenet channels
  double s = 0.0;
  double s_d = 0.0;
  double s_dd = 0.0;
  double s_ddd = 0.0;
  double l = 0.0;
  double l_d = 0.0;
  double l_dd = 0.0;
  double l_ddd = 0.0;
};

/// Fill a sample's Cartesian channels from its Frenet channels.
TrajectorySample make_sample(const ReferencePath& path, double t, double s, double s_d,
                             double s_dd, double s_ddd, double l, double l_d, double l_dd,
                             double l_ddd);

}  // namespace mplan
