#pragma once

#include <vector>

#include "isoflow/geom.hpp"

namespace isoflow {

/// A point of the support boundary with the frame data used everywhere else.
/// tangent is the positively oriented unit tangent, inner_normal = J*tangent,
/// curvature = 1/(h+h'') > 0, arclength measured from theta = 0.
struct BoundaryPoint {
  double theta = 0.0;
  Vec2 position = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  Vec2 inner_normal = Vec2::Zero();
  double curvature = 0.0;
  double arclength = 0.0;
};

/// Convex obstacle described by a truncated Fourier series of its support
/// function h(theta). The boundary is x(theta) = h*u + h'*u_perp with
/// u = (cos theta, sin theta); strict convexity h + h'' > 0 is enforced at
/// construction. Immutable afterwards, safe to share across threads.
class ConvexBody {
 public:
  static ConvexBody circle(double radius);
  static ConvexBody ellipse(double semi_axis_x, double semi_axis_y);
  /// cos_coef[0] is the constant term; cos_coef[k], sin_coef[k] multiply
  /// cos(k theta), sin(k theta). sin_coef may be shorter than cos_coef.
  static ConvexBody fourier(std::vector<double> cos_coef, std::vector<double> sin_coef,
                            int samples_per_period = kDefaultSamples);

  double support(double theta) const;     // h
  double support_d1(double theta) const;  // h'
  double support_d2(double theta) const;  // h''

  double kappa_max() const { return kappa_max_; }
  double width() const { return width_; }  // d_Sigma
  double boundary_length() const { return length_; }
  double area() const { return area_; }
  bool is_circle() const;
  int samples_per_period() const { return samples_; }
  const std::vector<double>& cos_coefficients() const { return cos_coef_; }
  const std::vector<double>& sin_coefficients() const { return sin_coef_; }

  /// Cumulative arclength int_0^theta (h+h'') and shoelace 1/2 int_0^theta
  /// h(h+h''), both extended to all of R (adding whole-turn multiples).
  double arclength_to(double theta) const;
  double shoelace_to(double theta) const;

  /// max_theta p.u(theta) - h(theta). Positive outside the body (then it
  /// equals dist(p, Omega)), negative inside. Optionally yields the argmax.
  double support_gap(const Vec2& p, double* argmax_theta = nullptr) const;

  ConvexBody rotated(double angle) const;
  ConvexBody translated(const Vec2& shift) const;

  static constexpr int kDefaultSamples = 2048;

 private:
  ConvexBody(std::vector<double> cos_coef, std::vector<double> sin_coef, int samples);
  void build_caches();
  double cumulative(const std::vector<double>& table, double theta, double per_turn,
                    bool shoelace) const;

  std::vector<double> cos_coef_, sin_coef_;
  int samples_ = kDefaultSamples;
  double kappa_max_ = 0.0, width_ = 0.0, length_ = 0.0, area_ = 0.0;
  std::vector<double> h_samples_;             // h at theta_k = 2 pi k / samples_
  std::vector<double> cum_len_, cum_shoe_;    // size samples_+1
};

BoundaryPoint boundary_at(const ConvexBody& body, double theta);

/// Nearest-point projection onto Sigma. Throws NumericalError("interior point")
/// when p lies strictly inside the body.
BoundaryPoint project_to_boundary(const ConvexBody& body, const Vec2& p);

struct SubarcQuantities {
  double length = 0.0;
  double turning_angle = 0.0;  // signed, + for ccw traversal
  double shoelace = 0.0;       // 1/2 int (x dy - y dx) along the traversal
};

/// Quantities of the subarc traversed from theta_a to theta_b; ccw selects
/// which of the two single-wrap subarcs is meant.
SubarcQuantities subarc_quantities(const ConvexBody& body, double theta_a, double theta_b,
                                   bool ccw);

struct GlobalQuantities {
  double kappa_max = 0.0;
  double width = 0.0;
  double boundary_length = 0.0;
  double area = 0.0;
};

GlobalQuantities global_quantities(const ConvexBody& body);

}  // namespace isoflow
