#include "isoflow/obstacle.hpp"

#include <algorithm>
#include <cmath>

namespace isoflow {
namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                           0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                           0.2223810344533745, 0.1012285362903763};

template <typename F>
double gauss8(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) acc += kGw[i] * f(mid + half * kGx[i]);
  return acc * half;
}

}  // namespace

ConvexBody::ConvexBody(std::vector<double> cos_coef, std::vector<double> sin_coef, int samples)
    : cos_coef_(std::move(cos_coef)), sin_coef_(std::move(sin_coef)), samples_(samples) {
  if (cos_coef_.empty()) throw ConfigError("support series needs a constant term");
  if (sin_coef_.size() < cos_coef_.size()) sin_coef_.resize(cos_coef_.size(), 0.0);
  if (samples_ < 256) samples_ = 256;
  build_caches();
}

ConvexBody ConvexBody::circle(double radius) {
  if (!(radius > 0)) throw ConfigError("circle radius must be positive");
  return ConvexBody({radius}, {}, kDefaultSamples);
}

ConvexBody ConvexBody::ellipse(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw ConfigError("ellipse semi-axes must be positive");
  // Project h(theta) = sqrt(a^2 cos^2 + b^2 sin^2) on the Fourier basis by
  // trapezoidal quadrature (spectrally accurate for smooth periodic h).
  const int m = 8192;
  std::vector<double> h(m);
  for (int i = 0; i < m; ++i) {
    const double t = kTwoPi * i / m;
    const double c = std::cos(t), s = std::sin(t);
    h[i] = std::sqrt(a * a * c * c + b * b * s * s);
  }
  const int kmax = 256;
  std::vector<double> ac(kmax + 1, 0.0), as(kmax + 1, 0.0);
  for (int i = 0; i < m; ++i) ac[0] += h[i];
  ac[0] /= m;
  for (int k = 1; k <= kmax; ++k) {
    double ck = 0.0, sk = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = kTwoPi * i * k / m;
      ck += h[i] * std::cos(t);
      sk += h[i] * std::sin(t);
    }
    ac[k] = 2.0 * ck / m;
    as[k] = 2.0 * sk / m;
  }
  int keep = 1;
  for (int k = 1; k <= kmax; ++k)
    if (std::abs(ac[k]) + std::abs(as[k]) > 1e-14 * ac[0]) keep = k + 1;
  ac.resize(keep);
  as.resize(keep);
  return ConvexBody(std::move(ac), std::move(as), kDefaultSamples);
}

ConvexBody ConvexBody::fourier(std::vector<double> cos_coef, std::vector<double> sin_coef,
                               int samples_per_period) {
  return ConvexBody(std::move(cos_coef), std::move(sin_coef), samples_per_period);
}

bool ConvexBody::is_circle() const {
  for (size_t k = 1; k < cos_coef_.size(); ++k)
    if (std::abs(cos_coef_[k]) > 1e-14 * cos_coef_[0] ||
        std::abs(sin_coef_[k]) > 1e-14 * cos_coef_[0])
      return false;
  return true;
}

double ConvexBody::support(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  double ck = 1.0, sk = 0.0;  // cos/sin of k*theta, starting at k=0
  double acc = 0.0;
  for (size_t k = 0; k < cos_coef_.size(); ++k) {
    acc += cos_coef_[k] * ck + sin_coef_[k] * sk;
    const double cn = ck * c - sk * s;
    sk = sk * c + ck * s;
    ck = cn;
  }
  return acc;
}

double ConvexBody::support_d1(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  double ck = c, sk = s;
  double acc = 0.0;
  for (size_t k = 1; k < cos_coef_.size(); ++k) {
    acc += static_cast<double>(k) * (-cos_coef_[k] * sk + sin_coef_[k] * ck);
    const double cn = ck * c - sk * s;
    sk = sk * c + ck * s;
    ck = cn;
  }
  return acc;
}

double ConvexBody::support_d2(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  double ck = c, sk = s;
  double acc = 0.0;
  for (size_t k = 1; k < cos_coef_.size(); ++k) {
    acc -= static_cast<double>(k * k) * (cos_coef_[k] * ck + sin_coef_[k] * sk);
    const double cn = ck * c - sk * s;
    sk = sk * c + ck * s;
    ck = cn;
  }
  return acc;
}

void ConvexBody::build_caches() {
  const int n = samples_;
  h_samples_.resize(n);
  cum_len_.assign(n + 1, 0.0);
  cum_shoe_.assign(n + 1, 0.0);

  double min_speed = std::numeric_limits<double>::max();
  double max_kappa = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    h_samples_[i] = support(t);
    const double speed = support(t) + support_d2(t);
    min_speed = std::min(min_speed, speed);
    if (h_samples_[i] <= 0.0)
      throw ConfigError("support function must be positive (origin inside the body)");
  }
  if (min_speed <= 0.0) throw ConfigError("convexity violation: h + h'' <= 0");

  const double dt = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const double a = i * dt, b = (i + 1) * dt;
    cum_len_[i + 1] =
        cum_len_[i] + gauss8([this](double t) { return support(t) + support_d2(t); }, a, b);
    cum_shoe_[i + 1] =
        cum_shoe_[i] + gauss8(
                           [this](double t) {
                             const double h = support(t);
                             return 0.5 * h * (h + support_d2(t));
                           },
                           a, b);
  }
  length_ = cum_len_[n];
  area_ = cum_shoe_[n];

  // kappa_max by grid scan plus golden-section refinement of the speed minimum.
  int besti = 0;
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    const double speed = support(t) + support_d2(t);
    if (speed < best) {
      best = speed;
      besti = i;
    }
  }
  {
    double lo = kTwoPi * (besti - 1) / n, hi = kTwoPi * (besti + 1) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    auto speed = [this](double t) { return support(t) + support_d2(t); };
    double f1 = speed(x1), f2 = speed(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo); f1 = speed(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo); f2 = speed(x2);
      }
    }
    max_kappa = 1.0 / std::min(best, std::min(f1, f2));
  }
  kappa_max_ = max_kappa;

  // Width: min over theta of h(theta) + h(theta + pi), same scan + refine.
  auto breadth = [this](double t) { return support(t) + support(t + kPi); };
  besti = 0;
  best = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i) {
    const double v = breadth(kTwoPi * i / n);
    if (v < best) {
      best = v;
      besti = i;
    }
  }
  {
    double lo = kTwoPi * (besti - 1) / n, hi = kTwoPi * (besti + 1) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = breadth(x1), f2 = breadth(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo); f1 = breadth(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo); f2 = breadth(x2);
      }
    }
    width_ = std::min(best, std::min(f1, f2));
  }

  if (1.0 / kappa_max_ > 0.5 * width_ * (1.0 + 1e-9))
    throw NumericalError("curvature/width inconsistency: 1/kappa_max > width/2");
}

double ConvexBody::cumulative(const std::vector<double>& table, double theta, double per_turn,
                              bool shoelace) const {
  const double turns = std::floor(theta / kTwoPi);
  const double frac = theta - turns * kTwoPi;  // in [0, 2pi)
  const double dt = kTwoPi / samples_;
  int cell = std::min(static_cast<int>(frac / dt), samples_ - 1);
  const double a = cell * dt;
  auto integrand = [this, shoelace](double t) {
    const double h = support(t);
    const double speed = h + support_d2(t);
    return shoelace ? 0.5 * h * speed : speed;
  };
  return turns * per_turn + table[cell] + gauss8(integrand, a, frac);
}

double ConvexBody::arclength_to(double theta) const {
  return cumulative(cum_len_, theta, length_, false);
}

double ConvexBody::shoelace_to(double theta) const {
  return cumulative(cum_shoe_, theta, area_, true);
}

double ConvexBody::support_gap(const Vec2& p, double* argmax_theta) const {
  // Coarse scan of f(theta) = p.u - h over the cached samples, golden-section
  // refinement, then Newton polish on f' = p.u_perp - h' (f is concave at the
  // max: f'' = -p.u - h'' < 0 there).
  const int n = samples_;
  const int stride = std::max(1, n / 256);
  int besti = 0;
  double best = -std::numeric_limits<double>::max();
  for (int i = 0; i < n; i += stride) {
    const double t = kTwoPi * i / n;
    const double f = p.dot(unit_dir(t)) - h_samples_[i];
    if (f > best) {
      best = f;
      besti = i;
    }
  }
  auto f = [this, &p](double t) { return p.dot(unit_dir(t)) - support(t); };
  double lo = kTwoPi * (besti - stride) / n, hi = kTwoPi * (besti + stride) / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 > f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo); f2 = f(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double d1 = p.dot(rot90(unit_dir(t))) - support_d1(t);
    const double d2 = -p.dot(unit_dir(t)) - support_d2(t);
    if (d2 >= 0) break;
    const double step = -d1 / d2;
    t += step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(t))) break;
  }
  if (argmax_theta) *argmax_theta = wrap_two_pi(t);
  return f(t);
}

ConvexBody ConvexBody::rotated(double angle) const {
  // h_rot(theta) = h(theta - angle): rotate each harmonic.
  std::vector<double> ac(cos_coef_.size()), as(sin_coef_.size());
  ac[0] = cos_coef_[0];
  for (size_t k = 1; k < cos_coef_.size(); ++k) {
    const double c = std::cos(k * angle), s = std::sin(k * angle);
    ac[k] = cos_coef_[k] * c - sin_coef_[k] * s;
    as[k] = sin_coef_[k] * c + cos_coef_[k] * s;
  }
  return ConvexBody(std::move(ac), std::move(as), samples_);
}

ConvexBody ConvexBody::translated(const Vec2& shift) const {
  // h_shift(theta) = h(theta) + shift . u(theta).
  std::vector<double> ac = cos_coef_, as = sin_coef_;
  if (ac.size() < 2) ac.resize(2, 0.0);
  if (as.size() < 2) as.resize(2, 0.0);
  ac[1] += shift.x();
  as[1] += shift.y();
  return ConvexBody(std::move(ac), std::move(as), samples_);
}

BoundaryPoint boundary_at(const ConvexBody& body, double theta) {
  BoundaryPoint bp;
  bp.theta = theta;
  const double h = body.support(theta), h1 = body.support_d1(theta), h2 = body.support_d2(theta);
  const Vec2 u = unit_dir(theta), up = rot90(u);
  bp.position = h * u + h1 * up;
  bp.tangent = up;             // positive orientation
  bp.inner_normal = -u;        // J * u_perp
  bp.curvature = 1.0 / (h + h2);
  bp.arclength = body.arclength_to(wrap_two_pi(theta));
  return bp;
}

BoundaryPoint project_to_boundary(const ConvexBody& body, const Vec2& p) {
  double theta = 0.0;
  const double gap = body.support_gap(p, &theta);
  const double scale = body.width();
  if (gap < -1e-12 * scale) throw NumericalError("interior point");
  return boundary_at(body, theta);
}

SubarcQuantities subarc_quantities(const ConvexBody& body, double theta_a, double theta_b,
                                   bool ccw) {
  SubarcQuantities q;
  double delta = ccw ? wrap_two_pi(theta_b - theta_a) : -wrap_two_pi(theta_a - theta_b);
  // theta_a == theta_b means the degenerate point subarc, not a full wrap.
  if (std::abs(wrap_pi(theta_b - theta_a)) < 1e-15) delta = 0.0;
  q.turning_angle = delta;
  if (delta == 0.0) return q;

  // Direct composite quadrature over the traversed interval; differencing the
  // cached cumulative tables would lose absolute accuracy on large bodies.
  const double lo = std::min(theta_a, theta_a + delta);
  const double hi = std::max(theta_a, theta_a + delta);
  const int harmonics = std::max<int>(4, static_cast<int>(body.cos_coefficients().size()));
  const double panel_w = kTwoPi / (8.0 * harmonics);
  const int panels = std::clamp(static_cast<int>(std::ceil((hi - lo) / panel_w)), 2, 8192);
  double len = 0.0, shoe = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + (hi - lo) * i / panels;
    const double b = lo + (hi - lo) * (i + 1) / panels;
    len += gauss8([&body](double t) { return body.support(t) + body.support_d2(t); }, a, b);
    shoe += gauss8(
        [&body](double t) {
          const double h = body.support(t);
          return 0.5 * h * (h + body.support_d2(t));
        },
        a, b);
  }
  q.length = len;
  q.shoelace = (delta > 0) ? shoe : -shoe;
  return q;
}

GlobalQuantities global_quantities(const ConvexBody& body) {
  GlobalQuantities g;
  g.kappa_max = body.kappa_max();
  g.width = body.width();
  g.boundary_length = body.boundary_length();
  g.area = body.area();
  return g;
}

}  // namespace isoflow
