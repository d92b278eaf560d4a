#include "graphokit/features_spiral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "graphokit/error.hpp"
#include "graphokit/feature_table.hpp"
#include "graphokit/features_basic.hpp"

namespace graphokit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x, y, t;
};

std::vector<Point> on_surface_points(const InkRecording& rec) {
  std::vector<Point> pts;
  for (const auto& s : rec.samples) {
    if (s.on_surface()) pts.push_back({s.x, s.y, s.t});
  }
  return pts;
}

// Polar coordinates around (cx, cy); points closer than `eps` to the centre
// are dropped.
struct PolarView {
  std::vector<double> theta, r, t;
  std::vector<std::size_t> index;  // into the point list
  double sign = 1.0;
};

PolarView polar_around(const std::vector<Point>& pts, double cx, double cy, double eps) {
  PolarView v;
  double prev_raw = 0.0, offset = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i].x - cx, dy = pts[i].y - cy;
    const double r = std::hypot(dx, dy);
    if (r <= eps) continue;
    const double raw = std::atan2(dy, dx);
    if (!first) {
      const double jump = raw - prev_raw;
      if (jump > std::numbers::pi) offset -= kTwoPi;
      else if (jump < -std::numbers::pi) offset += kTwoPi;
    }
    first = false;
    prev_raw = raw;
    v.theta.push_back(raw + offset);
    v.r.push_back(r);
    v.t.push_back(pts[i].t);
    v.index.push_back(i);
  }
  if (v.theta.size() >= 2 && v.theta.back() < v.theta.front()) {
    v.sign = -1.0;
    for (double& th : v.theta) th = -th;
  }
  if (!v.theta.empty()) {
    const double shift = kTwoPi * std::floor(v.theta.front() / kTwoPi);
    for (double& th : v.theta) th -= shift;
  }
  return v;
}

SpiralFit ols(const std::vector<double>& theta, const std::vector<double>& r) {
  const double n = static_cast<double>(theta.size());
  double mt = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    mt += theta[i];
    mr += r[i];
  }
  mt /= n;
  mr /= n;
  double stt = 0.0, str = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    stt += (theta[i] - mt) * (theta[i] - mt);
    str += (theta[i] - mt) * (r[i] - mr);
  }
  SpiralFit fit;
  fit.b = stt > 0.0 ? str / stt : 0.0;
  fit.a = mr - fit.b * mt;
  return fit;
}

double sse(const PolarView& v, const SpiralFit& fit) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.theta.size(); ++i) {
    const double e = v.r[i] - fit.a - fit.b * v.theta[i];
    s += e * e;
  }
  return s;
}

struct CenterResult {
  double cx = 0.0, cy = 0.0;
  double objective = INFINITY;
  bool valid = false;
};

double extent_of(const std::vector<Point>& pts) {
  double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  return std::max(max_x - min_x, max_y - min_y);
}

CenterResult evaluate_center(const std::vector<Point>& pts, double cx, double cy, double eps) {
  CenterResult res{cx, cy};
  const PolarView v = polar_around(pts, cx, cy, eps);
  if (v.theta.size() < 3) return res;
  if (v.theta.back() - v.theta.front() < kTwoPi) return res;
  const SpiralFit fit = ols(v.theta, v.r);
  if (!(fit.b > 0.0)) return res;
  res.objective = sse(v, fit);
  res.valid = true;
  return res;
}

struct NormalEquations {
  Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
  Eigen::Vector4d jte = Eigen::Vector4d::Zero();
};

NormalEquations normal_equations(const std::vector<Point>& pts, double cx, double cy,
                                 double eps) {
  const PolarView v = polar_around(pts, cx, cy, eps);
  const SpiralFit fit = ols(v.theta, v.r);
  NormalEquations ne;
  for (std::size_t k = 0; k < v.theta.size(); ++k) {
    const auto& p = pts[v.index[k]];
    const double dx = p.x - cx, dy = p.y - cy;
    const double r = v.r[k], r2 = r * r;
    const double e = r - fit.a - fit.b * v.theta[k];
    Eigen::Vector4d j;
    j << -dx / r - fit.b * v.sign * dy / r2, -dy / r + fit.b * v.sign * dx / r2, -1.0,
        -v.theta[k];
    ne.jtj.noalias() += j * j.transpose();
    ne.jte.noalias() += j * e;
  }
  return ne;
}

// Levenberg-Marquardt on the centre with (a, b) projected out: the normal
// equations are reduced to their 2x2 Schur complement and damped isotropically,
// so the iteration commutes with rotations of the drawing. a and b are
// re-solved in closed form after every accepted step.
CenterResult refine_center(const std::vector<Point>& pts, double cx, double cy, double eps,
                           double scale) {
  CenterResult best = evaluate_center(pts, cx, cy, eps);
  if (!best.valid) return best;
  double mu = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    const auto [jtj, jte] = normal_equations(pts, best.cx, best.cy, eps);
    const Eigen::Matrix2d c_inv = jtj.bottomRightCorner<2, 2>().inverse();
    const Eigen::Matrix2d cross = jtj.topRightCorner<2, 2>();
    const Eigen::Matrix2d schur = jtj.topLeftCorner<2, 2>() - cross * c_inv * cross.transpose();
    const Eigen::Vector2d rhs = -(jte.template head<2>() - cross * c_inv * jte.template tail<2>());
    const double level = std::max(0.5 * schur.trace(), 1e-300);
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      const Eigen::Matrix2d lhs = schur + mu * level * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d step = lhs.ldlt().solve(rhs);
      if (!step.allFinite()) {
        mu *= 4.0;
        continue;
      }
      const CenterResult trial = evaluate_center(pts, best.cx + step(0), best.cy + step(1), eps);
      if (trial.valid && trial.objective < best.objective) {
        const double step_len = std::hypot(step(0), step(1));
        best = trial;
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        if (step_len <= 1e-13 * scale) return best;
      } else {
        mu *= 4.0;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace

PolarTrace unwrap_polar(const InkRecording& rec, const SpiralOptions& options) {
  const auto pts = on_surface_points(rec);
  if (pts.size() < 3) {
    throw Error(ErrorCode::NotASpiral, "fewer than 3 on-surface samples", rec.subject_id);
  }
  const double scale = extent_of(pts);
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::DegenerateRadius, "all samples coincide", rec.subject_id);
  }
  const double eps = 1e-9 * scale;

  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());

  CenterResult chosen;
  switch (options.center) {
    case SpiralCenter::Centroid:
      chosen = evaluate_center(pts, cx, cy, eps);
      break;
    case SpiralCenter::FirstPoint:
      chosen = evaluate_center(pts, pts.front().x, pts.front().y, eps);
      break;
    case SpiralCenter::Fitted: {
      const std::pair<double, double> seeds[] = {
          {cx, cy}, {pts.front().x, pts.front().y}, {pts.back().x, pts.back().y}};
      for (const auto& [sx, sy] : seeds) {
        const CenterResult res = refine_center(pts, sx, sy, eps, scale);
        if (res.valid && res.objective < chosen.objective) chosen = res;
      }
      break;
    }
  }
  if (!chosen.valid) {
    throw Error(ErrorCode::NotASpiral, "unwrapped angle spans less than one turn",
                rec.subject_id);
  }

  PolarView v = polar_around(pts, chosen.cx, chosen.cy, eps);
  const std::size_t dropped = pts.size() - v.theta.size();
  if (static_cast<double>(dropped) > 0.01 * static_cast<double>(pts.size())) {
    throw Error(ErrorCode::DegenerateRadius, "centre coincides with more than 1% of samples",
                rec.subject_id);
  }
  PolarTrace trace;
  trace.theta = std::move(v.theta);
  trace.r = std::move(v.r);
  trace.t = std::move(v.t);
  trace.center_x = chosen.cx;
  trace.center_y = chosen.cy;
  trace.mirrored = v.sign < 0.0;
  return trace;
}

SpiralFit fit_archimedean(const PolarTrace& trace) { return ols(trace.theta, trace.r); }

std::vector<double> loop_widths(const PolarTrace& trace) {
  const auto& th = trace.theta;
  const auto& r = trace.r;
  std::vector<double> widths;
  if (th.size() < 2) throw Error(ErrorCode::InsufficientLoops, "trace too short");
  const double start = th.front();
  const double end = *std::max_element(th.begin(), th.end());
  for (int ray = 0; ray < 4; ++ray) {
    const double phase = ray * std::numbers::pi / 2.0;
    std::vector<double> crossings;
    std::size_t i = 0;
    for (int m = 0;; ++m) {
      const double target = start + phase + kTwoPi * m;
      if (target <= start) continue;
      if (target > end) break;
      while (i + 1 < th.size() && !(th[i] < target && target <= th[i + 1])) ++i;
      if (i + 1 >= th.size()) break;
      const double f = (target - th[i]) / (th[i + 1] - th[i]);
      crossings.push_back(r[i] + f * (r[i + 1] - r[i]));
      ++i;
    }
    for (std::size_t k = 1; k < crossings.size(); ++k) {
      widths.push_back(crossings[k] - crossings[k - 1]);
    }
  }
  if (widths.empty()) {
    throw Error(ErrorCode::InsufficientLoops, "no ray is crossed twice");
  }
  return widths;
}

namespace {

double zero_crossing_rate(const std::vector<double>& series, double band, std::size_t length) {
  int state = 0;
  std::size_t changes = 0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double d = series[i + 1] - series[i];
    if (std::abs(d) <= band || d == 0.0) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (state != 0 && sign != state) ++changes;
    state = sign;
  }
  return static_cast<double>(changes) / static_cast<double>(length);
}

}  // namespace

std::map<std::string, double> spiral_features(const PolarTrace& trace, const InkRecording& rec,
                                              const SpiralOptions& options) {
  const auto& th = trace.theta;
  const auto& r = trace.r;
  const std::size_t n = th.size();
  if (n < 3) throw Error(ErrorCode::FitFailure, "trace too short", rec.subject_id);
  const SpiralFit fit = fit_archimedean(trace);
  if (!(fit.b > 0.0)) {
    throw Error(ErrorCode::FitFailure, "growth rate b <= 0", rec.subject_id);
  }

  std::vector<double> resid(n);
  double sq = 0.0, abs_sum = 0.0, fit_sum = 0.0, r_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double model = fit.a + fit.b * th[i];
    resid[i] = r[i] - model;
    sq += resid[i] * resid[i];
    abs_sum += std::abs(resid[i]);
    fit_sum += model;
    r_sum += r[i];
  }

  std::map<std::string, double> out;
  out["dos"] = std::sqrt(sq / static_cast<double>(n)) / (r_sum / static_cast<double>(n));

  double length = 0.0, duration = 0.0;
  for (const auto& st : segment_strokes(rec)) {
    if (!st.on_surface()) continue;
    length += path_length(st.samples);
    duration += st.span();
  }
  out["mean_speed"] = duration > 0.0 ? length / duration : kMissing;

  // Second difference of r on a uniform theta grid. r is resampled along the
  // trace at increasing crossings of each grid angle, so near-centre jitter in
  // theta cannot produce vanishing steps.
  const double th_end = *std::max_element(th.begin(), th.end());
  const double step = (th_end - th.front()) / static_cast<double>(n - 1);
  std::vector<double> grid_r;
  grid_r.reserve(n);
  grid_r.push_back(r.front());
  for (std::size_t k = 1, i = 0; k < n && step > 0.0; ++k) {
    const double target = th.front() + step * static_cast<double>(k);
    while (i + 1 < n && !(th[i] < target && target <= th[i + 1])) ++i;
    if (i + 1 >= n) break;
    const double f = (target - th[i]) / (th[i + 1] - th[i]);
    grid_r.push_back(r[i] + f * (r[i + 1] - r[i]));
  }
  double d2_sq = 0.0;
  std::size_t d2_n = 0;
  for (std::size_t k = 1; k + 1 < grid_r.size(); ++k) {
    const double d2 = (grid_r[k + 1] - 2.0 * grid_r[k] + grid_r[k - 1]) / (step * step);
    d2_sq += d2 * d2;
    ++d2_n;
  }
  out["smoothness2"] = d2_n > 0 ? std::sqrt(d2_sq / static_cast<double>(d2_n)) / fit.b : kMissing;

  out["spi"] = 100.0 * (1.0 - abs_sum / fit_sum);
  out["tightness"] = 1.0 / fit.b;

  try {
    const auto widths = loop_widths(trace);
    out["width_var"] = aggregate(widths, Aggregation::NCV);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientLoops) throw;
    out["width_var"] = kMissing;
  }

  std::vector<double> basis;
  if (options.zcr_basis == ZeroCrossingBasis::Residual) {
    basis = resid;
  } else {
    for (std::size_t k = 0; k + 1 < grid_r.size(); ++k) {
      basis.push_back((grid_r[k + 1] - grid_r[k]) / step);
    }
  }
  out["zcr1"] = zero_crossing_rate(basis, options.zcr_band * fit.b, n);
  return out;
}

}  // namespace graphokit
