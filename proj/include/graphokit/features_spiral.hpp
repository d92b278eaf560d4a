#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphokit/ink.hpp"

namespace graphokit {

enum class SpiralCenter {
  // Least-squares refinement of the centre together with the r = a + b*theta
  // fit, seeded from the centroid and both trace endpoints.
  Fitted,
  Centroid,
  FirstPoint,
};

enum class ZeroCrossingBasis { Residual, RawDerivative };

struct SpiralOptions {
  SpiralCenter center = SpiralCenter::Fitted;
  ZeroCrossingBasis zcr_basis = ZeroCrossingBasis::Residual;
  // Hysteresis band for zcr1, as a fraction of the growth rate b. A sign
  // change only counts once the first difference leaves [-band, band].
  // Zero gives the plain sign-change count.
  double zcr_band = 0.1;
};

// On-surface trace in polar form around `center`. theta is unwrapped and
// oriented so that it increases (counter-clockwise canonical form) and
// starts in [0, 2*pi).
struct PolarTrace {
  std::vector<double> theta;
  std::vector<double> r;
  std::vector<double> t;
  double center_x = 0.0;
  double center_y = 0.0;
  bool mirrored = false;  // true when the drawing was clockwise
};

PolarTrace unwrap_polar(const InkRecording& rec, const SpiralOptions& options = {});

struct SpiralFit {
  double a = 0.0;
  double b = 0.0;
};

// Ordinary least squares r ~ a + b * theta.
SpiralFit fit_archimedean(const PolarTrace& trace);

// Loop-to-loop radial widths: differences of r between consecutive
// crossings of four rays at quarter turns from the trace's starting angle.
// Throws InsufficientLoops when no ray is crossed twice.
std::vector<double> loop_widths(const PolarTrace& trace);

// Keys: dos, mean_speed, smoothness2, spi, tightness, width_var, zcr1.
// width_var is kMissing when no ray has two crossings.
std::map<std::string, double> spiral_features(const PolarTrace& trace,
                                              const InkRecording& rec,
                                              const SpiralOptions& options = {});

}  // namespace graphokit
