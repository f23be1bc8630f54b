#pragma once

// The one smooth-cutoff primitive shared by the Littlewood-Paley projector,
// the localized virial weight and the far-translation cutoff.  C^4 polynomial
// step: enough continuity for the bilaplacian of the virial weight, with
// exact closed-form derivatives.

namespace inls {

/// S(t): 0 for t <= 0, 1 for t >= 1, monotone C^4 in between.
inline double smoothstep(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  // 126 t^5 - 420 t^6 + 540 t^7 - 315 t^8 + 70 t^9
  return ((((70.0 * t - 315.0) * t + 540.0) * t - 420.0) * t + 126.0) * t * t * t * t * t;
}

inline double smoothstep_d1(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  return ((((630.0 * t - 2520.0) * t + 3780.0) * t - 2520.0) * t + 630.0) * t * t * t * t;
}

inline double smoothstep_d2(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  return ((((5040.0 * t - 17640.0) * t + 22680.0) * t - 12600.0) * t + 2520.0) * t * t * t;
}

inline double smoothstep_d3(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  return ((((35280.0 * t - 105840.0) * t + 113400.0) * t - 50400.0) * t + 7560.0) * t * t;
}

inline double smoothstep_d4(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  return ((((211680.0 * t - 529200.0) * t + 453600.0) * t - 151200.0) * t + 15120.0) * t;
}

}  // namespace inls
