#pragma once

#include "freemult/quadrature.hpp"

namespace freemult {

/// Effective numerical tolerances. Every report echoes the full set.
struct Tolerances {
  double tol_mass = 1e-6;    // |total mass - 1| accepted for atomic / grid input
  double tol_quad = 1e-12;   // relative quadrature tolerance (L1-scaled)
  double tol_tail = 1e-12;   // tail mass dropped when truncating named families
  double tol_root = 1e-10;   // relative residual for every implicit-equation solve
  double tol_int = 1e-4;     // accepted |integral of a density curve - 1|
  double hysteresis = 1e-4;  // relative oscillation suppressed by mode counting
  double tol_pick = 1e-10;   // relative slack of the Pick-inequality checks
  int max_quad_panels = 4000;
  int max_bracket_expansions = 200;
  int max_boundary_iterations = 200;

  [[nodiscard]] quad::Options quad() const { return {tol_quad, 0.0, max_quad_panels}; }
};

}  // namespace freemult
