#pragma once

#include "tvaoi/rates.hpp"

namespace tvaoi::detail {

/// Stage buffers for one classical RK4 step on vectors or matrices.
template <class State>
struct Rk4Workspace {
  State k1, k2, k3, k4, tmp;
};

/// Advances `x` from t to t + h. `rhs(t, side, x, dx)` writes the derivative.
/// The final stage is evaluated with left-sided rates so a step ending on a
/// rate breakpoint never sees the next piece.
template <class State, class Rhs>
void rk4_step(const Rhs& rhs, double t, double h, State& x, Rk4Workspace<State>& w) {
  const double half = 0.5 * h;
  rhs(t, Side::right, x, w.k1);
  w.tmp = x + half * w.k1;
  rhs(t + half, Side::right, w.tmp, w.k2);
  w.tmp = x + half * w.k2;
  rhs(t + half, Side::right, w.tmp, w.k3);
  w.tmp = x + h * w.k3;
  rhs(t + h, Side::left, w.tmp, w.k4);
  x += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

}  // namespace tvaoi::detail
