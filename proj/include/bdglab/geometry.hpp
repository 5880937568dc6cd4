#pragma once

#include <Eigen/Dense>

#include "bdglab/errors.hpp"

namespace bdg {

using Vec2 = Eigen::Vector2d;

inline double wedge(const Vec2& u, const Vec2& v) {
  return u.x() * v.y() - u.y() * v.x();
}

// Bravais lattice spanned by two basis vectors. Fixed for the whole run.
struct Lattice {
  Vec2 omega1;
  Vec2 omega2;
  double area;  // |omega1 ^ omega2|

  Lattice(const Vec2& w1, const Vec2& w2);

  static Lattice square(double side);
  static Lattice triangular(double side);

  // Coefficients (k, l) of x = k*omega1 + l*omega2.
  Vec2 coefficients(const Vec2& x) const;

  // Nearest lattice-periodic representative of d with coefficients in [-1/2, 1/2).
  Vec2 min_image(const Vec2& d) const;
};

// Quantized magnetic field b = 2*pi*n / |cell|, n the Chern integer.
struct FluxSector {
  int n = 0;
  double b = 0.0;
};

FluxSector make_flux_sector(const Lattice& lat, int n);

// Summand of automorphy chi_s(x) = (b/2)(s ^ x) + c_s, c_s = (b/2)(s'' ^ s')
// for s = k*omega1 + l*omega2 split into s' = k*omega1, s'' = l*omega2.
struct Cocycle {
  Lattice lat;
  FluxSector flux;

  Cocycle(const Lattice& l, const FluxSector& f) : lat(l), flux(f) {}

  // chi_s(x) for integer-coefficient s; throws OffLatticeError otherwise.
  double eval(const Vec2& s, const Vec2& x) const;

  // Same formula with real coefficients (k, l); used by magnetic translations
  // along fractional grid shifts.
  double eval_coeff(double k, double l, const Vec2& x) const;
};

double eval_cocycle(const Cocycle& c, const Vec2& s, const Vec2& x);

// First Chern number computed from the cocycle alone; must equal flux.n and be
// x-independent. Throws CocycleInconsistencyError if the value is not close to
// an integer.
int chern_number(const Cocycle& c, const Vec2& x);

// Symmetric gauge a_b(x) = (b/2)(-x2, x1); curl a_b = b.
Vec2 symmetric_gauge_potential(const FluxSector& f, const Vec2& x);

}  // namespace bdg
