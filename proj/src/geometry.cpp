#include "bdglab/geometry.hpp"

#include <cmath>
#include <numbers>

namespace bdg {

namespace {
constexpr double kOffLatticeTol = 1e-9;
}

Lattice::Lattice(const Vec2& w1, const Vec2& w2) : omega1(w1), omega2(w2) {
  const double w = wedge(w1, w2);
  area = std::abs(w);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw InvalidLatticeError("lattice basis is degenerate: |omega1 ^ omega2| <= 0");
  }
}

Lattice Lattice::square(double side) {
  return Lattice(Vec2(side, 0.0), Vec2(0.0, side));
}

Lattice Lattice::triangular(double side) {
  return Lattice(Vec2(side, 0.0), Vec2(0.5 * side, 0.5 * std::sqrt(3.0) * side));
}

Vec2 Lattice::coefficients(const Vec2& x) const {
  const double det = wedge(omega1, omega2);
  return Vec2(wedge(x, omega2) / det, wedge(omega1, x) / det);
}

Vec2 Lattice::min_image(const Vec2& d) const {
  Vec2 c = coefficients(d);
  c.x() -= std::round(c.x());
  c.y() -= std::round(c.y());
  return c.x() * omega1 + c.y() * omega2;
}

FluxSector make_flux_sector(const Lattice& lat, int n) {
  FluxSector f;
  f.n = n;
  f.b = 2.0 * std::numbers::pi * static_cast<double>(n) / lat.area;
  return f;
}

double Cocycle::eval_coeff(double k, double l, const Vec2& x) const {
  const Vec2 s = k * lat.omega1 + l * lat.omega2;
  const double c_s = 0.5 * flux.b * k * l * wedge(lat.omega2, lat.omega1);
  return 0.5 * flux.b * wedge(s, x) + c_s;
}

double Cocycle::eval(const Vec2& s, const Vec2& x) const {
  const Vec2 c = lat.coefficients(s);
  const double k = std::round(c.x());
  const double l = std::round(c.y());
  if (std::abs(c.x() - k) > kOffLatticeTol || std::abs(c.y() - l) > kOffLatticeTol) {
    throw OffLatticeError("cocycle argument is not a lattice vector");
  }
  return eval_coeff(k, l, x);
}

double eval_cocycle(const Cocycle& c, const Vec2& s, const Vec2& x) {
  return c.eval(s, x);
}

int chern_number(const Cocycle& c, const Vec2& x) {
  const Vec2& nu1 = c.lat.omega1;
  const Vec2& nu2 = c.lat.omega2;
  // Oriented so that the canonical cocycle of flux sector n evaluates to n.
  double val = c.eval(nu1, x + nu2) - c.eval(nu1, x) + c.eval(nu2, x) - c.eval(nu2, x + nu1);
  if (wedge(nu1, nu2) < 0.0) val = -val;
  val /= 2.0 * std::numbers::pi;
  const double r = std::round(val);
  if (std::abs(val - r) > 1e-8) {
    throw CocycleInconsistencyError("Chern number is not an integer: " + std::to_string(val));
  }
  return static_cast<int>(r);
}

Vec2 symmetric_gauge_potential(const FluxSector& f, const Vec2& x) {
  return Vec2(-0.5 * f.b * x.y(), 0.5 * f.b * x.x());
}

}  // namespace bdg
