#include "bdglab/potential.hpp"

#include <cmath>

#include "bdglab/errors.hpp"

namespace bdg {

PairPotential PairPotential::zero() { return PairPotential{}; }

PairPotential PairPotential::gaussian(double depth, double width) {
  PairPotential p;
  p.kind = Kind::Gaussian;
  p.depth = depth;
  p.width = width;
  return p;
}

PairPotential PairPotential::inverse_power(double kappa) {
  PairPotential p;
  p.kind = Kind::InversePower;
  p.kappa = kappa;
  return p;
}

double PairPotential::eval(const Lattice& lat, const Vec2& d) const {
  const Vec2 m = lat.min_image(d);
  const double r = m.norm();
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Gaussian:
      return depth * std::exp(-0.5 * r * r / (width * width));
    case Kind::InversePower:
      return -std::pow(1.0 + r, -kappa);
    case Kind::Table:
      throw ConfigError("table potential must be sampled through sample_potential");
  }
  return 0.0;
}

PotentialOnGrid sample_potential(const PairPotential& pot, const Grid& grid) {
  const int dim = grid.dim();
  PotentialOnGrid out;
  out.v.resize(dim, dim);

  // v depends on the index difference only; build one row and permute.
  Eigen::VectorXd row(dim);
  if (pot.kind == PairPotential::Kind::Table) {
    if (static_cast<int>(pot.table.size()) != dim) {
      throw ConfigError("table potential size does not match grid");
    }
    for (int p = 0; p < dim; ++p) row(p) = pot.table[p];
  } else {
    for (int j = 0; j < grid.N; ++j) {
      for (int k = 0; k < grid.N; ++k) {
        row(grid.idx(j, k)) = pot.eval(grid.lat, grid.point(j, k));
      }
    }
  }
  for (int j = 0; j < grid.N; ++j) {
    for (int k = 0; k < grid.N; ++k) {
      const int p = grid.idx(j, k);
      for (int j2 = 0; j2 < grid.N; ++j2) {
        for (int k2 = 0; k2 < grid.N; ++k2) {
          out.v(p, grid.idx(j2, k2)) = row(grid.idx(j - j2, k - k2));
        }
      }
    }
  }
  for (int j = 0; j < grid.N; ++j) {
    for (int k = 0; k < grid.N; ++k) {
      if (std::abs(row(grid.idx(j, k)) - row(grid.idx(-j, -k))) > 1e-12) {
        throw ConfigError("pair potential is not even: v(-x) != v(x)");
      }
    }
  }
  out.integral = grid.cell_weight * row.sum();
  out.sup_norm = row.cwiseAbs().maxCoeff();
  out.attractive = (row.maxCoeff() <= 0.0);
  return out;
}

}  // namespace bdg
