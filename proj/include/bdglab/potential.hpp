#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdglab/grid.hpp"

namespace bdg {

// Even, cell-periodic pair potential v(x - y). Profiles are evaluated on the
// minimal-image representative of the difference vector.
struct PairPotential {
  enum class Kind { Zero, Gaussian, InversePower, Table };

  Kind kind = Kind::Zero;
  double depth = 0.0;   // gaussian: v(x) = depth * exp(-|x|^2 / (2 width^2))
  double width = 1.0;
  double kappa = 1.0;   // inverse power: v(x) = -(1 + |x|)^(-kappa)
  std::vector<double> table;  // row-major N*N samples v(x_jk - x_00)

  static PairPotential zero();
  static PairPotential gaussian(double depth, double width);
  static PairPotential inverse_power(double kappa);

  double eval(const Lattice& lat, const Vec2& d) const;
};

// Potential sampled on all grid difference vectors, plus derived scalars.
struct PotentialOnGrid {
  Eigen::MatrixXd v;   // v(x_p - x_q), dim N^2 x N^2, real symmetric
  double integral = 0.0;  // lambda = cell_weight * sum_x v(x)
  double sup_norm = 0.0;
  bool attractive = false;  // v <= 0 pointwise

  bool is_zero() const { return sup_norm == 0.0; }
};

PotentialOnGrid sample_potential(const PairPotential& pot, const Grid& grid);

}  // namespace bdg
