#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "bdglab/grid.hpp"
#include "bdglab/potential.hpp"

namespace bdg {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

enum class OperatorBasis { Grid, Spectral };

// Dense operator over the grid (or a truncated spectral) basis. Matrices act
// on grid vectors directly; the quadrature weight lives in inner products.
struct OperatorRep {
  Mat m;
  OperatorBasis basis = OperatorBasis::Grid;

  int dim() const { return static_cast<int>(m.rows()); }
  cplx trace_per_cell() const { return m.trace(); }
  double hermiticity_defect() const;  // max |A - A^*| / ||A||
};

struct SpectralData {
  RVec eigenvalues;   // ascending
  Mat eigenvectors;   // orthonormal columns (unit 2-norm)
};

SpectralData diagonalize(const OperatorRep& a);
SpectralData diagonalize(const Mat& a);

OperatorRep func_calc(const OperatorRep& a, const std::function<double(double)>& f);
Mat func_calc(const SpectralData& sd, const std::function<double(double)>& f);

// den(A)(x) = A(x, x) / cell_weight, so that cell_weight * sum f*den = Tr(f A).
RVec density(const OperatorRep& a, const Grid& grid);
RVec density(const Mat& a, const Grid& grid);

// Cell-periodic transverse vector potential correction e, kept as Fourier
// coefficients over the reciprocal grid; a = a_b + e.
struct VectorPotential {
  FluxSector flux;
  int N = 0;
  Lattice lat{Vec2(1, 0), Vec2(0, 1)};
  Eigen::MatrixXcd e_hat_x;  // N x N Fourier coefficients, zero mode empty
  Eigen::MatrixXcd e_hat_y;

  static VectorPotential uniform(const Lattice& lat, const FluxSector& f, int N);

  bool has_periodic_part() const;
  Vec2 eval_periodic(const Vec2& x) const;     // e(x)
  Vec2 eval(const Vec2& x) const;              // a_b(x) + e(x)
  double curl_energy() const;                  // integral of |curl e|^2 over the cell
  double periodic_l2() const;                  // integral of |e|^2
};

// Peierls magnetic Laplacian -Delta_a on the twisted one-particle space:
// nearest-neighbor hops with midpoint link phases, boundary links twisted by
// the lattice cocycle. Hermitian, positive semi-definite.
Mat magnetic_laplacian(const Grid& grid, const FluxSector& flux);
Mat magnetic_laplacian(const Grid& grid, const VectorPotential& a);

// Magnetic translation along s = (pj/N) w1 + (pk/N) w2 (grid-commensurate).
// Unitary; commutes with magnetic_laplacian for flux-commensurate shifts and
// satisfies the lattice group law for full-cell shifts.
Mat magnetic_translation(const Grid& grid, const FluxSector& flux, int pj, int pk);

// Superconducting current density: the anticommutator [-i grad_a, gamma]_+ on
// the diagonal, assembled from bond currents of the same Peierls links.
Eigen::MatrixX2d current(const Mat& gamma, const Grid& grid, const VectorPotential& a);

// Landau cluster labels: ascending eigenvalues grouped within b/4 of the
// running cluster mean (near-degeneracy grouping when b = 0).
std::vector<int> cluster_labels(const RVec& eigenvalues, double b);

}  // namespace bdg
