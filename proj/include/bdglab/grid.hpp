#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdglab/geometry.hpp"

namespace bdg {

// N x N discretization of a fundamental cell, points x_{jk} = (j/N) w1 + (k/N) w2.
// Hop directions and weights reproduce the continuum Laplacian on possibly
// oblique cells: sum_i w_i d_i d_i^T = Id, with a third (diagonal) direction
// switched on when the basis is not orthogonal.
struct Grid {
  Lattice lat;
  int N;
  double cell_weight;  // area / N^2

  std::vector<Vec2> hop_dirs;                 // geometric steps d_i
  std::vector<double> hop_wts;                // stencil weights w_i
  std::vector<std::pair<int, int>> hop_steps; // (j, k) index steps of each d_i

  Grid(const Lattice& l, int n_points);

  int dim() const { return N * N; }
  int idx(int j, int k) const;
  Vec2 point(int j, int k) const;

  // Wrap an index pair into the cell; returns the lattice winding (wj, wk)
  // with (j, k) = (j0 + wj*N, k0 + wk*N).
  void wrap(int j, int k, int& j0, int& k0, int& wj, int& wk) const;
};

}  // namespace bdg
