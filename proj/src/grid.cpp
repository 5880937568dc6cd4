#include "bdglab/grid.hpp"

#include <cmath>

#include "bdglab/errors.hpp"

namespace bdg {

namespace {

// Solve sum_i w_i d_i d_i^T = Id for the weights of the given directions.
bool solve_weights(const std::vector<Vec2>& dirs, std::vector<double>& wts) {
  const int m = static_cast<int>(dirs.size());
  Eigen::MatrixXd A(3, m);
  for (int i = 0; i < m; ++i) {
    A(0, i) = dirs[i].x() * dirs[i].x();
    A(1, i) = dirs[i].y() * dirs[i].y();
    A(2, i) = dirs[i].x() * dirs[i].y();
  }
  Eigen::Vector3d rhs(1.0, 1.0, 0.0);
  Eigen::VectorXd w = A.completeOrthogonalDecomposition().solve(rhs);
  if ((A * w - rhs).norm() > 1e-12) return false;
  for (int i = 0; i < m; ++i) {
    if (w(i) < -1e-13) return false;
  }
  wts.assign(w.data(), w.data() + m);
  return true;
}

}  // namespace

Grid::Grid(const Lattice& l, int n_points) : lat(l), N(n_points) {
  if (N < 4) throw ConfigError("grid needs N >= 4 points per direction");
  cell_weight = lat.area / static_cast<double>(N) / static_cast<double>(N);

  const Vec2 d1 = lat.omega1 / N;
  const Vec2 d2 = lat.omega2 / N;
  const std::vector<std::pair<int, int>> step3 = {{0, 0}, {1, 1}, {1, -1}};
  for (const auto& [s3j, s3k] : step3) {
    std::vector<Vec2> dirs = {d1, d2};
    std::vector<std::pair<int, int>> steps = {{1, 0}, {0, 1}};
    if (s3j != 0 || s3k != 0) {
      dirs.push_back(static_cast<double>(s3j) * d1 + static_cast<double>(s3k) * d2);
      steps.emplace_back(s3j, s3k);
    }
    std::vector<double> wts;
    if (solve_weights(dirs, wts)) {
      hop_dirs = dirs;
      hop_wts = wts;
      hop_steps = steps;
      return;
    }
  }
  throw InvalidLatticeError("no positive-weight nearest-neighbor stencil for this basis");
}

int Grid::idx(int j, int k) const {
  j %= N;
  if (j < 0) j += N;
  k %= N;
  if (k < 0) k += N;
  return j * N + k;
}

Vec2 Grid::point(int j, int k) const {
  return (static_cast<double>(j) / N) * lat.omega1 + (static_cast<double>(k) / N) * lat.omega2;
}

void Grid::wrap(int j, int k, int& j0, int& k0, int& wj, int& wk) const {
  wj = static_cast<int>(std::floor(static_cast<double>(j) / N));
  wk = static_cast<int>(std::floor(static_cast<double>(k) / N));
  j0 = j - wj * N;
  k0 = k - wk * N;
}

}  // namespace bdg
