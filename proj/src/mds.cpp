#include "stylo/mds.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "stylo/error.hpp"

namespace stylo {

std::vector<double> double_centered(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> sq(n * n);
  for (std::size_t i = 0; i < n * n; ++i) sq[i] = d.values()[i] * d.values()[i];
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += sq[i * n + j];
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  // D^2 is symmetric, so column means equal row means.
  std::vector<double> b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
    }
  }
  return b;
}

Embedding classical_mds(const DistanceMatrix& d, std::size_t k) {
  const std::size_t n = d.size();
  if (n < 2 || k < 1 || k > n - 1) {
    throw InvalidArgument("MDS dimension must satisfy 1 <= k <= n-1 (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
  const auto b = double_centered(d);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      bmat(b.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(bmat);
  if (solver.info() != Eigen::Success) throw DegenerateInput("eigendecomposition did not converge");

  // Eigen returns ascending order.
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  Embedding e;
  e.n = n;
  e.k = k;
  e.doc_ids = d.doc_ids();
  e.labels = d.labels();
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) max_abs = std::max(max_abs, std::abs(values[i]));
  const double cutoff = 1e-9 * max_abs;
  for (Eigen::Index i = values.size(); i-- > 0;) {
    e.eigenvalues.push_back(values[i]);
    if (values[i] < -cutoff) ++e.negative_eigenvalues;
  }
  if (!(e.eigenvalues.front() > cutoff)) {
    throw DegenerateInput("no positive eigenvalue: configuration is degenerate");
  }

  e.coordinates.assign(n * k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double lambda = e.eigenvalues[c];
    if (lambda <= cutoff) continue;
    const Eigen::Index col = static_cast<Eigen::Index>(n - 1 - c);
    Eigen::VectorXd v = vectors.col(col);
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) >= peak - 1e-12) {
        if (v[i] < 0) v = -v;
        break;
      }
    }
    const double scale = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) e.coordinates[i * k + c] = v[static_cast<Eigen::Index>(i)] * scale;
  }
  return e;
}

}  // namespace stylo
