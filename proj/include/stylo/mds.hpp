#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stylo/distance.hpp"

namespace stylo {

struct Embedding {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> coordinates;  // n x k, row-major
  std::vector<double> eigenvalues;  // full spectrum of B, descending, unclamped
  std::size_t negative_eigenvalues = 0;
  std::vector<std::string> doc_ids;
  std::vector<std::string> labels;

  double at(std::size_t i, std::size_t dim) const { return coordinates[i * k + dim]; }
};

// B = -1/2 J D^2 J with J = I - 11'/n, row-major n x n.
std::vector<double> double_centered(const DistanceMatrix& d);

// Classical (Torgerson) MDS. Eigenvalues at or below 1e-9 * max|lambda| yield zero
// columns. Each eigenvector is signed so that its largest-magnitude entry is positive.
// Throws InvalidArgument unless 1 <= k <= n-1, DegenerateInput if no eigenvalue is positive.
Embedding classical_mds(const DistanceMatrix& d, std::size_t k = 2);

struct ScatterOptions {
  std::size_t x_axis = 0;
  std::size_t y_axis = 1;
  std::string title;
};

// Writes an SVG 1.1 scatter of two embedding dimensions (one marker style per label,
// with legend) to `svg_path`, and the plotted points as `doc_id,label,x,y` to the
// sibling file with a .csv extension. Returns the CSV path.
std::filesystem::path emit_scatter(const Embedding& e, std::span<const std::string> labels,
                                   const std::filesystem::path& svg_path,
                                   const ScatterOptions& options = {});

}  // namespace stylo
