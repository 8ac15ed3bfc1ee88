#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <regex>

#include "stylo/error.hpp"
#include "stylo/io.hpp"
#include "stylo/mds.hpp"
#include "stylo/random.hpp"

using namespace stylo;

namespace {

DistanceMatrix from_points(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> v(n * n, 0.0);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("p" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < pts[i].size(); ++c) s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      v[i * n + j] = std::sqrt(s);
    }
  }
  return DistanceMatrix(ids, {}, v);
}

double embedded(const Embedding& e, std::size_t i, std::size_t j) {
  double s = 0;
  for (std::size_t c = 0; c < e.k; ++c) s += (e.at(i, c) - e.at(j, c)) * (e.at(i, c) - e.at(j, c));
  return std::sqrt(s);
}

std::vector<std::vector<double>> random_points(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(k));
  for (auto& p : pts) {
    for (auto& c : p) c = rng.uniform() * 10 - 5;
  }
  return pts;
}

}  // namespace

TEST_CASE("classical_mds: two points at distance 2") {
  const DistanceMatrix d({"a", "b"}, {}, {0, 2, 2, 0});
  const auto e = classical_mds(d, 1);
  CHECK(e.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(e.at(0, 0) == doctest::Approx(1.0));
  CHECK(e.at(1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("classical_mds: equilateral triangle") {
  const DistanceMatrix d({"a", "b", "c"}, {}, {0, 1, 1, 1, 0, 1, 1, 1, 0});
  const auto e = classical_mds(d, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) CHECK(std::abs(embedded(e, i, j) - 1.0) < 1e-9);
  }
}

TEST_CASE("classical_mds: errors") {
  const DistanceMatrix zero({"a", "b", "c"}, {}, std::vector<double>(9, 0.0));
  CHECK_THROWS_AS(classical_mds(zero, 2), DegenerateInput);
  const DistanceMatrix two({"a", "b"}, {}, {0, 1, 1, 0});
  CHECK_THROWS_AS(classical_mds(two, 2), InvalidArgument);
  CHECK_THROWS_AS(classical_mds(two, 0), InvalidArgument);
}

TEST_CASE("classical_mds: reconstruction, spectrum and residuals on random point sets") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + trial % 2;
    const std::size_t n = k + 2 + rng.below(17);
    const auto d = from_points(random_points(rng, n, k));
    const auto e = classical_mds(d, k);
    CHECK(std::is_sorted(e.eigenvalues.rbegin(), e.eigenvalues.rend()));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) CHECK(std::abs(embedded(e, i, j) - d(i, j)) <= 1e-7 * d(i, j));
    }
    // Columns: squared norm equals eigenvalue and (column / sqrt(lambda)) is an eigenvector of B.
    const auto b = double_centered(d);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> bm(
        b.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double bnorm = bm.norm();
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::VectorXd col(n);
      for (std::size_t i = 0; i < n; ++i) col[static_cast<Eigen::Index>(i)] = e.at(i, c);
      const double lambda = e.eigenvalues[c];
      CHECK(std::abs(col.squaredNorm() - lambda) <= 1e-9 * std::max(1.0, lambda));
      const Eigen::VectorXd v = col / std::sqrt(lambda);
      CHECK((bm * v - lambda * v).norm() <= 1e-8 * bnorm);
      // Sign convention: the largest-magnitude entry is positive.
      Eigen::Index at = 0;
      v.cwiseAbs().maxCoeff(&at);
      CHECK(v[at] > 0);
    }
  }
}

TEST_CASE("classical_mds: permutation of inputs permutes outputs") {
  Rng rng(77);
  const auto pts = random_points(rng, 9, 2);
  const auto e = classical_mds(from_points(pts), 2);
  std::vector<std::size_t> perm{3, 1, 4, 0, 8, 5, 2, 7, 6};
  std::vector<std::vector<double>> shuffled;
  for (auto p : perm) shuffled.push_back(pts[p]);
  const auto f = classical_mds(from_points(shuffled), 2);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(f.at(i, c) - e.at(perm[i], c)) < 1e-9);
  }
}

TEST_CASE("classical_mds: non-Euclidean input reports negative eigenvalues") {
  // Violates the triangle inequality badly.
  const DistanceMatrix d({"a", "b", "c", "d"}, {}, {0, 1, 5, 1, 1, 0, 1, 1, 5, 1, 0, 1, 1, 1, 1, 0});
  const auto e = classical_mds(d, 2);
  CHECK(e.negative_eigenvalues > 0);
  CHECK(e.eigenvalues.back() < 0);
}

TEST_CASE("emit_scatter writes SVG and CSV") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "stylo_scatter_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const DistanceMatrix d({"a", "b", "c"}, {"GPT", "HUMAN", "GPT"}, {0, 1, 2, 1, 0, 1.5, 2, 1.5, 0});
  const auto e = classical_mds(d, 2);
  const auto csv_path = emit_scatter(e, e.labels, dir / "plot.svg");
  CHECK(csv_path == dir / "plot.csv");
  const auto svg = io::read_file(dir / "plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);

  auto count_in_group = [&](const std::string& group, const std::string& needle) {
    const auto start = svg.find("<g id=\"" + group + "\"");
    const auto end = svg.find("</g>", start);
    std::size_t n = 0;
    for (auto p = svg.find(needle, start); p != std::string::npos && p < end; p = svg.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count_in_group("legend", "<text") == 2);
  const auto points = svg.substr(svg.find("<g id=\"points\">"));
  CHECK(std::count(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(points.find("</g>")), '\n') == 4);

  const auto csv = io::read_file(csv_path);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.rfind("doc_id,label,x,y\n", 0) == 0);
  emit_scatter(e, e.labels, dir / "again.svg");
  CHECK(io::read_file(dir / "again.csv") == csv);
  CHECK(io::read_file(dir / "again.svg") == svg);

  CHECK_THROWS_AS(emit_scatter(e, e.labels, dir / "no" / "such" / "dir.svg"), IoError);
  CHECK_THROWS_AS(emit_scatter(classical_mds(d, 1), e.labels, dir / "x.svg"), InvalidArgument);
  fs::remove_all(dir);
}
