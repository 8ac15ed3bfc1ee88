#include "stylo/distance.hpp"

#include <cmath>
#include <sstream>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"

namespace stylo {

namespace {

void check_distribution(std::span<const double> p, double tolerance) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw InvalidArgument("distribution has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw InvalidArgument("distribution sums to " + csv::format_double(sum) + ", not 1");
  }
}

}  // namespace

double sjs_distance(std::span<const double> x, std::span<const double> y, double tolerance) {
  if (x.size() != y.size()) throw InvalidArgument("distributions differ in length");
  check_distribution(x, tolerance);
  check_distribution(y, tolerance);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = x[i] + y[i];
    if (s == 0.0) continue;
    double term = 0.0;
    if (x[i] > 0.0) term += x[i] * std::log(2.0 * x[i] / s);
    if (y[i] > 0.0) term += y[i] * std::log(2.0 * y[i] / s);
    acc += term;
  }
  return std::sqrt(std::max(0.0, 0.5 * acc));
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> doc_ids, std::vector<std::string> labels,
                               std::vector<double> values)
    : doc_ids_(std::move(doc_ids)), labels_(std::move(labels)), values_(std::move(values)) {
  if (labels_.empty()) labels_.resize(doc_ids_.size());
  if (labels_.size() != doc_ids_.size() || values_.size() != doc_ids_.size() * doc_ids_.size()) {
    throw InvalidArgument("distance matrix shape mismatch");
  }
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (values_[i * n + i] != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values_[i * n + j];
      if (!(v >= 0.0)) throw InvalidArgument("distance matrix has a negative entry");
      if (std::abs(v - values_[j * n + i]) > 1e-12) {
        throw InvalidArgument("distance matrix is not symmetric");
      }
    }
  }
}

std::string DistanceMatrix::to_csv() const {
  std::ostringstream out;
  csv::Row header{"doc_id"};
  header.insert(header.end(), doc_ids_.begin(), doc_ids_.end());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < size(); ++i) {
    csv::Row line{doc_ids_[i]};
    for (std::size_t j = 0; j < size(); ++j) line.push_back(csv::format_double((*this)(i, j)));
    csv::write_row(out, line);
  }
  return out.str();
}

DistanceMatrix DistanceMatrix::from_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError("distance CSV is empty", 0);
  const std::vector<std::string> ids(rows[0].begin() + 1, rows[0].end());
  const std::size_t n = ids.size();
  if (rows.size() != n + 1) throw ParseError("distance CSV is not square", 0);
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i + 1];
    if (r.size() != n + 1 || r[0] != ids[i]) {
      throw ParseError("distance CSV row does not match header", i + 2);
    }
    for (std::size_t j = 0; j < n; ++j) {
      try {
        values.push_back(std::stod(r[j + 1]));
      } catch (const std::exception&) {
        throw ParseError("bad number '" + r[j + 1] + "'", i + 2);
      }
    }
  }
  return DistanceMatrix(ids, {}, std::move(values));
}

DistanceMatrix distance_matrix(const FeatureMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d;
      try {
        d = sjs_distance(m.row(i), m.row(j));
      } catch (const InvalidArgument& e) {
        // Re-check each row alone to name the bad one.
        const auto& bad = [&]() -> const std::string& {
          try {
            sjs_distance(m.row(i), m.row(i));
          } catch (const InvalidArgument&) {
            return m.doc_ids()[i];
          }
          return m.doc_ids()[j];
        }();
        throw InvalidArgument("document '" + bad + "': " + e.what());
      }
      values[i * n + j] = d;
      values[j * n + i] = d;
    }
  }
  if (n == 1) {
    try {
      sjs_distance(m.row(0), m.row(0));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("document '" + m.doc_ids()[0] + "': " + e.what());
    }
  }
  return DistanceMatrix(m.doc_ids(), m.labels(), std::move(values));
}

}  // namespace stylo
