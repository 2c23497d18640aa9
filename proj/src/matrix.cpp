#include "ctxsal/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxsal/error.hpp"

namespace ctxsal {

namespace {

void check_shape(std::size_t channels, std::size_t timesteps) {
  if (channels == 0 || timesteps == 0) {
    throw InvalidArgument("EegMatrix: shape must be at least 1x1, got " + std::to_string(channels) +
                          "x" + std::to_string(timesteps));
  }
}

}  // namespace

EegMatrix::EegMatrix(std::size_t channels, std::size_t timesteps, double fill)
    : channels_(channels), timesteps_(timesteps) {
  check_shape(channels, timesteps);
  if (!std::isfinite(fill)) throw InvalidArgument("EegMatrix: non-finite fill value");
  values_.assign(channels * timesteps, fill);
}

EegMatrix::EegMatrix(std::size_t channels, std::size_t timesteps, std::vector<double> values)
    : channels_(channels), timesteps_(timesteps), values_(std::move(values)) {
  check_shape(channels, timesteps);
  if (values_.size() != channels * timesteps) {
    throw InvalidArgument("EegMatrix: expected " + std::to_string(channels * timesteps) +
                          " values, got " + std::to_string(values_.size()));
  }
  if (!all_finite()) throw InvalidArgument("EegMatrix: values contain NaN or Inf");
}

EegMatrix EegMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvalidArgument("EegMatrix: no rows");
  const std::size_t t = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * t);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != t) {
      throw InvalidArgument("EegMatrix: row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " entries, expected " +
                            std::to_string(t));
    }
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  return EegMatrix(rows.size(), t, std::move(values));
}

bool EegMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const EegMatrix& a, const EegMatrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(what) + ": shape mismatch " + std::to_string(a.channels()) +
                          "x" + std::to_string(a.timesteps()) + " vs " +
                          std::to_string(b.channels()) + "x" + std::to_string(b.timesteps()));
  }
}

double frobenius_norm(const EegMatrix& x) {
  double s = 0.0;
  for (double v : x.values()) s += v * v;
  return std::sqrt(s);
}

double frobenius_distance(const EegMatrix& a, const EegMatrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  double s = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double relative_frobenius_error(const EegMatrix& a, const EegMatrix& reference) {
  const double denom = std::max(frobenius_norm(reference), 1e-300);
  return frobenius_distance(a, reference) / denom;
}

}  // namespace ctxsal
