#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctxsal {

/// Dense row-major Ch x T matrix of doubles. Row = channel, column = time step.
///
/// Construction rejects empty shapes and non-finite values. Mutable access is
/// provided for kernels that fill a matrix in place; callers writing through it
/// are responsible for keeping entries finite.
class EegMatrix {
 public:
  EegMatrix(std::size_t channels, std::size_t timesteps, double fill = 0.0);
  EegMatrix(std::size_t channels, std::size_t timesteps, std::vector<double> values);

  static EegMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t channels() const { return channels_; }
  std::size_t timesteps() const { return timesteps_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t ch, std::size_t t) const { return values_[ch * timesteps_ + t]; }
  double& operator()(std::size_t ch, std::size_t t) { return values_[ch * timesteps_ + t]; }

  std::span<const double> row(std::size_t ch) const {
    return {values_.data() + ch * timesteps_, timesteps_};
  }
  std::span<double> row(std::size_t ch) { return {values_.data() + ch * timesteps_, timesteps_}; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool same_shape(const EegMatrix& other) const {
    return channels_ == other.channels_ && timesteps_ == other.timesteps_;
  }

  bool all_finite() const;

  friend bool operator==(const EegMatrix&, const EegMatrix&) = default;

 private:
  std::size_t channels_;
  std::size_t timesteps_;
  std::vector<double> values_;
};

// Throws InvalidArgument naming `what` when shapes differ.
void require_same_shape(const EegMatrix& a, const EegMatrix& b, const char* what);

double frobenius_norm(const EegMatrix& x);
double frobenius_distance(const EegMatrix& a, const EegMatrix& b);

// ||a - b||_F / max(||b||_F, tiny); b is the reference.
double relative_frobenius_error(const EegMatrix& a, const EegMatrix& reference);

}  // namespace ctxsal
