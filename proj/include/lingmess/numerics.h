// Copyright 2026 The LingMess-cpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small dense linear algebra over doubles: a row-major matrix type, the
// handful of kernels the scorers need, a named parameter store with gradient
// slots, and a central-difference gradient checker.

#ifndef LINGMESS_NUMERICS_H_
#define LINGMESS_NUMERICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lingmess {

// Row-major matrix of doubles. Vectors are stored as n x 1 matrices.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(size_t rows, size_t cols, double fill = 0.0);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void Fill(double value);
  bool SameShape(const Tensor2 &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool operator==(const Tensor2 &other) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

// Exact GeLU, x * Phi(x) with Phi the standard normal CDF.
double Gelu(double x);
// d/dx of Gelu.
double GeluGrad(double x);

// Sequential left-to-right sum of products starting from 0.0. Every score in
// the library reduces through this, so equal inputs give equal bits.
double Dot(std::span<const double> a, std::span<const double> b);

// out = m * x.
void MatVec(const Tensor2 &m, std::span<const double> x, std::span<double> out);
// out += m^T * x.
void MatTVecAdd(const Tensor2 &m, std::span<const double> x,
                std::span<double> out);

// u^T B v, evaluated as Dot(u, B v).
double Bilinear(std::span<const double> u, const Tensor2 &b,
                std::span<const double> v);

// Stable log-sum-exp. Entries equal to -inf are ignored; throws
// std::domain_error if every entry is -inf.
double LogSumExp(std::span<const double> scores);
std::vector<double> LogSoftmax(std::span<const double> scores);

// splitmix64: the only random source in the library.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t Next();
  // Uniform in [0, 1) with 53 bits.
  double NextDouble();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }
  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n);

 private:
  uint64_t state_;
};

// Mixes several values into a derived seed.
uint64_t DeriveSeed(uint64_t base, uint64_t stream);

// Named tensors with same-shaped gradient tensors, iterated in insertion
// order.
class ParamStore {
 public:
  size_t Add(const std::string &name, Tensor2 init);

  size_t size() const { return values_.size(); }
  const std::string &name(size_t i) const { return names_[i]; }
  Tensor2 &value(size_t i) { return values_[i]; }
  const Tensor2 &value(size_t i) const { return values_[i]; }
  Tensor2 &grad(size_t i) { return grads_[i]; }
  const Tensor2 &grad(size_t i) const { return grads_[i]; }
  std::optional<size_t> Find(const std::string &name) const;

  void ZeroGrad();
  // Zero tensors shaped like every parameter, for per-document buffers.
  std::vector<Tensor2> ZeroGradsLike() const;
  // grad(i) += buffers[i] for all i.
  void AccumulateGrad(const std::vector<Tensor2> &buffers);
  size_t NumScalars() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor2> values_;
  std::vector<Tensor2> grads_;
  std::unordered_map<std::string, size_t> index_;
};

// Evaluates the loss at the store's current values. When compute_grad is
// set, the function must also write d(loss)/d(param) into the grad slots
// (which the checker zeroes beforehand).
using LossFunction = std::function<double(ParamStore &, bool compute_grad)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  size_t worst_param = 0;
  size_t worst_entry = 0;
  size_t entries_checked = 0;
};

// Compares analytic gradients to (f(t+eps) - f(t-eps)) / (2 eps) for every
// entry of every parameter. The relative error of one entry is
// |a - n| / max(1e-8, |a| + |n|). Throws on a non-finite loss or on eps
// outside (0, 1e-3].
GradCheckResult CheckGradients(ParamStore &store, const LossFunction &loss,
                               double eps = 1e-6);

}  // namespace lingmess

#endif  // LINGMESS_NUMERICS_H_
