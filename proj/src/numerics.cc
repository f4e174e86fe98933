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

#include "lingmess/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lingmess {

Tensor2::Tensor2(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

void Tensor2::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

double Gelu(double x) {
  return 0.5 * x * std::erfc(-x / std::numbers::sqrt2);
}

double GeluGrad(double x) {
  const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
  const double pdf =
      std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("Dot: length mismatch");
  }
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void MatVec(const Tensor2 &m, std::span<const double> x, std::span<double> out) {
  if (m.cols() != x.size() || m.rows() != out.size()) {
    throw std::invalid_argument("MatVec: dimension mismatch");
  }
  for (size_t r = 0; r < m.rows(); ++r) out[r] = Dot(m.row(r), x);
}

void MatTVecAdd(const Tensor2 &m, std::span<const double> x,
                std::span<double> out) {
  if (m.rows() != x.size() || m.cols() != out.size()) {
    throw std::invalid_argument("MatTVecAdd: dimension mismatch");
  }
  for (size_t r = 0; r < m.rows(); ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    auto row = m.row(r);
    for (size_t c = 0; c < m.cols(); ++c) out[c] += xr * row[c];
  }
}

double Bilinear(std::span<const double> u, const Tensor2 &b,
                std::span<const double> v) {
  if (u.size() != b.rows() || v.size() != b.cols()) {
    throw std::invalid_argument("Bilinear: dimension mismatch");
  }
  std::vector<double> bv(b.rows());
  MatVec(b, v, bv);
  return Dot(u, bv);
}

double LogSumExp(std::span<const double> scores) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double max = kNegInf;
  for (double s : scores) max = std::max(max, s);
  if (max == kNegInf) {
    throw std::domain_error("LogSumExp: no finite entry");
  }
  double sum = 0.0;
  for (double s : scores) {
    if (s != kNegInf) sum += std::exp(s - max);
  }
  return max + std::log(sum);
}

std::vector<double> LogSoftmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("LogSoftmax: empty input");
  const double lse = LogSumExp(scores);
  std::vector<double> out(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] - lse;
  return out;
}

uint64_t SplitMix64::Next() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::NextDouble() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

uint64_t SplitMix64::Below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("SplitMix64::Below: n == 0");
  // Rejection sampling keeps the draw unbiased.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % n;
}

uint64_t DeriveSeed(uint64_t base, uint64_t stream) {
  SplitMix64 mix(base ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
  mix.Next();
  return mix.Next();
}

size_t ParamStore::Add(const std::string &name, Tensor2 init) {
  if (index_.count(name) > 0) {
    throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  }
  const size_t i = values_.size();
  index_.emplace(name, i);
  names_.push_back(name);
  grads_.emplace_back(init.rows(), init.cols());
  values_.push_back(std::move(init));
  return i;
}

std::optional<size_t> ParamStore::Find(const std::string &name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ParamStore::ZeroGrad() {
  for (auto &g : grads_) g.Fill(0.0);
}

std::vector<Tensor2> ParamStore::ZeroGradsLike() const {
  std::vector<Tensor2> out;
  out.reserve(values_.size());
  for (const auto &v : values_) out.emplace_back(v.rows(), v.cols());
  return out;
}

void ParamStore::AccumulateGrad(const std::vector<Tensor2> &buffers) {
  if (buffers.size() != grads_.size()) {
    throw std::invalid_argument("AccumulateGrad: buffer count mismatch");
  }
  for (size_t i = 0; i < grads_.size(); ++i) {
    if (!buffers[i].SameShape(grads_[i])) {
      throw std::invalid_argument("AccumulateGrad: shape mismatch for " +
                                  names_[i]);
    }
    auto dst = grads_[i].data();
    auto src = buffers[i].data();
    for (size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

size_t ParamStore::NumScalars() const {
  size_t n = 0;
  for (const auto &v : values_) n += v.size();
  return n;
}

GradCheckResult CheckGradients(ParamStore &store, const LossFunction &loss,
                               double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) {
    throw std::invalid_argument("CheckGradients: eps must be in (0, 1e-3]");
  }
  store.ZeroGrad();
  const double base = loss(store, true);
  if (!std::isfinite(base)) {
    throw std::domain_error("CheckGradients: non-finite loss");
  }
  std::vector<Tensor2> analytic;
  for (size_t i = 0; i < store.size(); ++i) analytic.push_back(store.grad(i));

  GradCheckResult result;
  for (size_t p = 0; p < store.size(); ++p) {
    auto values = store.value(p).data();
    for (size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + eps;
      const double up = loss(store, false);
      values[k] = saved - eps;
      const double down = loss(store, false);
      values[k] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::domain_error("CheckGradients: non-finite loss at " +
                                store.name(p));
      }
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[p].data()[k];
      const double err =
          std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      ++result.entries_checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_param = p;
        result.worst_entry = k;
      }
    }
  }
  for (size_t i = 0; i < store.size(); ++i) store.grad(i) = analytic[i];
  return result;
}

}  // namespace lingmess
