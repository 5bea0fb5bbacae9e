// SPDX-License-Identifier: Apache-2.0

#ifndef FRACFLOW_CORE_HPP
#define FRACFLOW_CORE_HPP

#include <cstdint>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fracflow {

using Vec2 = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct FracflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when the solve-unit budget (the cost metric) is exhausted.
struct BudgetExceeded : FracflowError {
  BudgetExceeded() : FracflowError("solve-unit budget exceeded") {}
};

struct StaleBasisError : FracflowError {
  using FracflowError::FracflowError;
};

/// Cost metric: one unit is one sweep of higher-dimensional (sub-domain)
/// Robin solves, regardless of how many sub-domains take part in the sweep.
class SolveCounter {
 public:
  enum class Phase { Basis, Source, Interface, Recovery };

  void add(Phase phase, int units = 1) {
    if (max_units_ > 0 && units_ + units > max_units_) {
      exceeded_ = true;
      throw BudgetExceeded{};
    }
    units_ += units;
    breakdown_[phase] += units;
  }

  void set_budget(long max_units) { max_units_ = max_units; }
  long budget() const { return max_units_; }
  bool exceeded() const { return exceeded_; }

  long units() const { return units_; }
  long units(Phase phase) const {
    auto it = breakdown_.find(phase);
    return it == breakdown_.end() ? 0 : it->second;
  }

  void reset() {
    units_ = 0;
    exceeded_ = false;
    breakdown_.clear();
  }

 private:
  long units_ = 0;
  long max_units_ = 0;  // 0 = unlimited
  bool exceeded_ = false;
  std::map<Phase, long> breakdown_;
};

// FNV-1a, used to fingerprint geometry/parameter state for basis reuse.
class Hasher {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xff;
      h_ *= 0x100000001b3ull;
    }
  }
  void add(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    add(bits);
  }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace fracflow

#endif  // FRACFLOW_CORE_HPP
