// Dense revised simplex for  min c^T x  s.t.  A x = b, x >= 0.
//
// The basis inverse is kept explicitly (rows are few, columns many) and
// refactored periodically. Columns come from a ColumnSource so large
// structured problems can price all columns without materializing A.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace matherkit::lp {

class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual double cost(std::size_t j) const = 0;
  /// Writes column j of A into out (size rows()).
  virtual void column(std::size_t j, std::span<double> out) const = 0;
  /// reduced[j] = cost_weight * cost(j) - y^T A_j for all j.
  virtual void price(std::span<const double> y, double cost_weight,
                     std::span<double> reduced) const;
};

/// Row-major dense matrix source, mostly for tests and small problems.
class DenseColumns final : public ColumnSource {
 public:
  DenseColumns(std::size_t rows, std::size_t cols, std::vector<double> a_row_major,
               std::vector<double> costs);
  std::size_t rows() const override { return rows_; }
  std::size_t cols() const override { return cols_; }
  double cost(std::size_t j) const override { return costs_[j]; }
  void column(std::size_t j, std::span<double> out) const override;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> costs_;
};

enum class PivotRule {
  kBland,    // lowest-index entering column, lowest-index leaving tie-break
  kDantzig,  // most negative reduced cost; Bland after a degenerate streak
};

enum class SimplexStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(SimplexStatus status);

struct SimplexOptions {
  PivotRule rule = PivotRule::kDantzig;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 500000;
  std::size_t refactor_interval = 64;
  /// Consecutive degenerate pivots before Dantzig pricing falls back to Bland.
  std::size_t degenerate_streak = 5000;
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<std::size_t> basis;  // column indices; values >= cols() are artificials
  std::size_t iterations = 0;
};

SimplexResult solve(const ColumnSource& problem, std::span<const double> b,
                    const SimplexOptions& options = {});

}  // namespace matherkit::lp
