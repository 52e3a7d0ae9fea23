#include "matherkit/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace matherkit::lp {

void ColumnSource::price(std::span<const double> y, double cost_weight,
                         std::span<double> reduced) const {
  std::vector<double> col(rows());
  for (std::size_t j = 0; j < cols(); ++j) {
    column(j, col);
    double s = cost_weight * cost(j);
    for (std::size_t r = 0; r < col.size(); ++r) s -= y[r] * col[r];
    reduced[j] = s;
  }
}

DenseColumns::DenseColumns(std::size_t rows, std::size_t cols, std::vector<double> a_row_major,
                           std::vector<double> costs)
    : rows_(rows), cols_(cols), a_(std::move(a_row_major)), costs_(std::move(costs)) {
  if (a_.size() != rows_ * cols_ || costs_.size() != cols_) {
    throw std::invalid_argument("DenseColumns: inconsistent dimensions");
  }
}

void DenseColumns::column(std::size_t j, std::span<double> out) const {
  for (std::size_t r = 0; r < rows_; ++r) out[r] = a_[r * cols_ + j];
}

std::string to_string(SimplexStatus status) {
  switch (status) {
    case SimplexStatus::kOptimal: return "optimal";
    case SimplexStatus::kInfeasible: return "infeasible";
    case SimplexStatus::kUnbounded: return "unbounded";
    case SimplexStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(const ColumnSource& problem, std::span<const double> b, const SimplexOptions& options)
      : problem_(problem),
        options_(options),
        m_(problem.rows()),
        n_(problem.cols()),
        sign_(m_, 1.0),
        rhs_(m_),
        binv_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_),
                                        static_cast<Eigen::Index>(m_))),
        x_basic_(m_),
        basis_(m_),
        is_basic_(n_, false),
        reduced_(n_),
        scratch_(m_) {
    if (b.size() != m_) throw std::invalid_argument("simplex: rhs size mismatch");
    for (std::size_t r = 0; r < m_; ++r) {
      sign_[r] = b[r] < 0.0 ? -1.0 : 1.0;
      rhs_[r] = sign_[r] * b[r];
      x_basic_[r] = rhs_[r];
      basis_[r] = n_ + r;  // artificial for row r
    }
  }

  // phase 1 minimizes the sum of artificials; phase 2 the true cost with
  // artificials pinned at zero.
  SimplexStatus run(bool phase_one, std::size_t& iterations) {
    std::size_t since_refactor = 0;
    std::size_t degenerate = 0;
    while (true) {
      if (iterations >= options_.max_iterations) return SimplexStatus::kIterationLimit;
      if (since_refactor >= options_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      compute_duals(phase_one);
      problem_.price(duals_, phase_one ? 0.0 : 1.0, reduced_);

      const bool bland = options_.rule == PivotRule::kBland || degenerate >= options_.degenerate_streak;
      const std::size_t entering = choose_entering(bland);
      if (entering == kNone) return SimplexStatus::kOptimal;

      load_column(entering, scratch_);
      const Eigen::VectorXd alpha = binv_ * Eigen::Map<const Eigen::VectorXd>(
                                                scratch_.data(), static_cast<Eigen::Index>(m_));
      const std::size_t leaving = choose_leaving(alpha, phase_one, bland);
      if (leaving == kNone) return SimplexStatus::kUnbounded;

      const double theta = std::max(0.0, x_basic_[leaving] / alpha[static_cast<Eigen::Index>(leaving)]);
      degenerate = theta <= options_.feasibility_tol ? degenerate + 1 : 0;
      pivot(entering, leaving, alpha, theta);
      ++iterations;
      ++since_refactor;
    }
  }

  double artificial_mass() const {
    double s = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] >= n_) s += std::max(0.0, x_basic_[r]);
    }
    return s;
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      load_column(basis_[r], scratch_);
      for (std::size_t k = 0; k < m_; ++k) {
        basis_matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = scratch_[k];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();
    const Eigen::VectorXd xb =
        binv_ * Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      x_basic_[r] = xb[static_cast<Eigen::Index>(r)];
      if (x_basic_[r] < 0.0 && x_basic_[r] > -options_.feasibility_tol) x_basic_[r] = 0.0;
    }
  }

  SimplexResult result(SimplexStatus status, std::size_t iterations) {
    SimplexResult res;
    res.status = status;
    res.iterations = iterations;
    res.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) res.x[basis_[r]] = std::max(0.0, x_basic_[r]);
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (res.x[j] != 0.0) obj += problem_.cost(j) * res.x[j];
    }
    res.objective = obj;
    compute_duals(false);
    res.duals = duals_;
    res.basis = basis_;
    return res;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void load_column(std::size_t j, std::vector<double>& out) const {
    if (j >= n_) {
      std::fill(out.begin(), out.end(), 0.0);
      out[j - n_] = 1.0;
      return;
    }
    problem_.column(j, out);
    for (std::size_t r = 0; r < m_; ++r) out[r] *= sign_[r];
  }

  void compute_duals(bool phase_one) {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t j = basis_[r];
      double c = 0.0;
      if (phase_one) {
        c = j >= n_ ? 1.0 : 0.0;
      } else if (j < n_) {
        c = problem_.cost(j);
      }
      cb[static_cast<Eigen::Index>(r)] = c;
    }
    const Eigen::VectorXd y = binv_.transpose() * cb;
    duals_.resize(m_);
    // Undo the row sign flips so the source prices against the original rows.
    for (std::size_t r = 0; r < m_; ++r) duals_[r] = y[static_cast<Eigen::Index>(r)] * sign_[r];
  }

  std::size_t choose_entering(bool bland) const {
    const double tol = options_.optimality_tol;
    std::size_t best = kNone;
    double best_value = -tol;
    for (std::size_t j = 0; j < n_; ++j) {
      if (is_basic_[j]) continue;
      const double d = reduced_[j];
      if (d >= -tol) continue;
      if (bland) return j;
      if (d < best_value) {
        best_value = d;
        best = j;
      }
    }
    return best;
  }

  std::size_t choose_leaving(const Eigen::VectorXd& alpha, bool phase_one, bool bland) const {
    std::size_t best = kNone;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = alpha[static_cast<Eigen::Index>(r)];
      double ratio;
      if (!phase_one && basis_[r] >= n_) {
        // Artificial pinned at zero: any nonzero entry blocks the step.
        if (std::abs(a) <= options_.pivot_tol) continue;
        ratio = 0.0;
      } else {
        if (a <= options_.pivot_tol) continue;
        ratio = std::max(0.0, x_basic_[r]) / a;
      }
      bool take = false;
      const double slack = 1e-12 * std::max(1.0, best == kNone ? 0.0 : best_ratio);
      if (best == kNone || ratio < best_ratio - slack) {
        take = true;
      } else if (ratio <= best_ratio + slack) {
        if (bland) {
          take = basis_[r] < basis_[best];
        } else {
          take = std::abs(a) > best_pivot;
        }
      }
      if (take) {
        best = r;
        best_ratio = ratio;
        best_pivot = std::abs(a);
      }
    }
    return best;
  }

  void pivot(std::size_t entering, std::size_t leaving, const Eigen::VectorXd& alpha,
             double theta) {
    const auto lr = static_cast<Eigen::Index>(leaving);
    const double pivot_value = alpha[lr];
    for (std::size_t r = 0; r < m_; ++r) {
      x_basic_[r] -= theta * alpha[static_cast<Eigen::Index>(r)];
    }
    x_basic_[leaving] = theta;
    for (std::size_t r = 0; r < m_; ++r) {
      if (x_basic_[r] < 0.0 && x_basic_[r] > -options_.feasibility_tol) x_basic_[r] = 0.0;
    }

    binv_.row(lr) /= pivot_value;
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(m_); ++r) {
      if (r == lr) continue;
      const double f = alpha[r];
      if (f != 0.0) binv_.row(r) -= f * binv_.row(lr);
    }

    const std::size_t old = basis_[leaving];
    if (old < n_) is_basic_[old] = false;
    basis_[leaving] = entering;
    is_basic_[entering] = true;
  }

  const ColumnSource& problem_;
  const SimplexOptions& options_;
  std::size_t m_;
  std::size_t n_;
  std::vector<double> sign_;
  std::vector<double> rhs_;
  Eigen::MatrixXd binv_;
  std::vector<double> x_basic_;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<double> duals_;
  std::vector<double> reduced_;
  std::vector<double> scratch_;
};

}  // namespace

SimplexResult solve(const ColumnSource& problem, std::span<const double> b,
                    const SimplexOptions& options) {
  if (problem.rows() == 0) throw std::invalid_argument("simplex: no constraints");
  Tableau tableau(problem, b, options);
  std::size_t iterations = 0;

  SimplexStatus status = tableau.run(true, iterations);
  if (status == SimplexStatus::kIterationLimit) return tableau.result(status, iterations);
  tableau.refactor();
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (tableau.artificial_mass() > options.feasibility_tol * scale * 10.0) {
    return tableau.result(SimplexStatus::kInfeasible, iterations);
  }

  status = tableau.run(false, iterations);
  tableau.refactor();
  return tableau.result(status, iterations);
}

}  // namespace matherkit::lp
