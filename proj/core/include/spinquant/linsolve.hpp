#ifndef SPINQUANT_LINSOLVE_HPP
#define SPINQUANT_LINSOLVE_HPP

#include "spinquant/ratfunc.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace spinq {

/// Incrementally built reduced row echelon form over a field F (Scalar or RatFunc).
/// Every stored row has a unit pivot and zeros in all other pivot columns.
template <class F> class Echelon {
public:
  explicit Echelon(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t rank() const { return rows_.size(); }
  const std::vector<std::vector<F>> &rows() const { return rows_; }
  const std::vector<std::size_t> &pivots() const { return pivot_cols_; }
  /// Pivot values as they were before normalization, in insertion order.
  const std::vector<F> &raw_pivots() const { return raw_pivots_; }

  /// Reduces `row` against the stored rows (in place).
  void reduce(std::vector<F> &row) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      std::size_t pc = pivot_cols_[r];
      if (row[pc].is_zero())
        continue;
      F f = row[pc];
      const auto &base = rows_[r];
      for (std::size_t c = 0; c < width_; ++c)
        if (!base[c].is_zero())
          row[c] -= f * base[c];
    }
  }

  /// Adds a row; returns false if it was dependent on the stored rows.
  bool insert(std::vector<F> row) {
    reduce(row);
    std::size_t pc = 0;
    while (pc < width_ && row[pc].is_zero())
      ++pc;
    if (pc == width_)
      return false;
    F piv = row[pc];
    F inv = F(1) / piv;
    for (auto &v : row)
      if (!v.is_zero())
        v *= inv;
    for (auto &other : rows_) {
      if (other[pc].is_zero())
        continue;
      F f = other[pc];
      for (std::size_t c = 0; c < width_; ++c)
        if (!row[c].is_zero())
          other[c] -= f * row[c];
    }
    rows_.push_back(std::move(row));
    pivot_cols_.push_back(pc);
    raw_pivots_.push_back(std::move(piv));
    return true;
  }

  bool is_pivot(std::size_t col) const {
    for (auto pc : pivot_cols_)
      if (pc == col)
        return true;
    return false;
  }

  /// Basis of {v : rows * v = 0} over the first `cols` columns.
  std::vector<std::vector<F>> nullspace(std::size_t cols) const {
    std::vector<std::vector<F>> out;
    for (std::size_t free = 0; free < cols; ++free) {
      if (is_pivot(free))
        continue;
      std::vector<F> v(cols, F(0));
      v[free] = F(1);
      for (std::size_t r = 0; r < rows_.size(); ++r)
        if (pivot_cols_[r] < cols)
          v[pivot_cols_[r]] = -rows_[r][free];
      out.push_back(std::move(v));
    }
    return out;
  }

private:
  std::size_t width_;
  std::vector<std::vector<F>> rows_;
  std::vector<std::size_t> pivot_cols_;
  std::vector<F> raw_pivots_;
};

/// A x = b with entries rational in one formal parameter.
struct ParamLinearSystem {
  std::size_t unknowns = 0;
  std::vector<std::vector<RatFunc>> matrix; // each row has `unknowns` entries
  std::vector<RatFunc> rhs;

  void add_row(std::vector<RatFunc> row, RatFunc b) {
    matrix.push_back(std::move(row));
    rhs.push_back(std::move(b));
  }
};

enum class SolveStatus { Unique, Underdetermined, Inconsistent };
enum class Failure { Existence, Uniqueness };

const char *to_string(SolveStatus s);
const char *to_string(Failure f);

struct SingularPoint {
  Rational value;
  Failure failure;
  friend bool operator==(const SingularPoint &, const SingularPoint &) = default;
};

/// Solution of a system at one numeric parameter value.
struct SpecializedSolution {
  SolveStatus status = SolveStatus::Unique;
  std::vector<Scalar> solution; // particular solution, free unknowns set to 0
  std::vector<std::vector<Scalar>> nullspace;
};

struct ParamSolution {
  SolveStatus status = SolveStatus::Unique;
  std::vector<RatFunc> solution; // particular solution, free unknowns set to 0
  std::vector<std::vector<RatFunc>> nullspace;
  /// Rational parameter values where the generic answer breaks down, ascending.
  std::vector<SingularPoint> singular;
  /// For generically inconsistent systems: rational values where it becomes solvable.
  std::vector<Rational> solvable_at;
};

/// Drops rows that are constant-coefficient combinations of other rows (after clearing
/// denominators); the solution set is unchanged away from poles of the dropped rows.
ParamLinearSystem compress_rows(const ParamLinearSystem &sys);

/// Fraction-field Gaussian elimination with pivot tracking; every candidate singular
/// value is confirmed by re-solving the specialized system.
ParamSolution solve_param(const ParamLinearSystem &sys);

/// Solves the system with the parameter specialized to t0. Rows whose entries have a
/// pole at t0 make the specialization undefined, reported as Inconsistent.
SpecializedSolution solve_specialized(const ParamLinearSystem &sys, const Scalar &t0);

/// Parameter-free solve.
SpecializedSolution solve_exact(const std::vector<std::vector<Scalar>> &matrix, const std::vector<Scalar> &rhs,
                                std::size_t unknowns);

} // namespace spinq

#endif
