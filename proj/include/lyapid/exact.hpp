#pragma once

// Exact rational scalars and dense matrices.
//
// Rational is GMP's mpq_class. Arithmetic results are canonical (lowest
// terms, positive denominator); build fractions with ratio(), since the
// two-argument mpq_class constructor does not reduce. Determinant, rank and
// the linear solvers run fraction-free Bareiss elimination on an integer copy
// of the matrix, with each row scaled by the lcm of its denominators.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lyapid {

using Rational = mpq_class;
using RatVector = std::vector<Rational>;

inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p/q", integers and plain decimals ("1.875" -> 15/8).
Rational parse_rational(std::string_view text);
// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational &r);

class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  RatMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static RatMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Rational &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  RatMatrix transpose() const;
  RatVector column(std::size_t c) const;
  void set_column(std::size_t c, const RatVector &v);
  bool is_symmetric() const;
  // Rows and columns picked by 0-based index lists.
  RatMatrix submatrix(const std::vector<std::size_t> &rows,
                      const std::vector<std::size_t> &cols) const;

  RatMatrix operator+(const RatMatrix &o) const;
  RatMatrix operator-(const RatMatrix &o) const;
  RatMatrix operator*(const RatMatrix &o) const;
  RatVector operator*(const RatVector &v) const;
  RatMatrix scaled(const Rational &s) const;

  bool operator==(const RatMatrix &o) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Rational det(const RatMatrix &m);
int rank(const RatMatrix &m);

// Unique solution of a square system, or nullopt when a is singular.
std::optional<RatVector> solve(const RatMatrix &a, const RatVector &b);

enum class SystemStatus { kUnique, kInconsistent, kRankDeficient };

struct OverdeterminedSolution {
  SystemStatus status = SystemStatus::kInconsistent;
  RatVector x;  // set only for kUnique
};

// Solves a tall system of full column rank exactly. A row subset with a
// nonzero maximal minor is chosen by elimination; the solution is then
// verified against every row.
OverdeterminedSolution solve_overdetermined(const RatMatrix &a, const RatVector &b);

// Sylvester's criterion. Throws on non-symmetric input.
bool is_positive_definite(const RatMatrix &m);

RatMatrix kron(const RatMatrix &a, const RatMatrix &b);

// One row per line, comma-separated entries in any parse_rational syntax.
RatMatrix parse_matrix_csv(std::string_view text);
std::string format_matrix_csv(const RatMatrix &m);

}  // namespace lyapid
