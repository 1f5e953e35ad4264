#include "lyapid/exact.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace lyapid {

namespace {

using IntMatrix = std::vector<std::vector<mpz_class>>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Each row multiplied by the lcm of its denominators. Optionally appends
// b as a final column before scaling.
IntMatrix to_integer_rows(const RatMatrix &m, const RatVector *b,
                          mpz_class *scale_product) {
  IntMatrix out(m.rows());
  if (scale_product) *scale_product = 1;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    mpz_class l = 1;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
    }
    if (b) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*b)[r].get_den_mpz_t());
    auto &row = out[r];
    row.reserve(m.cols() + (b ? 1 : 0));
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c).get_num() * (l / m(r, c).get_den()));
    }
    if (b) row.push_back((*b)[r].get_num() * (l / (*b)[r].get_den()));
    if (scale_product) *scale_product *= l;
  }
  return out;
}

struct Elimination {
  std::vector<std::size_t> pivot_cols;  // pivot column of row k
  bool odd_swaps = false;
};

// Fraction-free row echelon form. Pivots are searched only in the first
// `pivot_limit` columns; the remaining columns ride along.
Elimination bareiss(IntMatrix &m, std::size_t pivot_limit) {
  Elimination e;
  const std::size_t rows = m.size();
  if (rows == 0) return e;
  const std::size_t cols = m[0].size();
  mpz_class prev = 1;
  mpz_class tmp;
  std::size_t r = 0;
  for (std::size_t c = 0; c < pivot_limit && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap(m[p], m[r]);
      e.odd_swaps = !e.odd_swaps;
    }
    const mpz_class &piv = m[r][c];
    for (std::size_t i = r + 1; i < rows; ++i) {
      const mpz_class lead = m[i][c];
      for (std::size_t j = c + 1; j < cols; ++j) {
        tmp = piv * m[i][j];
        tmp -= lead * m[r][j];
        mpz_divexact(m[i][j].get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev = piv;
    e.pivot_cols.push_back(c);
    ++r;
  }
  return e;
}

// Back substitution on the leading square block of an echelon form whose
// pivots sit on the diagonal; the last column holds the right-hand side.
RatVector back_substitute(const IntMatrix &m, std::size_t n) {
  RatVector x(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational acc(m[k][n]);
    for (std::size_t j = k + 1; j < n; ++j) acc -= Rational(m[k][j]) * x[j];
    x[k] = acc / Rational(m[k][k]);
    x[k].canonicalize();
  }
  return x;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const std::string str(s);
  if (s.find('/') != std::string_view::npos) {
    const auto slash = s.find('/');
    auto num = s.substr(0, slash);
    const auto den = s.substr(slash + 1);
    if (!num.empty() && (num[0] == '-' || num[0] == '+')) num.remove_prefix(1);
    if (!all_digits(num) || !all_digits(den)) {
      throw std::invalid_argument("malformed rational '" + str + "'");
    }
    Rational r;
    std::string cleaned = str[0] == '+' ? str.substr(1) : str;
    mpq_set_str(r.get_mpq_t(), cleaned.c_str(), 10);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + str + "'");
    r.canonicalize();
    return r;
  }
  std::string_view body = s;
  bool negative = false;
  if (body[0] == '-' || body[0] == '+') {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  const auto dot = body.find('.');
  const auto int_part = body.substr(0, dot);
  const auto frac_part =
      dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
  if ((int_part.empty() && frac_part.empty()) ||
      (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part)) ||
      (dot != std::string_view::npos && frac_part.empty() && int_part.empty())) {
    throw std::invalid_argument("malformed number '" + str + "'");
  }
  const std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class num(digits.empty() ? std::string("0") : digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
  Rational r(num, den);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational &r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

RatMatrix::RatMatrix(std::initializer_list<std::initializer_list<Rational>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto &row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

RatVector RatMatrix::column(std::size_t c) const {
  RatVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void RatMatrix::set_column(std::size_t c, const RatVector &v) {
  if (v.size() != rows_) throw std::invalid_argument("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

bool RatMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if ((*this)(r, c) != (*this)(c, r)) return false;
  return true;
}

RatMatrix RatMatrix::submatrix(const std::vector<std::size_t> &rows,
                               const std::vector<std::size_t> &cols) const {
  RatMatrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = (*this)(rows[r], cols[c]);
  return out;
}

RatMatrix RatMatrix::operator+(const RatMatrix &o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
  RatMatrix out(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] + o.data_[k];
  return out;
}

RatMatrix RatMatrix::operator-(const RatMatrix &o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch");
  RatMatrix out(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] - o.data_[k];
  return out;
}

RatMatrix RatMatrix::operator*(const RatMatrix &o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("shape mismatch");
  RatMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational &a = (*this)(r, k);
      if (a == 0) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

RatVector RatMatrix::operator*(const RatVector &v) const {
  if (cols_ != v.size()) throw std::invalid_argument("shape mismatch");
  RatVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
  return out;
}

RatMatrix RatMatrix::scaled(const Rational &s) const {
  RatMatrix out = *this;
  for (auto &x : out.data_) x *= s;
  return out;
}

bool RatMatrix::operator==(const RatMatrix &o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Rational det(const RatMatrix &m) {
  if (!m.is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  mpz_class scale;
  IntMatrix im = to_integer_rows(m, nullptr, &scale);
  const auto e = bareiss(im, n);
  if (e.pivot_cols.size() < n) return 0;
  Rational out(im[n - 1][n - 1], scale);
  out.canonicalize();
  return e.odd_swaps ? Rational(-out) : out;
}

int rank(const RatMatrix &m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  IntMatrix im = to_integer_rows(m, nullptr, nullptr);
  return static_cast<int>(bareiss(im, m.cols()).pivot_cols.size());
}

std::optional<RatVector> solve(const RatMatrix &a, const RatVector &b) {
  if (!a.is_square()) throw std::invalid_argument("solve needs a square matrix");
  if (b.size() != a.rows()) throw std::invalid_argument("right-hand side length mismatch");
  const std::size_t n = a.rows();
  IntMatrix im = to_integer_rows(a, &b, nullptr);
  if (bareiss(im, n).pivot_cols.size() < n) return std::nullopt;
  return back_substitute(im, n);
}

OverdeterminedSolution solve_overdetermined(const RatMatrix &a, const RatVector &b) {
  if (b.size() != a.rows()) throw std::invalid_argument("right-hand side length mismatch");
  const std::size_t cols = a.cols();
  IntMatrix im = to_integer_rows(a, &b, nullptr);
  const auto e = bareiss(im, cols);
  OverdeterminedSolution out;
  if (e.pivot_cols.size() < cols) {
    out.status = SystemStatus::kRankDeficient;
    return out;
  }
  for (std::size_t r = cols; r < im.size(); ++r) {
    if (im[r][cols] != 0) {
      out.status = SystemStatus::kInconsistent;
      return out;
    }
  }
  IntMatrix head(im.begin(), im.begin() + static_cast<std::ptrdiff_t>(cols));
  out.x = back_substitute(head, cols);
  if (a * out.x != b) {
    throw std::logic_error("exact residual check failed after elimination");
  }
  out.status = SystemStatus::kUnique;
  return out;
}

bool is_positive_definite(const RatMatrix &m) {
  if (!m.is_symmetric()) throw std::invalid_argument("positive-definiteness needs a symmetric matrix");
  const std::size_t n = m.rows();
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k) {
    idx.push_back(k);
    if (det(m.submatrix(idx, idx)) <= 0) return false;
  }
  return true;
}

RatMatrix kron(const RatMatrix &a, const RatMatrix &b) {
  RatMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Rational &s = a(i, j);
      if (s == 0) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
    }
  return out;
}

RatMatrix parse_matrix_csv(std::string_view text) {
  std::vector<RatVector> rows;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    RatVector row;
    std::size_t fpos = 0;
    while (true) {
      const auto comma = line.find(',', fpos);
      const auto field = line.substr(fpos, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - fpos);
      try {
        row.push_back(parse_rational(field));
      } catch (const std::invalid_argument &err) {
        throw std::invalid_argument("matrix line " + std::to_string(line_no) + ": " +
                                    err.what());
      }
      if (comma == std::string_view::npos) break;
      fpos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("matrix line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(rows.front().size()) +
                                  " entries");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  RatMatrix out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(r, c) = rows[r][c];
  return out;
}

std::string format_matrix_csv(const RatMatrix &m) {
  std::ostringstream out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << to_string(m(r, c));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace lyapid
