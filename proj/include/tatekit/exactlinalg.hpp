#pragma once

// Exact sparse linear algebra over Q.
//
// All elimination goes through EchelonBasis, which keeps its rows in reduced
// row echelon form with the pivot of every row at its first nonzero column.
// Because the RREF of a row space is unique, every basis produced here
// (kernels, complements, canonical solutions) depends only on the input
// matrix and never on insertion details.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tatekit/errors.hpp"

namespace tatekit {

using Rational = mpq_class;
using Vector = std::vector<Rational>;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// n/d in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational frac(long n, long d) {
  if (d == 0) throw InputError("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw InputError("malformed rational number '" + text + "'");
  if (q.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

inline bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return sgn(q) == 0; });
}

/// Sparse vector: (index, value) pairs sorted by index, no zero values.
using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

inline SparseRow to_sparse(const Vector& v) {
  SparseRow row;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) row.emplace_back(i, v[i]);
  return row;
}

inline Vector to_dense(const SparseRow& row, std::size_t size) {
  Vector v(size);
  for (const auto& [i, q] : row) v.at(i) = q;
  return v;
}

/// row += factor * other
inline void axpy(SparseRow& row, const Rational& factor, const SparseRow& other) {
  if (sgn(factor) == 0 || other.empty()) return;
  SparseRow out;
  out.reserve(row.size() + other.size());
  auto a = row.begin();
  auto b = other.begin();
  while (a != row.end() || b != other.end()) {
    if (b == other.end() || (a != row.end() && a->first < b->first)) {
      out.push_back(std::move(*a++));
    } else if (a == row.end() || b->first < a->first) {
      out.emplace_back(b->first, factor * b->second);
      ++b;
    } else {
      Rational v = a->second + factor * b->second;
      if (sgn(v) != 0) out.emplace_back(a->first, std::move(v));
      ++a;
      ++b;
    }
  }
  row = std::move(out);
}

inline Rational coefficient(const SparseRow& row, std::size_t index) {
  auto it = std::lower_bound(row.begin(), row.end(), index,
                             [](const auto& e, std::size_t i) { return e.first < i; });
  if (it != row.end() && it->first == index) return it->second;
  return Rational(0);
}

/// Incrementally maintained reduced row echelon basis of a row space.
class EchelonBasis {
public:
  explicit EchelonBasis(std::size_t width = 0) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t rank() const { return rows_.size(); }
  const std::vector<SparseRow>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  bool is_pivot(std::size_t col) const { return pivot_row_.count(col) != 0; }

  /// Eliminates every pivot column from `row`.
  SparseRow reduce(SparseRow row) const {
    // Pivot columns of the reduced basis never appear in other basis rows,
    // so a single pass over the pivots of `row` suffices.
    std::vector<std::pair<std::size_t, Rational>> hits;
    for (const auto& [col, q] : row) {
      auto it = pivot_row_.find(col);
      if (it != pivot_row_.end()) hits.emplace_back(it->second, q);
    }
    for (const auto& [r, q] : hits) axpy(row, -q, rows_[r]);
    return row;
  }

  bool contains(const SparseRow& row) const { return reduce(row).empty(); }

  /// Adds `row` to the span; returns false when it was already dependent.
  bool insert(const SparseRow& row) {
    SparseRow r = reduce(row);
    if (r.empty()) return false;
    std::size_t pivot = r.front().first;
    Rational lead = r.front().second;
    for (auto& [c, q] : r) q /= lead;
    for (auto& other : rows_) {
      Rational q = coefficient(other, pivot);
      if (sgn(q) != 0) axpy(other, -q, r);
    }
    pivot_row_[pivot] = rows_.size();
    pivots_.push_back(pivot);
    rows_.push_back(std::move(r));
    return true;
  }

private:
  std::size_t width_;
  std::vector<SparseRow> rows_;
  std::vector<std::size_t> pivots_;
  std::map<std::size_t, std::size_t> pivot_row_;
};

class SparseMatrix {
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::map<std::pair<std::size_t, std::size_t>, Rational>& entries() const { return entries_; }

  void set(std::size_t r, std::size_t c, const Rational& v) {
    if (r >= rows_ || c >= cols_) throw InputError("matrix index out of range");
    if (sgn(v) == 0)
      entries_.erase({r, c});
    else
      entries_[{r, c}] = v;
  }

  void add(std::size_t r, std::size_t c, const Rational& v) {
    if (r >= rows_ || c >= cols_) throw InputError("matrix index out of range");
    Rational& slot = entries_[{r, c}];
    slot += v;
    if (sgn(slot) == 0) entries_.erase({r, c});
  }

  Rational get(std::size_t r, std::size_t c) const {
    auto it = entries_.find({r, c});
    return it == entries_.end() ? Rational(0) : it->second;
  }

  /// Sets column `c` from a dense vector of length rows().
  void set_column(std::size_t c, const Vector& v) {
    if (v.size() != rows_) throw InputError("column length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) set(r, c, v[r]);
  }

  std::vector<SparseRow> row_list() const {
    std::vector<SparseRow> out(rows_);
    for (const auto& [rc, q] : entries_) out[rc.first].emplace_back(rc.second, q);
    return out;
  }

  std::vector<SparseRow> column_list() const {
    std::vector<SparseRow> out(cols_);
    for (const auto& [rc, q] : entries_) out[rc.second].emplace_back(rc.first, q);
    return out;
  }

  Vector apply(const Vector& x) const {
    if (x.size() != cols_) throw InputError("vector length does not match matrix columns");
    Vector y(rows_);
    for (const auto& [rc, q] : entries_) y[rc.first] += q * x[rc.second];
    return y;
  }

  SparseMatrix multiply(const SparseMatrix& other) const {
    if (cols_ != other.rows_) throw InputError("matrix product dimension mismatch");
    SparseMatrix out(rows_, other.cols_);
    auto other_rows = other.row_list();
    for (const auto& [rc, q] : entries_)
      for (const auto& [c, v] : other_rows[rc.second]) out.add(rc.first, c, q * v);
    return out;
  }

  bool is_zero() const { return entries_.empty(); }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, Rational(1));
    return m;
  }

  static SparseMatrix from_dense(const std::vector<Vector>& rows) {
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    SparseMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw InputError("ragged dense matrix");
      for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }

  /// Builds a matrix whose columns are the given vectors.
  static SparseMatrix from_columns(std::size_t rows, const std::vector<Vector>& columns) {
    SparseMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(c, columns[c]);
    return m;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, Rational> entries_;
};

struct RankKernel {
  std::size_t rank = 0;
  std::vector<Vector> kernel_basis;
};

inline EchelonBasis row_echelon(const SparseMatrix& m) {
  EchelonBasis e(m.cols());
  for (const auto& row : m.row_list()) e.insert(row);
  return e;
}

/// Rank and canonical kernel basis (one vector per free column, ascending).
inline RankKernel rank_kernel(const SparseMatrix& m) {
  EchelonBasis e = row_echelon(m);
  RankKernel out;
  out.rank = e.rank();
  std::vector<bool> pivot(m.cols(), false);
  for (std::size_t p : e.pivots()) pivot[p] = true;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (pivot[j]) continue;
    Vector v(m.cols());
    v[j] = 1;
    for (std::size_t r = 0; r < e.rank(); ++r) {
      Rational q = coefficient(e.rows()[r], j);
      if (sgn(q) != 0) v[e.pivots()[r]] = -q;
    }
    out.kernel_basis.push_back(std::move(v));
  }
  return out;
}

inline std::size_t rank(const SparseMatrix& m) { return row_echelon(m).rank(); }

/// Canonical solution of m x = b with all free variables set to zero.
inline std::optional<Vector> solve(const SparseMatrix& m, const Vector& b) {
  if (b.size() != m.rows()) throw InputError("solve: right-hand side has wrong length");
  const std::size_t rhs = m.cols();
  EchelonBasis e(m.cols() + 1);
  auto rows = m.row_list();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    SparseRow row = rows[r];
    if (sgn(b[r]) != 0) row.emplace_back(rhs, b[r]);
    e.insert(row);
  }
  Vector x(m.cols());
  for (std::size_t r = 0; r < e.rank(); ++r) {
    std::size_t p = e.pivots()[r];
    if (p == rhs) return std::nullopt;
    x[p] = coefficient(e.rows()[r], rhs);
  }
  return x;
}

/// Rank of a list of vectors of common length.
inline std::size_t span_rank(const std::vector<Vector>& vs, std::size_t width) {
  EchelonBasis e(width);
  for (const auto& v : vs) e.insert(to_sparse(v));
  return e.rank();
}

/// Indices of `candidates` that extend span(base) one at a time, in order.
inline std::vector<std::size_t> complement_indices(const std::vector<Vector>& base,
                                                   const std::vector<Vector>& candidates,
                                                   std::size_t width) {
  EchelonBasis e(width);
  for (const auto& v : base) e.insert(to_sparse(v));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (e.insert(to_sparse(candidates[i]))) out.push_back(i);
  return out;
}

/// Quotient Z/B of nested subspaces of a common ambient space.
struct SubquotientResult {
  std::size_t dim = 0;
  std::vector<Vector> representatives;
};

/// `cycles` spans Z, `boundaries` spans B (B must lie inside Z).
inline SubquotientResult subquotient(const std::vector<Vector>& cycles,
                                     const std::vector<Vector>& boundaries, std::size_t width) {
  EchelonBasis z(width);
  for (const auto& v : cycles) z.insert(to_sparse(v));
  for (const auto& b : boundaries)
    if (!z.contains(to_sparse(b))) throw IntegrityError("subquotient: boundary outside cycles");
  SubquotientResult out;
  auto idx = complement_indices(boundaries, cycles, width);
  for (std::size_t i : idx) out.representatives.push_back(cycles[i]);
  out.dim = out.representatives.size();
  return out;
}

/// Cohomology at the middle of  X --d_in--> Y --d_out--> Z  (matrices act on columns).
inline SubquotientResult cohomology_of(const SparseMatrix& d_in, const SparseMatrix& d_out,
                                       std::size_t dim) {
  if (d_in.rows() != dim || d_out.cols() != dim)
    throw IntegrityError("cohomology_of: dimension mismatch");
  auto cycles = rank_kernel(d_out).kernel_basis;
  std::vector<Vector> boundaries;
  for (const auto& col : d_in.column_list())
    if (!col.empty()) boundaries.push_back(to_dense(col, dim));
  return subquotient(cycles, boundaries, dim);
}

/// Coordinates of v in terms of representatives modulo span(base); nullopt if v is
/// outside span(base) + span(reps).
inline std::optional<Vector> coordinates_modulo(const Vector& v, const std::vector<Vector>& base,
                                                const std::vector<Vector>& reps,
                                                std::size_t width) {
  std::vector<Vector> columns = reps;
  columns.insert(columns.end(), base.begin(), base.end());
  auto sol = solve(SparseMatrix::from_columns(width, columns), v);
  if (!sol) return std::nullopt;
  return Vector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(reps.size()));
}

} // namespace tatekit
