#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "kdvsym/scalar.hpp"

namespace kdvsym {

using SparseRow = std::vector<std::pair<std::size_t, Scalar>>;  // sorted by column, no zeros
using VectorQ = std::vector<Scalar>;

// Sparse rational matrix, row-major.
class MatrixQ {
public:
    MatrixQ() = default;
    MatrixQ(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    static MatrixQ from_dense(const std::vector<VectorQ>& dense, std::size_t cols) {
        MatrixQ m(0, cols);
        for (const auto& r : dense) m.push_dense(r);
        return m;
    }

    std::size_t row_count() const noexcept { return rows_.size(); }
    std::size_t col_count() const noexcept { return cols_; }
    const std::vector<SparseRow>& rows() const noexcept { return rows_; }
    const SparseRow& row(std::size_t i) const { return rows_.at(i); }

    void push_row(SparseRow r) {
        std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseRow clean;
        for (auto& [c, v] : r) {
            if (c >= cols_) throw Error("matrix column out of range");
            if (!clean.empty() && clean.back().first == c) {
                clean.back().second += v;
                if (sgn(clean.back().second) == 0) clean.pop_back();
            } else if (sgn(v) != 0) {
                clean.emplace_back(c, std::move(v));
            }
        }
        rows_.push_back(std::move(clean));
    }
    void push_dense(const VectorQ& r) {
        if (r.size() != cols_) throw Error("dense row has wrong length");
        SparseRow s;
        for (std::size_t c = 0; c < r.size(); ++c)
            if (sgn(r[c]) != 0) s.emplace_back(c, r[c]);
        rows_.push_back(std::move(s));
    }

    Scalar at(std::size_t r, std::size_t c) const {
        for (const auto& [col, v] : rows_.at(r))
            if (col == c) return v;
        return 0;
    }

    VectorQ multiply(const VectorQ& x) const {
        VectorQ out(rows_.size(), 0);
        for (std::size_t r = 0; r < rows_.size(); ++r)
            for (const auto& [c, v] : rows_[r]) out[r] += v * x.at(c);
        return out;
    }

    bool operator==(const MatrixQ& o) const { return cols_ == o.cols_ && rows_ == o.rows_; }

private:
    std::vector<SparseRow> rows_;
    std::size_t cols_ = 0;
};

// Incremental Gauss-Jordan elimination. Rows are kept fully reduced against
// each other, so the stored set is always a reduced row echelon form.
class EchelonBuilder {
public:
    explicit EchelonBuilder(std::size_t cols) : cols_(cols) {}

    // Returns true if the row increased the rank.
    bool add(SparseRow row) {
        reduce(row);
        if (row.empty()) return false;
        std::size_t p = row.front().first;
        Scalar inv = Scalar(1) / row.front().second;
        for (auto& [c, v] : row) v *= inv;
        for (auto& [pc, other] : pivots_) {
            auto it = find_col(other, p);
            if (it == other.end()) continue;
            Scalar f = it->second;
            axpy(other, -f, row);
        }
        pivots_.emplace(p, std::move(row));
        return true;
    }

    std::size_t rank() const noexcept { return pivots_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    const std::map<std::size_t, SparseRow>& pivot_rows() const noexcept { return pivots_; }

    std::vector<std::size_t> pivots() const {
        std::vector<std::size_t> out;
        for (const auto& [p, r] : pivots_) out.push_back(p);
        return out;
    }

    // Reduces `row` against the stored pivots in place.
    void reduce(SparseRow& row) const {
        std::size_t i = 0;
        while (i < row.size()) {
            auto pit = pivots_.find(row[i].first);
            if (pit == pivots_.end()) {
                ++i;
                continue;
            }
            Scalar f = row[i].second;
            axpy(row, -f, pit->second);
            // the pivot column is now eliminated; entries before i are untouched
        }
    }

    MatrixQ matrix() const {
        MatrixQ m(0, cols_);
        for (const auto& [p, r] : pivots_) m.push_row(r);
        return m;
    }

    // Canonical nullspace basis: one vector per free column, unit in that column.
    std::vector<VectorQ> nullspace() const {
        std::vector<bool> is_pivot(cols_, false);
        for (const auto& [p, r] : pivots_) is_pivot[p] = true;
        std::vector<VectorQ> out;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f]) continue;
            VectorQ v(cols_, 0);
            v[f] = 1;
            for (const auto& [p, r] : pivots_) {
                auto it = find_col(r, f);
                if (it != r.end()) v[p] = -it->second;
            }
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    static SparseRow::const_iterator find_col(const SparseRow& r, std::size_t c) {
        auto it = std::lower_bound(r.begin(), r.end(), c, [](const auto& e, std::size_t col) { return e.first < col; });
        return (it != r.end() && it->first == c) ? it : r.end();
    }
    static SparseRow::iterator find_col(SparseRow& r, std::size_t c) {
        auto it = std::lower_bound(r.begin(), r.end(), c, [](const auto& e, std::size_t col) { return e.first < col; });
        return (it != r.end() && it->first == c) ? it : r.end();
    }

    // row += f * other  (both sorted)
    static void axpy(SparseRow& row, const Scalar& f, const SparseRow& other) {
        SparseRow out;
        out.reserve(row.size() + other.size());
        auto a = row.begin();
        auto b = other.begin();
        while (a != row.end() || b != other.end()) {
            if (b == other.end() || (a != row.end() && a->first < b->first)) {
                out.push_back(std::move(*a));
                ++a;
            } else if (a == row.end() || b->first < a->first) {
                out.emplace_back(b->first, f * b->second);
                ++b;
            } else {
                Scalar v = a->second + f * b->second;
                if (sgn(v) != 0) out.emplace_back(a->first, std::move(v));
                ++a;
                ++b;
            }
        }
        row = std::move(out);
    }

    std::size_t cols_;
    std::map<std::size_t, SparseRow> pivots_;
};

struct RrefResult {
    MatrixQ reduced;
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
};

inline RrefResult rref(const MatrixQ& m) {
    EchelonBuilder eb(m.col_count());
    for (const auto& r : m.rows()) eb.add(r);
    RrefResult out{eb.matrix(), eb.pivots(), eb.rank()};
    // keep the original shape: pad with zero rows
    while (out.reduced.row_count() < m.row_count()) out.reduced.push_row({});
    return out;
}

inline std::vector<VectorQ> nullspace(const MatrixQ& m) {
    EchelonBuilder eb(m.col_count());
    for (const auto& r : m.rows()) eb.add(r);
    return eb.nullspace();
}

inline std::size_t rank_of(const std::vector<VectorQ>& vectors, std::size_t dim) {
    EchelonBuilder eb(dim);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw Error("vector dimension mismatch");
        SparseRow r;
        for (std::size_t c = 0; c < dim; ++c)
            if (sgn(v[c]) != 0) r.emplace_back(c, v[c]);
        eb.add(std::move(r));
    }
    return eb.rank();
}

// Reduced basis of the row span of `vectors`.
inline std::vector<VectorQ> span_basis(const std::vector<VectorQ>& vectors, std::size_t dim) {
    EchelonBuilder eb(dim);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw Error("vector dimension mismatch");
        SparseRow r;
        for (std::size_t c = 0; c < dim; ++c)
            if (sgn(v[c]) != 0) r.emplace_back(c, v[c]);
        eb.add(std::move(r));
    }
    std::vector<VectorQ> out;
    for (const auto& [p, r] : eb.pivot_rows()) {
        VectorQ d(dim, 0);
        for (const auto& [c, v] : r) d[c] = v;
        out.push_back(std::move(d));
    }
    return out;
}

inline bool span_equal(const std::vector<VectorQ>& a, const std::vector<VectorQ>& b) {
    std::size_t dim = !a.empty() ? a.front().size() : (!b.empty() ? b.front().size() : 0);
    for (const auto& v : a)
        if (v.size() != dim) throw Error("span_equal: dimension mismatch");
    for (const auto& v : b)
        if (v.size() != dim) throw Error("span_equal: dimension mismatch");
    return span_basis(a, dim) == span_basis(b, dim);
}

// Coefficients x with sum_i x_i basis_i = target, if target lies in the span.
// Requires the basis to be linearly independent for a unique answer.
inline std::optional<VectorQ> solve_in_span(const std::vector<VectorQ>& basis, const VectorQ& target) {
    const std::size_t dim = target.size();
    const std::size_t k = basis.size();
    // columns: basis vectors, then target
    MatrixQ m(0, k + 1);
    for (std::size_t r = 0; r < dim; ++r) {
        SparseRow row;
        for (std::size_t j = 0; j < k; ++j)
            if (sgn(basis[j].at(r)) != 0) row.emplace_back(j, basis[j][r]);
        if (sgn(target[r]) != 0) row.emplace_back(k, target[r]);
        m.push_row(std::move(row));
    }
    EchelonBuilder eb(k + 1);
    for (const auto& r : m.rows()) eb.add(r);
    if (eb.pivot_rows().count(k)) return std::nullopt;
    VectorQ x(k, 0);
    for (const auto& [p, r] : eb.pivot_rows()) {
        for (const auto& [c, v] : r)
            if (c == k) x[p] = v;
    }
    return x;
}

// Dense Gauss-Jordan over any exact field type (Scalar, RatFunc).
// Solves sum_j x_j columns[j] = target; nullopt when inconsistent.
// Free unknowns are set to zero.
template <class F, class IsZero>
std::optional<std::vector<F>> field_solve(std::vector<std::vector<F>> columns, std::vector<F> target, const F& zero,
                                          IsZero is_zero) {
    const std::size_t k = columns.size();
    const std::size_t m = target.size();
    // augmented rows
    std::vector<std::vector<F>> a(m, std::vector<F>(k + 1, zero));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < k; ++j) a[r][j] = columns[j].at(r);
        a[r][k] = target[r];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < k && row < m; ++col) {
        std::size_t sel = m;
        for (std::size_t r = row; r < m; ++r) {
            if (!is_zero(a[r][col])) {
                sel = r;
                break;
            }
        }
        if (sel == m) continue;
        std::swap(a[row], a[sel]);
        F inv_p = a[row][col];
        for (std::size_t c = col; c <= k; ++c) a[row][c] = a[row][c] / inv_p;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == row || is_zero(a[r][col])) continue;
            F f = a[r][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] = a[r][c] - f * a[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < m; ++r)
        if (!is_zero(a[r][k])) return std::nullopt;
    std::vector<F> x(k, zero);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = a[i][k];
    return x;
}

}  // namespace kdvsym
