#pragma once

#include <string>
#include <vector>

#include "kdvsym/detsolve.hpp"
#include "kdvsym/form.hpp"
#include "kdvsym/linalg.hpp"

namespace kdvsym {

template <class C>
BasicField<C> bracket(const BasicField<C>& a, const BasicField<C>& b) {
    require_same_chart(a.chart(), b.chart());
    BasicField<C> out(a.chart());
    for (std::size_t i = 0; i < a.chart()->size(); ++i) {
        C c = a.apply(b.component(i)) - b.apply(a.component(i));
        out.set(i, c);
    }
    return out;
}

class BracketEscape : public Error {
public:
    BracketEscape(std::size_t i, std::size_t j)
        : Error("bracket [" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "] leaves the span of the basis"),
          first(i), second(j) {}
    std::size_t first, second;
};

// Structure constants c_ij^k for i < j; [e_i, e_j] = sum_k c_ij^k e_k.
class BracketTable {
public:
    explicit BracketTable(std::size_t n, std::vector<std::string> labels = {}) : n_(n), labels_(std::move(labels)) {
        if (labels_.empty())
            for (std::size_t i = 0; i < n; ++i) labels_.push_back("e" + std::to_string(i + 1));
        if (labels_.size() != n) throw Error("bracket table labels do not match its size");
        c_.assign(n * n, VectorQ(n, 0));
    }

    std::size_t size() const noexcept { return n_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    // Sets [e_i, e_j] and, implicitly, [e_j, e_i].
    void set(std::size_t i, std::size_t j, VectorQ v) {
        if (i == j) throw Error("bracket of a basis element with itself is zero");
        if (v.size() != n_) throw Error("structure-constant vector has the wrong length");
        VectorQ neg = v;
        for (auto& s : neg) s = -s;
        c_[i * n_ + j] = std::move(v);
        c_[j * n_ + i] = std::move(neg);
    }
    const VectorQ& get(std::size_t i, std::size_t j) const { return c_.at(i * n_ + j); }

    // Bracket of two coefficient vectors.
    VectorQ apply(const VectorQ& x, const VectorQ& y) const {
        VectorQ out(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (y[j] == 0 || i == j) continue;
                Scalar f = x[i] * y[j];
                const auto& c = get(i, j);
                for (std::size_t k = 0; k < n_; ++k)
                    if (c[k] != 0) out[k] += f * c[k];
            }
        }
        return out;
    }

    std::string render_vector(const VectorQ& v) const {
        std::string out;
        for (std::size_t k = 0; k < n_; ++k) {
            if (v[k] == 0) continue;
            Scalar a = abs(v[k]);
            std::string term = (a == 1 ? "" : to_string(a) + "*") + labels_[k];
            if (out.empty()) {
                out = (v[k] < 0 ? "-" : "") + term;
            } else {
                out += (v[k] < 0 ? " - " : " + ") + term;
            }
        }
        return out.empty() ? "0" : out;
    }

    // n x n table, row i column j holding [e_i, e_j].
    std::string render() const {
        std::vector<std::vector<std::string>> cells(n_ + 1, std::vector<std::string>(n_ + 1));
        cells[0][0] = "[,]";
        for (std::size_t i = 0; i < n_; ++i) {
            cells[0][i + 1] = labels_[i];
            cells[i + 1][0] = labels_[i];
            for (std::size_t j = 0; j < n_; ++j) cells[i + 1][j + 1] = i == j ? "0" : render_vector(get(i, j));
        }
        std::vector<std::size_t> width(n_ + 1, 0);
        for (const auto& row : cells)
            for (std::size_t j = 0; j <= n_; ++j) width[j] = std::max(width[j], row[j].size());
        std::string out;
        for (const auto& row : cells) {
            for (std::size_t j = 0; j <= n_; ++j) {
                out += row[j] + std::string(width[j] - row[j].size(), ' ');
                out += j == n_ ? "\n" : "  ";
            }
        }
        return out;
    }

    bool operator==(const BracketTable& o) const { return n_ == o.n_ && c_ == o.c_; }

private:
    std::size_t n_;
    std::vector<std::string> labels_;
    std::vector<VectorQ> c_;
};

// Expands every bracket of the basis fields in the basis itself.
inline BracketTable structure_constants(const std::vector<VectorFieldExpr>& basis, std::vector<std::string> labels = {}) {
    const std::size_t n = basis.size();
    BracketTable table(n, std::move(labels));
    std::vector<VectorFieldExpr> all = basis;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            all.push_back(bracket(basis[i], basis[j]));
            pairs.emplace_back(i, j);
        }
    }
    auto coords = field_coordinates(all);
    std::vector<VectorQ> base(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(n));
    if (n > 0 && rank_of(base, base.front().size()) != n) throw Error("basis fields are linearly dependent");
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto c = solve_in_span(base, coords[n + p]);
        if (!c) throw BracketEscape(pairs[p].first, pairs[p].second);
        table.set(pairs[p].first, pairs[p].second, *c);
    }
    return table;
}

inline BracketTable structure_constants(const SymmetryBasis& basis) { return structure_constants(basis.fields); }

struct DerivedSeries {
    std::vector<std::size_t> dims;         // g, g', g'', ... up to 0 or the first repeat
    std::vector<std::vector<VectorQ>> bases;
    bool solvable() const { return !dims.empty() && dims.back() == 0; }
};

inline DerivedSeries derived_series(const BracketTable& table) {
    const std::size_t n = table.size();
    DerivedSeries out;
    std::vector<VectorQ> current;
    for (std::size_t i = 0; i < n; ++i) {
        VectorQ e(n, 0);
        e[i] = 1;
        current.push_back(e);
    }
    out.dims.push_back(n);
    out.bases.push_back(current);
    while (!current.empty()) {
        std::vector<VectorQ> brackets;
        for (std::size_t a = 0; a < current.size(); ++a)
            for (std::size_t b = a + 1; b < current.size(); ++b) brackets.push_back(table.apply(current[a], current[b]));
        auto next = span_basis(brackets, n);
        bool repeat = next.size() == current.size();
        out.dims.push_back(next.size());
        out.bases.push_back(next);
        if (repeat) break;
        current = std::move(next);
    }
    return out;
}

inline bool jacobi_check(const BracketTable& table) {
    const std::size_t n = table.size();
    auto unit = [n](std::size_t i) {
        VectorQ e(n, 0);
        e[i] = 1;
        return e;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                VectorQ ei = unit(i), ej = unit(j), ek = unit(k);
                VectorQ s = table.apply(ei, table.apply(ej, ek));
                VectorQ b = table.apply(ej, table.apply(ek, ei));
                VectorQ c = table.apply(ek, table.apply(ei, ej));
                for (std::size_t m = 0; m < n; ++m)
                    if (s[m] + b[m] + c[m] != 0) return false;
            }
        }
    }
    return true;
}

}  // namespace kdvsym
