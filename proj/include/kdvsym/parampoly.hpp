#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kdvsym/poly.hpp"
#include "kdvsym/ratfunc.hpp"

namespace kdvsym {

using ParamId = std::size_t;

// Names of the unknowns of one determining-system build.
class ParamRegistry {
public:
    ParamId add(std::string name) {
        names_.push_back(std::move(name));
        return names_.size() - 1;
    }
    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(ParamId id) const { return names_.at(id); }

private:
    std::vector<std::string> names_;
};

// Polynomial whose coefficients are affine-linear in unknown parameters,
// stored as  constant + sum_k param_k * poly_k.
class ParamPoly {
public:
    ParamPoly() = default;
    explicit ParamPoly(ChartPtr chart) : constant_(std::move(chart)) {}
    ParamPoly(Poly p) : constant_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

    static ParamPoly parameter(ChartPtr chart, ParamId id, Poly coefficient) {
        ParamPoly out(std::move(chart));
        if (!coefficient.is_zero()) out.linear_.emplace(id, std::move(coefficient));
        return out;
    }

    const ChartPtr& chart() const noexcept { return constant_.chart(); }
    const Poly& constant_part() const noexcept { return constant_; }
    const std::map<ParamId, Poly>& linear_part() const noexcept { return linear_; }

    bool is_zero() const noexcept { return constant_.is_zero() && linear_.empty(); }
    bool has_params() const noexcept { return !linear_.empty(); }

    ParamPoly& operator+=(const ParamPoly& o) {
        constant_ += o.constant_;
        for (const auto& [id, p] : o.linear_) accumulate(id, p, false);
        return *this;
    }
    ParamPoly& operator-=(const ParamPoly& o) {
        constant_ -= o.constant_;
        for (const auto& [id, p] : o.linear_) accumulate(id, p, true);
        return *this;
    }
    ParamPoly operator-() const {
        ParamPoly out(chart());
        out -= *this;
        return out;
    }
    friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
    friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }

    friend ParamPoly operator*(const ParamPoly& a, const Poly& b) {
        ParamPoly out(a.chart() ? a.chart() : b.chart());
        out.constant_ = a.constant_ * b;
        if (b.is_zero()) return out;
        for (const auto& [id, p] : a.linear_) {
            Poly q = p * b;
            if (!q.is_zero()) out.linear_.emplace(id, std::move(q));
        }
        return out;
    }
    friend ParamPoly operator*(const Poly& b, const ParamPoly& a) { return a * b; }
    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
        if (a.has_params() && b.has_params()) throw NonlinearParameters();
        return a.has_params() ? a * b.constant_ : b * a.constant_;
    }
    friend ParamPoly operator*(ParamPoly a, const Scalar& s) {
        a.constant_ *= s;
        if (sgn(s) == 0) {
            a.linear_.clear();
        } else {
            for (auto& [id, p] : a.linear_) p *= s;
        }
        return a;
    }

    ParamPoly partial(std::size_t var) const {
        ParamPoly out(constant_.partial(var));
        for (const auto& [id, p] : linear_) {
            Poly q = p.partial(var);
            if (!q.is_zero()) out.linear_.emplace(id, std::move(q));
        }
        return out;
    }

    std::uint32_t degree_in(std::size_t var) const {
        std::uint32_t d = constant_.degree_in(var);
        for (const auto& [id, p] : linear_) d = std::max(d, p.degree_in(var));
        return d;
    }
    ParamPoly coefficient_in(std::size_t var, std::uint32_t k) const {
        ParamPoly out(constant_.coefficient_in(var, k));
        for (const auto& [id, p] : linear_) {
            Poly q = p.coefficient_in(var, k);
            if (!q.is_zero()) out.linear_.emplace(id, std::move(q));
        }
        return out;
    }
    ParamPoly substitute(std::size_t var, const Poly& value) const {
        ParamPoly out(constant_.substitute(var, value));
        for (const auto& [id, p] : linear_) {
            Poly q = p.substitute(var, value);
            if (!q.is_zero()) out.linear_.emplace(id, std::move(q));
        }
        return out;
    }

    // Sets every parameter to a value; unlisted parameters read as zero.
    Poly specialize(std::span<const Scalar> values) const {
        Poly out = constant_;
        for (const auto& [id, p] : linear_) {
            if (id < values.size() && sgn(values[id]) != 0) out += p * values[id];
        }
        return out;
    }

    // Affine form of the coefficient of each monomial: (constant, {param: coeff}).
    struct AffineForm {
        Scalar constant = 0;
        std::map<ParamId, Scalar> coefficients;
    };
    std::map<Exponents, AffineForm, MonomialOrder> by_monomial() const {
        std::map<Exponents, AffineForm, MonomialOrder> out;
        for (const auto& [e, c] : constant_.terms()) out[e].constant = c;
        for (const auto& [id, p] : linear_) {
            for (const auto& [e, c] : p.terms()) out[e].coefficients[id] = c;
        }
        return out;
    }

    bool operator==(const ParamPoly& o) const { return constant_ == o.constant_ && linear_ == o.linear_; }

    std::string to_string(const ParamRegistry* registry = nullptr) const {
        std::string out;
        if (!constant_.is_zero()) out = constant_.to_string();
        for (const auto& [id, p] : linear_) {
            if (!out.empty()) out += " + ";
            std::string name = registry ? registry->name(id) : "p" + std::to_string(id);
            out += name + "*(" + p.to_string() + ")";
        }
        return out.empty() ? "0" : out;
    }

private:
    void accumulate(ParamId id, const Poly& p, bool negate) {
        auto it = linear_.find(id);
        if (it == linear_.end()) {
            linear_.emplace(id, negate ? -p : p);
            return;
        }
        if (negate) {
            it->second -= p;
        } else {
            it->second += p;
        }
        if (it->second.is_zero()) linear_.erase(it);
    }

    Poly constant_;
    std::map<ParamId, Poly> linear_;
};

// Generic polynomial ansatz: sum of fresh parameters times every monomial of
// total degree <= degree in the listed coordinates.
inline std::vector<Exponents> monomials_up_to(std::size_t dim, const std::vector<std::size_t>& vars, unsigned degree) {
    std::vector<Exponents> out;
    Exponents e(dim, 0);
    auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
        if (pos == vars.size()) {
            out.push_back(e);
            return;
        }
        for (unsigned k = 0; k <= remaining; ++k) {
            e[vars[pos]] = k;
            self(self, pos + 1, remaining - k);
        }
        e[vars[pos]] = 0;
    };
    rec(rec, 0, degree);
    std::sort(out.begin(), out.end(), MonomialOrder{});
    return out;
}

inline ParamPoly make_ansatz(const ChartPtr& chart, ParamRegistry& registry, const std::string& prefix,
                             const std::vector<std::size_t>& vars, unsigned degree) {
    ParamPoly out(chart);
    Poly probe(chart);
    for (const auto& e : monomials_up_to(chart->size(), vars, degree)) {
        std::string mono = probe.monomial_string(e);
        ParamId id = registry.add(prefix + "[" + (mono.empty() ? "1" : mono) + "]");
        out += ParamPoly::parameter(chart, id, Poly::monomial(chart, e));
    }
    return out;
}

}  // namespace kdvsym
