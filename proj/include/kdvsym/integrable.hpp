#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "kdvsym/closedform.hpp"
#include "kdvsym/detsolve.hpp"
#include "kdvsym/expr.hpp"
#include "kdvsym/form.hpp"
#include "kdvsym/linalg.hpp"

namespace kdvsym {

// A distribution given by generating fields, annihilating 1-forms, or both.
struct Distribution {
    ChartPtr chart;
    std::vector<VectorFieldExpr> fields;
    std::vector<DiffForm> annihilators;

    static Distribution from_forms(std::vector<DiffForm> forms) {
        if (forms.empty()) throw Error("distribution needs at least one annihilator");
        Distribution d{forms.front().chart(), {}, std::move(forms)};
        for (const auto& w : d.annihilators) {
            require_same_chart(w.chart(), d.chart);
            if (w.grade() != 1) throw Error("annihilators must be 1-forms");
        }
        return d;
    }

    // Both descriptions; every form must kill every field.
    static Distribution from_both(std::vector<VectorFieldExpr> fields, std::vector<DiffForm> forms) {
        Distribution d = from_forms(std::move(forms));
        for (const auto& v : fields) {
            for (const auto& w : d.annihilators)
                if (!evaluate_one_form(w, v).is_zero()) throw Error("a generating field is not annihilated");
            d.fields.push_back(v);
        }
        return d;
    }
};

template <class C>
struct FrobeniusResult {
    BasicForm<C> witness;  // omega ^ d omega
    bool integrable = false;
};

template <class C>
FrobeniusResult<C> frobenius_1form(const BasicForm<C>& omega) {
    if (omega.grade() != 1) throw Error("Frobenius test expects a 1-form");
    auto w = wedge(omega, ext_d(omega));
    return {w, w.is_zero()};
}

namespace detail {

// Rank of the coefficient matrix of 1-forms at a few exact sample points.
inline std::size_t generic_rank(const std::vector<DiffForm>& forms) {
    const auto& chart = forms.front().chart();
    const std::size_t n = chart->size();
    std::size_t best = 0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<Scalar> point;
        for (std::size_t i = 0; i < n; ++i) point.emplace_back(static_cast<long>(7 + 13 * i + 31 * attempt), 11 + attempt);
        std::vector<VectorQ> rows;
        try {
            for (const auto& w : forms) {
                VectorQ r(n, 0);
                for (const auto& [idx, c] : w.components()) r[idx[0]] = c.evaluate(std::span<const Scalar>(point));
                rows.push_back(std::move(r));
            }
        } catch (const Error&) {
            continue;
        }
        best = std::max(best, rank_of(rows, n));
        if (best == forms.size()) break;
    }
    return best;
}

}  // namespace detail

struct InvolutivityResult {
    std::vector<DiffForm> witnesses;  // d omega^i ^ omega^1 ^ ... ^ omega^m
    std::vector<bool> pass;
    bool involutive() const { return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }
};

inline InvolutivityResult involutivity(const std::vector<DiffForm>& forms) {
    if (forms.empty()) throw Error("involutivity needs at least one form");
    for (const auto& w : forms)
        if (w.grade() != 1) throw Error("involutivity expects 1-forms");
    if (detail::generic_rank(forms) != forms.size()) throw Error("annihilator forms are linearly dependent");
    DiffForm all = forms.front();
    for (std::size_t i = 1; i < forms.size(); ++i) all = wedge(all, forms[i]);
    InvolutivityResult out;
    for (const auto& w : forms) {
        DiffForm t = wedge(ext_d(w), all);
        out.pass.push_back(t.is_zero());
        out.witnesses.push_back(std::move(t));
    }
    return out;
}

struct DistributionSymmetry {
    bool symmetric = false;
    // L_v omega^i = sum_j m_ij omega^j when the membership solve succeeds.
    std::vector<std::optional<std::vector<RatFunc>>> multipliers;
};

inline DistributionSymmetry sym_of_distribution(const VectorFieldExpr& v, const Distribution& d) {
    require_same_chart(v.chart(), d.chart);
    DistributionSymmetry out;
    out.symmetric = true;
    for (const auto& w : d.annihilators) {
        auto m = detail::ideal_coordinates(lie_derivative(v, w), d.annihilators);
        if (!m) out.symmetric = false;
        out.multipliers.push_back(std::move(m));
    }
    return out;
}

struct ZMatrix {
    std::vector<std::vector<RatFunc>> z;     // z[i][j] = omega^i(v_j)
    std::vector<std::vector<RatFunc>> z_inv;
    std::vector<DiffForm> barred;            // sum_j (Z^-1)_ij omega^j
    std::vector<bool> closed;
};

inline ZMatrix z_matrix(const Distribution& d, const std::vector<VectorFieldExpr>& fields) {
    const std::size_t k = d.annihilators.size();
    if (fields.size() != k) throw Error("Z-matrix needs as many fields as annihilator forms");
    ZMatrix out;
    out.z.assign(k, std::vector<RatFunc>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out.z[i][j] = evaluate_one_form(d.annihilators[i], fields[j]);
    RatFunc zero = RatFunc::constant(d.chart, 0);
    auto is_zero = [](const RatFunc& f) { return f.is_zero(); };
    std::vector<std::vector<RatFunc>> columns(k, std::vector<RatFunc>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) columns[j][i] = out.z[i][j];
    out.z_inv.assign(k, std::vector<RatFunc>(k, zero));
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<RatFunc> e(k, zero);
        e[c] = RatFunc::constant(d.chart, 1);
        auto x = field_solve<RatFunc>(columns, e, zero, is_zero);
        // verify: a singular Z leaves free unknowns at zero, so recheck the product
        bool ok = x.has_value();
        for (std::size_t r = 0; ok && r < k; ++r) {
            RatFunc s = zero;
            for (std::size_t j = 0; j < k; ++j) s = s + out.z[r][j] * (*x)[j];
            ok = s == e[r];
        }
        if (!ok) throw Error("Z-matrix is singular");
        for (std::size_t r = 0; r < k; ++r) out.z_inv[r][c] = (*x)[r];
    }
    for (std::size_t i = 0; i < k; ++i) {
        DiffForm b(d.chart, 1);
        for (std::size_t j = 0; j < k; ++j) b += out.z_inv[i][j] * d.annihilators[j];
        out.closed.push_back(ext_d(b).is_zero());
        out.barred.push_back(std::move(b));
    }
    return out;
}

// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int max_depth = 50) {
    auto simpson = [](double fa, double fm, double fb, double h) { return h / 6 * (fa + 4 * fm + fb); };
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int depth) {
            double mid = 0.5 * (lo + hi);
            double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            double flm = f(lm), frm = f(rm);
            double left = simpson(flo, flm, fmid, mid - lo), right = simpson(fmid, frm, fhi, hi - mid);
            double diff = left + right - whole;
            if (depth <= 0 || std::abs(diff) <= 15 * eps) return left + right + diff / 15;
            return rec(lo, mid, flo, flm, fmid, left, eps / 2, depth - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, eps / 2, depth - 1);
        };
    if (a == b) return 0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, max_depth);
}

struct FirstIntegralSpec {
    ExprForm omega_bar;
    std::vector<double> base;                    // p0
    std::vector<std::vector<double>> waypoints;  // visited in order before the target
    double tolerance = 1e-10;
};

// phi(p) = integral of omega_bar from p0 to p along axis-parallel segments
// (coordinates moved in chart order between consecutive waypoints).
inline double first_integral_numeric(const FirstIntegralSpec& spec, const std::vector<double>& point) {
    const auto& chart = spec.omega_bar.chart();
    const std::size_t n = chart->size();
    if (spec.omega_bar.grade() != 1) throw Error("first integral needs a 1-form");
    if (spec.base.size() != n || point.size() != n) throw Error("point dimension does not match the chart");
    std::vector<Expr> coef(n, Expr(0));
    for (const auto& [idx, c] : spec.omega_bar.components()) coef[idx[0]] = c;
    std::vector<std::vector<double>> stops = spec.waypoints;
    stops.push_back(point);
    std::vector<double> cur = spec.base;
    double total = 0;
    for (const auto& target : stops) {
        if (target.size() != n) throw Error("waypoint dimension does not match the chart");
        for (std::size_t i = 0; i < n; ++i) {
            if (cur[i] == target[i]) continue;
            if (!coef[i].is_zero()) {
                std::map<std::string, double> env;
                for (std::size_t j = 0; j < n; ++j) env[chart->name(j)] = cur[j];
                const std::string& name = chart->name(i);
                const Expr& g = coef[i];
                total += adaptive_simpson(
                    [&](double s) {
                        env[name] = s;
                        return g.eval(env);
                    },
                    cur[i], target[i], spec.tolerance);
            }
            cur[i] = target[i];
        }
    }
    return total;
}

struct KdvFirstIntegralOptions {
    Scalar c = 4, c1 = 0, c2 = 0;
    double v0 = 0;
    double y_end = 2;
    double step = 1e-3;
    double sample_every = 0.1;
};

// 3c sech^2(eps) (1 - 1e-6): just below the profile value at y = 0.
inline double soliton_start(const Scalar& c, double eps) {
    double s = 1.0 / std::cosh(eps);
    return 3 * c.get_d() * s * s * (1 - 1e-6);
}

// Chart (y, v) of the traveling-wave reduction.
inline const ChartPtr& wave_chart() {
    static const ChartPtr chart = make_chart({"y", "v"});
    return chart;
}

struct KdvFirstIntegral {
    Expr radicand;                               // Q(v) = c v^2 + 2 c1 v + 2 c2 - v^3/3
    ExprForm omega = ExprForm(wave_chart(), 1);  // dv - sqrt(Q) dy
    ExprForm omega_bar = ExprForm(wave_chart(), 1);  // dy - dv / sqrt(Q)
    bool closed = false;     // d(omega_bar) == 0
    bool degenerate = false; // v0 is an equilibrium on Q = 0
    bool turning_point = false;
    double window_end = 0;
    std::vector<std::pair<double, double>> samples;  // (y, phi)
    double max_drift = 0;
    double max_omega_on_path = 0;  // |v' - sqrt(Q(v))| along the trajectory
};

inline KdvFirstIntegral kdv_first_integral(const KdvFirstIntegralOptions& opt) {
    const ChartPtr& chart = wave_chart();
    KdvFirstIntegral out;
    Expr v = Expr::var("v");
    out.radicand = Expr(opt.c) * pow(v, 2) + Expr(2 * opt.c1) * v + Expr(2 * opt.c2) - Expr(Scalar(1, 3)) * pow(v, 3);
    Expr root = sqrt(out.radicand);
    out.omega = ExprForm::differential(chart, 1) - root * ExprForm::differential(chart, 0);
    ExprField dy(chart);
    dy.set(0, Expr(1));
    Expr z = evaluate_one_form(out.omega, dy);
    for (const auto& [idx, c] : out.omega.components()) out.omega_bar.add_term(idx, c / z);
    out.closed = ext_d(out.omega_bar).is_zero();

    auto q = [&](double x) { return out.radicand.eval({{"v", x}}); };
    auto accel = [&](double x) { return -0.5 * x * x + opt.c.get_d() * x + opt.c1.get_d(); };
    double q0 = q(opt.v0);
    if (std::abs(q0) < 1e-14 && std::abs(accel(opt.v0)) < 1e-14) {
        out.degenerate = true;
        out.window_end = opt.y_end;
        for (double y = 0; y <= opt.y_end + 1e-12; y += opt.sample_every) out.samples.emplace_back(y, 0.0);
        return out;
    }
    if (q0 <= 0) throw Error("radicand is not positive at the initial value");

    FirstIntegralSpec spec{out.omega_bar, {0.0, opt.v0}, {}, 1e-10};
    double y = 0, x = opt.v0, p = std::sqrt(q0);
    out.samples.emplace_back(0.0, 0.0);
    const long steps = std::lround(opt.y_end / opt.step);
    const long every = std::max(1L, std::lround(opt.sample_every / opt.step));
    for (long k = 1; k <= steps; ++k) {
        double h = opt.step;
        double k1x = p, k1p = accel(x);
        double k2x = p + 0.5 * h * k1p, k2p = accel(x + 0.5 * h * k1x);
        double k3x = p + 0.5 * h * k2p, k3p = accel(x + 0.5 * h * k2x);
        double k4x = p + h * k3p, k4p = accel(x + h * k3x);
        double nx = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
        double np = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        if (np <= 0 || q(nx) <= 0) {
            out.turning_point = true;
            break;
        }
        x = nx;
        p = np;
        y = static_cast<double>(k) * h;
        out.max_omega_on_path = std::max(out.max_omega_on_path, std::abs(p - std::sqrt(q(x))));
        if (k % every == 0) {
            double phi = first_integral_numeric(spec, {y, x});
            out.samples.emplace_back(y, phi);
            out.max_drift = std::max(out.max_drift, std::abs(phi));
        }
    }
    out.window_end = y;
    return out;
}

}  // namespace kdvsym
