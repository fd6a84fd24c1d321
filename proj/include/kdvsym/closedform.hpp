#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kdvsym/expr.hpp"
#include "kdvsym/ratfunc.hpp"

namespace kdvsym {

enum class Variant { printed, corrected };

inline std::string to_string(Variant v) { return v == Variant::printed ? "printed" : "corrected"; }

inline Variant parse_variant(const std::string& s) {
    if (s == "printed") return Variant::printed;
    if (s == "corrected") return Variant::corrected;
    throw Error("unknown variant '" + s + "'");
}

inline const Expr& T() {
    static const Expr t = Expr::var("t");
    return t;
}
inline const Expr& X() {
    static const Expr x = Expr::var("x");
    return x;
}

// u_t + u u_x + u_xxx as a tree.
inline Expr kdv_residual(const Expr& u) {
    Expr ux = u.diff("x");
    return u.diff("t") + u * ux + ux.diff("x").diff("x");
}

inline RatFunc kdv_residual(const RatFunc& u) {
    const auto& c = u.chart();
    std::size_t t = c->index("t"), x = c->index("x");
    RatFunc ux = u.partial(x);
    return u.partial(t) + u * ux + ux.partial(x).partial(x);
}

struct Grid {
    std::vector<double> ts, xs;
    double exclusion = 1e-3;  // points with a singular guard below this are skipped
};

// t in {-2, -1.5, ..., 2}, x in {-5, -4.5, ..., 5}.
inline Grid standard_grid() {
    Grid g;
    for (int k = -4; k <= 4; ++k) g.ts.push_back(0.5 * k);
    for (int k = -10; k <= 10; ++k) g.xs.push_back(0.5 * k);
    return g;
}

struct NumericResidual {
    double max_abs = 0;
    double at_t = 0, at_x = 0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
    bool pass(double tol) const { return max_abs < tol; }
};

// Max |expr| over the grid; t and x bound, other variables from env.
inline NumericResidual max_on_grid(const Expr& expr, const Grid& grid, const std::vector<Expr>& guards,
                                   std::map<std::string, double> env = {}) {
    NumericResidual out;
    for (double t : grid.ts) {
        for (double x : grid.xs) {
            env["t"] = t;
            env["x"] = x;
            bool near = false;
            for (const auto& g : guards) {
                double v;
                try {
                    v = g.eval(env);
                } catch (const SingularPoint&) {
                    near = true;
                    break;
                }
                if (std::abs(v) < grid.exclusion) {
                    near = true;
                    break;
                }
            }
            if (near) {
                ++out.skipped;
                continue;
            }
            double r;
            try {
                r = std::abs(expr.eval(env));
            } catch (const SingularPoint& e) {
                throw SingularPoint("t=" + std::to_string(t) + ", x=" + std::to_string(x) + ": " + e.what());
            }
            ++out.evaluated;
            if (r > out.max_abs || out.evaluated == 1) {
                out.max_abs = r;
                out.at_t = t;
                out.at_x = x;
            }
        }
    }
    return out;
}

inline NumericResidual residual_numeric(const Expr& u, const Grid& grid = standard_grid()) {
    Expr r = kdv_residual(u);
    return max_on_grid(r, grid, u.singular_guards());
}

// Exact residual of a rational candidate on a (t, x) chart.
inline RatFunc residual_exact_rational(const RatFunc& u) { return kdv_residual(u); }

// A named solution family with the parameters it was built from.
struct Family {
    std::string name;
    Variant variant = Variant::corrected;
    Expr u;
    std::string description;
};

// 3c sech^2(sqrt(c)/2 (x - c t) + eps).
inline Family soliton(const Expr& c = Expr(4), const Expr& eps = Expr(0)) {
    Expr arg = Expr(Scalar(1, 2)) * sqrt(c) * (X() - c * T()) + eps;
    return {"soliton", Variant::corrected, Expr(3) * c * pow(sech(arg), 2), "3c sech^2(sqrt(c)/2 (x - c t) + eps)"};
}

// printed: +12 g^2/(b t + g x + a)^2 - b/g ; corrected: -12 g^2/(...)^2 - b/g.
inline Family rational_family(const Scalar& gamma, const Scalar& beta, const Scalar& alpha, Variant v) {
    if (gamma == 0) throw Error("rational family needs gamma != 0");
    Expr lin = Expr(beta) * T() + Expr(gamma) * X() + Expr(alpha);
    Scalar sign = v == Variant::printed ? 12 : -12;
    Expr u = Expr(sign * gamma * gamma) * pow(lin, -2) - Expr(beta / gamma);
    return {"rational", v, u, v == Variant::printed ? "12g^2/(bt+gx+a)^2 - b/g" : "-12g^2/(bt+gx+a)^2 - b/g"};
}

inline RatFunc rational_family_exact(const Scalar& gamma, const Scalar& beta, const Scalar& alpha, Variant v,
                                     const ChartPtr& chart) {
    if (gamma == 0) throw Error("rational family needs gamma != 0");
    Poly lin = Poly::constant(chart, alpha) + beta * Poly::variable(chart, "t") + gamma * Poly::variable(chart, "x");
    Scalar sign = v == Variant::printed ? 12 : -12;
    return RatFunc(Poly::constant(chart, sign * gamma * gamma), lin * lin) - RatFunc::constant(chart, beta / gamma);
}

// printed: -12 tanh(x^2) + 8 literally ; corrected: -12 g^2 tanh^2(b t + g x + a) + 8 g^2 - b/g.
inline Family tanh_family(const Scalar& gamma, const Scalar& beta, const Scalar& alpha, Variant v) {
    if (v == Variant::printed) return {"tanh", v, Expr(-12) * tanh(pow(X(), 2)) + Expr(8), "-12 tanh(x^2) + 8"};
    if (gamma == 0) throw Error("tanh family needs gamma != 0");
    Expr lin = Expr(beta) * T() + Expr(gamma) * X() + Expr(alpha);
    Expr u = Expr(-12 * gamma * gamma) * pow(tanh(lin), 2) + Expr(8 * gamma * gamma - beta / gamma);
    return {"tanh", v, u, "-12g^2 tanh^2(bt+gx+a) + 8g^2 - b/g"};
}

inline Family constant_family(const Expr& kappa) { return {"constant", Variant::corrected, kappa, "kappa"}; }

struct TanhVerdict {
    NumericResidual residual;
    bool pass = false;
};

inline TanhVerdict residual_tanh_family(const Scalar& gamma, const Scalar& beta, const Scalar& alpha, Variant v,
                                        double tol = 1e-9) {
    auto r = residual_numeric(tanh_family(gamma, beta, alpha, v).u);
    return {r, r.pass(tol)};
}

enum class Flow { theta1, theta2, theta3, theta4 };

inline Flow parse_flow(const std::string& s) {
    if (s == "theta1" || s == "1") return Flow::theta1;
    if (s == "theta2" || s == "2") return Flow::theta2;
    if (s == "theta3" || s == "3") return Flow::theta3;
    if (s == "theta4" || s == "4") return Flow::theta4;
    throw Error("unknown flow '" + s + "'");
}

// Image of a solution u(t, x) under the flow of X1..X4 at parameter s.
inline Expr apply_flow(const Expr& u, Flow flow, const Expr& s) {
    switch (flow) {
        case Flow::theta1: return u.subst("x", X() - s);
        case Flow::theta2: return u.subst("t", T() - s);
        case Flow::theta3: return u.subst("x", X() - s * T()) + s;
        case Flow::theta4:
            return exp(Expr(-2) * s) *
                   u.subst({{"t", exp(Expr(-3) * s) * T()}, {"x", exp(-s) * X()}});
    }
    return u;
}

struct FiveParams {
    Expr alpha = Expr(0), beta = Expr(0), gamma = Expr(0), delta = Expr(1), lambda = Expr(0);
};

// delta^2 H(delta^3 t + alpha, delta x + beta + gamma delta t) - lambda.
inline Expr apply_five_param(const Expr& h, const FiveParams& p) {
    if (p.delta.is_zero() || (p.delta.kind() == Expr::Kind::real && p.delta.real_value() == 0))
        throw Error("five-parameter transform needs delta != 0");
    Expr tt = pow(p.delta, 3) * T() + p.alpha;
    Expr xx = p.delta * X() + p.beta + p.gamma * p.delta * T();
    return pow(p.delta, 2) * h.subst({{"t", tt}, {"x", xx}}) - p.lambda;
}

struct TravelingWaveVerdict {
    double first_integral = 0;  // max |v'^2/2 + v^3/6 - c v^2/2 - c1 v - c2|
    double ode = 0;             // max |v'' + v^2/2 - c v - c1|
    std::size_t evaluated = 0;
    bool pass(double tol) const { return first_integral < tol && ode < tol; }
};

// Checks Eq. 1.7 and the once-integrated equation for v(y) on y in [-5, 5].
inline TravelingWaveVerdict traveling_wave_check(const Scalar& c, const Scalar& c1, const Scalar& c2, const Expr& v,
                                                 const std::string& var = "y") {
    Expr v1 = v.diff(var);
    Expr v2 = v1.diff(var);
    Expr first = Expr(Scalar(1, 2)) * pow(v1, 2) + Expr(Scalar(1, 6)) * pow(v, 3) - Expr(c / 2) * pow(v, 2) -
                 Expr(c1) * v - Expr(c2);
    Expr ode = v2 + Expr(Scalar(1, 2)) * pow(v, 2) - Expr(c) * v - Expr(c1);
    TravelingWaveVerdict out;
    for (int k = -20; k <= 20; ++k) {
        std::map<std::string, double> env{{var, 0.25 * k}};
        out.first_integral = std::max(out.first_integral, std::abs(first.eval(env)));
        out.ode = std::max(out.ode, std::abs(ode.eval(env)));
        ++out.evaluated;
    }
    return out;
}

// v(y) = 3c sech^2(sqrt(c)/2 y + eps).
inline Expr soliton_profile(const Expr& c, const Expr& eps, const std::string& var = "y") {
    return Expr(3) * c * pow(sech(Expr(Scalar(1, 2)) * sqrt(c) * Expr::var(var) + eps), 2);
}

}  // namespace kdvsym
