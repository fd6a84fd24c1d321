#pragma once

#include <map>
#include <string>
#include <vector>

#include "kdvsym/jet.hpp"

namespace kdvsym::builtin {

// Second-order jet chart (t, x, u, u_t, u_x, u_tt, u_tx, u_xx).
inline const JetSpec& kdv_jet2() {
    static const JetSpec spec({"t", "x"}, {"u"}, 2);
    return spec;
}

inline const JetSpec& kdv_jet3() {
    static const JetSpec spec({"t", "x"}, {"u"}, 3);
    return spec;
}

// u_xxx + u u_x + u_t = 0; carries the generator 2-form exactly as printed.
inline const PdeSpec& kdv3() {
    static const PdeSpec pde("kdv3", kdv_jet3(), "u_xxx + u*u_x + u_t", "u_xxx", "u dt^du - dt^du_xx - dx^du");
    return pde;
}

// Second-order form with w = u_x: w_xx + u w + u_t = 0.
inline const PdeSpec& kdv2w() {
    static const PdeSpec pde("kdv2w", JetSpec({"t", "x"}, {"u", "w"}, 2), "w_xx + u*w + u_t", "w_xx");
    return pde;
}

// Stationary reduction y''' + y y' = 0.
inline const PdeSpec& ode_1_8() {
    static const PdeSpec pde("ode-1.8", JetSpec({"x"}, {"y"}, 3), "y_xxx + y*y_x", "y_xxx");
    return pde;
}

// u eta^4 + 3 eta'^2 - eta eta'' = 0 after the hodograph change x = v(u), v' = eta.
inline const PdeSpec& ode_1_10() {
    static const PdeSpec pde("ode-1.10", JetSpec({"u"}, {"eta"}, 2), "u*eta^4 + 3*eta_u^2 - eta*eta_uu", "eta_uu");
    return pde;
}

// 4t^4 xi^3 + 3xi - 10t xi^2 + 12t^2 xi^3 + t xi' = 0.
inline const PdeSpec& ode_1_11() {
    static const PdeSpec pde("ode-1.11", JetSpec({"t"}, {"xi"}, 1),
                             "4*t^4*xi^3 + 3*xi - 10*t*xi^2 + 12*t^2*xi^3 + t*xi_t", "xi_t");
    return pde;
}

inline const std::map<std::string, const PdeSpec*>& pde_registry() {
    static const std::map<std::string, const PdeSpec*> reg = {
        {"kdv3", &kdv3()},         {"kdv2w", &kdv2w()},       {"ode-1.8", &ode_1_8()},
        {"ode-1.10", &ode_1_10()}, {"ode-1.11", &ode_1_11()},
    };
    return reg;
}

inline const PdeSpec& pde(const std::string& name) {
    auto it = pde_registry().find(name);
    if (it == pde_registry().end()) throw Error("unknown built-in equation '" + name + "'");
    return *it->second;
}

struct NamedField {
    std::string name;
    std::string pde;   // chart the field lives on
    std::string text;  // `coord: coefficient; ...`
};

// Symmetry generators of the KdV analysis and its reductions.
inline const std::vector<NamedField>& field_registry() {
    static const std::vector<NamedField> reg = {
        // prolonged generators on the second-order chart
        {"v1", "jet2", "x: 1"},
        {"v2", "jet2", "t: 1"},
        {"v3", "jet2", "x: t; u: 1; u_t: -u_x; u_tt: -2*u_tx; u_tx: -u_xx"},
        {"v4", "jet2",
         "x: x; t: 3*t; u: -2*u; u_t: -5*u_t; u_x: -3*u_x; u_tt: -8*u_tt; u_tx: -6*u_tx; u_xx: -4*u_xx"},
        // point parts
        {"X1", "kdv3", "x: 1"},
        {"X2", "kdv3", "t: 1"},
        {"X3", "kdv3", "x: t; u: 1"},
        {"X4", "kdv3", "x: x; t: 3*t; u: -2*u"},
        {"ode8_X1", "ode-1.8", "x: 1"},
        {"ode8_X2", "ode-1.8", "x: x; y: -2*y"},
        {"Xt1", "ode-1.10", "eta: eta^3"},
        {"Xt2", "ode-1.10", "eta: eta^3*u"},
        {"Xt3", "ode-1.10", "u: 2*u; eta: -3*eta"},
        {"Xbar", "ode-1.11", "t: t*(3 + t^2); xi: -3*(1 + t^2)*xi"},
    };
    return reg;
}

inline ChartPtr chart_for(const std::string& where) {
    if (where == "jet2") return kdv_jet2().chart();
    return pde(where).jet.chart();
}

inline const NamedField& field_entry(const std::string& name) {
    for (const auto& f : field_registry())
        if (f.name == name) return f;
    throw Error("unknown built-in field '" + name + "'");
}

inline VectorFieldExpr field(const std::string& name) {
    const auto& e = field_entry(name);
    return parse_field(e.text, chart_for(e.pde));
}

// Same field re-read on another chart (e.g. X_i on the second-order chart).
inline VectorFieldExpr field_on(const std::string& name, const ChartPtr& chart) {
    return parse_field(field_entry(name).text, chart);
}

}  // namespace kdvsym::builtin
