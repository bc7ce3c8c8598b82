#include "twoport/blocks.hpp"

#include <cmath>
#include <numbers>

namespace twoport {

namespace {

void check_lc(const lc_params& p) {
    if (!(p.inductance > 0.0) || !(p.capacitance > 0.0))
        throw invalid_params("L and C must be strictly positive");
    if (p.inductor_esr < 0.0 || p.capacitor_esr < 0.0)
        throw invalid_params("ESR values must be nonnegative");
    if (!std::isfinite(p.inductance) || !std::isfinite(p.capacitance) ||
        !std::isfinite(p.inductor_esr) || !std::isfinite(p.capacitor_esr))
        throw invalid_params("LC parameters must be finite");
}

void check_op(const operating_point& op, topology topo) {
    if (!(op.duty > 0.0) || !(op.duty < 1.0))
        throw invalid_operating_point("duty ratio must lie strictly inside (0, 1)");
    if (!(op.v_in > 0.0) || !(op.v_out > 0.0))
        throw invalid_operating_point("voltages must be positive");
    if (topo == topology::boost && !(op.v_out > op.v_in))
        throw invalid_operating_point("boost requires V_out > V_in");
    if (topo == topology::buck && !(op.v_out < op.v_in))
        throw invalid_operating_point("buck requires V_out < V_in");
    if (!std::isfinite(op.i_out) || !std::isfinite(op.i_inductor))
        throw invalid_operating_point("currents must be finite");
}

}  // namespace

operating_point solve_operating_point(topology topo, double v_in, double v_out,
                                      double i_out) {
    if (!(v_in > 0.0) || !(v_out > 0.0) || !std::isfinite(i_out))
        throw infeasible_point("voltages must be positive and I_out finite");
    operating_point op;
    op.v_in = v_in;
    op.v_out = v_out;
    op.i_out = i_out;
    if (topo == topology::boost) {
        if (!(v_out > v_in))
            throw infeasible_point("boost requires V_out > V_in");
        op.duty = 1.0 - v_in / v_out;
        op.i_inductor = i_out / (1.0 - op.duty);
    } else {
        if (!(v_out < v_in))
            throw infeasible_point("buck requires V_out < V_in");
        op.duty = v_out / v_in;
        op.i_inductor = i_out;
    }
    return op;
}

state_space_block resistor(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw non_positive_r("resistance must be strictly positive");
    matrix d(2, 2);
    d << 1.0 / r, -1.0,
         1.0, 0.0;
    return {matrix(0, 0), matrix(0, 2), matrix(2, 0), d};
}

state_space_block lc_filter(const lc_params& p) {
    check_lc(p);
    const double l = p.inductance, c = p.capacitance;
    const double rl = p.inductor_esr, rc = p.capacitor_esr;
    matrix a(2, 2), b(2, 2), cm(2, 2), d(2, 2);
    a << -(rl + rc) / l, -1.0 / l,
         1.0 / c, 0.0;
    b << 1.0 / l, -rc / l,
         0.0, 1.0 / c;
    cm << 1.0, 0.0,
          rc, 1.0;
    d << 0.0, 0.0,
         0.0, rc;
    return {a, b, cm, d, {}, {"iL", "vC"}};
}

state_space_block boost_ccm(const lc_params& p, const operating_point& op) {
    check_lc(p);
    check_op(op, topology::boost);
    const double l = p.inductance, c = p.capacitance;
    const double rl = p.inductor_esr, rc = p.capacitor_esr;
    const double dp = 1.0 - op.duty;  // (1 - D)
    matrix a(2, 2), b(2, 3), cm(2, 2), d(2, 3);
    a << -(dp * rc + rl) / l, -dp / l,
         dp / c, 0.0;
    b << 1.0 / l, -dp * rc / l, op.v_out / l,
         0.0, 1.0 / c, -op.i_inductor / c;
    cm << 1.0, 0.0,
          dp * rc, 1.0;
    d << 0.0, 0.0, 0.0,
         0.0, rc, -rc * op.i_inductor;
    return {a, b, cm, d, {"duty"}, {"iL", "vC"}};
}

state_space_block buck_ccm(const lc_params& p, const operating_point& op) {
    check_lc(p);
    check_op(op, topology::buck);
    const double l = p.inductance, c = p.capacitance;
    const double rl = p.inductor_esr, rc = p.capacitor_esr;
    matrix a(2, 2), b(2, 3), cm(2, 2), d(2, 3);
    a << -(rl + rc) / l, -1.0 / l,
         1.0 / c, 0.0;
    b << op.duty / l, -rc / l, op.v_in / l,
         0.0, 1.0 / c, 0.0;
    cm << op.duty, 0.0,
          rc, 1.0;
    d << 0.0, 0.0, op.i_inductor,
         0.0, rc, 0.0;
    return {a, b, cm, d, {"duty"}, {"iL", "vC"}};
}

controller_block controller(const controller_params& p) {
    if (!(p.integral_gain > 0.0) || !std::isfinite(p.integral_gain))
        throw invalid_params("K_i must be strictly positive");
    auto require = [](const std::optional<double>& v, const char* name) {
        if (!v || !(*v > 0.0) || !std::isfinite(*v))
            throw invalid_params(std::string(name) + " must be set and positive");
        return *v;
    };
    auto forbid = [](const std::optional<double>& v, const char* name) {
        if (v)
            throw invalid_params(std::string(name) + " is not used by this kind");
    };

    const double ki = p.integral_gain;
    switch (p.kind) {
    case controller_kind::type1: {
        forbid(p.t_z, "t_z"); forbid(p.t_p, "t_p");
        forbid(p.t_z1, "t_z1"); forbid(p.t_z2, "t_z2");
        forbid(p.t_p1, "t_p1"); forbid(p.t_p2, "t_p2");
        matrix a = matrix::Zero(1, 1);
        matrix b(1, 1), c(1, 1);
        b << ki;
        c << 1.0;
        return {a, b, c, 0.0};
    }
    case controller_kind::type2: {
        const double tz = require(p.t_z, "t_z");
        const double tp = require(p.t_p, "t_p");
        forbid(p.t_z1, "t_z1"); forbid(p.t_z2, "t_z2");
        forbid(p.t_p1, "t_p1"); forbid(p.t_p2, "t_p2");
        matrix a(2, 2), b(2, 1), c(1, 2);
        a << 0.0, 0.0,
             1.0, -1.0 / tp;
        b << ki / tp,
             ki * tz / tp;
        c << 0.0, 1.0;
        return {a, b, c, 0.0};
    }
    case controller_kind::type3: {
        forbid(p.t_z, "t_z"); forbid(p.t_p, "t_p");
        const double tz1 = require(p.t_z1, "t_z1");
        const double tz2 = require(p.t_z2, "t_z2");
        const double tp1 = require(p.t_p1, "t_p1");
        const double tp2 = require(p.t_p2, "t_p2");
        // Observer-canonical realization of
        //   K_i (1 + T_z1 s)(1 + T_z2 s) / (s (1 + T_p1 s)(1 + T_p2 s));
        // the characteristic polynomial carries the pole time constants.
        const double pp = tp1 * tp2;
        matrix a(3, 3), b(3, 1), c(1, 3);
        a << 0.0, 0.0, 0.0,
             1.0, 0.0, -1.0 / pp,
             0.0, 1.0, -(tp1 + tp2) / pp;
        b << ki / pp,
             ki * (tz1 + tz2) / pp,
             ki * tz1 * tz2 / pp;
        c << 0.0, 0.0, 1.0;
        return {a, b, c, 0.0};
    }
    }
    throw invalid_params("unknown controller kind");
}

double time_constant_from_frequency(double f_hz) {
    if (!(f_hz > 0.0) || !std::isfinite(f_hz))
        throw non_positive_frequency("frequency must be strictly positive");
    return 1.0 / (2.0 * std::numbers::pi * f_hz);
}

}  // namespace twoport
