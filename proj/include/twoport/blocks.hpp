#pragma once

#include <optional>

#include "twoport/block.hpp"

namespace twoport {

/// Inductor/capacitor pair with equivalent series resistances.
/// The 10 mΩ defaults mirror the uniform ESR used across the worked systems.
struct lc_params {
    double inductance = 0.0;       // L [H], > 0
    double inductor_esr = 0.01;    // r_L [Ω], >= 0
    double capacitance = 0.0;      // C [F], > 0
    double capacitor_esr = 0.01;   // r_C [Ω], >= 0
};

/// DC operating point of a converter. duty is strictly inside (0, 1);
/// i_inductor is the average inductor current the model is linearized at.
struct operating_point {
    double v_in = 0.0;
    double v_out = 0.0;
    double i_out = 0.0;
    double duty = 0.0;
    double i_inductor = 0.0;
};

enum class topology { buck, boost };

/// Lossless steady-state solution: boost D = 1 − V_in/V_out, I_L = I_out/(1−D);
/// buck D = V_out/V_in, I_L = I_out. Throws infeasible_point when the voltages
/// do not match the topology.
operating_point solve_operating_point(topology topo, double v_in, double v_out,
                                      double i_out);

/// Purely resistive load: n = 0, D = [[1/R, −1], [1, 0]].
state_space_block resistor(double r);

/// LC filter with ESRs, states (iL, vC), q = 0.
state_space_block lc_filter(const lc_params& p);

/// Unterminated CCM boost converter small-signal model, states (iL, vC),
/// one control input "duty".
state_space_block boost_ccm(const lc_params& p, const operating_point& op);

/// Unterminated CCM buck converter small-signal model obtained by state-space
/// averaging under the into-the-port sign convention; states (iL, vC), one
/// control input "duty".
state_space_block buck_ccm(const lc_params& p, const operating_point& op);

enum class controller_kind { type1, type2, type3 };

/// Integral controller with zero, one, or two lead-lag elements.
/// Frequencies are expressed through time constants; unused fields must stay
/// unset for the chosen kind.
struct controller_params {
    controller_kind kind = controller_kind::type1;
    double integral_gain = 0.0;                 // K_i, > 0
    std::optional<double> t_z, t_p;             // type 2
    std::optional<double> t_z1, t_z2, t_p1, t_p2;  // type 3
};

/// State-space realization of the Type 1/2/3 controller; no direct
/// feedthrough (D_C = 0) for all three kinds.
controller_block controller(const controller_params& p);

/// 1/(2πf); bridges "zero at f" phrasing to time constants.
double time_constant_from_frequency(double f_hz);

}  // namespace twoport
