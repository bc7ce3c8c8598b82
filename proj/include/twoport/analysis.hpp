#pragma once

#include "twoport/block.hpp"

namespace twoport {

enum class transfer_kind {
    control_to_output,    // v_out / ctl_k
    output_impedance,     // v_out / i_out
    input_admittance,     // i_in / v_in
    input_impedance,      // 1 / input_admittance
    forward_voltage_gain, // v_out / v_in
    reverse_current_gain, // i_in / i_out
    ref_to_state,         // state_i / ctl_k
};

/// A named input/output channel pair over a block.
struct transfer_query {
    transfer_kind kind = transfer_kind::control_to_output;
    int control_index = 0;  // k, used by control_to_output and ref_to_state
    int state_index = 0;    // i, used by ref_to_state
};

/// Logarithmically spaced frequency grid [f_start, f_stop] in Hz.
struct frequency_grid {
    double f_start = 1.0;
    double f_stop = 1e6;
    int points_per_decade = 50;
};

struct bode_point {
    double f_hz = 0.0;
    double mag_db = 0.0;
    double phase_deg = 0.0;
    bool ok = true;  // false when the block is singular at this frequency
};

/// Scalar response of the named channel at complex s.
cplx named_transfer(const state_space_block& block, const transfer_query& query,
                    cplx s);

/// Frequencies of the grid (deterministic; last point is exactly f_stop).
std::vector<double> grid_frequencies(const frequency_grid& grid);

/// Magnitude/phase sweep at s = j·2πf. Phase is unwrapped so adjacent points
/// never jump by more than 180°, starting in (−180°, 180°]. Singular grid
/// points are flagged and the sweep continues.
std::vector<bode_point> bode_sweep(const state_space_block& block,
                                   const transfer_query& query,
                                   const frequency_grid& grid);

/// Small-signal step response: a step of `amplitude` on one input, zeros on
/// the others, zero initial state. Requires an asymptotically stable block.
time_series step_study(const state_space_block& block, int input_index,
                       double amplitude, double duration, double dt);

}  // namespace twoport
