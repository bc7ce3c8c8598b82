#pragma once

#include "twoport/block.hpp"

namespace twoport {

/// Which variable a control loop feeds back: a single state by position, or
/// the output voltage (which requires negligible direct feedthrough from the
/// closed control input to v_out).
struct loop_target {
    enum class kind { state, output_voltage };
    kind which = kind::output_voltage;
    int state_index = 0;

    static loop_target state(int index) { return {kind::state, index}; }
    static loop_target output_voltage() { return {kind::output_voltage, 0}; }
};

/// Feedback selection matrix K for closing one control loop. Rows 0 and 1
/// (the v_in / i_out rows) are always zero; only the row of the control input
/// being closed may be nonzero. K selects the fed-back variable, it does not
/// carry controller parameters.
class feedback_gain {
public:
    /// Direct construction; validates the zero-row structure.
    feedback_gain(matrix k, int control_index);

    const matrix& k() const { return k_; }
    int control_index() const { return control_index_; }

private:
    matrix k_;
    int control_index_;
};

/// Stacks the controller behind control input `ctl_index` of the converter:
/// states become (x, x_C), the selected B/D columns are rerouted through the
/// controller (B3·D_C over B_C), C gains zero columns for the controller
/// states, and the input's meaning changes to the control error. Other
/// control inputs pass through unchanged.
state_space_block attach_controller_open_loop(const state_space_block& conv,
                                              const controller_block& ctrl,
                                              int ctl_index = 0);

/// Builds K for the requested target over an open-loop block. For the
/// output-voltage target, c2_of_converter is the C2 row of the block the
/// controller was attached to, and the open-loop block's feedthrough from the
/// closed input to v_out must be negligible (|D| <= 1e-9·max(1, max|D|)).
feedback_gain make_feedback_gain(const loop_target& target,
                                 const state_space_block& open_loop,
                                 int ctl_index,
                                 const row_vector& c2_of_converter);

/// Closes the loop: A_cl = A_ol − B_ol·K; B, C, D are untouched and the
/// closed input's meaning changes to the reference signal.
state_space_block close_loop(const state_space_block& open_loop,
                             const feedback_gain& gain);

/// Series connection of two two-port blocks (source feeding load): the inner
/// terminal pair (v_out_S = v_in_L, i_out_S = −i_in_L) is eliminated, states
/// stack source-first, inputs are (v_in, i_out, ctl_S.., ctl_L..). Expanded
/// entrywise formulation. Throws ill_posed_connection when
/// |1 + D11_L·D22_S| <= 1e-12.
state_space_block series_connect(const state_space_block& source,
                                 const state_space_block& load);

/// Same connection computed through the compact block-matrix helpers
/// (M1, M2, M_C, M_D); kept as an independent second implementation for
/// cross-validation against series_connect.
state_space_block series_connect_compact(const state_space_block& source,
                                         const state_space_block& load);

}  // namespace twoport
