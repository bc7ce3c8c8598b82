#include "twoport/analysis.hpp"

#include <cmath>
#include <numbers>

namespace twoport {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_query(const state_space_block& block, const transfer_query& q) {
    switch (q.kind) {
    case transfer_kind::control_to_output:
    case transfer_kind::ref_to_state:
        if (q.control_index < 0 || q.control_index >= block.controls())
            throw bad_index("control index out of range for this block");
        break;
    default:
        break;
    }
    if (q.kind == transfer_kind::ref_to_state &&
        (q.state_index < 0 || q.state_index >= block.states()))
        throw bad_index("state index out of range for this block");
}

}  // namespace

cplx named_transfer(const state_space_block& block, const transfer_query& query,
                    cplx s) {
    check_query(block, query);
    switch (query.kind) {
    case transfer_kind::control_to_output:
        return eval_response(block, 2 + query.control_index, 1, s);
    case transfer_kind::output_impedance:
        return eval_response(block, 1, 1, s);
    case transfer_kind::input_admittance:
        return eval_response(block, 0, 0, s);
    case transfer_kind::input_impedance: {
        const cplx y = eval_response(block, 0, 0, s);
        if (std::abs(y) < 1e-300)
            throw zero_admittance("input admittance is zero at this frequency");
        return 1.0 / y;
    }
    case transfer_kind::forward_voltage_gain:
        return eval_response(block, 0, 1, s);
    case transfer_kind::reverse_current_gain:
        return eval_response(block, 1, 0, s);
    case transfer_kind::ref_to_state:
        return eval_state_response(block, 2 + query.control_index,
                                   query.state_index, s);
    }
    throw bad_index("unknown transfer query");
}

std::vector<double> grid_frequencies(const frequency_grid& grid) {
    if (!(grid.f_start > 0.0) || !(grid.f_stop > grid.f_start) ||
        grid.points_per_decade < 1)
        throw bad_grid("need 0 < f_start < f_stop and points_per_decade >= 1");
    std::vector<double> fs;
    const double ratio = std::pow(10.0, 1.0 / grid.points_per_decade);
    for (double f = grid.f_start; f < grid.f_stop * (1.0 - 1e-12); f *= ratio)
        fs.push_back(f);
    fs.push_back(grid.f_stop);
    return fs;
}

std::vector<bode_point> bode_sweep(const state_space_block& block,
                                   const transfer_query& query,
                                   const frequency_grid& grid) {
    check_query(block, query);
    const auto fs = grid_frequencies(grid);
    std::vector<bode_point> out;
    out.reserve(fs.size());
    bool have_prev = false;
    double prev_phase = 0.0;
    for (const double f : fs) {
        bode_point p;
        p.f_hz = f;
        try {
            const cplx g = named_transfer(block, query, cplx(0.0, two_pi * f));
            p.mag_db = 20.0 * std::log10(std::abs(g));
            double phase = std::atan2(g.imag(), g.real()) * 180.0 / std::numbers::pi;
            if (phase <= -180.0) phase += 360.0;  // branch in (-180, 180]
            if (have_prev) {
                while (phase - prev_phase > 180.0) phase -= 360.0;
                while (phase - prev_phase < -180.0) phase += 360.0;
            }
            prev_phase = phase;
            have_prev = true;
            p.phase_deg = phase;
        } catch (const singular_at_s&) {
            p.ok = false;
            p.mag_db = std::numeric_limits<double>::quiet_NaN();
            p.phase_deg = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(p);
    }
    return out;
}

time_series step_study(const state_space_block& block, int input_index,
                       double amplitude, double duration, double dt) {
    if (input_index < 0 || input_index >= block.inputs())
        throw bad_index("input index out of range");
    if (!(dt > 0.0) || !(duration > 0.0))
        throw bad_grid("dt and duration must be positive");
    if (!is_stable(block))
        throw unstable_block("step study requires an asymptotically stable block");

    time_series inputs;
    inputs.t = {0.0, duration};
    inputs.channels.resize(static_cast<std::size_t>(block.inputs()));
    for (int i = 0; i < block.inputs(); ++i)
        inputs.channels[static_cast<std::size_t>(i)] = "u" + std::to_string(i);
    inputs.samples = matrix::Zero(2, block.inputs());
    inputs.samples.col(input_index).setConstant(amplitude);

    return simulate(block, inputs, vector::Zero(block.states()), dt, duration);
}

}  // namespace twoport
