#include "twoport/block.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace twoport {

namespace {

bool all_finite(const matrix& m) {
    return m.array().isFinite().all();
}

std::string shape(const matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

}  // namespace

state_space_block::state_space_block(matrix a, matrix b, matrix c, matrix d,
                                     std::vector<std::string> control_labels,
                                     std::vector<std::string> state_labels)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)),
      control_labels_(std::move(control_labels)),
      state_labels_(std::move(state_labels)) {
    const auto n = a_.rows();
    if (a_.cols() != n)
        throw dimension_mismatch("A must be square, got " + shape(a_));
    if (d_.rows() != 2 || d_.cols() < 2)
        throw dimension_mismatch("D must be 2x(2+q), got " + shape(d_));
    const auto q = d_.cols() - 2;
    if (b_.rows() != n || b_.cols() != 2 + q)
        throw dimension_mismatch("B must be " + std::to_string(n) + "x" +
                                 std::to_string(2 + q) + ", got " + shape(b_));
    if (c_.rows() != 2 || c_.cols() != n)
        throw dimension_mismatch("C must be 2x" + std::to_string(n) + ", got " +
                                 shape(c_));
    if (static_cast<Eigen::Index>(control_labels_.size()) != q)
        throw dimension_mismatch("expected " + std::to_string(q) +
                                 " control labels, got " +
                                 std::to_string(control_labels_.size()));
    if (static_cast<Eigen::Index>(state_labels_.size()) != n)
        throw dimension_mismatch("expected " + std::to_string(n) +
                                 " state labels, got " +
                                 std::to_string(state_labels_.size()));
    if (!all_finite(a_) || !all_finite(b_) || !all_finite(c_) || !all_finite(d_))
        throw non_finite("matrix entries must be finite");
}

controller_block::controller_block(matrix a, matrix b, matrix c, double d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(d) {
    const auto m = a_.rows();
    if (a_.cols() != m)
        throw dimension_mismatch("A_C must be square");
    if (b_.rows() != m || b_.cols() != 1)
        throw dimension_mismatch("B_C must be " + std::to_string(m) + "x1");
    if (c_.rows() != 1 || c_.cols() != m)
        throw dimension_mismatch("C_C must be 1x" + std::to_string(m));
    if (!all_finite(a_) || !all_finite(b_) || !all_finite(c_) || !std::isfinite(d_))
        throw non_finite("controller entries must be finite");
}

double time_series::step() const {
    validate();
    return t.size() > 1 ? t[1] - t[0] : 0.0;
}

void time_series::validate() const {
    if (t.empty())
        throw bad_grid("time series is empty");
    if (samples.rows() != static_cast<Eigen::Index>(t.size()) ||
        samples.cols() != static_cast<Eigen::Index>(channels.size()))
        throw dimension_mismatch("sample matrix does not match grid/channels");
    if (t.size() > 1) {
        const double dt = t[1] - t[0];
        if (!(dt > 0.0))
            throw bad_grid("time step must be positive");
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double step_i = t[i] - t[i - 1];
            if (std::abs(step_i - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                throw bad_grid("time grid is not uniform");
        }
    }
}

int time_series::channel_index(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i] == name) return static_cast<int>(i);
    throw bad_index("no channel named '" + name + "'");
}

namespace {

// Shared solve for all frequency evaluations: row·(sI−A)^{-1}·col + d.
cplx response_core(const matrix& a, const Eigen::VectorXcd& col,
                   const Eigen::RowVectorXcd& row, double d, cplx s) {
    const auto n = a.rows();
    if (n == 0) return {d, 0.0};
    Eigen::MatrixXcd m = -a.cast<cplx>();
    m.diagonal().array() += s;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double rc = lu.rcond();
    const Eigen::VectorXcd sol = lu.solve(col);
    // rcond is unreliable around an exactly singular factorization (the
    // inverse-norm estimate can overflow), so also reject non-finite solves.
    if (!(rc > 1e-14) || !sol.allFinite()) {
        std::ostringstream os;
        os << "sI - A is singular at s = (" << s.real() << ", " << s.imag() << ")";
        throw singular_at_s(os.str());
    }
    return (row * sol)(0, 0) + d;
}

}  // namespace

cplx eval_response(const state_space_block& block, int input_index,
                   int output_index, cplx s) {
    if (input_index < 0 || input_index >= block.inputs())
        throw bad_index("input index out of range");
    if (output_index < 0 || output_index >= 2)
        throw bad_index("output index out of range");
    return response_core(block.a(),
                         block.b().col(input_index).cast<cplx>(),
                         block.c().row(output_index).cast<cplx>(),
                         block.d()(output_index, input_index), s);
}

cplx eval_state_response(const state_space_block& block, int input_index,
                         int state_index, cplx s) {
    if (input_index < 0 || input_index >= block.inputs())
        throw bad_index("input index out of range");
    if (state_index < 0 || state_index >= block.states())
        throw bad_index("state index out of range");
    Eigen::RowVectorXcd selector = Eigen::RowVectorXcd::Zero(block.states());
    selector(state_index) = 1.0;
    return response_core(block.a(), block.b().col(input_index).cast<cplx>(),
                         selector, 0.0, s);
}

std::vector<cplx> poles(const state_space_block& block) {
    if (block.states() == 0) return {};
    Eigen::EigenSolver<matrix> solver(block.a(), /*computeEigenvectors=*/false);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool is_stable(const state_space_block& block) {
    for (const auto& p : poles(block))
        if (!(p.real() < 0.0)) return false;
    return true;
}

time_series simulate(const state_space_block& block, const time_series& inputs,
                     const vector& x0, double dt, double duration) {
    if (!(dt > 0.0) || !(duration >= 0.0))
        throw bad_grid("dt must be positive and duration nonnegative");
    inputs.validate();
    if (inputs.samples.cols() != block.inputs())
        throw dimension_mismatch("input series must carry one channel per input");
    if (inputs.t.front() > 0.0)
        throw bad_grid("input series must start at or before t = 0");
    if (x0.size() != block.states())
        throw dimension_mismatch("x0 length must equal the state count");

    const int n = block.states();
    const int nu = block.inputs();
    const auto steps = static_cast<Eigen::Index>(std::llround(duration / dt));

    // Discrete ZOH pair from the augmented exponential.
    matrix aug = matrix::Zero(n + nu, n + nu);
    aug.topLeftCorner(n, n) = block.a();
    aug.topRightCorner(n, nu) = block.b();
    const matrix exp_aug = (aug * dt).exp();
    const matrix phi = exp_aug.topLeftCorner(n, n);
    const matrix gamma = exp_aug.topRightCorner(n, nu);

    const double in_t0 = inputs.t.front();
    const double in_dt = inputs.step();
    const auto in_rows = inputs.samples.rows();
    auto input_at = [&](double t) -> vector {
        Eigen::Index idx = 0;
        if (in_rows > 1) {
            idx = static_cast<Eigen::Index>(std::floor((t - in_t0) / in_dt + 1e-9));
            idx = std::clamp<Eigen::Index>(idx, 0, in_rows - 1);
        }
        return inputs.samples.row(idx).transpose();
    };

    time_series out;
    out.channels = {"i_in", "v_out"};
    for (const auto& label : block.state_labels()) out.channels.push_back(label);
    out.t.resize(static_cast<std::size_t>(steps) + 1);
    out.samples.resize(steps + 1, 2 + n);

    vector x = x0;
    for (Eigen::Index k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const vector u = input_at(t);
        out.t[static_cast<std::size_t>(k)] = t;
        out.samples.row(k).head(2) = (block.c() * x + block.d() * u).transpose();
        out.samples.row(k).tail(n) = x.transpose();
        if (k < steps) x = phi * x + gamma * u;
    }
    return out;
}

}  // namespace twoport
