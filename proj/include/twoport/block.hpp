#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twoport/errors.hpp"

namespace twoport {

using matrix = Eigen::MatrixXd;
using vector = Eigen::VectorXd;
using row_vector = Eigen::RowVectorXd;
using cplx = std::complex<double>;

/// Two-port state-space block in g-parameter form.
///
/// Inputs are ordered (v_in, i_out, ctl_0 .. ctl_{q-1}), outputs are
/// (i_in, v_out); currents flow into both ports. A passive block has q = 0,
/// a controlled block q >= 1 — same type, distinguished only by the number
/// of control columns. Immutable after construction; every operation in
/// this library returns a new block.
class state_space_block {
public:
    /// Validating constructor. A is n×n, B is n×(2+q), C is 2×n, D is 2×(2+q);
    /// label counts must equal q and n. Throws dimension_mismatch or non_finite.
    state_space_block(matrix a, matrix b, matrix c, matrix d,
                      std::vector<std::string> control_labels = {},
                      std::vector<std::string> state_labels = {});

    int states() const { return static_cast<int>(a_.rows()); }
    int controls() const { return static_cast<int>(d_.cols()) - 2; }
    int inputs() const { return static_cast<int>(d_.cols()); }

    const matrix& a() const { return a_; }
    const matrix& b() const { return b_; }
    const matrix& c() const { return c_; }
    const matrix& d() const { return d_; }

    // Partition views into the shared storage (no copies).
    auto b1() const { return b_.col(0); }
    auto b2() const { return b_.col(1); }
    auto b3(int k = 0) const { return b_.col(2 + k); }
    auto b_ctl() const { return b_.rightCols(controls()); }
    auto c1() const { return c_.row(0); }
    auto c2() const { return c_.row(1); }
    auto d_ctl_row(int out_row) const { return d_.row(out_row).tail(controls()); }
    double d11() const { return d_(0, 0); }
    double d12() const { return d_(0, 1); }
    double d21() const { return d_(1, 0); }
    double d22() const { return d_(1, 1); }

    const std::vector<std::string>& control_labels() const { return control_labels_; }
    const std::vector<std::string>& state_labels() const { return state_labels_; }

private:
    matrix a_, b_, c_, d_;
    std::vector<std::string> control_labels_;
    std::vector<std::string> state_labels_;
};

/// SISO controller block: one input (control error e), one output (control
/// signal u). m = 0 is permitted and describes a pure gain d.
class controller_block {
public:
    controller_block(matrix a, matrix b, matrix c, double d);

    int states() const { return static_cast<int>(a_.rows()); }
    const matrix& a() const { return a_; }
    const matrix& b() const { return b_; }
    const matrix& c() const { return c_; }
    double d() const { return d_; }

private:
    matrix a_, b_, c_;
    double d_;
};

/// Uniformly sampled, named channels over a strictly increasing time grid.
struct time_series {
    std::vector<double> t;
    std::vector<std::string> channels;
    matrix samples;  // one row per time sample, one column per channel

    /// Uniform step of the grid. Throws bad_grid for empty or nonuniform t.
    double step() const;
    void validate() const;
    int channel_index(const std::string& name) const;
};

/// Scalar frequency response of one (input, output) channel at complex s:
/// C_row (sI − A)^{-1} B_col + D entry. For n = 0 this is the D entry.
/// Throws singular_at_s when sI − A is numerically singular (rcond < 1e-14).
cplx eval_response(const state_space_block& block, int input_index,
                   int output_index, cplx s);

/// Response from one input to a single state (selector row instead of C).
cplx eval_state_response(const state_space_block& block, int input_index,
                         int state_index, cplx s);

/// Eigenvalues of A, multiplicities preserved; empty for n = 0.
std::vector<cplx> poles(const state_space_block& block);

/// True when every pole has strictly negative real part.
bool is_stable(const state_space_block& block);

/// Exact zero-order-hold integration of the block under piecewise-constant
/// inputs. The discrete pair (Phi, Gamma) comes from the matrix exponential
/// of [[A, B], [0, 0]]·dt, so each step is exact for inputs held over the
/// step. Inputs are sampled from `inputs` (one channel per block input,
/// held between its samples); the returned channels are i_in, v_out and all
/// states on the grid t = 0, dt, ..., duration.
time_series simulate(const state_space_block& block, const time_series& inputs,
                     const vector& x0, double dt, double duration);

}  // namespace twoport
