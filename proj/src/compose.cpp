#include "twoport/compose.hpp"

#include <cmath>
#include <string>

namespace twoport {

namespace {

std::string strip_err(const std::string& label) {
    constexpr const char* prefix = "err:";
    if (label.rfind(prefix, 0) == 0) return label.substr(4);
    return label;
}

std::vector<std::string> prefixed(const std::vector<std::string>& labels,
                                  const char* prefix) {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(prefix + l);
    return out;
}

}  // namespace

feedback_gain::feedback_gain(matrix k, int control_index)
    : k_(std::move(k)), control_index_(control_index) {
    if (k_.rows() < 3)
        throw dimension_mismatch("K must have 2+q rows with q >= 1");
    if (control_index_ < 0 || 2 + control_index_ >= k_.rows())
        throw bad_index("control index outside K's rows");
    // rows 0 and 1 (v_in, i_out) must be zero; only the closed input's row
    // may carry entries.
    for (Eigen::Index r = 0; k_.cols() > 0 && r < k_.rows(); ++r) {
        if (r == 2 + control_index_) continue;
        if (k_.row(r).cwiseAbs().maxCoeff() != 0.0)
            throw dimension_mismatch("K may only be nonzero in the closed input's row");
    }
}

state_space_block attach_controller_open_loop(const state_space_block& conv,
                                              const controller_block& ctrl,
                                              int ctl_index) {
    const int n = conv.states();
    const int q = conv.controls();
    const int m = ctrl.states();
    if (q < 1)
        throw no_control_input("block has no control input to attach to");
    if (ctl_index < 0 || ctl_index >= q)
        throw bad_index("control input index out of range");

    const int col = 2 + ctl_index;

    matrix a = matrix::Zero(n + m, n + m);
    a.topLeftCorner(n, n) = conv.a();
    a.topRightCorner(n, m) = conv.b().col(col) * ctrl.c();
    a.bottomRightCorner(m, m) = ctrl.a();

    matrix b = matrix::Zero(n + m, 2 + q);
    b.topRows(n) = conv.b();
    b.col(col).head(n) = conv.b().col(col) * ctrl.d();
    b.col(col).tail(m) = ctrl.b();

    matrix c = matrix::Zero(2, n + m);
    c.leftCols(n) = conv.c();

    matrix d = conv.d();
    d.col(col) *= ctrl.d();

    auto ctl_labels = conv.control_labels();
    const std::string base = ctl_labels[static_cast<std::size_t>(ctl_index)];
    ctl_labels[static_cast<std::size_t>(ctl_index)] = "err:" + base;
    auto state_labels = conv.state_labels();
    for (int i = 0; i < m; ++i)
        state_labels.push_back(base + ".c" + std::to_string(i));

    return {std::move(a), std::move(b), std::move(c), std::move(d),
            std::move(ctl_labels), std::move(state_labels)};
}

feedback_gain make_feedback_gain(const loop_target& target,
                                 const state_space_block& open_loop,
                                 int ctl_index,
                                 const row_vector& c2_of_converter) {
    const int q = open_loop.controls();
    const int n_ol = open_loop.states();
    if (q < 1)
        throw no_control_input("open-loop block has no control input");
    if (ctl_index < 0 || ctl_index >= q)
        throw bad_index("control input index out of range");

    matrix k = matrix::Zero(2 + q, n_ol);
    if (target.which == loop_target::kind::state) {
        if (target.state_index < 0 || target.state_index >= n_ol)
            throw bad_index("state index out of range");
        k(2 + ctl_index, target.state_index) = 1.0;
    } else {
        // v_out must be extractable from the state vector alone: negligible
        // feedthrough from the closed input to v_out.
        const double feedthrough = std::abs(open_loop.d()(1, 2 + ctl_index));
        const double scale = std::max(1.0, open_loop.d().cwiseAbs().maxCoeff());
        if (feedthrough > 1e-9 * scale)
            throw feedthrough_not_negligible(
                "direct feedthrough to v_out is not negligible: " +
                std::to_string(feedthrough));
        if (c2_of_converter.size() > n_ol)
            throw dimension_mismatch("C2 row longer than the composed state count");
        k.row(2 + ctl_index).head(c2_of_converter.size()) = c2_of_converter;
    }
    return {std::move(k), ctl_index};
}

state_space_block close_loop(const state_space_block& open_loop,
                             const feedback_gain& gain) {
    const auto& k = gain.k();
    if (k.rows() != open_loop.inputs() || k.cols() != open_loop.states())
        throw dimension_mismatch("K must be (2+q) x n");
    matrix a = open_loop.a() - open_loop.b() * k;
    const int idx = gain.control_index();
    if (idx >= open_loop.controls())
        throw bad_index("gain's control index out of range for this block");
    auto labels = open_loop.control_labels();
    labels[static_cast<std::size_t>(idx)] =
        "ref:" + strip_err(labels[static_cast<std::size_t>(idx)]);
    return {std::move(a), open_loop.b(), open_loop.c(), open_loop.d(),
            std::move(labels), open_loop.state_labels()};
}

namespace {

double connection_denominator(const state_space_block& s,
                              const state_space_block& l) {
    const double den = 1.0 + l.d11() * s.d22();
    if (std::abs(den) <= 1e-12)
        throw ill_posed_connection(
            "algebraic loop: |1 + D11_L*D22_S| = " + std::to_string(std::abs(den)));
    return den;
}

std::vector<std::string> joined_labels(const state_space_block& s,
                                       const state_space_block& l,
                                       bool states) {
    auto out = prefixed(states ? s.state_labels() : s.control_labels(), "S.");
    auto right = prefixed(states ? l.state_labels() : l.control_labels(), "L.");
    out.insert(out.end(), right.begin(), right.end());
    return out;
}

}  // namespace

state_space_block series_connect(const state_space_block& s,
                                 const state_space_block& l) {
    const double den = connection_denominator(s, l);
    const int ns = s.states(), nl = l.states();
    const int qs = s.controls(), ql = l.controls();

    // Column/row pieces of the subsystem matrices.
    const vector b1s = s.b1(), b2s = s.b2();
    const vector b1l = l.b1(), b2l = l.b2();
    const matrix b3s = s.b_ctl(), b3l = l.b_ctl();
    const row_vector c1s = s.c1(), c2s = s.c2();
    const row_vector c1l = l.c1(), c2l = l.c2();
    const row_vector d13s = s.d_ctl_row(0), d23s = s.d_ctl_row(1);
    const row_vector d13l = l.d_ctl_row(0), d23l = l.d_ctl_row(1);

    matrix a(ns + nl, ns + nl);
    a.topLeftCorner(ns, ns) = s.a() - b2s * (l.d11() / den) * c2s;
    a.topRightCorner(ns, nl) = -(b2s * c1l) / den;
    a.bottomLeftCorner(nl, ns) = (b1l * c2s) / den;
    a.bottomRightCorner(nl, nl) = l.a() - b1l * (s.d22() / den) * c1l;

    matrix b(ns + nl, 2 + qs + ql);
    b.col(0).head(ns) = b1s - b2s * (l.d11() * s.d21() / den);
    b.col(0).tail(nl) = b1l * (s.d21() / den);
    b.col(1).head(ns) = -b2s * (l.d12() / den);
    b.col(1).tail(nl) = b2l - b1l * (s.d22() * l.d12() / den);
    b.block(0, 2, ns, qs) = b3s - b2s * (l.d11() / den) * d23s;
    b.block(ns, 2, nl, qs) = (b1l * d23s) / den;
    b.block(0, 2 + qs, ns, ql) = -(b2s * d13l) / den;
    b.block(ns, 2 + qs, nl, ql) = b3l - b1l * (s.d22() / den) * d13l;

    matrix c(2, ns + nl);
    c.row(0).head(ns) = c1s - s.d12() * (l.d11() / den) * c2s;
    c.row(0).tail(nl) = -(s.d12() / den) * c1l;
    c.row(1).head(ns) = (l.d21() / den) * c2s;
    c.row(1).tail(nl) = c2l - l.d21() * (s.d22() / den) * c1l;

    matrix d(2, 2 + qs + ql);
    d(0, 0) = s.d11() - s.d12() * l.d11() * s.d21() / den;
    d(0, 1) = -s.d12() * l.d12() / den;
    d(1, 0) = l.d21() * s.d21() / den;
    d(1, 1) = l.d22() - l.d21() * s.d22() * l.d12() / den;
    d.row(0).segment(2, qs) = d13s - (s.d12() * l.d11() / den) * d23s;
    d.row(1).segment(2, qs) = (l.d21() / den) * d23s;
    d.row(0).segment(2 + qs, ql) = -(s.d12() / den) * d13l;
    d.row(1).segment(2 + qs, ql) = d23l - (l.d21() * s.d22() / den) * d13l;

    return {std::move(a), std::move(b), std::move(c), std::move(d),
            joined_labels(s, l, false), joined_labels(s, l, true)};
}

state_space_block series_connect_compact(const state_space_block& s,
                                         const state_space_block& l) {
    connection_denominator(s, l);  // same well-posedness condition
    const int ns = s.states(), nl = l.states();
    const int qs = s.controls(), ql = l.controls();

    Eigen::Matrix2d h;
    h << s.d22(), -1.0,
         1.0, l.d11();
    const Eigen::Matrix2d h_inv = h.inverse();

    auto blkdiag = [](const matrix& top, const matrix& bottom) {
        matrix out = matrix::Zero(top.rows() + bottom.rows(),
                                  top.cols() + bottom.cols());
        out.topLeftCorner(top.rows(), top.cols()) = top;
        out.bottomRightCorner(bottom.rows(), bottom.cols()) = bottom;
        return out;
    };
    auto scalar = [](double v) { return matrix::Constant(1, 1, v); };

    const matrix m1 = blkdiag(s.b2(), l.b1()) * h_inv;
    const matrix m2 = blkdiag(scalar(s.d12()), scalar(l.d21())) * h_inv;
    const matrix mc = blkdiag(s.c2(), l.c1());
    matrix md(2, 2 + qs + ql);
    md.leftCols(2) = blkdiag(scalar(s.d21()), scalar(l.d12()));
    md.rightCols(qs + ql) = blkdiag(matrix(s.d_ctl_row(1)), matrix(l.d_ctl_row(0)));

    const matrix a = blkdiag(s.a(), l.a()) - m1 * mc;
    matrix b(ns + nl, 2 + qs + ql);
    b.leftCols(2) = blkdiag(s.b1(), l.b2());
    b.rightCols(qs + ql) = blkdiag(s.b_ctl(), l.b_ctl());
    b -= m1 * md;
    const matrix c = blkdiag(s.c1(), l.c2()) - m2 * mc;
    matrix d(2, 2 + qs + ql);
    d.leftCols(2) = blkdiag(scalar(s.d11()), scalar(l.d22()));
    d.rightCols(qs + ql) = blkdiag(matrix(s.d_ctl_row(0)), matrix(l.d_ctl_row(1)));
    d -= m2 * md;

    return {a, b, c, d, joined_labels(s, l, false), joined_labels(s, l, true)};
}

}  // namespace twoport
