#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace twoport;
using namespace testutil;

TEST_CASE("attach_controller_open_loop") {
    SUBCASE("boost plus type 1 stacks the controller states") {
        const auto conv = boost_62();
        const auto ctrl = type1_61();
        const auto ol = attach_controller_open_loop(conv, ctrl, 0);
        REQUIRE(ol.states() == 3);
        CHECK(max_abs_diff(ol.a().topLeftCorner(2, 2), conv.a()) == 0.0);
        CHECK(max_abs_diff(ol.a().topRightCorner(2, 1),
                           conv.b3() * ctrl.c()) == 0.0);
        CHECK(ol.a().bottomLeftCorner(1, 2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ol.a()(2, 2) == 0.0);
        // ctl column rerouted: B3*D_C over B_C, D column scaled by D_C = 0
        CHECK(ol.b()(0, 2) == 0.0);
        CHECK(ol.b()(1, 2) == 0.0);
        CHECK(ol.b()(2, 2) == 20000.0);
        CHECK(ol.c().rightCols(1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ol.d()(1, 2) == 0.0);
        CHECK(ol.control_labels() == std::vector<std::string>{"err:duty"});
        CHECK(ol.state_labels() ==
              std::vector<std::string>{"iL", "vC", "duty.c0"});
    }
    SUBCASE("unity pure-gain controller is a pass-through") {
        const auto conv = boost_62();
        const controller_block unity(matrix(0, 0), matrix(0, 1), matrix(1, 0),
                                     1.0);
        const auto ol = attach_controller_open_loop(conv, unity, 0);
        CHECK(max_abs_diff(ol.a(), conv.a()) == 0.0);
        CHECK(max_abs_diff(ol.b(), conv.b()) == 0.0);
        CHECK(max_abs_diff(ol.c(), conv.c()) == 0.0);
        CHECK(max_abs_diff(ol.d(), conv.d()) == 0.0);
    }
    SUBCASE("null controller separates the control channel") {
        const auto conv = boost_62();
        const controller_block null_ctrl(matrix::Zero(1, 1),
                                         matrix::Ones(1, 1), matrix::Zero(1, 1),
                                         0.0);
        const auto ol = attach_controller_open_loop(conv, null_ctrl, 0);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-1e4, 1e4);
        for (int i = 0; i < 10; ++i) {
            const cplx s(u(rng), u(rng));
            CHECK(std::abs(eval_response(ol, 2, 0, s)) == 0.0);
            CHECK(std::abs(eval_response(ol, 2, 1, s)) == 0.0);
        }
    }
    SUBCASE("other control inputs pass through untouched") {
        std::mt19937 rng(64);
        const auto conv = random_block(rng, 3, 2);
        const auto ctrl = type2_61();
        const auto ol = attach_controller_open_loop(conv, ctrl, 1);
        REQUIRE(ol.controls() == 2);
        CHECK(ol.control_labels()[0] == "c0");
        CHECK(ol.control_labels()[1] == "err:c1");
        // column for control input 0 keeps its B/D entries, zero-padded
        CHECK(max_abs_diff(ol.b().col(2).head(3), conv.b().col(2)) == 0.0);
        CHECK(ol.b().col(2).tail(2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(max_abs_diff(ol.d().col(2), conv.d().col(2)) == 0.0);
        std::uniform_real_distribution<double> u(-1e3, 1e3);
        for (int i = 0; i < 5; ++i) {
            const cplx s(u(rng), u(rng));
            for (int o = 0; o < 2; ++o)
                CHECK(rel_err(eval_response(ol, 2, o, s),
                              eval_response(conv, 2, o, s)) < 1e-12);
        }
    }
    SUBCASE("rejects blocks without control inputs") {
        CHECK_THROWS_AS(
            attach_controller_open_loop(resistor(10.0), type1_61(), 0),
            no_control_input);
        CHECK_THROWS_AS(attach_controller_open_loop(boost_62(), type1_61(), 3),
                        bad_index);
    }
}

TEST_CASE("make_feedback_gain") {
    SUBCASE("state target places a single one") {
        const auto ol = attach_controller_open_loop(boost_62(), type1_61(), 0);
        const auto gain =
            make_feedback_gain(loop_target::state(0), ol, 0, row_vector());
        matrix expected = matrix::Zero(3, 3);
        expected(2, 0) = 1.0;
        CHECK(max_abs_diff(gain.k(), expected) == 0.0);
    }
    SUBCASE("output-voltage target copies the converter C2 row") {
        const auto conv = boost_62();
        const row_vector c2 = conv.c2();
        const auto ol = attach_controller_open_loop(conv, type1_61(), 0);
        const auto gain =
            make_feedback_gain(loop_target::output_voltage(), ol, 0, c2);
        const double dp_rc = (1.0 - boost_op_62().duty) * 0.01;
        CHECK(gain.k()(2, 0) == doctest::Approx(dp_rc).epsilon(1e-14));
        CHECK(gain.k()(2, 1) == 1.0);
        CHECK(gain.k()(2, 2) == 0.0);
        CHECK(gain.k().topRows(2).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("materially nonzero feedthrough refuses") {
        // pure-gain controller keeps D23 = -r_C*I_L alive in the open loop
        const auto conv = boost_62();
        const controller_block unity(matrix(0, 0), matrix(0, 1), matrix(1, 0),
                                     1.0);
        const auto ol = attach_controller_open_loop(conv, unity, 0);
        CHECK_THROWS_AS(make_feedback_gain(loop_target::output_voltage(), ol, 0,
                                           row_vector(conv.c2())),
                        feedthrough_not_negligible);
    }
    SUBCASE("state index validation") {
        const auto ol = attach_controller_open_loop(boost_62(), type1_61(), 0);
        CHECK_THROWS_AS(
            make_feedback_gain(loop_target::state(7), ol, 0, row_vector()),
            bad_index);
    }
}

TEST_CASE("close_loop") {
    SUBCASE("all-zero gain leaves A untouched") {
        const auto ol = attach_controller_open_loop(boost_62(), type1_61(), 0);
        const feedback_gain zero(matrix::Zero(3, 3), 0);
        const auto cl = close_loop(ol, zero);
        CHECK(max_abs_diff(cl.a(), ol.a()) == 0.0);
        CHECK(cl.control_labels() == std::vector<std::string>{"ref:duty"});
    }
    SUBCASE("average current loop tracks its reference at DC") {
        const auto stage = buck_stage_61(true, true);
        REQUIRE(is_stable(stage));
        const cplx g = eval_state_response(stage, 2, 0, cplx(0.0, 0.0));
        CHECK(std::abs(g - 1.0) < 1e-9);
    }
    SUBCASE("voltage loop on the loaded boost tracks at DC") {
        auto stage = series_connect(boost_62(), resistor(20.0));
        const row_vector c2 = stage.c2();
        const auto ol = attach_controller_open_loop(stage, type3_62(), 0);
        const auto gain =
            make_feedback_gain(loop_target::output_voltage(), ol, 0, c2);
        const auto cl = close_loop(ol, gain);
        REQUIRE(is_stable(cl));
        const cplx g = eval_response(cl, 2, 1, cplx(0.0, 0.0));
        CHECK(std::abs(g - 1.0) < 1e-9);
    }
    SUBCASE("closing never touches B, C, D") {
        const auto ol = attach_controller_open_loop(boost_62(), type2_61(), 0);
        const auto gain = make_feedback_gain(loop_target::output_voltage(), ol,
                                             0, row_vector(boost_62().c2()));
        const auto cl = close_loop(ol, gain);
        CHECK(max_abs_diff(cl.b(), ol.b()) == 0.0);
        CHECK(max_abs_diff(cl.c(), ol.c()) == 0.0);
        CHECK(max_abs_diff(cl.d(), ol.d()) == 0.0);
        CHECK(max_abs_diff(cl.a(), ol.a() - ol.b() * gain.k()) == 0.0);
    }
    SUBCASE("an unterminated current loop leaves an unregulated capacitor") {
        const auto stage = buck_stage_61(false, true);
        CHECK_FALSE(is_stable(stage));  // pole at the origin
        CHECK_THROWS_AS(eval_response(stage, 2, 1, cplx(0.0, 0.0)),
                        singular_at_s);
    }
}

TEST_CASE("series_connect") {
    SUBCASE("two resistors combine admittances") {
        const auto combined = series_connect(resistor(10.0), resistor(20.0));
        CHECK(combined.states() == 0);
        CHECK(combined.d()(0, 0) == doctest::Approx(0.15).epsilon(1e-15));
        const auto compact =
            series_connect_compact(resistor(10.0), resistor(20.0));
        CHECK(max_abs_diff(combined.d(), compact.d()) < 1e-15);
    }
    SUBCASE("filter feeding the boost stacks source states first") {
        const auto sys = series_connect(lc_filter_62(), boost_62());
        CHECK(sys.states() == 4);
        CHECK(sys.controls() == 1);
        CHECK(sys.state_labels() ==
              std::vector<std::string>{"S.iL", "S.vC", "L.iL", "L.vC"});
        CHECK(sys.control_labels() == std::vector<std::string>{"L.duty"});
    }
    SUBCASE("ill-posed interconnection is refused") {
        matrix ds(2, 2);
        ds << 0.0, 0.0, 0.0, 2.0;  // D22_S = 2
        const state_space_block src(matrix(0, 0), matrix(0, 2), matrix(2, 0),
                                    ds);
        matrix dl(2, 2);
        dl << -0.5, 0.0, 0.0, 0.0;  // D11_L = -1/2
        const state_space_block load(matrix(0, 0), matrix(0, 2), matrix(2, 0),
                                     dl);
        CHECK_THROWS_AS(series_connect(src, load), ill_posed_connection);
        CHECK_THROWS_AS(series_connect_compact(src, load), ill_posed_connection);
    }
    SUBCASE("passive pair keeps exactly two input columns") {
        const auto sys = series_connect(lc_filter_62(), resistor(4.0));
        CHECK(sys.b().cols() == 2);
        CHECK(sys.d().cols() == 2);
        const auto compact = series_connect_compact(lc_filter_62(), resistor(4.0));
        CHECK(compact.b().cols() == 2);
    }
}

TEST_CASE("expanded and compact connections agree") {
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto [src, load] = random_pair(rng);
        const auto e = series_connect(src, load);
        const auto c = series_connect_compact(src, load);
        worst = std::max(worst, max_abs_diff(e.a(), c.a()));
        worst = std::max(worst, max_abs_diff(e.b(), c.b()));
        worst = std::max(worst, max_abs_diff(e.c(), c.c()));
        worst = std::max(worst, max_abs_diff(e.d(), c.d()));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("composed responses match the frequency-domain interconnection") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int trial = 0; trial < 40; ++trial) {
        const auto [src, load] = random_pair(rng);
        const auto sys = series_connect(src, load);
        for (int k = 0; k < 10; ++k) {
            const cplx s(u(rng), u(rng));
            const auto ref = interconnect_responses(terminal_response(src, s),
                                                    terminal_response(load, s));
            for (int o = 0; o < 2; ++o)
                for (int i = 0; i < 2; ++i)
                    CHECK(rel_err(eval_response(sys, i, o, s), ref(o, i)) <
                          1e-8);
        }
    }
}

TEST_CASE("state counts add up through connections") {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const auto [src, load] = random_pair(rng);
        const auto sys = series_connect(src, load);
        CHECK(sys.states() == src.states() + load.states());
        CHECK(sys.controls() == src.controls() + load.controls());
    }
    const auto ol = attach_controller_open_loop(boost_62(), type2_61(), 0);
    CHECK(ol.states() == boost_62().states() + type2_61().states());
}

TEST_CASE("series connection is associative at the response level") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    int done = 0;
    while (done < 15) {
        const auto f = random_block(rng, 2, 1);
        const auto g = random_block(rng, 1, 0);
        const auto h = random_block(rng, 2, 1);
        const auto ok = [](const state_space_block& s,
                           const state_space_block& l) {
            return std::abs(1.0 + l.d()(0, 0) * s.d()(1, 1)) > 1e-1;
        };
        if (!(ok(f, g) && ok(g, h))) continue;
        const auto fg = series_connect(f, g);
        const auto gh = series_connect(g, h);
        if (!(ok(fg, h) && ok(f, gh))) continue;
        const auto left = series_connect(fg, h);
        const auto right = series_connect(f, gh);
        ++done;
        for (int k = 0; k < 10; ++k) {
            const cplx s(u(rng), u(rng));
            for (int o = 0; o < 2; ++o)
                for (int i = 0; i < 2; ++i)
                    CHECK(rel_err(eval_response(left, i, o, s),
                                  eval_response(right, i, o, s)) < 1e-8);
        }
        auto pl = poles(left);
        auto pr = poles(right);
        auto key = [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real()
                                        : a.imag() < b.imag();
        };
        std::sort(pl.begin(), pl.end(), key);
        std::sort(pr.begin(), pr.end(), key);
        REQUIRE(pl.size() == pr.size());
        for (std::size_t i = 0; i < pl.size(); ++i)
            CHECK(std::abs(pl[i] - pr[i]) <=
                  1e-7 * std::max(1.0, std::abs(pr[i])));
    }
}

TEST_CASE("closed loop equals the classical feedback expression") {
    // reference -> v_out equals G_ol/(1 + G_ol) for output-voltage loops
    auto stage = series_connect(boost_62(), resistor(20.0));
    const row_vector c2 = stage.c2();
    const auto ol = attach_controller_open_loop(stage, type3_62(), 0);
    const auto gain = make_feedback_gain(loop_target::output_voltage(), ol, 0, c2);
    const auto cl = close_loop(ol, gain);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-3e4, 3e4);
    for (int k = 0; k < 10; ++k) {
        const cplx s(u(rng), u(rng));
        const cplx g_ol = eval_response(ol, 2, 1, s);
        const cplx g_cl = eval_response(cl, 2, 1, s);
        CHECK(rel_err(g_cl, g_ol / (1.0 + g_ol)) < 1e-8);
    }
}
