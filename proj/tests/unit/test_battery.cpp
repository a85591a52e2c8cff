#include <cmath>

#include <doctest.h>

#include "agecharge/battery/model.hpp"
#include "agecharge/common/errors.hpp"
#include "fixtures.hpp"

using namespace agecharge;
using namespace agecharge::battery;

namespace {

struct Run {
    BatteryState s;
    StepOutput out;
};

Run run_cc(const BatteryModel& m, BatteryState s, double I, double seconds, double dt = 5.0) {
    Run r{std::move(s), {}};
    const int n = static_cast<int>(std::lround(seconds / dt));
    for (int k = 0; k < n; ++k) {
        auto [next, o] = m.step(r.s, I, dt);
        r.s = std::move(next);
        r.out = o;
    }
    return r;
}

}  // namespace

TEST_CASE("arrhenius correction") {
    CHECK(arrhenius_correct(2.0, 40000.0, 298.15, 298.15) == doctest::Approx(2.0));
    const double T = 318.15, R = 8.314462618;
    CHECK(arrhenius_correct(2.0, 40000.0, T, 298.15) ==
          doctest::Approx(2.0 * std::exp(40000.0 / R * (1.0 / 298.15 - 1.0 / T))));
    CHECK(arrhenius_correct(1.0, 0.0, 250.0, 298.15) == doctest::Approx(1.0));
}

TEST_CASE("SOC window endpoints sit on the OCV limits") {
    const auto& cfg = fixtures::default_config();
    const auto& p = cfg.battery;
    const auto& f = cfg.functions;
    const auto w = soc_window(p, f);
    auto ocv = [&](double cp, double cn) { return f.U_pos(cp / p.c_s_max_pos) - f.U_neg(cn / p.c_s_max_neg); };
    CHECK(ocv(w.c_pos_soc0, w.c_neg_soc0) == doctest::Approx(p.ocv_soc0).epsilon(1e-8));
    CHECK(ocv(w.c_pos_soc100, w.c_neg_soc100) == doctest::Approx(p.ocv_soc100).epsilon(1e-8));
    // lithium inventory fixes both endpoints
    for (auto [cp, cn] : {std::pair{w.c_pos_soc0, w.c_neg_soc0}, std::pair{w.c_pos_soc100, w.c_neg_soc100}}) {
        CHECK(p.eps_s_pos * p.L_pos * cp + p.eps_s_neg * p.L_neg * cn == doctest::Approx(p.n_li).epsilon(1e-10));
    }
    const double i1c = i_1crate(p, w);
    CHECK(i1c == doctest::Approx(p.eps_s_neg * p.L_neg * (w.c_neg_soc100 - w.c_neg_soc0) * p.F / 3600.0).epsilon(1e-12));
}

TEST_CASE("equilibrium initial state reproduces the requested OCV") {
    const auto cfg = fixtures::default_config();
    const auto m = fixtures::make_model(cfg);
    for (double ocv : {3.3, 3.6, 4.0}) {
        const auto s = m->init_equilibrium(ocv, 298.15);
        CHECK(m->ocv_bulk(s) == doctest::Approx(ocv).epsilon(1e-9));
        CHECK(std::abs(m->voltage(s, 0.0) - ocv) < 1e-3);
    }
}

TEST_CASE("zero current leaves the cell at rest") {
    const auto cfg = fixtures::no_aging(fixtures::small_config());
    const auto m = fixtures::make_model(cfg);
    const auto s0 = m->init_equilibrium(3.3, 298.15);
    const auto r = run_cc(*m, s0, 0.0, 3600.0);
    CHECK(std::abs(r.out.soc - m->soc(s0)) < 1e-9);
    CHECK(std::abs(r.out.V - 3.3) < 1e-3);
    CHECK(r.out.T_jel == doctest::Approx(298.15).epsilon(1e-9));
}

TEST_CASE("lithium is conserved with side reactions disabled") {
    const auto cfg = fixtures::no_aging(fixtures::default_config());
    const auto m = fixtures::make_model(cfg);
    const auto s0 = m->init_equilibrium(3.3, 298.15);
    const double I = m->i_1c(), t = 1800.0;
    const auto r = run_cc(*m, s0, I, t);
    const double moved = I * t / cfg.battery.F;
    CHECK(std::abs((m->anode_lithium(r.s) - m->anode_lithium(s0)) / moved - 1.0) < 1e-5);
    CHECK(std::abs((m->cathode_lithium(s0) - m->cathode_lithium(r.s)) / moved - 1.0) < 1e-5);
    const double e0 = m->electrolyte_lithium(s0);
    CHECK(std::abs(m->electrolyte_lithium(r.s) - e0) / e0 < 1e-6);
}

TEST_CASE("SOC follows the coulomb count") {
    const auto cfg = fixtures::no_aging(fixtures::small_config());
    const auto m = fixtures::make_model(cfg);
    const auto s0 = m->init_equilibrium(3.3, 298.15);
    for (double crate : {0.5, 1.0, 2.0}) {
        const double t = 900.0;
        const auto r = run_cc(*m, s0, crate * m->i_1c(), t);
        CHECK(std::abs(r.out.soc - m->soc(s0) - crate * t / 3600.0) < 1e-3);
    }
}

TEST_CASE("side reactions consume lithium and grow the film") {
    const auto cfg = fixtures::small_config();
    const auto m = fixtures::make_model(cfg);
    auto s = m->init_equilibrium(3.3, 298.15);
    const double soc0 = m->soc(s), film0 = s.delta_film;
    const double I = 2.0 * m->i_1c();
    double q_prev = s.q_SEI, lp_prev = s.q_LP;
    for (int k = 0; k < 180; ++k) {
        auto [next, o] = m->step(s, I, 5.0);
        CHECK(o.J_SEI_int <= 0.0);
        CHECK(o.J_LP_int <= 0.0);
        CHECK(next.q_SEI <= q_prev);
        CHECK(next.q_LP <= lp_prev);
        q_prev = next.q_SEI;
        lp_prev = next.q_LP;
        s = std::move(next);
    }
    CHECK(s.delta_film > film0);
    CHECK(s.q_SEI < 0.0);
    CHECK(m->soc(s) - soc0 <= 2.0 * 900.0 / 3600.0 + 1e-12);
}

TEST_CASE("charging raises the terminal voltage above the OCV") {
    const auto cfg = fixtures::small_config();
    const auto m = fixtures::make_model(cfg);
    const auto s = m->init_equilibrium(3.6, 298.15);
    CHECK(m->voltage(s, m->i_1c()) > m->ocv_bulk(s));
    CHECK(m->voltage(s, -m->i_1c()) < m->ocv_bulk(s));
}

TEST_CASE("time step convergence is first order") {
    auto cfg = fixtures::no_aging(fixtures::small_config());
    auto final_v = [&](double h) {
        cfg.sim.substep_max = h;
        const auto m = fixtures::make_model(cfg);
        return run_cc(*m, m->init_equilibrium(3.3, 298.15), m->i_1c(), 1800.0).out.V;
    };
    const double ref = final_v(1.0 / 32);
    const double e1 = std::abs(final_v(2.5) - ref), e2 = std::abs(final_v(1.25) - ref),
                 e3 = std::abs(final_v(0.625) - ref);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    CHECK(std::log2(e2 / e3) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("grid convergence is second order") {
    auto cfg = fixtures::no_aging(fixtures::default_config());
    auto final_v = [&](int n) {
        cfg.sim.n_r = n;
        cfg.sim.n_x = n;
        const auto m = fixtures::make_model(cfg);
        return run_cc(*m, m->init_equilibrium(3.3, 298.15), m->i_1c(), 1800.0).out.V;
    };
    const double ref = final_v(128);
    const double e1 = std::abs(final_v(8) - ref), e2 = std::abs(final_v(16) - ref), e3 = std::abs(final_v(32) - ref);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("invalid steps and runaway currents are reported") {
    const auto cfg = fixtures::small_config();
    const auto m = fixtures::make_model(cfg);
    const auto s = m->init_equilibrium(3.3, 298.15);
    CHECK_THROWS_AS(m->step(s, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(m->step(s, NAN, 5.0), NumericalError);
    auto run_away = [&] {
        auto st = s;
        for (int k = 0; k < 2000; ++k) st = m->step(st, 50.0 * m->i_1c(), 5.0).first;
    };
    CHECK_THROWS_AS(run_away(), NumericalError);
}

TEST_CASE("parameter validation names the offending field") {
    auto p = fixtures::default_config().battery;
    p.R_s_pos = -1.0;
    try {
        p.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "R_s_pos");
    }
}
