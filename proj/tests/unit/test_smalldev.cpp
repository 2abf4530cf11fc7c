#include <doctest.h>

#include <cmath>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/fixtures.hpp"
#include "pvarlevy/smalldev.hpp"

using namespace pvarlevy;

TEST_CASE("wilson interval") {
    auto z = wilson_interval(0, 100);
    CHECK(z.lo == 0.0);
    CHECK(z.hi > 0.0);
    CHECK(z.hi < 0.05);
    auto h = wilson_interval(50, 100);
    CHECK(h.lo < 0.5);
    CHECK(h.hi > 0.5);
    CHECK(h.lo + h.hi == doctest::Approx(1.0));
    auto f = wilson_interval(100, 100);
    CHECK(f.hi == 1.0);
}

TEST_CASE("small-deviation estimate") {
    auto m = fixtures::symmetric_stable(1, 1.5, 0.3);

    SUBCASE("independent of the worker count") {
        auto a = estimate_small_deviation(m, 1.0, 1.7, 0.8, 200, 1e-2, 42, 1);
        auto b = estimate_small_deviation(m, 1.0, 1.7, 0.8, 200, 1e-2, 42, 3);
        CHECK(a.hits == b.hits);
        CHECK(a.prob == doctest::Approx(static_cast<double>(a.hits) / 200));
        CHECK(a.ci95.lo <= a.prob);
        CHECK(a.ci95.hi >= a.prob);
        CHECK(a.eta == 1e-2);
        CHECK(a.dropped_p_moment == doctest::Approx(0.3 * std::pow(1e-2, 0.2) / 0.2));
    }

    SUBCASE("positive for a nondegenerate stable model") {
        auto e = estimate_small_deviation(m, 1.0, 1.7, 1.0, 1000, 1e-2, 5);
        CHECK(e.ci95.lo > 0.0);
    }

    SUBCASE("monotone in epsilon and p on coupled paths") {
        long long last = -1;
        for (double eps : {1.0, 1.5, 2.0}) {
            auto e = estimate_small_deviation(m, 1.0, 1.7, eps, 300, 1e-2, 9);
            CHECK(e.hits >= last);
            last = e.hits;
        }
        last = -1;
        for (double p : {1.6, 1.75, 1.9}) {
            auto e = estimate_small_deviation(m, 1.0, p, 1.5, 300, 1e-2, 9);
            CHECK(e.hits >= last);
            last = e.hits;
        }
        CHECK(last > 0);
    }

    SUBCASE("large epsilon is the full event") {
        auto e = estimate_small_deviation(m, 1.0, 1.7, 1e6, 100, 1e-2, 1);
        CHECK(e.prob == 1.0);
    }

    SUBCASE("counterexample measure has no hits") {
        auto w = fixtures::power_wedge(3.0, 2.2, 1e-2, 60, 2);
        double c = w.wedge->c_nominal();
        double eps = 0.5 * std::pow(c / 2.0, 1.0 / 2.2);
        auto e = estimate_small_deviation(w, 1.0, 2.0, eps, 20, 1e-2, 3);
        CHECK(e.hits == 0);
        CHECK(e.ci95.hi < 0.2);
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(estimate_small_deviation(m, 1.0, 1.2, 0.5, 10, 1e-2, 1), ValidationError);
        CHECK_THROWS_AS(estimate_small_deviation(m, 1.0, 1.7, 0.5, 0, 1e-2, 1), ValidationError);
    }
}

TEST_CASE("witness construction") {
    auto m = decompensate(fixtures::one_sided_stable(0.5, 0.05, 0.0));

    SUBCASE("compensator and saw for the one-sided stable model") {
        double eta = 2e-3;
        auto w = construct_witness_dim1(m, 1.0, 1.5, 0.3, eta);
        double v = 0.05 * (1.0 - std::pow(eta, 0.5)) / 0.5;
        CHECK(w.gamma() >= 1);
        CHECK(w.x[0] == doctest::Approx(eta / 2.0));
        CHECK(w.v[0] >= v);
        CHECK(std::abs(w.v[0] - w.gamma() * w.x[0]) <= w.x[0] / 2.0 + 1e-15);
        CHECK(w.saw.v[0] == -w.x[0]);
        CHECK(w.windows.size() == static_cast<std::size_t>(w.gamma()));
        CHECK(w.lambda <= 1.0 / (4.0 * w.gamma()));
        for (std::size_t k = 1; k < w.windows.size(); ++k)
            CHECK(w.windows[k].time - w.windows[k - 1].time >= 2.0 * w.lambda);
        auto c = verify_witness_skeleton(w, 1.5, 0.3);
        CHECK(c.ok);
        CHECK(c.skeleton_pvar <= c.sum + 1e-12);
        auto pr = conditioned_witness_probability(m, w);
        CHECK(std::isfinite(pr.log_value));
    }

    SUBCASE("sums shrink with eta") {
        double last = 0.3;
        for (double eta : {8e-3, 2e-3, 5e-4}) {
            auto w = construct_witness_dim1(m, 1.0, 1.5, 0.3, eta);
            auto c = verify_witness_skeleton(w, 1.5, 0.3);
            CHECK(c.sum < last);
            last = c.sum;
        }
    }

    SUBCASE("conditioned draws stay small") {
        auto w = construct_witness_dim1(m, 1.0, 1.5, 0.3, 8e-3);
        Rng rng = make_stream(3, 0);
        int ok = 0;
        for (int i = 0; i < 200; ++i) ok += pvar_exact(conditioned_draw(m, w, rng), 1.5).value < 0.3;
        CHECK(ok >= 198);
    }

    SUBCASE("atom on the compensator direction") {
        auto a = fixtures::atoms_only(Point{0.0}, {{Point{0.003}, 50.0}, {Point{0.2}, 0.5}});
        auto w = construct_witness_dim1(a, 1.0, 1.5, 0.3, 0.01);
        CHECK(w.x[0] == 0.003);
        CHECK(std::abs(w.v[0] - w.gamma() * w.x[0]) <= w.x[0] / 2.0);
    }

    SUBCASE("symmetric measure gives the trivial witness") {
        auto s = fixtures::symmetric_stable(1, 0.5, 1.0);
        auto w = construct_witness_dim1(s, 1.0, 1.5, 0.3, 1e-2);
        CHECK(w.gamma() == 0);
        CHECK(w.windows.empty());
        auto c = verify_witness_skeleton(w, 1.5, 0.3);
        CHECK(c.ok);
        CHECK(c.sum == 0.0);
        auto pr = conditioned_witness_probability(s, w);
        CHECK(pr.log_value == doctest::Approx(-retained_rate(s, 1e-2)));
    }

    SUBCASE("precondition errors") {
        auto h = fixtures::symmetric_stable(2, 1.5, 1.0);
        CHECK_THROWS_AS(construct_witness_dim1(h, 1.0, 1.5, 0.3, 1e-2), ValidationError);
        auto off = fixtures::atoms_only(Point{0.0, 0.0}, {{Point{0.5, 0.0}, 1.0}, {Point{0.001, 0.002}, 1.0}});
        CHECK_THROWS_AS(construct_witness_dim1(off, 1.0, 1.5, 0.3, 1e-2, 0.1), ValidationError);
    }
}

TEST_CASE("stable small-ball constants") {
    const double sqpi = std::sqrt(std::acos(-1.0));
    CHECK(stable_small_ball_constant({0.5, 1.0, 1.0}) == doctest::Approx(sqpi / 2.0).epsilon(1e-14));
    CHECK(stated_small_ball_limit({0.5, 1.0, 1.0}) == doctest::Approx(sqpi / 2.0).epsilon(1e-14));
    CHECK(subordinator_scale({0.5, 1.0, 1.0}) == doctest::Approx(2.0 * sqpi));
    CHECK(debruijn_limit(0.5, 2.0 * sqpi) == doctest::Approx(std::acos(-1.0)));

    // Gamma(1 - beta/gamma) grows without bound as gamma -> beta, and so does C
    double last = 0.0;
    for (double g : {1.0, 0.8, 0.6, 0.52, 0.505}) {
        double c = stable_small_ball_constant({0.5, g, 1.0});
        CHECK(c > last);
        last = c;
    }
    CHECK(last > 1e100);
    CHECK_THROWS_AS(stable_small_ball_constant({0.5, 0.5, 1.0}), ValidationError);
}

TEST_CASE("log erfc") {
    for (double x : {0.0, 0.5, 3.0, 10.0, 19.0})
        CHECK(log_erfc(x) == doctest::Approx(std::log(std::erfc(x))).epsilon(1e-13));
    CHECK(log_erfc(20.0 - 1e-12) == doctest::Approx(log_erfc(20.0)).epsilon(1e-12));
    CHECK(log_erfc(25.0) == doctest::Approx(std::log(std::erfc(25.0))).epsilon(1e-12));
    CHECK(std::isfinite(log_erfc(1e4)));
}

TEST_CASE("exact half-stable cdf follows the de Bruijn rate") {
    const double a = subordinator_scale({0.5, 1.0, 1.0});
    const double lim = debruijn_limit(0.5, a);
    double last_err = HUGE_VAL;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        double scaled = -eps * log_half_stable_cdf(a, eps);
        double err = std::abs(scaled / lim - 1.0);
        CHECK(err < last_err);
        last_err = err;
    }
    CHECK(last_err < 0.02);
}

TEST_CASE("gamma jump sums") {
    PathBuilder b(1);
    b.add(0.0, Point{0.0});
    b.add(1.0, Point{0.0});
    CHECK(gamma_jump_sum(std::move(b).build(), 2.0) == 0.0);
    PathBuilder j(1);
    j.add(0.0, Point{0.0}).add_jump(0.5, Point{0.0}, Point{1.0}).add_jump(0.7, Point{1.0}, Point{3.0});
    j.add(1.0, Point{3.0});
    CHECK(gamma_jump_sum(std::move(j).build(), 2.0) == 5.0);

    auto m = fixtures::symmetric_stable(2, 0.5, 1.0);
    for (int i = 0; i < 20; ++i) {
        Rng r = make_stream(11, i);
        auto path = sample_path(m, 1.0, 1e-3, r);
        double s = gamma_jump_sum(path, 1.0);
        CHECK(pvar_exact(path, 1.0).value == doctest::Approx(s).epsilon(1e-9));
        double s15 = gamma_jump_sum(path, 1.5);
        CHECK(std::pow(pvar_exact(path, 1.5).value, 1.5) >= s15 * (1.0 - 1e-12));
    }
}

TEST_CASE("jump sums follow the subordinator law") {
    auto m = fixtures::symmetric_stable(1, 0.5, 1.0);
    m.stable[0].big_jumps = true;
    const int n = 10000;
    std::vector<double> sums(n), direct(n);
    Rng rng = make_stream(77, 1);
    const double a = subordinator_scale({0.5, 1.0, 1.0});
    for (int i = 0; i < n; ++i) {
        Rng r = make_stream(77, 1000 + i);
        sums[i] = gamma_jump_sum(sample_path(m, 1.0, 1e-4, r), 1.0);
        direct[i] = sample_stable_subordinator(0.5, a, rng);
    }
    auto ks = ks_two_sample(sums, direct);
    CHECK(ks.p_value > 0.01);

    std::vector<double> shifted(direct);
    for (auto& x : shifted) x = 2.0 * x + 1.0;
    CHECK(ks_two_sample(direct, shifted).p_value < 1e-6);
}
