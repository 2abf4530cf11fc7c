#include <doctest.h>

#include <cmath>
#include <random>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/pvar.hpp"

using namespace pvarlevy;

namespace {

CadlagPath random_path(std::mt19937_64& rng, std::size_t dim, std::size_t nodes, double jump_prob) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PathBuilder b(dim);
    double t = 0.0;
    Point x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = g(rng);
    b.add(t, x);
    while (b.size() < nodes) {
        t += 0.1 + u(rng);
        Point y(dim);
        for (std::size_t k = 0; k < dim; ++k) y[k] = x[k] + g(rng);
        if (b.size() + 2 <= nodes && u(rng) < jump_prob) {
            Point z(dim);
            for (std::size_t k = 0; k < dim; ++k) z[k] = y[k] + g(rng);
            b.add_jump(t, y, z);
            x = z;
        } else {
            b.add(t, y);
            x = y;
        }
    }
    return std::move(b).build();
}

CadlagPath linear(const Point& a, double T) {
    PathBuilder b(a.dim());
    b.add(0.0, Point(a.dim())).add(T, T * a);
    return std::move(b).build();
}

}  // namespace

TEST_CASE("saw functions attain 2n|v|^p") {
    auto saw = make_saw({3, 1.0, Point{1.0, 0.0}});
    CHECK(pvar_exact(saw, 2.0).power_sum == doctest::Approx(6.0).epsilon(1e-12));
    auto s4 = make_saw({4, 2.0, Point{0.0, 2.0}});
    CHECK(pvar_exact(s4, 1.5).power_sum == doctest::Approx(8.0 * std::pow(2.0, 1.5)).epsilon(1e-12));

    auto s1 = make_saw({1, 1.0, Point{2.0}});
    CHECK(left_limit(s1, 1.0)[0] == doctest::Approx(2.0));
    auto s2 = make_saw({2, 1.0, Point{1.0}});
    CHECK(left_limit(s2, 0.5)[0] == doctest::Approx(1.0));
    CHECK(evaluate(s2, 0.5)[0] == 0.0);
    auto js = jump_list(s2);
    REQUIRE(js.size() == 2);
    CHECK(js[0].size[0] == doctest::Approx(-1.0));
}

TEST_CASE("linear paths have p-variation T|a|") {
    auto p = linear(Point{3.0, 4.0}, 2.0);
    for (double q : {1.0, 1.3, 1.99}) CHECK(pvar_exact(p, q).value == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_THROWS_AS(pvar_exact(p, 0.5), ValidationError);
}

TEST_CASE("brute force small cases") {
    PathBuilder b(2);
    b.add(0.0, Point{0.0, 0.0}).add(1.0, Point{0.6, 0.8});
    CHECK(pvar_bruteforce(std::move(b).build(), 1.3).value == doctest::Approx(1.0));
    PathBuilder c(1);
    c.add(0.0, Point{2.0}).add(1.0, Point{2.0}).add(2.0, Point{2.0});
    CHECK(pvar_bruteforce(std::move(c).build(), 1.5).value == 0.0);
}

TEST_CASE("dynamic programme matches exhaustive search exactly") {
    std::mt19937_64 rng(7);
    int cases = 0;
    for (std::size_t dim = 1; dim <= 3; ++dim)
        for (double p : {1.0, 1.3, 1.7, 1.99, 2.0, 2.5})
            for (int r = 0; r < 70; ++r) {
                auto path = random_path(rng, dim, 2 + rng() % 11, 0.3);
                auto dp = pvar_exact(path, p);
                auto bf = pvar_bruteforce(path, p);
                CHECK(dp.power_sum == bf.power_sum);
                // equal-valued partitions may differ (collinear nodes at p = 1)
                CHECK(partition_power_sum(path, dp.partition, p) == dp.power_sum);
                CHECK(partition_power_sum(path, bf.partition, p) == bf.power_sum);
                ++cases;
            }
    CHECK(cases >= 1000);
}

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
    if (!kernels::avx2_supported()) return;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double p : {1.0, 1.5, 1.8, 2.0, 3.0}) {
        for (int r = 0; r < 300; ++r) {
            std::size_t n = 1 + rng() % 300, dim = 1 + rng() % 4;
            std::vector<double> cols(n * dim), best(n), target(dim);
            for (auto& x : cols) x = u(rng) * std::pow(10.0, double(rng() % 9) - 4.0);
            for (auto& x : best) x = std::abs(u(rng));
            for (auto& x : target) x = u(rng);
            if (r % 7 == 0) best.assign(n, 0.25);  // ties
            if (r % 11 == 0) std::fill(cols.begin(), cols.end(), target[0]);  // zero distances
            kernels::RowInput in{cols.data(), n, dim, best.data(), target.data(), kernels::make_cost(p)};
            if (r % 3 == 1) {
                in.threshold = 0.8;
                in.tangent_sq = 4.0 * dim;
            }
            std::size_t lo = rng() % n, hi = lo + rng() % (n - lo + 1);
            auto a = kernels::row_max_scalar(in, lo, hi);
            auto b = kernels::row_max_avx2(in, lo, hi);
            CHECK(a.index == b.index);
            if (a.index != kernels::kNoIndex) CHECK(a.value == b.value);
        }
    }
}

TEST_CASE("polynomial power stays within a few ulp of std::pow") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-30.0, 30.0), h(0.5, 3.0);
    for (int i = 0; i < 20000; ++i) {
        double x = std::exp(u(rng)), e = h(rng);
        double ref = std::pow(x, e);
        CHECK(std::abs(kernels::general_power(x, e) - ref) <= 1e-13 * ref);
    }
    CHECK(kernels::general_power(0.0, 0.9) == 0.0);
    CHECK(kernels::general_power(1e-310, 0.9) == std::pow(1e-310, 0.9));
}

TEST_CASE("pruned and unpruned programmes agree on long paths") {
    std::mt19937_64 rng(5);
    for (double p : {1.0, 1.4, 1.8, 2.0, 2.5}) {
        for (int r = 0; r < 6; ++r) {
            auto path = random_path(rng, 1 + r % 3, 500 + rng() % 1500, 0.4);
            PVarOptions ref{kernels::Isa::Scalar, false};
            auto a = pvar_exact(path, p, ref);
            for (auto isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
                auto b = pvar_exact(path, p, {isa, true});
                CHECK(a.power_sum == b.power_sum);
                CHECK(a.partition == b.partition);
            }
        }
    }
}

TEST_CASE("p-variation properties") {
    std::mt19937_64 rng(9);
    for (int r = 0; r < 50; ++r) {
        auto x = random_path(rng, 2, 40, 0.3);
        auto y = random_path(rng, 2, 40, 0.3);
        double v1 = pvar_exact(x, 1.2).value, v2 = pvar_exact(x, 1.7).value;
        CHECK(v2 <= v1 * (1 + 1e-12));
        double sup = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) sup = std::max(sup, distance(x.point(i), x.point(0)));
        CHECK(sup <= v2 * (1 + 1e-12));
        // triangle inequality on the union grid
        auto s = combine(x, y, 1.0, 1.0);
        double lhs = pvar_exact(s, 1.5).value;
        double rhs = pvar_exact(restrict(x, s.start_time(), s.end_time()), 1.5).value +
                     pvar_exact(restrict(y, s.start_time(), s.end_time()), 1.5).value;
        CHECK(lhs <= rhs * (1 + 1e-12));
        double jumps = 0.0;
        for (const auto& j : jump_list(x)) jumps += std::pow(j.size.norm(), 1.5);
        CHECK(pvar_exact(x, 1.5).power_sum >= jumps * (1 - 1e-12));
    }
}

TEST_CASE("interior points of segments never increase the p-variation") {
    std::mt19937_64 rng(13);
    for (int r = 0; r < 30; ++r) {
        auto x = random_path(rng, 2, 12, 0.0);
        PathBuilder b(2);
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            for (int k = 0; k < 5; ++k) {
                double t = x.time(i) + (x.time(i + 1) - x.time(i)) * k / 5.0;
                b.add(t, evaluate(x, t));
            }
        b.add(x.end_time(), x.point(x.size() - 1));
        auto dense = std::move(b).build();
        CHECK(pvar_exact(dense, 1.5).value == doctest::Approx(pvar_exact(x, 1.5).value).epsilon(1e-12));
    }
}

TEST_CASE("one-variation decomposition") {
    CHECK(one_variation_decomposed(Point{1.0, 0.0}, {}, 3.0) == 3.0);
    CHECK(one_variation_decomposed(Point{0.0}, {{0.2, Point{2.0}}, {0.4, Point{-3.0}}}, 1.0) == 5.0);
    CHECK(one_variation_decomposed(Point{0.0, 1.0}, {{0.5, Point{0.0, -1.0}}}, 1.0) == 2.0);
}

TEST_CASE("polygonal approximation") {
    auto lin = linear(Point{1.0, 2.0}, 1.0);
    auto p1 = polygonal_approx(lin, 1, 1.0);
    CHECK(p1.flat_values() == lin.flat_values());
    PathBuilder b(1);
    for (int k = 0; k <= 4; ++k) b.add(k / 4.0, Point{double(k % 2)});
    auto poly = std::move(b).build();
    CHECK(polygonal_approx(poly, 4, 1.0).flat_values() == poly.flat_values());
    CHECK_THROWS_AS(polygonal_approx(make_saw({2, 1.0, Point{1.0}}), 4, 1.0), ValidationError);
}

TEST_CASE("pvar norm") {
    auto zero = linear(Point{0.0}, 10.0);
    CHECK(pvar_norm(zero, 1.5, 5) == 0.0);
    auto big = linear(Point{5.0}, 10.0);
    CHECK(pvar_norm(big, 1.5, 10) == doctest::Approx(1.0 - std::ldexp(1.0, -10)));
    auto slow = linear(Point{0.1}, 3.0);
    CHECK(pvar_norm(slow, 1.7, 3) == doctest::Approx(0.1375).epsilon(1e-12));
    CHECK_THROWS_AS(pvar_norm(slow, 1.7, 4), ValidationError);
}

TEST_CASE("step functions and the step bound") {
    std::vector<Point> v{Point{0.0}, Point{1.0}, Point{0.0}};
    CHECK(step_bound(v, 2, 1.0, 2.0) == 2.0);
    CHECK(pvar_exact(make_step(v, 1.0), 2.0).power_sum == doctest::Approx(2.0));
    std::vector<Point> same{Point{1.0}, Point{1.0}};
    CHECK(step_bound(same, 1, 1.0, 1.5) == 0.0);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int r = 0; r < 50; ++r) {
        std::vector<Point> w;
        for (int i = 0; i < 6; ++i) w.push_back(Point{g(rng), g(rng)});
        CHECK(pvar_exact(make_step(w, 1.0), 1.5).power_sum <= step_bound(w, 5, 1.0, 1.5) * (1 + 1e-12));
    }
}

TEST_CASE("regularity modulus of linear paths") {
    auto lin = linear(Point{0.6, 0.8}, 2.0);
    CHECK(regularity_modulus(lin, 1.5, 2.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
    for (int k : {2, 4, 8}) {
        double expect = std::pow(2.0, 1.5) * std::pow(double(k), -0.5);
        CHECK(regularity_modulus(lin, 1.5, 2.0 / k) == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(regularity_modulus(linear(Point{0.0}, 1.0), 1.5, 0.1) == 0.0);
    CHECK_THROWS_AS(regularity_modulus(make_saw({2, 1.0, Point{1.0}}), 1.5, 0.1), ValidationError);
}

TEST_CASE("change of time and Skorohod bounds") {
    ChangeOfTime id;
    CHECK(id(0.7) == 0.7);
    CHECK(id.log_slope_sup() == 0.0);
    ChangeOfTime lam({{1.0, 2.0}});
    CHECK(lam(0.5) == doctest::Approx(1.0));
    CHECK(lam(3.0) == doctest::Approx(4.0));
    CHECK(lam.inverse(1.0) == doctest::Approx(0.5));
    CHECK(lam.log_slope_sup() == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(ChangeOfTime({{1.0, 0.0}}), ValidationError);

    auto jump_at = [](double t) {
        PathBuilder b(1);
        b.add(0.0, Point{0.0});
        b.add_jump(t, Point{0.0}, Point{1.0});
        b.add(3.0, Point{1.0});
        return std::move(b).build();
    };
    auto f = jump_at(1.0);
    CHECK(skorohod_upper(f, f, 1.5, 1, ChangeOfTime()) == 0.0);
    auto g = jump_at(1.1);
    // lambda sends 1.1 to 1.0: the path term vanishes, the log-slope term remains
    auto m = jump_aligned_change({1.1}, {1.0});
    CHECK(m(1.1) == doctest::Approx(1.0));
    double v = skorohod_upper(f, g, 1.5, 1, m);
    CHECK(v == doctest::Approx(m.log_slope_sup()).epsilon(1e-9));
    auto best = skorohod_search(f, g, 1.5, 1);
    CHECK(best.value <= skorohod_upper(f, g, 1.5, 1, ChangeOfTime()) + 1e-15);
    CHECK(best.value <= v + 1e-12);
}
