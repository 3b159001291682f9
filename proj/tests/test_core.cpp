#include <doctest.h>

#include <cmath>
#include <limits>

#include "chainkit/core.hpp"
#include "chainkit/rng.hpp"

using namespace chainkit;

TEST_CASE("level cardinality schedule") {
    CHECK(level_cardinality_exact(0) == 1);
    CHECK(level_cardinality_exact(1) == 4);
    CHECK(level_cardinality_exact(2) == 16);
    CHECK(level_cardinality_exact(3) == 256);
    CHECK(level_cardinality_exact(4) == 65536);
    CHECK(level_cardinality_exact(5) == (std::uint64_t(1) << 32));
    CHECK_THROWS_AS(level_cardinality_exact(6), UsageError);

    // N_n^2 = N_{n+1} for n >= 1, in log2 domain beyond the exact range
    for (int n = 1; n <= 20; ++n) {
        CHECK(2 * log2_level_cardinality(n) == log2_level_cardinality(n + 1));
    }
    // N_0 N_1 / N_2 = 1/4
    CHECK(level_cardinality_exact(0) * level_cardinality_exact(1) * 4 ==
          level_cardinality_exact(2));
    // N_n >= 2^{n+1} for n >= 1
    for (int n = 1; n <= 30; ++n) {
        CHECK(log2_level_cardinality(n) >= static_cast<std::uint64_t>(n + 1));
    }
    CHECK(level_cardinality_inverse(0) == 1.0);
    CHECK(level_cardinality_inverse(1) == 0.25);
    CHECK(level_cardinality_inverse(3) == doctest::Approx(1.0 / 256.0));
}

TEST_CASE("indexed vector norms") {
    IndexedVector v({3.0, -4.0});
    CHECK(v.norm1() == doctest::Approx(7.0));
    CHECK(v.norm2() == doctest::Approx(5.0));
    CHECK(v.norm_inf() == doctest::Approx(4.0));

    IndexedVector c({3.0, 0.0}, {4.0, 0.0});
    CHECK(c.norm2() == doctest::Approx(5.0));
    CHECK(c.norm_inf() == doctest::Approx(5.0));
    CHECK(c.abs_coord(0) == doctest::Approx(5.0));

    CHECK_THROWS_AS(IndexedVector({std::numeric_limits<double>::infinity()}), StructuralError);
}

TEST_CASE("point set dedup is idempotent and detects the origin") {
    std::vector<IndexedVector> pts{IndexedVector({0.0, 0.0}), IndexedVector({1.0, 0.0}),
                                   IndexedVector({1.0, 0.0}), IndexedVector({0.0, 1.0})};
    PointSet T(pts);
    CHECK(T.size() == 3);
    CHECK(T.contains_origin());

    PointSet again(T.points());
    CHECK(again.size() == T.size());

    CHECK_THROWS_AS(PointSet(std::vector<IndexedVector>{}), StructuralError);
    CHECK_THROWS_AS(PointSet({IndexedVector({1.0}), IndexedVector({1.0, 2.0})}),
                    StructuralError);
}

TEST_CASE("set family validation and builders") {
    SetFamily intervals = SetFamily::intervals(5);
    CHECK(intervals.size() == 1 + 5 + 4 + 3 + 2 + 1);
    SetFamily power = SetFamily::power_set(4);
    CHECK(power.size() == 16);
    CHECK_THROWS_AS(SetFamily(3, {1u, 1u}), StructuralError);
    CHECK_THROWS_AS(SetFamily(2, {7u}), StructuralError);
}

TEST_CASE("counter rng substreams are deterministic") {
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CounterRng c(42, 8);
    CHECK(CounterRng(42, 7).next_u64() != c.next_u64());

    CounterRng u(1, 0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("normal quantile matches known values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.0013498980316300945) == doctest::Approx(-3.0).epsilon(1e-12));
    for (double p : {0.01, 0.1, 0.3, 0.49}) {
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-13));
    }
}

TEST_CASE("normal sampling moments") {
    CounterRng rng(2024, 0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}
