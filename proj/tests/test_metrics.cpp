#include <doctest.h>

#include <cmath>

#include "chainkit/metrics.hpp"
#include "chainkit/mc.hpp"
#include "chainkit/rng.hpp"
#include "oracles.hpp"

using namespace chainkit;

namespace {

PointSet random_points(std::size_t m, std::size_t dim, std::uint64_t seed, bool with_origin) {
    std::vector<IndexedVector> pts;
    if (with_origin) pts.push_back(IndexedVector::zero(dim));
    CounterRng rng(seed, 0);
    while (pts.size() < m) {
        std::vector<double> re(dim);
        for (auto& x : re) x = rng.next_normal();
        pts.emplace_back(std::move(re));
    }
    return PointSet(std::move(pts));
}

}  // namespace

TEST_CASE("canonical distance basics and brute-force agreement") {
    PointSet T({IndexedVector({1.0, 0.0}), IndexedVector({0.0, 1.0})});
    const DistanceMatrix d = canonical_distance(T);
    CHECK(d.at(0, 0) == 0.0);
    CHECK(d.at(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    const PointSet R = random_points(6, 4, 99, false);
    const DistanceMatrix dr = canonical_distance(R);
    for (std::size_t i = 0; i < R.size(); ++i) {
        for (std::size_t j = 0; j < R.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < R.dim(); ++k) {
                const double diff = R.point(i).re(k) - R.point(j).re(k);
                s += diff * diff;
            }
            CHECK(std::abs(dr.at(i, j) - std::sqrt(s)) <= 1e-12);
        }
    }
}

TEST_CASE("weighted distance") {
    PointSet T({IndexedVector({1.0, 1.0}), IndexedVector({0.0, 0.0})});
    SUBCASE("all-ones weight equals canonical") {
        const DistanceMatrix w = weighted_distance(T, IndexedVector({1.0, 1.0}));
        const DistanceMatrix c = canonical_distance(T);
        CHECK(w.at(0, 1) == doctest::Approx(c.at(0, 1)));
    }
    SUBCASE("zero weight kills everything") {
        const DistanceMatrix w = weighted_distance(T, IndexedVector({0.0, 0.0}));
        CHECK(w.at(0, 1) == 0.0);
    }
    SUBCASE("single surviving coordinate") {
        const DistanceMatrix w = weighted_distance(T, IndexedVector({2.0, 0.0}));
        CHECK(w.at(0, 1) == doctest::Approx(2.0));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(weighted_distance(T, IndexedVector({1.0})), StructuralError);
    }
}

TEST_CASE("gaussian quantile distance against the quadrature oracle") {
    CHECK(gaussian_quantile_distance(0.0, 3) == 0.0);

    // sigma=1, n=3: root of E(|Z|/q - 1)_+ = 1/256
    const double q3 = gaussian_quantile_distance(1.0, 3);
    const double oracle3 = oracles::quantile_by_quadrature(1.0, 3);
    CHECK(std::abs(q3 - oracle3) <= 1e-8);
    CHECK(q3 == doctest::Approx(2.2388587290812291).epsilon(1e-9));  // frozen oracle value

    for (int n : {0, 1, 2, 5, 8}) {
        const double impl = gaussian_quantile_distance(1.0, n);
        const double orac = oracles::quantile_by_quadrature(1.0, n);
        CHECK(impl == doctest::Approx(orac).epsilon(1e-8));
    }
}

TEST_CASE("gaussian quantile scaling band over n=2..8") {
    // band endpoints from the quadrature oracle, frozen as fixtures
    const double band_lo = 0.669652777406;
    const double band_hi = 1.147283197849;
    for (int n = 2; n <= 8; ++n) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            const double ratio =
                gaussian_quantile_distance(sigma, n) / (std::exp2(0.5 * n) * sigma);
            CHECK(ratio >= band_lo - 1e-6);
            CHECK(ratio <= band_hi + 1e-6);
        }
    }
    CHECK(band_hi / band_lo <= 3.0);
}

TEST_CASE("gaussian quantile monotone in n and exactly homogeneous in sigma") {
    for (int n = 0; n < 12; ++n) {
        CHECK(gaussian_quantile_distance(1.0, n + 1) > gaussian_quantile_distance(1.0, n));
    }
    for (double lam : {0.25, 3.0, 123.456}) {
        for (int n : {0, 2, 7, 11}) {
            CHECK(gaussian_quantile_distance(lam, n) ==
                  lam * gaussian_quantile_distance(1.0, n));  // exact: cached root scales
        }
    }
}

TEST_CASE("empirical quantile distance closed forms") {
    CHECK_THROWS_AS(empirical_quantile_distance({}, 1), UsageError);
    std::vector<double> zeros(10, 0.0);
    CHECK(empirical_quantile_distance(zeros, 2) == 0.0);

    // constant samples a, level n: q = a N_n / (N_n + 1)
    std::vector<double> twos(7, 2.0);
    CHECK(empirical_quantile_distance(twos, 1) == doctest::Approx(1.6).epsilon(1e-9));
    for (int n : {0, 2, 3}) {
        const double Nn = std::exp2(std::exp2(static_cast<double>(n)));
        const double expect = n == 0 ? 2.0 * 1.0 / 2.0 : 2.0 * Nn / (Nn + 1.0);
        CHECK(empirical_quantile_distance(twos, n) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("moment distance") {
    std::vector<double> ones(5, 1.5);
    CHECK(moment_distance(ones, 0) == doctest::Approx(3.0));
    CHECK(moment_distance(ones, 4) == doctest::Approx(3.0));

    // Gaussian sd sigma, n=1: 2 sigma
    CHECK(moment_distance_gaussian(0.7, 1) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(moment_distance_gaussian(1.0, 0) ==
          doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-12));

    CHECK_THROWS_AS(moment_distance(ones, 40), UsageError);
    try {
        moment_distance(ones, 40);
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("40") != std::string::npos);
    }
}

TEST_CASE("moment dominates empirical quantile on shared samples") {
    CounterRng rng(5, 0);
    std::vector<double> samples(200);
    for (auto& s : samples) s = std::abs(rng.next_normal()) * 2.3;
    for (int n = 0; n <= 6; ++n) {
        CHECK(moment_distance(samples, n) >= empirical_quantile_distance(samples, n) - 1e-12);
    }
}

TEST_CASE("scaled canonical family admissibility and monotonicity") {
    const PointSet T = random_points(8, 5, 7, true);
    const int n_max = 8;
    const double c_min = gaussian_minimal_admissible_c(n_max);
    CHECK(c_min == doctest::Approx(1.1472831978).epsilon(1e-6));  // binds at n = 8

    const DistanceFamily fam = scaled_canonical_family(T, c_min * (1 + 1e-12), n_max,
                                                       AdmissibleProof::GaussianExact);
    CHECK(audit_gaussian_admissibility(fam, canonical_distance(T)).empty());

    const DistanceFamily bad = scaled_canonical_family(T, 0.5 * c_min, n_max);
    CHECK(!audit_gaussian_admissibility(bad, canonical_distance(T)).empty());

    // exact factor-sqrt2 monotonicity
    for (int n = 0; n < n_max; ++n) {
        for (std::size_t i = 0; i < T.size(); ++i) {
            for (std::size_t j = 0; j < T.size(); ++j) {
                CHECK(fam.level(n + 1).at(i, j) >= fam.level(n).at(i, j));
            }
        }
    }
}

TEST_CASE("gaussian moment family is admissible for the gaussian model") {
    const PointSet T = random_points(6, 4, 11, true);
    const DistanceFamily fam = moment_family_gaussian(T, 8);
    CHECK(fam.proof() == AdmissibleProof::MomentMarkov);
    CHECK(audit_gaussian_admissibility(fam, canonical_distance(T)).empty());
}

TEST_CASE("empirical quantile family: metric laws over shared draws") {
    const PointSet T = random_points(7, 4, 21, true);
    const auto values = sample_process_values(GaussianCanonical{T}, 300, 77);
    const DistanceFamily fam = empirical_quantile_family(T, values, 6, 77);
    for (int n = 0; n <= 6; ++n) {
        CHECK(fam.level(n).triangle_defect() <= 1e-9);
        if (n < 6) {
            for (std::size_t i = 0; i < T.size(); ++i) {
                for (std::size_t j = 0; j < T.size(); ++j) {
                    CHECK(fam.level(n + 1).at(i, j) >= fam.level(n).at(i, j) - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("bernoulli admissible constant certificate") {
    const double c = bernoulli_minimal_admissible_c(10);
    CHECK(c == doctest::Approx(1.3058372808).epsilon(1e-6));
    // the Hoeffding display holds at c for every level
    for (int n = 0; n <= 10; ++n) {
        const double pow2n = std::exp2(static_cast<double>(n));
        const double lhs = std::log(2.0) - std::log(c * c * pow2n) - 0.5 * c * c * pow2n;
        CHECK(lhs <= -pow2n * std::log(2.0) + 1e-6);
    }
}

TEST_CASE("half-normal excess closed form vs quadrature") {
    for (double a : {0.1, 0.7, 1.5, 3.0, 6.0}) {
        const double closed =
            2.0 * 0.3989422804014327 * std::exp(-0.5 * a * a) -
            2.0 * a * 0.5 * std::erfc(a * 0.7071067811865475);
        CHECK(closed ==
              doctest::Approx(oracles::half_normal_excess_by_quadrature(a)).epsilon(1e-10));
    }
}
