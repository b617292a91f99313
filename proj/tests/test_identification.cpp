#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tfcomm/identification.hpp"

using namespace tfcomm;

namespace {

CVector plant(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return oracle::random_vector(static_cast<std::int64_t>(count), rng);
}

double rank_of(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    return static_cast<double>((s.array() > 1e-10 * s(0)).count());
}

}  // namespace

TEST_CASE("dirac train") {
    const CVector single = dirac_train(16, 16);
    CHECK(std::abs(single(0) - Complex(1.0)) < 1e-15);
    CHECK(single.tail(15).norm() == 0.0);

    const CVector flat = dirac_train(16, 1);
    CHECK(flat.norm() == doctest::Approx(1.0));
    CHECK((flat.array() - Complex(0.25)).abs().maxCoeff() < 1e-15);

    const CVector x = dirac_train(64, 8);
    CHECK(x.norm() == doctest::Approx(1.0));
    const CMatrix amb = oracle::cross_ambiguity(x, x);
    for (std::int64_t m = 0; m < 64; ++m)
        for (std::int64_t l = 0; l < 64; ++l)
            if (m % 8 != 0 || l % 8 != 0) CHECK(std::abs(amb(m, l)) < 1e-14);
    CHECK(std::abs(amb(8, 8)) == doctest::Approx(1.0));

    CVector w(8);
    for (Eigen::Index i = 0; i < 8; ++i) w(i) = oracle::cis(0.7 * static_cast<double>(i * i));
    const CVector weighted = dirac_train(64, 8, w);
    CHECK(weighted.norm() == doctest::Approx(1.0));
    CHECK(std::abs(weighted(8) - w(1) / std::sqrt(8.0)) < 1e-15);

    CHECK_THROWS_AS(dirac_train(64, 7), InvalidDimension);
    CHECK_THROWS_AS(dirac_train(64, 8, CVector::Ones(4)), InvalidInput);
    CHECK_THROWS_AS(dirac_train(64, 8, CVector::Constant(8, Complex(0.5))), InvalidInput);
}

TEST_CASE("centered rectangle") {
    const Support s = centered_rectangle(4, 3);
    REQUIRE(s.size() == 12);
    CHECK(s.front() == DelayDoppler{-2, -1});
    CHECK(s.back() == DelayDoppler{1, 1});
    CHECK(s[1] == DelayDoppler{-2, 0});
}

TEST_CASE("sounding matrix columns") {
    std::mt19937_64 rng(2);
    const CVector x = oracle::random_vector(16, rng);
    const CMatrix single = build_sounding_matrix(x, {{0, 0}});
    CHECK(oracle::max_abs(single.col(0) - x) == 0.0);

    const Support s = centered_rectangle(3, 5);
    const CMatrix xm = build_sounding_matrix(x, s);
    for (std::size_t j = 0; j < s.size(); ++j)
        CHECK(oracle::max_abs(xm.col(static_cast<Eigen::Index>(j)) - oracle::tf_shift(16, s[j].delay, s[j].doppler) * x) < 1e-14);

    Support delays;
    for (std::int64_t m = 0; m < 16; ++m) delays.push_back({m, 0});
    const CVector impulse = dirac_train(16, 16);
    CHECK(oracle::max_abs(build_sounding_matrix(impulse, delays) - CMatrix::Identity(16, 16)) == 0.0);
    const auto q = sounding_quality(impulse, delays);
    CHECK(q.condition_number == doctest::Approx(1.0));
    CHECK(q.max_offgrid_autoambiguity < 1e-14);
}

TEST_CASE("matched dirac train has orthogonal columns") {
    const CVector x = dirac_train(64, 8);
    const Support s = centered_rectangle(8, 8);
    const CMatrix xm = build_sounding_matrix(x, s);
    REQUIRE(xm.rows() == 64);
    REQUIRE(xm.cols() == 64);
    CHECK(oracle::max_abs(xm.adjoint() * xm - CMatrix::Identity(64, 64)) < 1e-12);
    CHECK(rank_of(xm) == 64);
    const auto q = sounding_quality(x, s);
    CHECK(q.condition_number == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.max_offgrid_autoambiguity < 1e-12);

    // diagonal Gram for any support with distinct delay and Doppler residues
    const Support scattered{{0, 0}, {9, 3}, {-6, 18}, {3, -23}};
    const CMatrix xs = build_sounding_matrix(x, scattered);
    const CMatrix gram = xs.adjoint() * xs;
    CHECK(oracle::max_abs(gram - CMatrix(gram.diagonal().asDiagonal())) < 1e-12);
}

TEST_CASE("random sounding is worse conditioned") {
    std::mt19937_64 rng(8);
    const Support s = centered_rectangle(4, 4);
    const auto q = sounding_quality(oracle::random_vector(64, rng), s);
    CHECK(q.condition_number > 1.0);
    CHECK(q.max_offgrid_autoambiguity > 1e-3);
}

TEST_CASE("noiseless identification recovers planted coefficients") {
    const CVector x = dirac_train(64, 8);
    for (const auto& [d, l] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 4}, {4, 8}, {8, 8}, {2, 3}}) {
        const Support s = centered_rectangle(d, l);
        const CVector coeffs = plant(s.size(), d * 10 + l);
        const CVector y = simulate_observation(x, s, coeffs);
        const auto r = identify(y, x, s);
        CHECK(r.rank == s.size());
        CHECK(oracle::max_abs(r.estimate - coeffs) <= 1e-10);
        CHECK(r.residual <= 1e-10);
        CHECK(r.condition_number >= 1.0);
        CHECK(r.residual == doctest::Approx((y - build_sounding_matrix(x, s) * r.estimate).norm()));
    }

    // cross-module: the observation equals the synthesized channel applied to x
    const Support s = centered_rectangle(4, 4);
    const CVector coeffs = plant(s.size(), 99);
    const CMatrix h = oracle::synthesis(spreading_from_support(64, s, coeffs).coeffs());
    CHECK(oracle::max_abs(h * x - simulate_observation(x, s, coeffs)) < 1e-12);
}

TEST_CASE("overspread supports are not identifiable") {
    const CVector x = dirac_train(64, 8);
    const Support s = centered_rectangle(10, 8);
    const CVector y = simulate_observation(x, s, plant(s.size(), 1));
    try {
        identify(y, x, s);
        FAIL("expected IdentifiabilityError");
    } catch (const IdentifiabilityError& e) {
        CHECK(e.unknowns() == 80);
        CHECK(e.numerical_rank() <= 64);
    }

    // rank deficiency below N: aliased delays under a period-8 train
    const Support aliased{{0, 0}, {8, 0}};
    CHECK_THROWS_AS(identify(simulate_observation(x, aliased, plant(2, 2)), x, aliased), IdentifiabilityError);
    CHECK_THROWS_AS(identify(CVector::Zero(32), x, aliased), InvalidDimension);
}

TEST_CASE("noisy identification") {
    const CVector x = dirac_train(64, 8);
    const Support s = centered_rectangle(4, 4);
    std::mt19937_64 rng(31);
    double err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const CVector coeffs = oracle::random_vector(16, rng);
        const CVector clean = simulate_observation(x, s, coeffs);
        const double noise_std = clean.norm() / std::sqrt(64.0) * 0.1;
        const CVector y = clean + noise_std / std::sqrt(2.0) * oracle::random_vector(64, rng);
        err += (identify(y, x, s).estimate - coeffs).norm() / coeffs.norm();
    }
    // reported, not bounded tightly: 20 dB SNR with unit conditioning
    MESSAGE("mean relative error at 20 dB: " << err / 50.0);
    CHECK(err / 50.0 < 0.5);
}
