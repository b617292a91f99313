#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tfcomm/wh_frames.hpp"

using namespace tfcomm;

namespace {

Pulse random_pulse(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return Pulse(oracle::random_vector(static_cast<std::int64_t>(n), rng));
}

// max over random x of |x - sum <x, gamma_{n,k}> g_{n,k}| with explicit loops
double reconstruction_error(const Pulse& g, const Pulse& gamma, std::int64_t a, std::int64_t b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto n = static_cast<std::int64_t>(g.dim());
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const CVector x = oracle::random_vector(n, rng);
        CVector y = CVector::Zero(n);
        for (std::int64_t t = 0; t < n / a; ++t)
            for (std::int64_t k = 0; k < n / b; ++k) {
                const CVector ge = oracle::wh_element(g.samples(), a, b, t, k);
                const CVector ce = oracle::wh_element(gamma.samples(), a, b, t, k);
                y += ce.dot(x) * ge;
            }
        worst = std::max(worst, oracle::max_abs(y - x) / oracle::max_abs(x));
    }
    return worst;
}

}  // namespace

TEST_CASE("grid parameters") {
    const WHGrid g(48, 4, 6);
    CHECK(g.time_slots() == 12);
    CHECK(g.freq_slots() == 8);
    CHECK(g.size() == 96);
    CHECK(g.redundancy() == doctest::Approx(2.0));
    CHECK(g.tf_product() == doctest::Approx(0.5));
    CHECK(g.frame_feasible());
    CHECK(g.adjoint() == WHGrid(48, 8, 12));
    CHECK(g.adjoint().adjoint() == g);
    CHECK_FALSE(WHGrid(48, 8, 8).frame_feasible());
    CHECK_THROWS_AS(WHGrid(48, 5, 6), InvalidDimension);
    CHECK_THROWS_AS(WHGrid(48, 4, 0), InvalidDimension);
    CHECK_THROWS_AS(WHGrid(0, 1, 1), InvalidDimension);
}

TEST_CASE("synthesis matrix columns follow the slot-major enumeration") {
    const Pulse g = random_pulse(24, 3);
    const WHGrid grid(24, 4, 3);
    const CMatrix syn = synthesis_matrix(g, grid);
    REQUIRE(syn.cols() == 48);
    for (std::int64_t t = 0; t < 6; ++t)
        for (std::int64_t k = 0; k < 8; ++k) {
            const CVector ref = oracle::wh_element(g.samples(), 4, 3, t, k);
            CHECK(oracle::max_abs(syn.col(t * 8 + k) - ref) < 1e-13);
            CHECK(oracle::max_abs(wh_element(g, grid, static_cast<std::size_t>(t), static_cast<std::size_t>(k)) - ref) < 1e-13);
        }
}

TEST_CASE("frame operator examples") {
    const Pulse unit = random_pulse(8, 1).normalized();
    const CMatrix s = frame_operator(unit, WHGrid(8, 1, 1)).matrix();
    CHECK(oracle::max_abs(s - 8.0 * CMatrix::Identity(8, 8)) < 1e-12);
    CHECK(oracle::max_abs(s - oracle::frame_operator(unit.samples(), 1, 1)) < 1e-12);

    const Pulse rect = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(6.0));
    CHECK(oracle::max_abs(frame_operator(rect, WHGrid(24, 6, 4)).matrix() - CMatrix::Identity(24, 24)) < 1e-14);

    const Pulse g = random_pulse(24, 5);
    const CMatrix sg = frame_operator(g, WHGrid(24, 4, 3)).matrix();
    CHECK(oracle::max_abs(sg - oracle::frame_operator(g.samples(), 4, 3)) < 1e-12);
    CHECK(oracle::max_abs(sg - sg.adjoint()) == 0.0);
}

TEST_CASE("no frame above critical density") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Pulse g = random_pulse(24, 50 + seed);
        const auto r = frame_bounds(g, WHGrid(24, 6, 6));
        CHECK(r.lower_bound <= 1e-10 * r.upper_bound);
        CHECK_FALSE(r.is_frame);
        CHECK(std::isinf(r.condition));
    }
    const auto gauss = frame_bounds(periodized_gaussian(48, 7.0), WHGrid(48, 8, 8));
    CHECK_FALSE(gauss.is_frame);
    CHECK_THROWS_AS(tight_window(periodized_gaussian(48, 7.0), WHGrid(48, 8, 8)), NotAFrame);
    CHECK_THROWS_AS(dual_window(periodized_gaussian(48, 7.0), WHGrid(48, 8, 8)), NotAFrame);
}

TEST_CASE("frame bounds") {
    const Pulse rect = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(6.0));
    const auto tight = frame_bounds(rect, WHGrid(24, 6, 4));
    CHECK(tight.lower_bound == doctest::Approx(1.0));
    CHECK(tight.upper_bound == doctest::Approx(1.0));
    CHECK(tight.is_tight);

    const auto unit = frame_bounds(random_pulse(8, 2).normalized(), WHGrid(8, 1, 1));
    CHECK(unit.lower_bound == doctest::Approx(8.0));
    CHECK(unit.upper_bound == doctest::Approx(8.0));

    const WHGrid grid(64, 8, 4);
    const Pulse g = periodized_gaussian(64, grid_matched_sigma(grid));
    const auto r = frame_bounds(g, grid);
    CHECK(r.is_frame);
    CHECK(r.lower_bound > 0.0);
    CHECK(r.lower_bound <= r.upper_bound);
    CHECK(r.condition == doctest::Approx(r.upper_bound / r.lower_bound));
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(oracle::frame_operator(g.samples(), 8, 4));
    CHECK(r.lower_bound == doctest::Approx(eig.eigenvalues().minCoeff()).epsilon(1e-10));
    CHECK(r.upper_bound == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-10));

    const auto d = frame_bounds(dual_window(g, grid), grid);
    CHECK(d.lower_bound == doctest::Approx(1.0 / r.upper_bound).epsilon(1e-9));
    CHECK(d.upper_bound == doctest::Approx(1.0 / r.lower_bound).epsilon(1e-9));
}

TEST_CASE("dual windows") {
    const Pulse rect = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(6.0));
    const WHGrid onb(24, 6, 4);
    CHECK(oracle::max_abs(dual_window(rect, onb).samples() - rect.samples()) < 1e-14);

    // tight frame with A = 2: gamma = g / A
    const Pulse rect2 = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(3.0));
    CHECK(frame_bounds(rect2, onb).lower_bound == doctest::Approx(2.0));
    CHECK(oracle::max_abs(dual_window(rect2, onb).samples() - rect2.samples() / 2.0) < 1e-14);

    const WHGrid grid(64, 8, 4);
    const Pulse g = periodized_gaussian(64, grid_matched_sigma(grid));
    const Pulse gamma = dual_window(g, grid);
    CHECK(reconstruction_error(g, gamma, 8, 4, 11) < 1e-10);
    CHECK(reconstruction_error(gamma, g, 8, 4, 12) < 1e-10);
}

TEST_CASE("tight windows") {
    const Pulse rect2 = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(3.0));
    const WHGrid onb(24, 6, 4);
    CHECK(oracle::max_abs(tight_window(rect2, onb).samples() - rect2.samples() / std::sqrt(2.0)) < 1e-14);

    for (const auto& grid : {WHGrid(64, 8, 4), WHGrid(48, 4, 6), WHGrid(60, 5, 6)}) {
        const Pulse g = periodized_gaussian(grid.dim(), grid_matched_sigma(grid));
        const Pulse t = tight_window(g, grid);
        const auto n = static_cast<Eigen::Index>(grid.dim());
        CHECK(oracle::max_abs(oracle::frame_operator(t.samples(), static_cast<std::int64_t>(grid.time_step()),
                                                     static_cast<std::int64_t>(grid.freq_step())) -
                              CMatrix::Identity(n, n)) < 1e-10);
        const auto r = frame_bounds(t, grid);
        CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.upper_bound == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(oracle::max_abs(tight_window(t, grid).samples() - t.samples()) < 1e-10);
    }
}

TEST_CASE("Wexler-Raz duality and biorthogonality") {
    struct Case {
        WHGrid grid;
        Pulse g;
    };
    const std::vector<Case> cases{
        {WHGrid(64, 8, 4), periodized_gaussian(64, 11.0)},
        {WHGrid(48, 4, 6), periodized_gaussian(48, 6.0)},
        {WHGrid(48, 6, 4), random_pulse(48, 7)},
        {WHGrid(36, 3, 4), periodized_gaussian(36, 4.0, 0.5)},
        {WHGrid(24, 4, 3), random_pulse(24, 8)},
    };
    for (const auto& c : cases) {
        const Pulse gamma = dual_window(c.g, c.grid);
        const auto yes = check_wexler_raz(c.g, gamma, c.grid);
        CHECK(yes.dual);
        CHECK(yes.biorthogonal);
        CHECK(yes.consistent());
        CHECK(yes.duality_defect <= 1e-10);
        CHECK(yes.biorthogonal_defect <= 1e-10);

        // explicit adjoint-grid inner products with constant ab/N
        const WHGrid adj = c.grid.adjoint();
        const auto aa = static_cast<std::int64_t>(adj.time_step()), bb = static_cast<std::int64_t>(adj.freq_step());
        const auto n = static_cast<std::int64_t>(c.grid.dim());
        const double constant = c.grid.tf_product();
        double worst = 0.0;
        for (std::int64_t t = 0; t < n / aa; ++t)
            for (std::int64_t k = 0; k < n / bb; ++k)
                for (std::int64_t t2 = 0; t2 < n / aa; ++t2)
                    for (std::int64_t k2 = 0; k2 < n / bb; ++k2) {
                        const Complex ip = oracle::wh_element(gamma.samples(), aa, bb, t2, k2)
                                               .dot(oracle::wh_element(c.g.samples(), aa, bb, t, k));
                        const double expect = (t == t2 && k == k2) ? constant : 0.0;
                        worst = std::max(worst, std::abs(ip - expect));
                    }
        CHECK(worst < 1e-10);

        const auto no = check_wexler_raz(c.g, random_pulse(c.grid.dim(), 99), c.grid);
        CHECK_FALSE(no.dual);
        CHECK_FALSE(no.biorthogonal);
        CHECK(no.consistent());
    }

    const Pulse rect = rectangular_pulse(24, 0, 6, 1.0 / std::sqrt(6.0));
    const auto onb = check_wexler_raz(rect, rect, WHGrid(24, 6, 4));
    CHECK(onb.dual);
    CHECK(onb.biorthogonal_defect < 1e-14);
}

TEST_CASE("localization metrics") {
    CVector impulse = CVector::Zero(32);
    impulse(5) = 1.0;
    const auto li = localization_metrics(Pulse(impulse));
    CHECK(li.time_spread == doctest::Approx(0.0));
    const auto flat = localization_metrics(Pulse(CVector::Constant(32, Complex(1.0))));
    CHECK(flat.freq_spread == doctest::Approx(0.0));
    CHECK(flat.time_spread == doctest::Approx(li.freq_spread));
    CHECK(li.freq_spread > 5.0);

    for (const auto& grid : {WHGrid(120, 10, 6), WHGrid(120, 6, 10), WHGrid(96, 8, 8)}) {
        const auto loc = localization_metrics(periodized_gaussian(grid.dim(), grid_matched_sigma(grid)));
        const double ratio = loc.time_spread / loc.freq_spread;
        const double target = static_cast<double>(grid.time_step()) / static_cast<double>(grid.freq_step());
        CHECK(std::abs(ratio / target - 1.0) < 0.1);
    }
    CHECK_THROWS_AS(localization_metrics(Pulse(CVector::Zero(8))), InvalidInput);
}

TEST_CASE("window constructors") {
    const Pulse g = periodized_gaussian(40, 5.0, 3.0);
    CHECK(g.norm() == doctest::Approx(1.0));
    CHECK(std::abs(g.samples()(3)) == doctest::Approx(g.samples().cwiseAbs().maxCoeff()));
    CHECK(std::abs(g.samples()(1)) == doctest::Approx(std::abs(g.samples()(5))));
    CHECK(grid_matched_sigma(WHGrid(64, 8, 4)) == doctest::Approx(std::sqrt(8.0 * 64.0 / 4.0)));
    const Pulse r = rectangular_pulse(10, 8, 4, 2.0);
    CHECK(r.samples()(8) == Complex(2.0));
    CHECK(r.samples()(1) == Complex(2.0));
    CHECK(r.samples()(2) == Complex(0.0));
    CHECK_THROWS(periodized_gaussian(10, 0.0));
}
