// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance <path to tfcomm binary> <configs directory>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "tfcomm/capacity.hpp"
#include "tfcomm/channel_models.hpp"
#include "tfcomm/identification.hpp"
#include "tfcomm/io.hpp"
#include "tfcomm/ofdm_modem.hpp"
#include "tfcomm/tf_core.hpp"
#include "tfcomm/wh_frames.hpp"

using namespace tfcomm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScatteringProfile flat(std::size_t n, std::int64_t d0, std::int64_t d1, std::int64_t l0, std::int64_t l1) {
    PresetParams p;
    p.n_dim = n;
    p.delay_min = d0;
    p.delay_max = d1;
    p.doppler_min = l0;
    p.doppler_max = l1;
    return preset_profile(PresetKind::flat_rect, p);
}

// S[m,l] = (1/N) sum_i e^{-j2 pi l i/N} H[i, i-m], read off the trace definition.
CMatrix naive_spreading(const CMatrix& h) {
    const auto n = h.rows();
    CMatrix s(n, n);
    for (std::int64_t m = 0; m < n; ++m)
        for (std::int64_t l = 0; l < n; ++l) {
            Complex acc = 0.0;
            for (std::int64_t i = 0; i < n; ++i)
                acc += oracle::cis(-oracle::kTwoPi * static_cast<double>(oracle::mod(l * i, n)) / static_cast<double>(n)) *
                       h(i, oracle::mod(i - m, n));
            s(m, l) = acc / static_cast<double>(n);
        }
    return s;
}

Outcome c1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const std::size_t n : {4, 8, 16}) {
        const auto nn = static_cast<Eigen::Index>(n);
        CMatrix v(nn * nn, nn * nn);
        for (std::int64_t m = 0; m < nn; ++m)
            for (std::int64_t l = 0; l < nn; ++l) {
                const CMatrix op = tf_shift_op(n, m, l).matrix() / std::sqrt(static_cast<double>(n));
                v.col(m * nn + l) = Eigen::Map<const CVector>(op.data(), nn * nn);
            }
        worst = std::max(worst, oracle::max_abs(v.adjoint() * v - CMatrix::Identity(nn * nn, nn * nn)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-12 && secs < 5.0, "max |G - I| = " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome c2() {
    std::mt19937_64 rng(2002);
    double round_trip = 0.0, vs_naive = 0.0, vs_direct = 0.0;
    for (int k = 0; k < 50; ++k) {
        const CMatrix h = oracle::random_matrix(64, 64, rng);
        const SpreadingFunction s = spreading_function(DiscreteChannel(h));
        round_trip = std::max(round_trip, (synthesize_channel(s).matrix() - h).norm() / h.norm());
        vs_naive = std::max(vs_naive, oracle::max_abs(s.coeffs() - naive_spreading(h)));
        vs_direct = std::max(vs_direct, oracle::max_abs(
                                            s.coeffs() - spreading_function(DiscreteChannel(h), std::nullopt, AnalysisPath::direct).coeffs()));
    }
    return {round_trip <= 1e-12 && vs_naive <= 1e-12 && vs_direct <= 1e-12,
            "round trip " + fmt(round_trip) + ", fast vs naive " + fmt(vs_naive) + ", fast vs direct " + fmt(vs_direct)};
}

Outcome c3() {
    const std::size_t n = 64;
    int violations = 0, checked = 0;
    double tightest = 0.0;
    for (const auto norm : {MatrixNorm::frobenius, MatrixNorm::spectral})
        for (std::int64_t m = -31; m <= 32; ++m)
            for (std::int64_t l = -31; l <= 32; ++l) {
                const auto d = commutation_defect(n, m, l, norm);
                // relative to ||D^m M^l||: sqrt(N) in Frobenius, 1 in spectral norm
                const double op_norm = norm == MatrixNorm::frobenius ? std::sqrt(static_cast<double>(n)) : 1.0;
                const double bound = 2.0 * kPi * std::abs(static_cast<double>(m * l)) / static_cast<double>(n) * op_norm;
                ++checked;
                if (d.defect > bound * (1.0 + 1e-12) + 1e-12) ++violations;
                if (bound > 0.0) tightest = std::max(tightest, d.defect / bound);
            }
    return {violations == 0, std::to_string(checked) + " pairs, " + std::to_string(violations) +
                                 " violations, max defect/bound " + fmt(tightest)};
}

Outcome c4() {
    std::vector<double> errors;
    bool within = true;
    for (const std::size_t n : {32, 64, 128}) {
        const auto nn = static_cast<Eigen::Index>(n);
        std::mt19937_64 rng(404);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            CMatrix s1 = CMatrix::Zero(nn, nn), s2 = CMatrix::Zero(nn, nn);
            s1.block(0, 0, 2, 2) = oracle::random_matrix(2, 2, rng);
            s2.block(0, 0, 2, 2) = oracle::random_matrix(2, 2, rng);
            const auto p = spreading_of_product(synthesize_channel(SpreadingFunction(s1)), synthesize_channel(SpreadingFunction(s2)));
            worst = std::max(worst, p.error);
        }
        within = within && worst <= 2.0 * kPi / static_cast<double>(n);
        errors.push_back(worst);
    }
    const bool decreasing = errors[1] < errors[0] && errors[2] < errors[1];
    return {within && decreasing, "max errors " + fmt(errors[0]) + ", " + fmt(errors[1]) + ", " + fmt(errors[2]) +
                                      " vs bounds 2pi/N"};
}

Pulse random_pulse(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return Pulse(oracle::random_vector(static_cast<std::int64_t>(n), rng));
}

Outcome c5() {
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
    bool ok = true;
    double worst_dual = 0.0, worst_bio = 0.0;
    for (const auto& c : cases) {
        const auto yes = check_wexler_raz(c.g, dual_window(c.g, c.grid), c.grid);
        ok = ok && yes.dual && yes.biorthogonal && yes.duality_defect <= 1e-10 && yes.biorthogonal_defect <= 1e-10;
        worst_dual = std::max(worst_dual, yes.duality_defect);
        worst_bio = std::max(worst_bio, yes.biorthogonal_defect);
        const auto no = check_wexler_raz(c.g, random_pulse(c.grid.dim(), 99), c.grid);
        ok = ok && !no.dual && !no.biorthogonal;
    }
    return {ok, "5 cases, dual pairs: duality " + fmt(worst_dual) + ", biorthogonality " + fmt(worst_bio) +
                    "; non-dual pairs fail both"};
}

Outcome c6() {
    double worst = 0.0;
    bool ok = true;
    for (const auto& grid : {WHGrid(64, 8, 4), WHGrid(48, 4, 6), WHGrid(60, 5, 5)}) {
        ok = ok && grid.redundancy() >= 1.5;
        const Pulse t = tight_window(periodized_gaussian(grid.dim(), grid_matched_sigma(grid)), grid);
        const auto n = static_cast<Eigen::Index>(grid.dim());
        worst = std::max(worst, oracle::max_abs(frame_operator(t, grid).matrix() - CMatrix::Identity(n, n)));
    }
    return {ok && worst <= 1e-10, "max |S - I| = " + fmt(worst)};
}

Outcome c7() {
    const std::size_t n = 64, subs = 8, cp = 8;
    const auto cfg = cp_ofdm_config(n, subs, cp);
    std::mt19937_64 rng(707);
    std::uniform_int_distribution<std::size_t> len(1, cp + 1);
    double worst_ratio = 0.0, worst_gain = 0.0;
    for (int k = 0; k < 10; ++k) {
        const std::size_t length = len(rng);
        CVector first = CVector::Zero(static_cast<Eigen::Index>(n));
        first.head(static_cast<Eigen::Index>(length)) = oracle::random_vector(static_cast<std::int64_t>(length), rng);
        const DiscreteChannel h(oracle::circulant(first));
        const SymbolFrame frame = random_qpsk_frame(cfg, static_cast<std::uint64_t>(k));
        const auto r = transmit_through(frame, cfg, h);
        worst_ratio = std::max(worst_ratio, r.interference_ratio(frame));
        const CVector response = oracle::dft(first);
        for (Eigen::Index t = 0; t < r.gains.rows(); ++t)
            for (Eigen::Index f = 0; f < r.gains.cols(); ++f)
                worst_gain = std::max(worst_gain, std::abs(r.gains(t, f) - response(f * static_cast<Eigen::Index>(n / subs))));
    }
    return {worst_ratio <= 1e-20 && worst_gain <= 1e-10,
            "max ISI+ICI ratio " + fmt(worst_ratio) + ", max |H - DFT gain| " + fmt(worst_gain)};
}

Outcome c8() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = 128, draws = 500;
    PresetParams jp;
    jp.n_dim = n;
    jp.delay_decay = 1.5;
    jp.delay_extent = 6;
    jp.max_doppler = 1.0;
    PresetParams dp;
    dp.n_dim = n;
    const std::vector<std::pair<std::string, ScatteringProfile>> profiles{
        {"flat", flat(n, -2, 2, -1, 1)},
        {"jakes", preset_profile(PresetKind::exponential_jakes, jp)},
        {"drm", preset_profile(PresetKind::drm_like, dp)},
    };
    const WHGrid grid(n, 16, 16);
    bool ok = true;
    double worst_z = 0.0;
    std::uint64_t stream = 0;
    for (const auto& [name, profile] : profiles) {
        const auto g = matched_gaussian_pair(profile, grid);
        const std::vector<OFDMConfig> pairs{cp_ofdm_config(n, 8, 8), OFDMConfig(grid, g.tx, g.rx)};
        for (const auto& cfg : pairs) {
            const double formula = interference_power(profile, cfg);
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t d = 0; d < draws; ++d, ++stream) {
                const auto h = synthesize_channel(wssus_sample(profile, substream_seed(8008, 2 * stream)));
                const auto r = transmit_through(random_qpsk_frame(cfg, substream_seed(8008, 2 * stream + 1)), cfg, h);
                const double v = r.interference.cwiseAbs2().mean();
                sum += v;
                sum2 += v * v;
            }
            const double mean = sum / static_cast<double>(draws);
            const double var = (sum2 - static_cast<double>(draws) * mean * mean) / static_cast<double>(draws - 1);
            const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(draws));
            const double z = se > 0.0 ? std::abs(mean - formula) / se : (std::abs(mean - formula) < 1e-15 ? 0.0 : 1e9);
            worst_z = std::max(worst_z, z);
            ok = ok && z <= 3.0;
        }
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 120.0, "6 cases, max |MC - formula| = " + fmt(worst_z) + " SE, " + fmt(secs) + " s"};
}

Outcome c9() {
    const std::size_t n = 360, a = 20, b = 24;
    const WHGrid grid(n, a, b);
    // tau_max = a/10 = 2 samples, Doppler extent b/24 = 1 bin, centered
    const auto profile = flat(n, -2, 2, -1, 1);
    const auto cp = cp_ofdm_config(n, 15, 5);
    const auto pair = matched_gaussian_pair(profile, grid);
    const double p_gauss = interference_power(profile, OFDMConfig(grid, pair.tx, pair.rx));
    const double p_cp = interference_power(profile, cp);
    const bool ok = cp.grid() == grid && std::abs(grid.tf_product() - 4.0 / 3.0) < 1e-12 && p_gauss < p_cp;
    return {ok, "TF " + fmt(grid.tf_product()) + ", P_I Gaussian " + fmt(p_gauss) + " vs CP-OFDM " + fmt(p_cp)};
}

Outcome c10() {
    const CVector x = dirac_train(64, 8);
    std::mt19937_64 rng(1010);
    std::ostringstream detail;
    bool ok = true;
    for (const auto& [d, l] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 4}, {8, 8}}) {
        const Support s = centered_rectangle(d, l);
        const CVector coeffs = oracle::random_vector(static_cast<std::int64_t>(s.size()), rng);
        const auto r = identify(simulate_observation(x, s, coeffs), x, s);
        const double err = oracle::max_abs(r.estimate - coeffs);
        ok = ok && err <= 1e-10;
        detail << "|S|=" << s.size() << " error " << fmt(err) << ", ";
    }
    const Support big = centered_rectangle(10, 8);
    bool raised = false;
    try {
        identify(simulate_observation(x, big, oracle::random_vector(80, rng)), x, big);
    } catch (const IdentifiabilityError& e) {
        raised = true;
        detail << "|S|=80 rank " << e.numerical_rank() << " raised";
    }
    if (!raised) detail << "|S|=80 not raised";
    return {ok && raised, detail.str()};
}

Outcome c11() {
    const std::size_t n = 16, k = 2000;
    PresetParams p;
    p.n_dim = n;
    p.delay_decay = 1.0;
    p.delay_extent = 3;
    p.max_doppler = 2.0;
    const auto profile = preset_profile(PresetKind::exponential_jakes, p);
    const auto draws = wssus_ensemble(profile, 1111, k);
    RMatrix power = RMatrix::Zero(16, 16);
    for (const auto& s : draws) power += s.coeffs().cwiseAbs2();
    power /= static_cast<double>(k);
    const double tol = 5.0 / std::sqrt(static_cast<double>(k));
    double worst_rel = 0.0;
    bool ok = true;
    for (Eigen::Index i = 0; i < power.size(); ++i) {
        const double c = profile.intensities().data()[i];
        if (c > 0.0)
            worst_rel = std::max(worst_rel, std::abs(power.data()[i] / c - 1.0));
        else
            ok = ok && power.data()[i] == 0.0;
    }
    ok = ok && worst_rel <= tol;

    const auto r = tf_correlation(profile);
    double worst_z = 0.0;
    for (const auto& [dn, dk] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, 1}, {2, 3}, {-5, 4}}) {
        Complex mean = 0.0;
        std::vector<Complex> per_draw;
        for (const auto& s : draws) {
            const CMatrix l = tf_transfer(s).values();
            Complex acc = 0.0;
            for (std::int64_t t = 0; t < 16; ++t)
                for (std::int64_t f = 0; f < 16; ++f)
                    acc += l(t, f) * std::conj(l(oracle::mod(t - dn, 16), oracle::mod(f - dk, 16)));
            per_draw.push_back(acc / 256.0);
            mean += acc / 256.0;
        }
        mean /= static_cast<double>(k);
        double var = 0.0;
        for (const auto& v : per_draw) var += std::norm(v - mean);
        const double se = std::sqrt(var / static_cast<double>(k - 1) / static_cast<double>(k));
        const double z = std::abs(mean - r.at(dn, dk)) / se;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
    }
    return {ok, "max power deviation " + fmt(worst_rel) + " (tol " + fmt(tol) + "), max correlation deviation " +
                    fmt(worst_z) + " SE"};
}

Outcome c12() {
    double worst = 0.0;
    for (const double d : {0.01, 0.1, 1.0, 2.0})
        for (const double rho : {0.1, 1.0, 10.0}) {
            const auto est = capacity_low_snr(uniform_capacity_query(64, 8, d, rho));
            worst = std::max(worst, std::abs(est.penalty - d * std::log(1.0 + rho / d)));
        }
    std::vector<double> penalties;
    for (const double d : {0.01, 0.1, 1.0}) penalties.push_back(capacity_low_snr(uniform_capacity_query(64, 8, d, 1.0)).penalty);
    const bool monotone = penalties[0] < penalties[1] && penalties[1] < penalties[2];
    const auto q = uniform_capacity_query(64, 8, 0.1, 1.0);
    const auto sweep = bandwidth_sweep(q.profile, q.delay_cell, q.doppler_cell, 1.0, log_spaced(0.01, 1000.0, 101));
    const bool interior = sweep.interior_maximum();
    return {worst <= 1e-12 && monotone && interior,
            "closed form " + fmt(worst) + ", penalties " + fmt(penalties[0]) + " < " + fmt(penalties[1]) + " < " +
                fmt(penalties[2]) + ", maximum at W = " + fmt(sweep.points[sweep.argmax].bandwidth)};
}

Outcome c13(const fs::path& binary, const fs::path& configs) {
    const std::vector<std::pair<std::string, std::string>> runs{
        {"spread-analyze", "spread_analyze.json"}, {"frame-analyze", "frame_analyze.json"},
        {"pulse-design", "pulse_design.json"},     {"ofdm-sim", "ofdm_sim.json"},
        {"identify", "identify.json"},             {"capacity", "capacity.json"},
    };
    const fs::path root = fs::temp_directory_path() / "tfcomm_acceptance";
    fs::remove_all(root);
    std::size_t files = 0, mismatches = 0, failures = 0;
    for (const auto& [kind, config] : runs) {
        std::vector<fs::path> dirs{root / (kind + "_1"), root / (kind + "_2")};
        for (const auto& dir : dirs) {
            const std::string cmd = "\"" + binary.string() + "\" " + kind + " --config \"" + (configs / config).string() +
                                    "\" --out \"" + dir.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) ++failures;
        }
        if (!fs::exists(dirs[0] / "manifest.json")) continue;
        const auto manifest = nlohmann::json::parse(io::read_text(dirs[0] / "manifest.json"));
        for (const auto& o : manifest.at("outputs")) {
            const std::string name = o.at("file");
            ++files;
            if (!fs::exists(dirs[1] / name) || io::read_text(dirs[0] / name) != io::read_text(dirs[1] / name)) ++mismatches;
        }
    }
    fs::remove_all(root);
    return {failures == 0 && mismatches == 0 && files > 0,
            "6 subcommands, " + std::to_string(files) + " files, " + std::to_string(mismatches) + " differ, " +
                std::to_string(failures) + " failed runs"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <tfcomm binary> <configs dir>\n";
        return 2;
    }
    const fs::path binary = argv[1], configs = argv[2];
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"operator basis completeness", c1},
        {"spreading round trip", c2},
        {"commutation bound", c3},
        {"approximate convolution", c4},
        {"Wexler-Raz duality", c5},
        {"tight window", c6},
        {"CP-OFDM exactness", c7},
        {"interference power vs Monte Carlo", c8},
        {"pulse design dominance", c9},
        {"identifiability dichotomy", c10},
        {"WSSUS statistics", c11},
        {"capacity", c12},
        {"CLI determinism", [&] { return c13(binary, configs); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ("
                  << o.detail << ")" << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
