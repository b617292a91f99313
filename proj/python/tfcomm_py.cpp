#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "tfcomm/capacity.hpp"
#include "tfcomm/channel_models.hpp"
#include "tfcomm/cli_io.hpp"
#include "tfcomm/identification.hpp"
#include "tfcomm/io.hpp"
#include "tfcomm/ofdm_modem.hpp"
#include "tfcomm/tf_core.hpp"
#include "tfcomm/wh_frames.hpp"

namespace py = pybind11;
using namespace tfcomm;

namespace {

WHGrid grid_of(std::size_t n, std::size_t a, std::size_t b) { return WHGrid(n, a, b); }

MatrixNorm norm_of(const std::string& name) {
    if (name == "frobenius") return MatrixNorm::frobenius;
    if (name == "spectral") return MatrixNorm::spectral;
    throw InvalidInput("norm must be 'frobenius' or 'spectral'");
}

Support support_of(const std::vector<std::pair<std::int64_t, std::int64_t>>& cells) {
    Support s;
    for (const auto& [m, l] : cells) s.push_back({m, l});
    return s;
}

py::dict pair_dict(const PulsePair& p) {
    py::dict d;
    d["tx"] = p.tx.samples();
    d["rx"] = p.rx.samples();
    d["interference_power"] = p.interference_power;
    d["history"] = p.history;
    return d;
}

}  // namespace

PYBIND11_MODULE(_tfcomm, m) {
    m.doc() = "Time-frequency channel analysis, Weyl-Heisenberg frames and pulse-shaping OFDM";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidDimension>(m, "InvalidDimension", base);
    py::register_exception<InvalidInput>(m, "InvalidInput", base);
    py::register_exception<NotAFrame>(m, "NotAFrame", base);
    py::register_exception<InfeasibleGrid>(m, "InfeasibleGrid", base);
    py::register_exception<NumericalError>(m, "NumericalError", base);
    py::register_exception<IdentifiabilityError>(m, "IdentifiabilityError", base);
    py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

    // tf_core
    m.def("tf_shift_op", [](std::size_t n, std::int64_t delay, std::int64_t doppler) {
        return tf_shift_op(n, delay, doppler).matrix();
    }, py::arg("n"), py::arg("delay"), py::arg("doppler"));
    m.def("spreading_function", [](const CMatrix& h, bool direct) {
        return spreading_function(DiscreteChannel(h), std::nullopt, direct ? AnalysisPath::direct : AnalysisPath::fast)
            .coeffs();
    }, py::arg("channel"), py::arg("direct") = false);
    m.def("synthesize_channel", [](const CMatrix& s) { return synthesize_channel(SpreadingFunction(s)).matrix(); },
          py::arg("spreading"));
    m.def("tf_transfer", [](const CMatrix& s) { return tf_transfer(SpreadingFunction(s)).values(); },
          py::arg("spreading"));
    m.def("inverse_tf_transfer", [](const CMatrix& l) { return inverse_tf_transfer(TransferFunction(l)).coeffs(); },
          py::arg("transfer"));
    m.def("commutation_defect", [](std::size_t n, std::int64_t delay, std::int64_t doppler, const std::string& norm) {
        const auto d = commutation_defect(n, delay, doppler, norm_of(norm));
        return std::make_pair(d.defect, d.bound);
    }, py::arg("n"), py::arg("delay"), py::arg("doppler"), py::arg("norm") = "frobenius");
    m.def("spread_metrics", [](const CMatrix& s) {
        const auto r = spread_metrics(SpreadingFunction(s));
        py::dict d;
        d["support_count"] = r.support_count;
        d["normalized_spread"] = r.normalized_spread;
        d["max_delay"] = r.max_delay;
        d["max_doppler"] = r.max_doppler;
        d["box_spread"] = r.box_spread;
        d["underspread"] = r.underspread();
        return d;
    }, py::arg("spreading"));

    // wh_frames
    m.def("frame_bounds", [](const CVector& g, std::size_t a, std::size_t b) {
        const auto r = frame_bounds(Pulse(g), grid_of(static_cast<std::size_t>(g.size()), a, b));
        py::dict d;
        d["lower"] = r.lower_bound;
        d["upper"] = r.upper_bound;
        d["is_frame"] = r.is_frame;
        d["is_tight"] = r.is_tight;
        return d;
    }, py::arg("window"), py::arg("a"), py::arg("b"));
    m.def("frame_operator", [](const CVector& g, std::size_t a, std::size_t b) {
        return frame_operator(Pulse(g), grid_of(static_cast<std::size_t>(g.size()), a, b)).matrix();
    }, py::arg("window"), py::arg("a"), py::arg("b"));
    m.def("dual_window", [](const CVector& g, std::size_t a, std::size_t b) {
        return dual_window(Pulse(g), grid_of(static_cast<std::size_t>(g.size()), a, b)).samples();
    }, py::arg("window"), py::arg("a"), py::arg("b"));
    m.def("tight_window", [](const CVector& g, std::size_t a, std::size_t b) {
        return tight_window(Pulse(g), grid_of(static_cast<std::size_t>(g.size()), a, b)).samples();
    }, py::arg("window"), py::arg("a"), py::arg("b"));
    m.def("periodized_gaussian", [](std::size_t n, double sigma, double center) {
        return periodized_gaussian(n, sigma, center).samples();
    }, py::arg("n"), py::arg("sigma"), py::arg("center") = 0.0);

    // channel_models
    m.def("preset_profile", [](const std::string& descriptor) {
        const auto [kind, params] = io::preset_from_json(nlohmann::json::parse(descriptor));
        return preset_profile(kind, params).intensities();
    }, py::arg("descriptor_json"));
    m.def("wssus_sample", [](const RMatrix& profile, std::uint64_t seed) {
        return wssus_sample(ScatteringProfile(profile), seed).coeffs();
    }, py::arg("profile"), py::arg("seed"));
    m.def("tf_correlation", [](const RMatrix& profile) { return tf_correlation(ScatteringProfile(profile)).values(); },
          py::arg("profile"));

    // ofdm_modem
    m.def("cross_ambiguity", [](const CVector& g, const CVector& gamma) { return cross_ambiguity(Pulse(g), Pulse(gamma)); },
          py::arg("g"), py::arg("gamma"));
    m.def("cp_ofdm_pulses", [](std::size_t n, std::size_t subcarriers, std::size_t cp) {
        const auto cfg = cp_ofdm_config(n, subcarriers, cp);
        return py::make_tuple(cfg.tx_pulse().samples(), cfg.rx_pulse().samples(), cfg.grid().time_step(),
                              cfg.grid().freq_step());
    }, py::arg("n"), py::arg("subcarriers"), py::arg("cp"));
    m.def("interference_power", [](const RMatrix& profile, const CVector& tx, const CVector& rx, std::size_t a,
                                   std::size_t b) {
        return interference_power(ScatteringProfile(profile),
                                  OFDMConfig(grid_of(static_cast<std::size_t>(tx.size()), a, b), Pulse(tx), Pulse(rx)));
    }, py::arg("profile"), py::arg("tx"), py::arg("rx"), py::arg("a"), py::arg("b"));
    m.def("design_pulses", [](const RMatrix& profile, std::size_t a, std::size_t b, const std::string& method) {
        const auto n = static_cast<std::size_t>(profile.rows());
        return pair_dict(design_pulses(ScatteringProfile(profile), grid_of(n, a, b), parse_design_method(method)));
    }, py::arg("profile"), py::arg("a"), py::arg("b"), py::arg("method") = "matched_gaussian_tight");

    // identification
    m.def("dirac_train", [](std::size_t n, std::size_t period) { return dirac_train(n, period); }, py::arg("n"),
          py::arg("period"));
    m.def("centered_rectangle", [](std::size_t nd, std::size_t nl) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        for (const auto& c : centered_rectangle(nd, nl)) out.emplace_back(c.delay, c.doppler);
        return out;
    }, py::arg("n_delays"), py::arg("n_dopplers"));
    m.def("simulate_observation", [](const CVector& x, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells,
                                     const CVector& coeffs) { return simulate_observation(x, support_of(cells), coeffs); },
          py::arg("sounding"), py::arg("support"), py::arg("coeffs"));
    m.def("identify", [](const CVector& y, const CVector& x, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells) {
        const auto r = identify(y, x, support_of(cells));
        py::dict d;
        d["estimate"] = r.estimate;
        d["residual"] = r.residual;
        d["condition_number"] = r.condition_number;
        d["rank"] = r.rank;
        return d;
    }, py::arg("observation"), py::arg("sounding"), py::arg("support"));

    // capacity
    m.def("capacity_low_snr", [](const RMatrix& profile, double delay_cell, double doppler_cell, double snr) {
        const auto e = capacity_low_snr({ScatteringProfile(profile), delay_cell, doppler_cell, snr});
        return py::make_tuple(e.capacity, e.penalty);
    }, py::arg("profile"), py::arg("delay_cell"), py::arg("doppler_cell"), py::arg("snr"));
    m.def("bandwidth_sweep", [](const RMatrix& profile, double delay_cell, double doppler_cell, double budget,
                                const std::vector<double>& bandwidths) {
        const auto s = bandwidth_sweep(ScatteringProfile(profile), delay_cell, doppler_cell, budget, bandwidths);
        std::vector<double> rate;
        for (const auto& p : s.points) rate.push_back(p.rate);
        return py::make_tuple(rate, s.argmax);
    }, py::arg("profile"), py::arg("delay_cell"), py::arg("doppler_cell"), py::arg("power_budget"),
          py::arg("bandwidths"));

    // experiments
    m.def("run_experiment", [](const std::string& kind, const std::string& config_json, const std::string& out_dir,
                               std::optional<std::uint64_t> seed, const std::string& config_dir) {
        cli::RunOptions o;
        o.kind = kind;
        o.config = nlohmann::json::parse(config_json);
        o.out_dir = out_dir;
        o.seed = seed;
        o.config_dir = config_dir;
        return cli::run_experiment(o).manifest.dump();
    }, py::arg("kind"), py::arg("config_json"), py::arg("out_dir"), py::arg("seed") = py::none(),
          py::arg("config_dir") = ".");
    m.attr("__version__") = TFCOMM_VERSION;
}
