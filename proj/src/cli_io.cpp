#include "tfcomm/cli_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "tfcomm/capacity.hpp"
#include "tfcomm/channel_models.hpp"
#include "tfcomm/identification.hpp"
#include "tfcomm/io.hpp"
#include "tfcomm/ofdm_modem.hpp"
#include "tfcomm/tf_core.hpp"
#include "tfcomm/wh_frames.hpp"

#ifndef TFCOMM_VERSION
#define TFCOMM_VERSION "0.0.0"
#endif

namespace tfcomm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

template <typename T>
T convert(const json& v, const std::string& where) {
    auto bad = [&](const char* what) { return ConfigError(where + ": expected " + what); };
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw bad("a boolean");
        return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw bad("a string");
        return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) throw bad("a nonnegative integer");
        return v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw bad("an integer");
        return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw bad("a number");
        return v.get<T>();
    } else {
        using E = typename T::value_type;
        if (!v.is_array()) throw bad("an array");
        T out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<E>(v[i], where + "[" + std::to_string(i) + "]"));
        return out;
    }
}

// Reads one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(label() + " must be an object");
    }

    bool has(const std::string& key) const {
        used_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    template <typename T>
    T get(const std::string& key, T fallback) const {
        return has(key) ? convert<T>(j_.at(key), where(key)) : fallback;
    }

    template <typename T>
    std::optional<T> optional(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return convert<T>(j_.at(key), where(key));
    }

    template <typename T>
    T require(const std::string& key) const {
        if (!has(key)) throw ConfigError(where(key) + " is required");
        return convert<T>(j_.at(key), where(key));
    }

    Section child(const std::string& key) const {
        if (!has(key)) throw ConfigError(where(key) + " is required");
        return Section(j_.at(key), where(key));
    }

    const json& raw(const std::string& key) const {
        if (!has(key)) throw ConfigError(where(key) + " is required");
        return j_.at(key);
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!used_.count(key)) throw ConfigError("unknown key '" + where(key) + "'");
    }

private:
    std::string label() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

template <typename T>
T positive(T v, const std::string& where) {
    if (!(v > T{0})) throw ConfigError(where + " must be positive");
    return v;
}

WHGrid make_grid(std::size_t n, std::size_t a, std::size_t b) {
    try {
        return WHGrid(n, a, b);
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
}

ScatteringProfile parse_profile(const Section& parent, const std::string& key, std::size_t n) {
    json j = parent.raw(key);
    if (!j.is_object()) throw ConfigError(parent.where(key) + " must be an object");
    if (!j.contains("n_dim")) j["n_dim"] = n;
    try {
        const auto [kind, params] = io::preset_from_json(j);
        if (params.n_dim != n) throw ConfigError(parent.where(key) + ".n_dim must equal n_dim");
        return preset_profile(kind, params);
    } catch (const Error& e) {
        throw ConfigError(parent.where(key) + ": " + e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

Pulse load_pulse(const fs::path& path, std::size_t n, const std::string& where) {
    try {
        Pulse p = io::pulse_from_csv(io::read_csv(path));
        if (p.dim() != n) throw ConfigError(where + ": window length differs from n_dim");
        return p;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

// Seeds for independent random streams within one run.
enum class Stream : std::uint64_t { channel = 0, symbols = 1, noise = 2, planted = 3 };

std::uint64_t stream_seed(std::uint64_t seed, Stream s, std::uint64_t index = 0) {
    return substream_seed(seed, 4 * index + static_cast<std::uint64_t>(s));
}

// ---------------------------------------------------------------- channels

struct ChannelSpec {
    std::string type = "identity";
    std::size_t n = 0;
    SpecularPathSet paths;
    std::vector<Complex> taps;
    std::size_t tap_count = 0;
    std::optional<ScatteringProfile> profile;

    SpreadingFunction draw(std::uint64_t seed, std::size_t index) const {
        if (type == "identity") return SpreadingFunction::delta(n, 0, 0);
        if (type == "specular") return from_specular(paths, n);
        if (type == "time_invariant") return time_invariant(taps, n);
        if (type == "random_taps") {
            std::mt19937_64 rng(stream_seed(seed, Stream::channel, index));
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / static_cast<double>(tap_count)));
            std::vector<Complex> t(tap_count);
            for (auto& c : t) {
                const double re = normal(rng);
                const double im = normal(rng);
                c = Complex(re, im);
            }
            return time_invariant(t, n);
        }
        return wssus_sample(*profile, stream_seed(seed, Stream::channel, index));
    }
};

Complex parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    const auto parts = convert<std::vector<double>>(v, where);
    if (parts.size() != 2) throw ConfigError(where + ": expected [re, im]");
    return Complex(parts[0], parts[1]);
}

ChannelSpec parse_channel(const Section& parent, std::size_t n) {
    const Section s = parent.child("channel");
    ChannelSpec c;
    c.n = n;
    c.type = s.require<std::string>("type");
    if (c.type == "identity") {
    } else if (c.type == "specular") {
        const json& paths = s.raw("paths");
        if (!paths.is_array() || paths.empty()) throw ConfigError(s.where("paths") + " must be a nonempty array");
        for (std::size_t i = 0; i < paths.size(); ++i) {
            const Section p(paths[i], s.where("paths") + "[" + std::to_string(i) + "]");
            SpecularPath path;
            path.delay = static_cast<double>(p.require<std::int64_t>("delay"));
            path.doppler = static_cast<double>(p.require<std::int64_t>("doppler"));
            path.gain = p.has("gain") ? parse_complex(p.raw("gain"), p.where("gain")) : Complex(1.0);
            p.finish();
            c.paths.push_back(path);
        }
        try {
            (void)from_specular(c.paths, n);
        } catch (const Error& e) {
            throw ConfigError(s.where("paths") + ": " + e.what());
        }
    } else if (c.type == "time_invariant") {
        const json& taps = s.raw("taps");
        if (!taps.is_array() || taps.empty() || taps.size() > n)
            throw ConfigError(s.where("taps") + " must hold 1..n_dim taps");
        for (std::size_t i = 0; i < taps.size(); ++i)
            c.taps.push_back(parse_complex(taps[i], s.where("taps") + "[" + std::to_string(i) + "]"));
    } else if (c.type == "random_taps") {
        c.tap_count = positive(s.require<std::size_t>("length"), s.where("length"));
        if (c.tap_count > n) throw ConfigError(s.where("length") + " exceeds n_dim");
    } else if (c.type == "wssus") {
        c.profile = parse_profile(s, "profile", n);
    } else {
        throw ConfigError(s.where("type") + ": unknown channel type '" + c.type +
                          "' (identity, specular, time_invariant, random_taps, wssus)");
    }
    s.finish();
    return c;
}

// ---------------------------------------------------------------- output

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& text) {
        io::write_text(dir_ / name, text);
        artifacts_.push_back({name, sha256_hex(text)});
    }

    const std::vector<Artifact>& artifacts() const { return artifacts_; }

private:
    fs::path dir_;
    std::vector<Artifact> artifacts_;
};

// Two-column key/value table.
class Metrics {
public:
    Metrics& add(const std::string& key, double v) { return add(key, io::format_double(v)); }
    Metrics& add(const std::string& key, std::int64_t v) { return add(key, std::to_string(v)); }
    Metrics& add(const std::string& key, std::size_t v) { return add(key, std::to_string(v)); }
    Metrics& add(const std::string& key, bool v) { return add(key, std::string(v ? "true" : "false")); }
    Metrics& add(const std::string& key, const std::string& v) {
        writer_.row(std::vector<std::string>{key, v});
        return *this;
    }
    const std::string& str() const { return writer_.str(); }

private:
    io::CsvWriter writer_{{"metric", "value"}};
};

using Task = std::function<void(Outputs&)>;

struct Context {
    std::uint64_t seed = 0;
    fs::path config_dir;
};

double parse_floor(const Section& s) {
    const double f = s.get<double>("db_floor", -40.0);
    if (!(f < 0.0)) throw ConfigError("db_floor must be negative");
    return f;
}

// ---------------------------------------------------------------- experiments

Task spread_analyze(const Section& s, const Context& ctx) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    const ChannelSpec channel = parse_channel(s, n);
    const auto sample_rate = s.optional<double>("sample_rate");
    if (sample_rate) positive(*sample_rate, "sample_rate");
    const auto threshold = s.optional<double>("threshold");
    if (threshold && *threshold < 0.0) throw ConfigError("threshold must be nonnegative");
    const double floor_db = parse_floor(s);

    return [=, seed = ctx.seed](Outputs& out) {
        SpreadingFunction sf = channel.draw(seed, 0);
        if (threshold) sf = SpreadingFunction(sf.coeffs(), *threshold);
        const auto m = spread_metrics(sf, sample_rate);
        const auto transfer = tf_transfer(sf);

        const std::string spreading_csv = io::grid_csv(sf.coeffs(), "delay", "doppler");
        const std::string transfer_csv = io::grid_csv(transfer.values(), "time", "bin");
        out.write("spreading.csv", spreading_csv);
        out.write("transfer.csv", transfer_csv);

        Metrics metrics;
        metrics.add("n_dim", n)
            .add("energy", sf.energy())
            .add("support_count", m.support_count)
            .add("normalized_spread", m.normalized_spread)
            .add("max_delay", m.max_delay)
            .add("max_doppler", m.max_doppler)
            .add("box_spread", m.box_spread)
            .add("underspread", m.underspread())
            .add("box_underspread", m.box_underspread());
        if (m.max_delay_seconds) metrics.add("max_delay_seconds", *m.max_delay_seconds);
        if (m.max_doppler_hz) metrics.add("max_doppler_hz", *m.max_doppler_hz);
        out.write("metrics.csv", metrics.str());

        out.write("spreading_heatmap.csv", emit_plotdata(PlotKind::spreading_heatmap, spreading_csv, floor_db));
        out.write("transfer_heatmap.csv", emit_plotdata(PlotKind::transfer_heatmap, transfer_csv, floor_db));
    };
}

Pulse parse_window(const Section& parent, const WHGrid& grid, const Context& ctx) {
    const Section w = parent.child("window");
    const auto type = w.require<std::string>("type");
    const auto n = grid.dim();
    Pulse p;
    if (type == "gaussian") {
        const auto sigma = w.optional<double>("sigma");
        const double center = w.get<double>("center", 0.0);
        p = periodized_gaussian(n, sigma ? positive(*sigma, w.where("sigma")) : grid_matched_sigma(grid), center);
    } else if (type == "rectangular") {
        const auto start = w.get<std::size_t>("start", 0);
        const auto length = positive(w.require<std::size_t>("length"), w.where("length"));
        if (length > n) throw ConfigError(w.where("length") + " exceeds n_dim");
        p = rectangular_pulse(n, start % n, length, w.get<double>("amplitude", 1.0));
    } else if (type == "file") {
        p = load_pulse(resolve(ctx.config_dir, w.require<std::string>("path")), n, w.where("path"));
    } else {
        throw ConfigError(w.where("type") + ": unknown window type '" + type + "' (gaussian, rectangular, file)");
    }
    w.finish();
    if (p.norm() == 0.0) throw ConfigError(parent.where("window") + " is identically zero");
    return p;
}

Task frame_analyze(const Section& s, const Context& ctx) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    const WHGrid grid = make_grid(n, s.require<std::size_t>("a"), s.require<std::size_t>("b"));
    const Pulse g = parse_window(s, grid, ctx);
    const double tight_tol = positive(s.get<double>("tight_tolerance", 1e-10), "tight_tolerance");

    return [=](Outputs& out) {
        const auto report = frame_bounds(g, grid, tight_tol);
        const auto loc = localization_metrics(g);
        Metrics metrics;
        metrics.add("n_dim", n)
            .add("a", grid.time_step())
            .add("b", grid.freq_step())
            .add("redundancy", grid.redundancy())
            .add("lower_bound", report.lower_bound)
            .add("upper_bound", report.upper_bound)
            .add("condition", report.condition)
            .add("is_frame", report.is_frame)
            .add("is_tight", report.is_tight)
            .add("time_spread", loc.time_spread)
            .add("freq_spread", loc.freq_spread);
        out.write("window.csv", io::pulse_csv(g));
        if (report.is_frame) {
            const Pulse dual = dual_window(g, grid);
            const Pulse tight = tight_window(g, grid);
            const auto wr = check_wexler_raz(g, dual, grid);
            metrics.add("duality_defect", wr.duality_defect).add("biorthogonal_defect", wr.biorthogonal_defect);
            out.write("dual.csv", io::pulse_csv(dual));
            out.write("tight.csv", io::pulse_csv(tight));
        }
        out.write("report.csv", metrics.str());
    };
}

Task pulse_design(const Section& s, const Context&) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    const WHGrid grid = make_grid(n, s.require<std::size_t>("a"), s.require<std::size_t>("b"));
    const ScatteringProfile profile = parse_profile(s, "profile", n);
    DesignMethod method;
    try {
        method = parse_design_method(s.get<std::string>("method", "matched_gaussian_tight"));
    } catch (const Error& e) {
        throw ConfigError(std::string("method: ") + e.what());
    }
    DesignOptions opts;
    if (s.has("options")) {
        const Section o = s.child("options");
        opts.max_sweeps = o.get<std::size_t>("max_sweeps", opts.max_sweeps);
        opts.initial_step = positive(o.get<double>("initial_step", opts.initial_step), o.where("initial_step"));
        opts.step_decay = positive(o.get<double>("step_decay", opts.step_decay), o.where("step_decay"));
        opts.support_fraction = o.get<double>("support_fraction", opts.support_fraction);
        o.finish();
    }
    std::optional<OFDMConfig> baseline;
    if (s.has("baseline")) {
        const Section b = s.child("baseline");
        try {
            baseline = cp_ofdm_config(n, b.require<std::size_t>("subcarriers"), b.require<std::size_t>("cp"),
                                      b.optional<std::size_t>("rx_offset"));
        } catch (const Error& e) {
            throw ConfigError(std::string("baseline: ") + e.what());
        }
        b.finish();
    }
    const double floor_db = parse_floor(s);

    return [=](Outputs& out) {
        const PulsePair pair = design_pulses(profile, grid, method, opts);
        const OFDMConfig cfg(grid, pair.tx, pair.rx);
        out.write("tx.csv", io::pulse_csv(pair.tx));
        out.write("rx.csv", io::pulse_csv(pair.rx));

        io::CsvWriter history({"sweep", "interference_power"});
        for (std::size_t i = 0; i < pair.history.size(); ++i)
            history.row(std::vector<double>{static_cast<double>(i), pair.history[i]});
        out.write("history.csv", history.str());

        Metrics metrics;
        metrics.add("tf_product", grid.tf_product())
            .add("interference_power", pair.interference_power)
            .add("biorthogonality_defect", cfg.biorthogonality_defect());
        if (baseline) {
            metrics.add("baseline_tf_product", baseline->grid().tf_product())
                .add("baseline_interference_power", interference_power(profile, *baseline));
        }
        out.write("summary.csv", metrics.str());

        const std::string amb = io::grid_csv(cross_ambiguity(pair.rx, pair.tx), "delay", "doppler");
        out.write("ambiguity.csv", amb);
        out.write("ambiguity_heatmap.csv", emit_plotdata(PlotKind::ambiguity_heatmap, amb, floor_db));
    };
}

OFDMConfig parse_pulses(const Section& parent, std::size_t n, const ChannelSpec& channel, const Context& ctx) {
    const Section p = parent.child("pulses");
    const auto type = p.require<std::string>("type");
    auto wrap = [&](auto&& make) -> OFDMConfig {
        try {
            return make();
        } catch (const ConfigError&) {
            throw;
        } catch (const NotAFrame&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(parent.where("pulses") + ": " + e.what());
        }
    };
    std::optional<OFDMConfig> cfg;
    if (type == "cp") {
        const auto subs = p.require<std::size_t>("subcarriers");
        const auto cp = p.get<std::size_t>("cp", 0);
        const auto offset = p.optional<std::size_t>("rx_offset");
        cfg = wrap([&] { return cp_ofdm_config(n, subs, cp, offset); });
    } else if (type == "matched_gaussian") {
        const WHGrid grid = make_grid(n, p.require<std::size_t>("a"), p.require<std::size_t>("b"));
        ScatteringProfile profile = p.has("profile")   ? parse_profile(p, "profile", n)
                                    : channel.profile ? *channel.profile
                                                      : ScatteringProfile::delta(n);
        cfg = wrap([&] {
            const auto pair = matched_gaussian_pair(profile, grid);
            return OFDMConfig(grid, pair.tx, pair.rx);
        });
    } else if (type == "files") {
        const WHGrid grid = make_grid(n, p.require<std::size_t>("a"), p.require<std::size_t>("b"));
        const Pulse tx = load_pulse(resolve(ctx.config_dir, p.require<std::string>("tx")), n, p.where("tx"));
        const Pulse rx = load_pulse(resolve(ctx.config_dir, p.require<std::string>("rx")), n, p.where("rx"));
        cfg = wrap([&] { return OFDMConfig(grid, tx, rx); });
    } else {
        throw ConfigError(p.where("type") + ": unknown pulse type '" + type + "' (cp, matched_gaussian, files)");
    }
    p.finish();
    return *cfg;
}

std::size_t qpsk_errors(const CMatrix& est, const CMatrix& gains, const CMatrix& sent) {
    std::size_t errors = 0;
    for (Eigen::Index i = 0; i < est.size(); ++i) {
        const Complex g = gains.data()[i];
        if (std::abs(g) == 0.0) {
            ++errors;
            continue;
        }
        const Complex z = est.data()[i] / g;
        const Complex c = sent.data()[i];
        if ((z.real() >= 0.0) != (c.real() >= 0.0) || (z.imag() >= 0.0) != (c.imag() >= 0.0)) ++errors;
    }
    return errors;
}

Task ofdm_sim(const Section& s, const Context& ctx) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    const ChannelSpec channel = parse_channel(s, n);
    const auto trials = positive(s.get<std::size_t>("trials", 1), "trials");
    const double noise_psd = s.get<double>("noise_psd", 0.0);
    if (noise_psd < 0.0) throw ConfigError("noise_psd must be nonnegative");
    // The matched Gaussian design can fail as a module error; defer it.
    std::optional<OFDMConfig> cfg;
    std::optional<std::string> deferred;
    try {
        cfg = parse_pulses(s, n, channel, ctx);
    } catch (const NotAFrame& e) {
        deferred = e.what();
    }

    return [=, seed = ctx.seed](Outputs& out) {
        if (deferred) throw NotAFrame(*deferred);
        io::CsvWriter rows({"trial", "signal_energy", "interference_energy", "noise_energy", "interference_ratio",
                            "symbol_errors"});
        double ratio_sum = 0.0, interf_sum = 0.0;
        double agreement = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const DiscreteChannel h = synthesize_channel(channel.draw(seed, t));
            const SymbolFrame symbols = random_qpsk_frame(*cfg, stream_seed(seed, Stream::symbols, t));
            const DemodResult r = transmit_through(symbols, *cfg, h, noise_psd, stream_seed(seed, Stream::noise, t));
            const double signal = r.gains.cwiseProduct(symbols.data()).squaredNorm();
            const double interf = r.interference.squaredNorm();
            const double ratio = r.interference_ratio(symbols);
            ratio_sum += ratio;
            interf_sum += interf / static_cast<double>(symbols.data().size());
            rows.row(std::vector<std::string>{std::to_string(t), io::format_double(signal), io::format_double(interf),
                                              io::format_double(r.noise.squaredNorm()), io::format_double(ratio),
                                              std::to_string(qpsk_errors(r.estimates, r.gains, symbols.data()))});
            if (t == 0) {
                agreement = gain_transfer_agreement(h, *cfg);
                io::CsvWriter frame({"slot", "subcarrier", "sent_re", "sent_im", "estimate_re", "estimate_im", "gain_re",
                                     "gain_im", "interference_re", "interference_im"});
                for (Eigen::Index a = 0; a < r.estimates.rows(); ++a)
                    for (Eigen::Index k = 0; k < r.estimates.cols(); ++k) {
                        const Complex c = symbols.data()(a, k), e = r.estimates(a, k), g = r.gains(a, k),
                                      i = r.interference(a, k);
                        frame.row(std::vector<double>{static_cast<double>(a), static_cast<double>(k), c.real(), c.imag(),
                                                      e.real(), e.imag(), g.real(), g.imag(), i.real(), i.imag()});
                    }
                out.write("frame.csv", frame.str());
            }
        }
        out.write("trials.csv", rows.str());

        Metrics metrics;
        metrics.add("tf_product", cfg->grid().tf_product())
            .add("slots", cfg->slots())
            .add("subcarriers", cfg->subcarriers())
            .add("biorthogonality_defect", cfg->biorthogonality_defect())
            .add("trials", trials)
            .add("mean_interference_ratio", ratio_sum / static_cast<double>(trials))
            .add("mean_interference_power", interf_sum / static_cast<double>(trials))
            .add("gain_transfer_agreement", agreement);
        if (channel.profile) metrics.add("predicted_interference_power", interference_power(*channel.profile, *cfg));
        out.write("summary.csv", metrics.str());
    };
}

Task identify_task(const Section& s, const Context& ctx) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    const auto period = positive(s.require<std::size_t>("period"), "period");
    if (n % period != 0) throw ConfigError("period must divide n_dim");
    std::optional<CVector> weights;
    if (s.has("weight_phases")) {
        const auto phases = convert<std::vector<double>>(s.raw("weight_phases"), "weight_phases");
        if (phases.size() != n / period) throw ConfigError("weight_phases needs one entry per impulse");
        CVector w(static_cast<Eigen::Index>(phases.size()));
        for (std::size_t i = 0; i < phases.size(); ++i) w(static_cast<Eigen::Index>(i)) = std::polar(1.0, phases[i]);
        weights = w;
    }
    Support support;
    const Section sup = s.child("support");
    if (sup.has("cells")) {
        for (const auto& cell : convert<std::vector<std::vector<std::int64_t>>>(sup.raw("cells"), sup.where("cells"))) {
            if (cell.size() != 2) throw ConfigError(sup.where("cells") + ": each cell is [delay, doppler]");
            support.push_back({cell[0], cell[1]});
        }
    } else {
        support = centered_rectangle(positive(sup.require<std::size_t>("n_delays"), sup.where("n_delays")),
                                     positive(sup.require<std::size_t>("n_dopplers"), sup.where("n_dopplers")));
    }
    sup.finish();
    if (support.empty()) throw ConfigError("support must not be empty");
    const auto snr_db = s.optional<double>("snr_db");
    const double rank_tol = positive(s.get<double>("rank_tolerance", 1e-10), "rank_tolerance");



    return [=, seed = ctx.seed](Outputs& out) {
        CVector coeffs(static_cast<Eigen::Index>(support.size()));
        {
            std::mt19937_64 rng(stream_seed(seed, Stream::planted));
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
            for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                coeffs(i) = Complex(re, im);
            }
        }
        const CVector x = dirac_train(n, period, weights);
        CVector y = simulate_observation(x, support, coeffs);
        double noise_var = 0.0;
        if (snr_db) {
            noise_var = y.squaredNorm() / static_cast<double>(n) / std::pow(10.0, *snr_db / 10.0);
            std::mt19937_64 rng(stream_seed(seed, Stream::noise));
            std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * noise_var));
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                y(i) += Complex(re, im);
            }
        }
        const IdentificationResult r = identify(y, x, support, rank_tol);
        const SoundingQuality q = sounding_quality(x, support);

        io::CsvWriter est({"m", "l", "re", "im", "true_re", "true_im"});
        for (std::size_t i = 0; i < support.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            est.row(std::vector<double>{static_cast<double>(support[i].delay), static_cast<double>(support[i].doppler),
                                        r.estimate(idx).real(), r.estimate(idx).imag(), coeffs(idx).real(),
                                        coeffs(idx).imag()});
        }
        out.write("estimate.csv", est.str());

        Metrics metrics;
        metrics.add("n_dim", n)
            .add("support_size", support.size())
            .add("rank", r.rank)
            .add("condition_number", r.condition_number)
            .add("residual", r.residual)
            .add("noise_variance", noise_var)
            .add("max_abs_error", (r.estimate - coeffs).cwiseAbs().maxCoeff())
            .add("relative_error", (r.estimate - coeffs).norm() / coeffs.norm())
            .add("max_offgrid_autoambiguity", q.max_offgrid_autoambiguity);
        out.write("summary.csv", metrics.str());
    };
}

Task capacity_task(const Section& s, const Context&) {
    const auto n = positive(s.get<std::size_t>("n_dim", 64), "n_dim");
    CapacityQuery q;
    const json& prof = s.raw("profile");
    if (prof.is_object() && prof.contains("kind") && prof.at("kind") == "uniform") {
        const Section u(prof, "profile");
        (void)u.require<std::string>("kind");
        const auto cells = positive(u.require<std::size_t>("cells"), u.where("cells"));
        const double area = positive(u.require<double>("area"), u.where("area"));
        u.finish();
        if (cells > n) throw ConfigError("profile.cells exceeds n_dim");
        if (s.has("delay_cell") || s.has("doppler_cell"))
            throw ConfigError("delay_cell and doppler_cell are fixed by a uniform profile");
        q = uniform_capacity_query(n, cells, area, 1.0);
    } else {
        q.profile = parse_profile(s, "profile", n);
        q.delay_cell = positive(s.get<double>("delay_cell", 1.0), "delay_cell");
        q.doppler_cell = positive(s.get<double>("doppler_cell", 1.0), "doppler_cell");
    }
    q.snr = positive(s.get<double>("snr", 1.0), "snr");
    const double budget = positive(s.get<double>("power_budget", 1.0), "power_budget");
    std::vector<double> bandwidths;
    {
        const Section b = s.child("bandwidth");
        const double lo = positive(b.get<double>("min", 1e-3), b.where("min"));
        const double hi = b.get<double>("max", 1e4);
        const auto count = positive(b.get<std::size_t>("count", 200), b.where("count"));
        b.finish();
        if (hi < lo) throw ConfigError("bandwidth.max must not be below bandwidth.min");
        bandwidths = log_spaced(lo, hi, count);
    }
    const double floor_db = parse_floor(s);

    return [=](Outputs& out) {
        const CapacityEstimate point = capacity_low_snr(q);
        const BandwidthSweep sweep = bandwidth_sweep(q.profile, q.delay_cell, q.doppler_cell, budget, bandwidths);
        io::CsvWriter rows({"bandwidth", "snr", "capacity", "penalty", "rate"});
        for (const auto& p : sweep.points) rows.row(std::vector<double>{p.bandwidth, p.snr, p.capacity, p.penalty, p.rate});
        out.write("sweep.csv", rows.str());

        Metrics metrics;
        metrics.add("snr", q.snr)
            .add("awgn_capacity", point.awgn)
            .add("capacity", point.capacity)
            .add("penalty", point.penalty)
            .add("power_budget", budget)
            .add("argmax_bandwidth", sweep.points[sweep.argmax].bandwidth)
            .add("max_rate", sweep.points[sweep.argmax].rate)
            .add("interior_maximum", sweep.interior_maximum());
        out.write("summary.csv", metrics.str());
        out.write("capacity_curve.csv", emit_plotdata(PlotKind::capacity_curve, rows.str(), floor_db));
    };
}

Task plotdata_task(const Section& s, const Context& ctx) {
    PlotKind kind;
    const auto name = s.require<std::string>("kind");
    try {
        kind = parse_plot_kind(name);
    } catch (const Error& e) {
        throw ConfigError(std::string("kind: ") + e.what());
    }
    const fs::path source = resolve(ctx.config_dir, s.require<std::string>("source"));
    const double floor_db = parse_floor(s);
    const auto output = s.get<std::string>("output", name + ".csv");
    if (output.empty() || fs::path(output).has_parent_path()) throw ConfigError("output must be a plain file name");
    std::string text;
    try {
        text = io::read_text(source);
    } catch (const Error& e) {
        throw ConfigError(std::string("source: ") + e.what());
    }
    return [=](Outputs& out) { out.write(output, emit_plotdata(kind, text, floor_db)); };
}

using Parser = Task (*)(const Section&, const Context&);

const std::map<std::string, Parser>& parsers() {
    static const std::map<std::string, Parser> table{
        {"spread-analyze", spread_analyze}, {"frame-analyze", frame_analyze}, {"pulse-design", pulse_design},
        {"ofdm-sim", ofdm_sim},             {"identify", identify_task},      {"capacity", capacity_task},
        {"plotdata", plotdata_task},
    };
    return table;
}

double to_db(double ratio, double floor_db, double scale) {
    if (!(ratio > 0.0)) return floor_db;
    return std::max(floor_db, scale * std::log10(ratio));
}

std::string describe(const std::string& kind) {
    static const std::map<std::string, std::string> text{
        {"spread-analyze", "spreading function, transfer function and spread metrics of a channel"},
        {"frame-analyze", "frame bounds, dual and tight windows of a Weyl-Heisenberg set"},
        {"pulse-design", "transmit/receive pulse design for a scattering profile"},
        {"ofdm-sim", "pulse-shaping OFDM transmission through channel draws"},
        {"identify", "channel identification from a Dirac-train sounding"},
        {"capacity", "low-SNR noncoherent capacity and bandwidth sweep"},
        {"plotdata", "long-format dB plot data from a grid or sweep artifact"},
    };
    return text.at(kind);
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"spread-analyze", "frame-analyze", "pulse-design",
                                                "ofdm-sim",       "identify",      "capacity"};
    return kinds;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    if (!config.is_object()) throw ConfigError("config must be an object");
    json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        json& next = (*node)[part];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
        node = &next;
        start = dot + 1;
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

PlotKind parse_plot_kind(const std::string& name) {
    if (name == "transfer-heatmap") return PlotKind::transfer_heatmap;
    if (name == "spreading-heatmap") return PlotKind::spreading_heatmap;
    if (name == "ambiguity-heatmap") return PlotKind::ambiguity_heatmap;
    if (name == "capacity-curve") return PlotKind::capacity_curve;
    throw InvalidInput("unknown plot kind '" + name +
                       "' (transfer-heatmap, spreading-heatmap, ambiguity-heatmap, capacity-curve)");
}

std::string emit_plotdata(PlotKind kind, const std::string& source_csv, double floor_db) {
    if (!(floor_db < 0.0)) throw InvalidInput("dB floor must be negative");
    const io::CsvTable table = io::parse_csv(source_csv);
    io::CsvWriter out({"x", "y", "value_dB"});

    if (kind == PlotKind::capacity_curve) {
        const auto cx = table.column("bandwidth"), cy = table.column("rate");
        std::vector<std::pair<double, double>> pts;
        double peak = 0.0;
        for (const auto& r : table.rows) {
            const double x = std::stod(r[cx]), y = std::stod(r[cy]);
            pts.emplace_back(x, y);
            peak = std::max(peak, y);
        }
        for (const auto& [x, y] : pts) out.row(std::vector<double>{x, y, to_db(peak > 0.0 ? y / peak : 0.0, floor_db, 10.0)});
        return out.str();
    }

    const CMatrix grid = io::grid_from_csv(table);
    const double peak = grid.cwiseAbs().maxCoeff();
    const bool centered = kind != PlotKind::transfer_heatmap;
    auto axis = [&](Eigen::Index size) {
        std::vector<std::int64_t> v;
        const auto n = static_cast<std::int64_t>(size);
        if (centered)
            for (std::int64_t i = -((n - 1) / 2); i <= n / 2; ++i) v.push_back(i);
        else
            for (std::int64_t i = 0; i < n; ++i) v.push_back(i);
        return v;
    };
    for (const auto x : axis(grid.rows()))
        for (const auto y : axis(grid.cols())) {
            const double mag = std::abs(grid(static_cast<Eigen::Index>(wrap_index(x, static_cast<std::size_t>(grid.rows()))),
                                             static_cast<Eigen::Index>(wrap_index(y, static_cast<std::size_t>(grid.cols())))));
            out.row(std::vector<double>{static_cast<double>(x), static_cast<double>(y),
                                        to_db(peak > 0.0 ? mag / peak : 0.0, floor_db, 20.0)});
        }
    return out.str();
}

RunResult run_experiment(const RunOptions& options) {
    const auto it = parsers().find(options.kind);
    if (it == parsers().end()) throw ConfigError("unknown experiment '" + options.kind + "'");

    json config = options.config;
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    const Section root(config, "");
    Context ctx;
    ctx.seed = root.get<std::uint64_t>("seed", 0);
    if (options.seed) ctx.seed = *options.seed;
    ctx.config_dir = options.config_dir;

    Task task;
    try {
        task = it->second(root, ctx);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    root.finish();

    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(options.out_dir);
    Outputs outputs(options.out_dir);
    task(outputs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    config["seed"] = ctx.seed;
    RunResult result;
    result.artifacts = outputs.artifacts();
    json files = json::array();
    for (const auto& a : result.artifacts) files.push_back({{"file", a.file}, {"sha256", a.sha256}});
    result.manifest = {{"tool", "tfcomm"},       {"version", TFCOMM_VERSION}, {"subcommand", options.kind},
                       {"seed", ctx.seed},       {"config", config},          {"wall_time_seconds", wall},
                       {"outputs", files}};
    io::write_text(options.out_dir / "manifest.json", result.manifest.dump(2) + "\n");
    return result;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Time-frequency analysis and simulation of doubly dispersive channels", "tfcomm"};
    app.set_version_flag("--version", TFCOMM_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::vector<std::string> names = experiment_kinds();
    names.push_back("plotdata");
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name, describe(name));
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "random seed (overrides the config)");
        sub->add_option("--out", out_dir, std::string("output directory (default $") + kOutDirEnv + " or tfcomm_out)");
        sub->add_option("--set", overrides, "override a config value, key.path=value")->allow_extra_args(false);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitSchema;
    }
    const std::string kind = app.get_subcommands().front()->get_name();

    if (out_dir.empty()) {
        const char* env = std::getenv(kOutDirEnv);
        out_dir = env && *env ? env : "tfcomm_out";
    }

    RunOptions opts;
    opts.kind = kind;
    opts.seed = seed;
    opts.out_dir = out_dir;
    try {
        const fs::path path(config_path);
        try {
            opts.config = json::parse(io::read_text(path));
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        opts.config_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
        for (const auto& o : overrides) apply_override(opts.config, o);
        const RunResult r = run_experiment(opts);
        for (const auto& a : r.artifacts) std::cout << (fs::path(out_dir) / a.file).string() << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "tfcomm: config error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const Error& e) {
        std::cerr << "tfcomm: " << e.what() << "\n";
        return kExitModule;
    } catch (const std::exception& e) {
        std::cerr << "tfcomm: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tfcomm::cli
