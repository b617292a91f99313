#include "tfcomm/ofdm_modem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dft.hpp"

namespace tfcomm {

namespace {

CVector flatten(const CMatrix& frame) {
    CVector out(frame.size());
    Eigen::Index idx = 0;
    for (Eigen::Index n = 0; n < frame.rows(); ++n)
        for (Eigen::Index k = 0; k < frame.cols(); ++k) out(idx++) = frame(n, k);
    return out;
}

CMatrix unflatten(const CVector& v, std::size_t slots, std::size_t subcarriers) {
    CMatrix out(static_cast<Eigen::Index>(slots), static_cast<Eigen::Index>(subcarriers));
    Eigen::Index idx = 0;
    for (Eigen::Index n = 0; n < out.rows(); ++n)
        for (Eigen::Index k = 0; k < out.cols(); ++k) out(n, k) = v(idx++);
    return out;
}

void require_layout(const SymbolFrame& symbols, const OFDMConfig& cfg) {
    if (symbols.slots() != cfg.slots() || symbols.subcarriers() != cfg.subcarriers())
        throw InvalidDimension("symbol frame shape does not match the OFDM grid");
}

// Periodization of |A|^2 over the (a, b) lattice, indexed by residues.
RMatrix lattice_periodization(const RMatrix& power, std::size_t a, std::size_t b) {
    RMatrix per = RMatrix::Zero(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (Eigen::Index m = 0; m < power.rows(); ++m)
        for (Eigen::Index l = 0; l < power.cols(); ++l)
            per(m % static_cast<Eigen::Index>(a), l % static_cast<Eigen::Index>(b)) += power(m, l);
    return per;
}

double evaluate_pair(const ScatteringProfile& profile, const WHGrid& grid, const Pulse& g) {
    return interference_power(profile, OFDMConfig(grid, g, g));
}

// Orthonormal transmission pulse from a frame-domain window.
std::optional<Pulse> orthonormal_from_window(const CVector& window, const WHGrid& grid) {
    const Pulse h(window);
    if (h.norm() == 0.0) return std::nullopt;
    try {
        const Pulse t = tight_window(h, grid.adjoint());
        return t.scaled(std::sqrt(grid.tf_product()));
    } catch (const NotAFrame&) {
        return std::nullopt;
    }
}

double profile_sigma(const ScatteringProfile& profile, const WHGrid& grid) {
    const auto tau = profile.max_delay();
    const auto nu = profile.max_doppler();
    if (tau > 0 && nu > 0)
        return std::sqrt(static_cast<double>(grid.dim()) * static_cast<double>(tau) / static_cast<double>(nu));
    return grid_matched_sigma(grid);
}

}  // namespace

OFDMConfig::OFDMConfig(WHGrid grid, Pulse tx_pulse, Pulse rx_pulse)
    : grid_(grid), tx_(std::move(tx_pulse)), rx_(std::move(rx_pulse)) {
    if (tx_.dim() != grid_.dim() || rx_.dim() != grid_.dim())
        throw InvalidDimension("pulse length does not match grid dimension");
    if (grid_.time_step() * grid_.freq_step() < grid_.dim())
        throw InfeasibleGrid("transmission grid needs a * b >= N");
}

double OFDMConfig::biorthogonality_defect() const {
    const CMatrix gram = synthesis_matrix(rx_, grid_).adjoint() * synthesis_matrix(tx_, grid_);
    const auto k = gram.rows();
    return (gram - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

SymbolFrame::SymbolFrame(CMatrix data, double average_energy) : data_(std::move(data)), energy_(average_energy) {
    if (!data_.allFinite()) throw InvalidInput("symbols must be finite");
    if (!(energy_ >= 0.0)) throw InvalidInput("average energy must be nonnegative");
}

SymbolFrame random_qpsk_frame(const OFDMConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double amp = 1.0 / std::sqrt(2.0);
    CMatrix data(static_cast<Eigen::Index>(cfg.slots()), static_cast<Eigen::Index>(cfg.subcarriers()));
    for (Eigen::Index n = 0; n < data.rows(); ++n)
        for (Eigen::Index k = 0; k < data.cols(); ++k) {
            const auto bits = rng();
            data(n, k) = Complex((bits & 1U) ? amp : -amp, (bits & 2U) ? amp : -amp);
        }
    return SymbolFrame(std::move(data), 1.0);
}

double DemodResult::interference_ratio(const SymbolFrame& sent) const {
    const double useful = gains.cwiseProduct(sent.data()).squaredNorm();
    const double interf = interference.squaredNorm();
    return useful > 0.0 ? interf / useful : interf;
}

CVector modulate(const SymbolFrame& symbols, const OFDMConfig& cfg) {
    require_layout(symbols, cfg);
    return synthesis_matrix(cfg.tx_pulse(), cfg.grid()) * flatten(symbols.data());
}

SymbolFrame demodulate(const CVector& received, const OFDMConfig& cfg) {
    if (static_cast<std::size_t>(received.size()) != cfg.grid().dim())
        throw InvalidDimension("received signal length does not match grid dimension");
    const CVector proj = synthesis_matrix(cfg.rx_pulse(), cfg.grid()).adjoint() * received;
    return SymbolFrame(unflatten(proj, cfg.slots(), cfg.subcarriers()));
}

DemodResult transmit_through(const SymbolFrame& symbols, const OFDMConfig& cfg, const DiscreteChannel& channel,
                             double noise_psd, std::uint64_t seed) {
    require_layout(symbols, cfg);
    const auto n = cfg.grid().dim();
    if (channel.dim() != n) throw InvalidDimension("channel dimension does not match grid dimension");
    if (!(noise_psd >= 0.0)) throw InvalidInput("noise variance must be nonnegative");

    const CMatrix tx = synthesis_matrix(cfg.tx_pulse(), cfg.grid());
    const CMatrix rx = synthesis_matrix(cfg.rx_pulse(), cfg.grid());
    const CMatrix htx = channel.matrix() * tx;
    const CMatrix coupling = rx.adjoint() * htx;  // coupling(j, i) = <H g_i, gamma_j>
    const CVector c = flatten(symbols.data());

    CVector w = CVector::Zero(static_cast<Eigen::Index>(n));
    if (noise_psd > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * noise_psd));
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            w(i) = Complex(re, im);
        }
    }

    const CVector gains = coupling.diagonal();
    CMatrix off = coupling;
    off.diagonal().setZero();
    const CVector interference = off * c;
    const CVector noise = rx.adjoint() * w;
    const CVector direct = rx.adjoint() * (htx * c + w);
    const CVector decomposed = gains.cwiseProduct(c) + interference + noise;

    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    if ((direct - decomposed).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericalError("gain/interference/noise decomposition does not reproduce the demodulator output");

    const auto slots = cfg.slots();
    const auto subs = cfg.subcarriers();
    return {unflatten(direct, slots, subs), unflatten(gains, slots, subs), unflatten(interference, slots, subs),
            unflatten(noise, slots, subs)};
}

OFDMConfig cp_ofdm_config(std::size_t n, std::size_t n_subcarriers, std::size_t cp_len,
                          std::optional<std::size_t> rx_offset) {
    if (n == 0 || n_subcarriers == 0) throw InvalidDimension("dimension and subcarrier count must be positive");
    const auto a = n_subcarriers + cp_len;
    if (n % n_subcarriers != 0) throw InvalidDimension("subcarrier count must divide N");
    if (n % a != 0) throw InvalidDimension("symbol length (subcarriers + CP) must divide N");
    const auto offset = rx_offset.value_or(cp_len);
    if (offset > cp_len) throw InvalidInput("receive window must lie inside the symbol");
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_subcarriers));
    WHGrid grid(n, a, n / n_subcarriers);
    return OFDMConfig(grid, rectangular_pulse(n, 0, a, amp), rectangular_pulse(n, offset, n_subcarriers, amp));
}

CMatrix cross_ambiguity(const Pulse& g, const Pulse& gamma) {
    if (g.dim() != gamma.dim()) throw InvalidDimension("pulse lengths differ");
    const auto n = g.dim();
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix out(nn, nn);
    CVector prod(nn);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t i = 0; i < n; ++i)
            prod(static_cast<Eigen::Index>(i)) =
                g.samples()(static_cast<Eigen::Index>(i)) *
                std::conj(gamma.samples()(static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(m), n))));
        out.row(static_cast<Eigen::Index>(m)) = detail::dft(prod).transpose();
    }
    return out;
}

double interference_power(const ScatteringProfile& profile, const OFDMConfig& cfg) {
    const auto& grid = cfg.grid();
    if (profile.dim() != grid.dim()) throw InvalidDimension("profile dimension does not match grid dimension");
    // E|I|^2 = sum_{m,l} C[m,l] sum_{(p,q) != 0} |A_{gamma,g}[m + p a, l + q b]|^2
    const RMatrix power = cross_ambiguity(cfg.rx_pulse(), cfg.tx_pulse()).cwiseAbs2();
    const RMatrix per = lattice_periodization(power, grid.time_step(), grid.freq_step());
    const auto a = static_cast<Eigen::Index>(grid.time_step());
    const auto b = static_cast<Eigen::Index>(grid.freq_step());
    const RMatrix& c = profile.intensities();
    double total = 0.0;
    for (Eigen::Index m = 0; m < c.rows(); ++m)
        for (Eigen::Index l = 0; l < c.cols(); ++l)
            if (c(m, l) > 0.0) total += c(m, l) * std::max(0.0, per(m % a, l % b) - power(m, l));
    return total;
}

double gain_transfer_agreement(const DiscreteChannel& channel, const OFDMConfig& cfg) {
    const auto& grid = cfg.grid();
    if (channel.dim() != grid.dim()) throw InvalidDimension("channel dimension does not match grid dimension");
    const CMatrix tx = synthesis_matrix(cfg.tx_pulse(), grid);
    const CMatrix rx = synthesis_matrix(cfg.rx_pulse(), grid);
    const CVector gains = (rx.adjoint() * channel.matrix() * tx).diagonal();
    const auto transfer = tf_transfer(spreading_function(channel));

    double max_diff = 0.0;
    double max_ref = 0.0;
    Eigen::Index idx = 0;
    for (std::size_t n = 0; n < grid.time_slots(); ++n)
        for (std::size_t k = 0; k < grid.freq_slots(); ++k, ++idx) {
            const Complex ref = transfer.at(static_cast<std::int64_t>(n * grid.time_step()),
                                            static_cast<std::int64_t>(k * grid.freq_step()));
            max_diff = std::max(max_diff, std::abs(gains(idx) - ref));
            max_ref = std::max(max_ref, std::abs(ref));
        }
    return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

PulsePair matched_gaussian_pair(const ScatteringProfile& profile, const WHGrid& grid) {
    if (profile.dim() != grid.dim()) throw InvalidDimension("profile dimension does not match grid dimension");
    if (grid.time_step() * grid.freq_step() < grid.dim())
        throw InfeasibleGrid("transmission grid needs a * b >= N");
    const double sigma = profile_sigma(profile, grid);
    auto g = orthonormal_from_window(periodized_gaussian(grid.dim(), sigma).samples(), grid);
    // At critical density the origin-centered Gaussian can hit a Zak-transform
    // zero; a half-sample offset moves it off the lattice.
    if (!g) g = orthonormal_from_window(periodized_gaussian(grid.dim(), sigma, 0.5).samples(), grid);
    if (!g) throw NotAFrame("gaussian window does not generate a frame on the adjoint grid");
    PulsePair out{*g, *g, 0.0, {}};
    out.interference_power = evaluate_pair(profile, grid, out.tx);
    out.history.push_back(out.interference_power);
    return out;
}

PulsePair design_pulses(const ScatteringProfile& profile, const WHGrid& grid, DesignMethod method,
                        const DesignOptions& options) {
    if (grid.time_step() * grid.freq_step() <= grid.dim())
        throw InfeasibleGrid("pulse design needs a * b > N (TF > 1)");
    PulsePair best = matched_gaussian_pair(profile, grid);
    if (method == DesignMethod::matched_gaussian_tight || best.interference_power == 0.0) return best;

    // Coordinate descent over the frame-domain window; every candidate is
    // re-tightened so the pair stays orthonormal.
    CVector window = periodized_gaussian(grid.dim(), profile_sigma(profile, grid)).samples();
    const double peak = window.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> coords;
    for (Eigen::Index i = 0; i < window.size(); ++i)
        if (std::abs(window(i)) > options.support_fraction * peak) coords.push_back(i);

    double step = options.initial_step * peak;
    const Complex directions[] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep, step *= options.step_decay) {
        for (const auto i : coords) {
            for (const auto dir : directions) {
                CVector trial = window;
                trial(i) += step * dir;
                const auto g = orthonormal_from_window(trial, grid);
                if (!g) continue;
                const double p = evaluate_pair(profile, grid, *g);
                if (p < best.interference_power) {
                    window = std::move(trial);
                    best.tx = *g;
                    best.rx = *g;
                    best.interference_power = p;
                    break;
                }
            }
        }
        best.history.push_back(best.interference_power);
    }
    return best;
}

DesignMethod parse_design_method(const std::string& name) {
    if (name == "matched_gaussian_tight") return DesignMethod::matched_gaussian_tight;
    if (name == "local_search") return DesignMethod::local_search;
    throw InvalidInput("unknown design method '" + name + "'");
}

}  // namespace tfcomm
