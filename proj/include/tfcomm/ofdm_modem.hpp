#pragma once

// Pulse-shaping OFDM on the cyclic model.
//
// Symbols c_{n,k} (n < N/a slots, k < N/b subcarriers) are carried by the
// Weyl-Heisenberg set of the transmit pulse on the grid (N, a, b); the
// receiver projects onto the set of the receive pulse on the same grid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfcomm/channel_models.hpp"
#include "tfcomm/tf_core.hpp"
#include "tfcomm/types.hpp"
#include "tfcomm/wh_frames.hpp"

namespace tfcomm {

class OFDMConfig {
public:
    /// Requires a b >= N.
    OFDMConfig(WHGrid grid, Pulse tx_pulse, Pulse rx_pulse);

    const WHGrid& grid() const noexcept { return grid_; }
    const Pulse& tx_pulse() const noexcept { return tx_; }
    const Pulse& rx_pulse() const noexcept { return rx_; }

    std::size_t slots() const noexcept { return grid_.time_slots(); }
    std::size_t subcarriers() const noexcept { return grid_.freq_slots(); }
    /// Symbols per sample-bin, N / (a b).
    double spectral_efficiency() const noexcept { return grid_.redundancy(); }

    /// max |<g_{n,k}, gamma_{n',k'}> - delta delta|.
    double biorthogonality_defect() const;

private:
    WHGrid grid_;
    Pulse tx_;
    Pulse rx_;
};

/// slots x subcarriers symbol grid.
class SymbolFrame {
public:
    SymbolFrame() = default;
    explicit SymbolFrame(CMatrix data, double average_energy = 1.0);

    const CMatrix& data() const noexcept { return data_; }
    double average_energy() const noexcept { return energy_; }
    std::size_t slots() const noexcept { return static_cast<std::size_t>(data_.rows()); }
    std::size_t subcarriers() const noexcept { return static_cast<std::size_t>(data_.cols()); }

private:
    CMatrix data_;
    double energy_ = 1.0;
};

/// Unit-energy QPSK symbols from a seed.
SymbolFrame random_qpsk_frame(const OFDMConfig& cfg, std::uint64_t seed);

struct DemodResult {
    CMatrix estimates;     ///< c_hat_{n,k}
    CMatrix gains;         ///< H_{n,k} = <H g_{n,k}, gamma_{n,k}>
    CMatrix interference;  ///< I_{n,k}
    CMatrix noise;         ///< w_{n,k} = <w, gamma_{n,k}>

    /// sum |I|^2 / sum |H c|^2.
    double interference_ratio(const SymbolFrame& sent) const;
};

CVector modulate(const SymbolFrame& symbols, const OFDMConfig& cfg);
SymbolFrame demodulate(const CVector& received, const OFDMConfig& cfg);

/// noise_psd is the per-sample variance of circular white Gaussian noise
/// drawn from seed; 0 disables noise.
DemodResult transmit_through(const SymbolFrame& symbols, const OFDMConfig& cfg, const DiscreteChannel& channel,
                             double noise_psd = 0.0, std::uint64_t seed = 0);

/// Rectangular CP-OFDM: a = n_subcarriers + cp_len, b = N / n_subcarriers.
/// The receive window of n_subcarriers samples starts rx_offset samples
/// into each symbol (default cp_len).
OFDMConfig cp_ofdm_config(std::size_t n, std::size_t n_subcarriers, std::size_t cp_len,
                          std::optional<std::size_t> rx_offset = std::nullopt);

/// A[m, l] = sum_i g[i] gamma*[i - m] e^{-j2 pi l i / N}.
CMatrix cross_ambiguity(const Pulse& g, const Pulse& gamma);

/// Mean ISI/ICI power E{|I_{n,k}|^2} for unit-energy i.i.d. symbols over a
/// WSSUS channel with the given scattering profile.
double interference_power(const ScatteringProfile& profile, const OFDMConfig& cfg);

/// max |H_{n,k} - L_H[n a, k b]| / max |L_H[n a, k b]| over the lattice.
double gain_transfer_agreement(const DiscreteChannel& channel, const OFDMConfig& cfg);

enum class DesignMethod { matched_gaussian_tight, local_search };

struct PulsePair {
    Pulse tx;
    Pulse rx;
    double interference_power = 0.0;
    /// P_I after each local-search sweep (first entry is the starting pair).
    std::vector<double> history;
};

struct DesignOptions {
    std::size_t max_sweeps = 6;
    double initial_step = 0.05;   ///< relative to the largest window sample
    double step_decay = 0.5;
    double support_fraction = 1e-3;  ///< coordinates with |h| above this fraction of max are searched
};

/// Orthonormal pair g = gamma from a periodized Gaussian whose aspect matches
/// the profile (or the grid when the profile has no extent), tightened on the
/// adjoint frame grid. Accepts a b >= N.
PulsePair matched_gaussian_pair(const ScatteringProfile& profile, const WHGrid& grid);

/// Requires a b > N.
PulsePair design_pulses(const ScatteringProfile& profile, const WHGrid& grid, DesignMethod method,
                        const DesignOptions& options = {});

DesignMethod parse_design_method(const std::string& name);

}  // namespace tfcomm
