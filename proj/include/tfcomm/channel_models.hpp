#pragma once

// Deterministic and WSSUS random doubly dispersive channels on the cyclic
// delay-Doppler grid.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfcomm/tf_core.hpp"
#include "tfcomm/types.hpp"

namespace tfcomm {

/// Scattering function sampled on the delay-Doppler grid; row = delay m,
/// column = Doppler l (both wrapped mod N).
class ScatteringProfile {
public:
    ScatteringProfile() = default;
    explicit ScatteringProfile(RMatrix intensities);

    static ScatteringProfile zeros(std::size_t n);
    static ScatteringProfile delta(std::size_t n, std::int64_t delay = 0, std::int64_t doppler = 0);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(intensities_.rows()); }
    const RMatrix& intensities() const noexcept { return intensities_; }
    double at(std::int64_t delay, std::int64_t doppler) const;
    double total_gain() const { return intensities_.sum(); }

    /// Centered circumscribing rectangle: max |delay|, max |Doppler| over
    /// nonzero cells.
    std::int64_t max_delay() const;
    std::int64_t max_doppler() const;
    std::size_t support_size() const;

    ScatteringProfile scaled(double factor) const;
    /// Rescaled to unit total gain; the zero profile is returned unchanged.
    ScatteringProfile normalized() const;

private:
    RMatrix intensities_;
};

/// Discrete TF correlation R[dn, dk] = E{L[n,k] L*[n-dn, k-dk]}.
class TFCorrelation {
public:
    TFCorrelation() = default;
    explicit TFCorrelation(CMatrix values);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const CMatrix& values() const noexcept { return values_; }
    Complex at(std::int64_t dn, std::int64_t dk) const;

private:
    CMatrix values_;
};

struct SpecularPath {
    double delay = 0.0;    ///< samples; must be an integer
    double doppler = 0.0;  ///< DFT bins; must be an integer
    Complex gain = 1.0;
};
using SpecularPathSet = std::vector<SpecularPath>;

SpreadingFunction from_specular(const SpecularPathSet& paths, std::size_t n);
/// taps[d] is the gain at delay d samples.
SpreadingFunction time_invariant(std::span<const Complex> taps, std::size_t n);
/// Multiplicative channel y[i] = m[i] x[i].
SpreadingFunction frequency_dispersive(const CVector& modulation);
/// Receiver with carrier offset freq_offset (bins), timing offset
/// timing_offset (samples), and phase-noise spectrum psi on the Doppler grid
/// (index 0 = zero Doppler, carrier phase folded in).
SpreadingFunction oscillator_impairment(std::int64_t freq_offset, std::int64_t timing_offset, const CVector& psi);

/// Seed for the index-th independent draw derived from a base seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// One WSSUS realization: S[m,l] = sqrt(C[m,l]) w[m,l], w i.i.d. CN(0,1).
SpreadingFunction wssus_sample(const ScatteringProfile& profile, std::uint64_t seed);
/// K realizations, draw k using substream_seed(seed, k).
std::vector<SpreadingFunction> wssus_ensemble(const ScatteringProfile& profile, std::uint64_t seed, std::size_t count);

TFCorrelation tf_correlation(const ScatteringProfile& profile);
ScatteringProfile scattering_from_correlation(const TFCorrelation& correlation);

enum class PresetKind { exponential_jakes, drm_like, flat_rect };

struct PresetParams {
    std::size_t n_dim = 64;
    // flat_rect: centered inclusive ranges
    std::int64_t delay_min = 0;
    std::int64_t delay_max = 0;
    std::int64_t doppler_min = 0;
    std::int64_t doppler_max = 0;
    // exponential_jakes
    double delay_decay = 1.0;       ///< samples
    std::int64_t delay_extent = -1;  ///< last delay tap; < 0 selects ceil(5 decay)
    double max_doppler = 1.0;        ///< bins
    // drm_like
    std::vector<std::int64_t> echo_delays{0, 3, 6};
    std::vector<double> echo_powers{1.0, 0.5, 0.25};
    std::vector<double> echo_doppler_shifts{0.0, 1.0, -1.0};
    double doppler_spread = 1.0;  ///< Gaussian RMS width in bins
    bool normalize = true;
};

ScatteringProfile preset_profile(PresetKind kind, const PresetParams& params);
PresetKind parse_preset_kind(const std::string& name);
std::string to_string(PresetKind kind);

}  // namespace tfcomm
