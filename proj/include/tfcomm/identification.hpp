#pragma once

// Identification of underspread channels from a single sounding: the
// spreading coefficients on a declared support S solve y = X s, where the
// column of X for (m, l) is M^l D^m x.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tfcomm/tf_core.hpp"
#include "tfcomm/types.hpp"

namespace tfcomm {

using Support = std::vector<DelayDoppler>;

struct IdentificationResult {
    CVector estimate;  ///< one coefficient per support entry
    double residual = 0.0;
    double condition_number = 1.0;
    std::size_t rank = 0;
};

struct SoundingQuality {
    double condition_number = 1.0;
    /// max |A_{x,x}| over support differences other than (0, 0).
    double max_offgrid_autoambiguity = 0.0;
};

/// Impulses at multiples of period, unit energy. Optional weights (one per
/// impulse) must have unit modulus.
CVector dirac_train(std::size_t n, std::size_t period, std::optional<CVector> weights = std::nullopt);

/// Delays -floor(d/2) .. ceil(d/2)-1 times Dopplers likewise, delay-major.
Support centered_rectangle(std::size_t n_delays, std::size_t n_dopplers);

CMatrix build_sounding_matrix(const CVector& x, const Support& support);

/// y = X s for planted coefficients.
CVector simulate_observation(const CVector& x, const Support& support, const CVector& coeffs);

/// Least squares through an SVD; throws IdentifiabilityError when the
/// numerical rank (tolerance rank_tolerance * sigma_max) is below |S|.
IdentificationResult identify(const CVector& y, const CVector& x, const Support& support,
                              double rank_tolerance = 1e-10);

SoundingQuality sounding_quality(const CVector& x, const Support& support);

/// Scatters coefficients on a support into an N x N spreading grid.
SpreadingFunction spreading_from_support(std::size_t n, const Support& support, const CVector& coeffs);

}  // namespace tfcomm
