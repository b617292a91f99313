#pragma once

// Low-SNR noncoherent capacity approximation for underspread WSSUS channels:
//   C(rho) ~ log(1 + rho) - sum_{m,l} log(1 + rho C[m,l]) dtau dnu
// in nats per degree of freedom. Profile values are scattering-function
// samples (densities); the sum is a Riemann sum over cells of area
// dtau * dnu.

#include <cstddef>
#include <optional>
#include <vector>

#include "tfcomm/channel_models.hpp"

namespace tfcomm {

struct CapacityQuery {
    ScatteringProfile profile;
    double delay_cell = 1.0;    ///< seconds per delay cell
    double doppler_cell = 1.0;  ///< Hz per Doppler cell
    double snr = 1.0;           ///< per degree of freedom
};

struct CapacityEstimate {
    double capacity = 0.0;  ///< nats per degree of freedom
    double penalty = 0.0;
    double awgn = 0.0;
};

struct SweepPoint {
    double bandwidth = 0.0;
    double snr = 0.0;
    double rate = 0.0;  ///< bandwidth * capacity, nats per second
    double capacity = 0.0;
    double penalty = 0.0;
};

struct BandwidthSweep {
    std::vector<SweepPoint> points;
    std::size_t argmax = 0;
    /// Maximum strictly inside the grid (not at either end).
    bool interior_maximum() const noexcept { return argmax > 0 && argmax + 1 < points.size(); }
};

double awgn_capacity(double snr);
CapacityEstimate capacity_low_snr(const CapacityQuery& query);

/// rho(W) = power_budget / W at every bandwidth.
BandwidthSweep bandwidth_sweep(const ScatteringProfile& profile, double delay_cell, double doppler_cell,
                               double power_budget, const std::vector<double>& bandwidths);

/// count points spaced logarithmically between lo and hi (inclusive).
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// Uniform density 1/area on `cells` cells of a grid of dimension n (delay
/// cells 0..cells-1 at zero Doppler), with cell area area / cells.
CapacityQuery uniform_capacity_query(std::size_t n, std::size_t cells, double area, double snr);

}  // namespace tfcomm
