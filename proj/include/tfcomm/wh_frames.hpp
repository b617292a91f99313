#pragma once

// Discrete Weyl-Heisenberg (Gabor) systems on N-periodic signals.
//
// A grid (N, a, b) generates the elements
//   g_{n,k}[i] = g[i - n a] e^{j2 pi k b i / N},  n < N/a, k < N/b,
// i.e. g_{n,k} = M^{k b} D^{n a} g. Elements are enumerated with the
// frequency index running fastest: column n * (N/b) + k.

#include <cstddef>
#include <cstdint>

#include "tfcomm/tf_core.hpp"
#include "tfcomm/types.hpp"

namespace tfcomm {

class WHGrid {
public:
    WHGrid(std::size_t n, std::size_t time_step, std::size_t freq_step);

    std::size_t dim() const noexcept { return n_; }
    std::size_t time_step() const noexcept { return a_; }
    std::size_t freq_step() const noexcept { return b_; }

    std::size_t time_slots() const noexcept { return n_ / a_; }
    std::size_t freq_slots() const noexcept { return n_ / b_; }
    std::size_t size() const noexcept { return time_slots() * freq_slots(); }

    /// N / (a b): number of elements per dimension.
    double redundancy() const noexcept;
    /// a b / N, the discrete analogue of TF.
    double tf_product() const noexcept;
    bool frame_feasible() const noexcept { return a_ * b_ <= n_; }

    /// Grid with time step N/b and frequency step N/a.
    WHGrid adjoint() const { return WHGrid(n_, n_ / b_, n_ / a_); }

    friend bool operator==(const WHGrid&, const WHGrid&) = default;

private:
    std::size_t n_;
    std::size_t a_;
    std::size_t b_;
};

struct FrameReport {
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool is_frame = false;
    bool is_tight = false;
    /// B / A; infinite when A vanishes.
    double condition = 0.0;
};

struct WexlerRazReport {
    /// max-abs deviation of sum g_{n,k} gamma_{n,k}^H from the identity.
    double duality_defect = 0.0;
    /// max-abs deviation of the adjoint-grid Gram matrix from (ab/N) I.
    double biorthogonal_defect = 0.0;
    bool dual = false;
    bool biorthogonal = false;

    bool consistent() const noexcept { return dual == biorthogonal; }
};

struct Localization {
    double time_spread = 0.0;  ///< RMS circular spread in samples
    double freq_spread = 0.0;  ///< RMS circular spread in DFT bins
};

CVector wh_element(const Pulse& g, const WHGrid& grid, std::size_t slot, std::size_t bin);
/// N x (N/a)(N/b) matrix whose columns are the grid elements.
CMatrix synthesis_matrix(const Pulse& g, const WHGrid& grid);

DiscreteChannel frame_operator(const Pulse& g, const WHGrid& grid);
FrameReport frame_bounds(const Pulse& g, const WHGrid& grid, double tight_tolerance = 1e-10);
Pulse dual_window(const Pulse& g, const WHGrid& grid);
Pulse tight_window(const Pulse& g, const WHGrid& grid);

WexlerRazReport check_wexler_raz(const Pulse& g, const Pulse& gamma, const WHGrid& grid,
                                 double tolerance = 1e-10);

Localization localization_metrics(const Pulse& g);

/// exp(-pi t^2 / sigma^2) wrapped onto the cycle, t in samples from center.
Pulse periodized_gaussian(std::size_t n, double sigma, double center = 0.0);
/// sigma = sqrt(a N / b): time/frequency spread ratio a/b.
double grid_matched_sigma(const WHGrid& grid);
Pulse rectangular_pulse(std::size_t n, std::size_t start, std::size_t length, double amplitude);

}  // namespace tfcomm
