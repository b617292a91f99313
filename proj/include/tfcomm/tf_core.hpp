#pragma once

// Cyclic time-frequency shift operators and the delay-Doppler representation
// of N x N channels.
//
// Conventions (N-periodic signals, indices mod N):
//   (D^m x)[i]     = x[i - m]
//   (M^l x)[i]     = e^{+j2 pi l i / N} x[i]
//   H              = sum_{m,l} S[m,l] M^l D^m,   S[m,l] = <H, M^l D^m> / N
//   L[n,k]         = sum_{m,l} S[m,l] e^{-j2 pi (k m - n l) / N}
// With these signs M^l D^m = e^{j2 pi m l / N} D^m M^l and L[n,k] is the
// approximate eigenvalue of H at time n and frequency bin k.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tfcomm/types.hpp"

namespace tfcomm {

/// Delay-Doppler spreading coefficients. Row index is the delay m, column
/// index the Doppler l.
class SpreadingFunction {
public:
    SpreadingFunction() = default;
    /// A threshold of std::nullopt selects 1e-12 * max|coeff|.
    explicit SpreadingFunction(CMatrix coeffs, std::optional<double> zero_threshold = std::nullopt);

    static SpreadingFunction zeros(std::size_t n);
    static SpreadingFunction delta(std::size_t n, std::int64_t delay, std::int64_t doppler,
                                   Complex value = 1.0);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }
    const CMatrix& coeffs() const noexcept { return coeffs_; }
    double zero_threshold() const noexcept { return threshold_; }

    Complex at(std::int64_t delay, std::int64_t doppler) const;

    /// Grid cells with |coeff| above the zero threshold, in row-major order
    /// of the stored (wrapped) indices.
    std::vector<DelayDoppler> support() const;
    std::size_t support_size() const;

    /// sum |S|^2; equals ||H||_F^2 / N.
    double energy() const { return coeffs_.squaredNorm(); }

private:
    CMatrix coeffs_;
    double threshold_ = 0.0;
};

/// Time-frequency transfer function; row index is time n, column index
/// frequency bin k.
class TransferFunction {
public:
    TransferFunction() = default;
    explicit TransferFunction(CMatrix values);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    const CMatrix& values() const noexcept { return values_; }
    Complex at(std::int64_t time, std::int64_t bin) const;

private:
    CMatrix values_;
};

struct SpreadMetrics {
    std::size_t support_count = 0;
    double normalized_spread = 0.0;  ///< |S| / N
    std::int64_t max_delay = 0;      ///< samples, centered
    std::int64_t max_doppler = 0;    ///< bins, centered
    /// d_H = 4 tau_max nu_max; in normalized units 4 m l / N.
    double box_spread = 0.0;
    std::optional<double> max_delay_seconds;
    std::optional<double> max_doppler_hz;

    bool underspread() const noexcept { return normalized_spread <= 1.0; }
    bool box_underspread() const noexcept { return box_spread <= 1.0; }
};

enum class MatrixNorm { frobenius, spectral };

struct CommutationDefect {
    double defect = 0.0;
    double bound = 0.0;
};

struct ProductSpreading {
    SpreadingFunction exact;
    SpreadingFunction approx;
    double error = 0.0;  ///< relative Frobenius difference
};

enum class AnalysisPath { fast, direct };

DiscreteChannel time_shift_op(std::size_t n, std::int64_t m);
DiscreteChannel modulation_op(std::size_t n, std::int64_t l);
/// M^l D^m.
DiscreteChannel tf_shift_op(std::size_t n, std::int64_t m, std::int64_t l);
/// (M^l D^m x) without forming a matrix.
CVector apply_tf_shift(const CVector& x, std::int64_t m, std::int64_t l);

SpreadingFunction spreading_function(const DiscreteChannel& h,
                                     std::optional<double> zero_threshold = std::nullopt,
                                     AnalysisPath path = AnalysisPath::fast);
DiscreteChannel synthesize_channel(const SpreadingFunction& s);

TransferFunction tf_transfer(const SpreadingFunction& s);
SpreadingFunction inverse_tf_transfer(const TransferFunction& l);
/// Same 2-D transform applied to an arbitrary grid (used for scattering and
/// correlation grids, which share the transform pair).
CMatrix transfer_transform(const CMatrix& grid);
CMatrix inverse_transfer_transform(const CMatrix& grid);

CommutationDefect commutation_defect(std::size_t n, std::int64_t m, std::int64_t l, MatrixNorm norm);

/// Spreading function of H1 H2, exactly and via the cyclic 2-D convolution
/// of the factors' spreading grids.
ProductSpreading spreading_of_product(const DiscreteChannel& h1, const DiscreteChannel& h2);

/// ||H g' - L_H[n0,k0] g'|| / (||H||_F / sqrt(N)) with g' = M^{k0} D^{n0} g.
/// Requires ||g|| = 1.
double approx_eigen_defect(const DiscreteChannel& h, const Pulse& g, std::int64_t n0, std::int64_t k0);

/// Multiplicativity error ||L_{H1H2} - L_{H1} L_{H2}||_F / ||L_{H1} L_{H2}||_F.
double multiplicativity_error(const DiscreteChannel& h1, const DiscreteChannel& h2);

SpreadMetrics spread_metrics(const SpreadingFunction& s, std::optional<double> sample_rate = std::nullopt);

/// d_H = 4 tau_max nu_max for physical maximum delay (s) and Doppler (Hz).
inline double channel_spread(double max_delay_s, double max_doppler_hz) {
    return 4.0 * max_delay_s * max_doppler_hz;
}

/// Operator norm used by commutation_defect.
double matrix_norm(const CMatrix& m, MatrixNorm norm);

}  // namespace tfcomm
