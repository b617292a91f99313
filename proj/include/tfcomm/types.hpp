#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "tfcomm/errors.hpp"

namespace tfcomm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Reduces an index into [0, n).
inline std::size_t wrap_index(std::int64_t i, std::size_t n) {
    const auto nn = static_cast<std::int64_t>(n);
    std::int64_t r = i % nn;
    if (r < 0) r += nn;
    return static_cast<std::size_t>(r);
}

/// Representative of i mod n in (-n/2, n/2].
inline std::int64_t centered_index(std::int64_t i, std::size_t n) {
    const auto nn = static_cast<std::int64_t>(n);
    auto r = static_cast<std::int64_t>(wrap_index(i, n));
    if (2 * r > nn) r -= nn;
    return r;
}

/// A (delay, Doppler) grid coordinate: delay in samples, Doppler in DFT bins.
struct DelayDoppler {
    std::int64_t delay = 0;
    std::int64_t doppler = 0;

    friend bool operator==(const DelayDoppler&, const DelayDoppler&) = default;
};

/// Linear operator on length-N cyclic signals.
class DiscreteChannel {
public:
    DiscreteChannel() = default;
    explicit DiscreteChannel(CMatrix matrix);

    static DiscreteChannel identity(std::size_t n);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const CMatrix& matrix() const noexcept { return matrix_; }

    CVector apply(const CVector& x) const;
    double frobenius_norm() const { return matrix_.norm(); }

    friend DiscreteChannel operator*(const DiscreteChannel& lhs, const DiscreteChannel& rhs);

private:
    CMatrix matrix_;
};

/// A length-N transmit/receive window.
class Pulse {
public:
    Pulse() = default;
    explicit Pulse(CVector samples);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(samples_.size()); }
    const CVector& samples() const noexcept { return samples_; }
    double norm() const noexcept { return norm_; }

    Pulse scaled(Complex factor) const { return Pulse(samples_ * factor); }
    Pulse normalized() const;

private:
    CVector samples_;
    double norm_ = 0.0;
};

}  // namespace tfcomm
