#include "tfcomm/tf_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <Eigen/Eigenvalues>

#include "dft.hpp"

namespace tfcomm {

namespace {

void require_dim(std::size_t n) {
    if (n == 0) throw InvalidDimension("dimension must be positive");
}

void require_square(const CMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidDimension("channel matrix must be square");
    if (m.rows() == 0) throw InvalidDimension("channel matrix must be non-empty");
}

Complex unit_phasor(double cycles) {
    return std::polar(1.0, 2.0 * kPi * cycles);
}

// Column m holds the m-th cyclic diagonal: out(i, m) = H[i, i - m].
CMatrix diagonals(const CMatrix& h) {
    const auto n = static_cast<std::size_t>(h.rows());
    CMatrix out(h.rows(), h.cols());
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
                h(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(m), n)));
    return out;
}

}  // namespace

DiscreteChannel::DiscreteChannel(CMatrix matrix) : matrix_(std::move(matrix)) {
    require_square(matrix_);
    if (!matrix_.allFinite()) throw InvalidInput("channel matrix has non-finite entries");
}

DiscreteChannel DiscreteChannel::identity(std::size_t n) {
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    return DiscreteChannel(CMatrix::Identity(nn, nn));
}

CVector DiscreteChannel::apply(const CVector& x) const {
    if (x.size() != matrix_.cols()) throw InvalidDimension("signal length does not match channel dimension");
    return matrix_ * x;
}

DiscreteChannel operator*(const DiscreteChannel& lhs, const DiscreteChannel& rhs) {
    if (lhs.dim() != rhs.dim()) throw InvalidDimension("channel dimensions differ");
    return DiscreteChannel(lhs.matrix_ * rhs.matrix_);
}

Pulse::Pulse(CVector samples) : samples_(std::move(samples)) {
    if (samples_.size() == 0) throw InvalidDimension("pulse must have at least one sample");
    if (!samples_.allFinite()) throw InvalidInput("pulse has non-finite samples");
    norm_ = samples_.norm();
}

Pulse Pulse::normalized() const {
    if (norm_ == 0.0) throw InvalidInput("cannot normalize a zero pulse");
    return Pulse(samples_ / norm_);
}

// ---------------------------------------------------------------------------

SpreadingFunction::SpreadingFunction(CMatrix coeffs, std::optional<double> zero_threshold)
    : coeffs_(std::move(coeffs)) {
    require_square(coeffs_);
    if (!coeffs_.allFinite()) throw InvalidInput("spreading coefficients must be finite");
    if (zero_threshold) {
        if (*zero_threshold < 0.0) throw InvalidInput("zero threshold must be nonnegative");
        threshold_ = *zero_threshold;
    } else {
        threshold_ = 1e-12 * coeffs_.cwiseAbs().maxCoeff();
    }
}

SpreadingFunction SpreadingFunction::zeros(std::size_t n) {
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    return SpreadingFunction(CMatrix::Zero(nn, nn));
}

SpreadingFunction SpreadingFunction::delta(std::size_t n, std::int64_t delay, std::int64_t doppler,
                                           Complex value) {
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix c = CMatrix::Zero(nn, nn);
    c(static_cast<Eigen::Index>(wrap_index(delay, n)), static_cast<Eigen::Index>(wrap_index(doppler, n))) = value;
    return SpreadingFunction(std::move(c));
}

Complex SpreadingFunction::at(std::int64_t delay, std::int64_t doppler) const {
    return coeffs_(static_cast<Eigen::Index>(wrap_index(delay, dim())),
                   static_cast<Eigen::Index>(wrap_index(doppler, dim())));
}

std::vector<DelayDoppler> SpreadingFunction::support() const {
    std::vector<DelayDoppler> out;
    for (Eigen::Index m = 0; m < coeffs_.rows(); ++m)
        for (Eigen::Index l = 0; l < coeffs_.cols(); ++l)
            if (std::abs(coeffs_(m, l)) > threshold_) out.push_back({m, l});
    return out;
}

std::size_t SpreadingFunction::support_size() const {
    return static_cast<std::size_t>((coeffs_.cwiseAbs().array() > threshold_).count());
}

TransferFunction::TransferFunction(CMatrix values) : values_(std::move(values)) {
    require_square(values_);
}

Complex TransferFunction::at(std::int64_t time, std::int64_t bin) const {
    return values_(static_cast<Eigen::Index>(wrap_index(time, dim())),
                   static_cast<Eigen::Index>(wrap_index(bin, dim())));
}

// ---------------------------------------------------------------------------

DiscreteChannel time_shift_op(std::size_t n, std::int64_t m) {
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix d = CMatrix::Zero(nn, nn);
    for (std::size_t i = 0; i < n; ++i)
        d(static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(i) + m, n)), static_cast<Eigen::Index>(i)) = 1.0;
    return DiscreteChannel(std::move(d));
}

DiscreteChannel modulation_op(std::size_t n, std::int64_t l) {
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix d = CMatrix::Zero(nn, nn);
    const auto lw = wrap_index(l, n);
    for (std::size_t i = 0; i < n; ++i)
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            unit_phasor(static_cast<double>((lw * i) % n) / static_cast<double>(n));
    return DiscreteChannel(std::move(d));
}

DiscreteChannel tf_shift_op(std::size_t n, std::int64_t m, std::int64_t l) {
    return modulation_op(n, l) * time_shift_op(n, m);
}

CVector apply_tf_shift(const CVector& x, std::int64_t m, std::int64_t l) {
    const auto n = static_cast<std::size_t>(x.size());
    require_dim(n);
    const auto lw = wrap_index(l, n);
    CVector out(x.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = wrap_index(static_cast<std::int64_t>(i) - m, n);
        out(static_cast<Eigen::Index>(i)) =
            unit_phasor(static_cast<double>((lw * i) % n) / static_cast<double>(n)) * x(static_cast<Eigen::Index>(src));
    }
    return out;
}

SpreadingFunction spreading_function(const DiscreteChannel& h, std::optional<double> zero_threshold,
                                     AnalysisPath path) {
    const auto n = h.dim();
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    const CMatrix diag = diagonals(h.matrix());
    CMatrix s(nn, nn);
    if (path == AnalysisPath::fast) {
        // S[m, l] = (1/N) sum_i H[i, i-m] e^{-j2 pi l i / N}
        const CMatrix f = detail::dft_columns(diag);
        s = f.transpose() / static_cast<double>(n);
    } else {
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t l = 0; l < n; ++l) {
                Complex acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) *
                           unit_phasor(-static_cast<double>((l * i) % n) / static_cast<double>(n));
                s(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = acc / static_cast<double>(n);
            }
    }
    return SpreadingFunction(std::move(s), zero_threshold);
}

DiscreteChannel synthesize_channel(const SpreadingFunction& s) {
    const auto n = s.dim();
    require_dim(n);
    const auto nn = static_cast<Eigen::Index>(n);
    // diag(i, m) = H[i, i - m] = sum_l S[m, l] e^{j2 pi l i / N}
    const CMatrix diag = detail::idft_columns_unscaled(s.coeffs().transpose());
    CMatrix h(nn, nn);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i)
            h(static_cast<Eigen::Index>(i),
              static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(m), n))) =
                diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
    return DiscreteChannel(std::move(h));
}

CMatrix transfer_transform(const CMatrix& grid) {
    require_square(grid);
    // t(n, m) = sum_l S[m, l] e^{+j2 pi n l / N}
    const CMatrix t = detail::idft_columns_unscaled(grid.transpose());
    // L(n, k) = sum_m t(n, m) e^{-j2 pi k m / N}
    return detail::dft_columns(t.transpose()).transpose();
}

CMatrix inverse_transfer_transform(const CMatrix& grid) {
    require_square(grid);
    const auto n = static_cast<double>(grid.rows());
    // t(m, n) = (1/N) sum_k L[n, k] e^{+j2 pi k m / N}
    const CMatrix t = detail::idft_columns_unscaled(grid.transpose()) / n;
    // S(m, l) = (1/N) sum_n t(m, n) e^{-j2 pi n l / N}
    return detail::dft_columns(t.transpose()).transpose() / n;
}

TransferFunction tf_transfer(const SpreadingFunction& s) {
    return TransferFunction(transfer_transform(s.coeffs()));
}

SpreadingFunction inverse_tf_transfer(const TransferFunction& l) {
    return SpreadingFunction(inverse_transfer_transform(l.values()));
}

double matrix_norm(const CMatrix& m, MatrixNorm norm) {
    if (norm == MatrixNorm::frobenius) return m.norm();
    const CMatrix gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

CommutationDefect commutation_defect(std::size_t n, std::int64_t m, std::int64_t l, MatrixNorm norm) {
    require_dim(n);
    const auto dm = time_shift_op(n, m).matrix();
    const auto ml = modulation_op(n, l).matrix();
    const CMatrix dm_ml = dm * ml;
    const CMatrix commutator = dm_ml - ml * dm;
    CommutationDefect out;
    out.defect = matrix_norm(commutator, norm);
    const double ml_c = std::abs(static_cast<double>(centered_index(m, n)) * static_cast<double>(centered_index(l, n)));
    out.bound = 2.0 * kPi * ml_c / static_cast<double>(n) * matrix_norm(dm_ml, norm);
    if (out.defect > out.bound + 1e-12)
        throw NumericalError("commutation defect exceeds its bound");
    return out;
}

ProductSpreading spreading_of_product(const DiscreteChannel& h1, const DiscreteChannel& h2) {
    if (h1.dim() != h2.dim()) throw InvalidDimension("channel dimensions differ");
    const auto n = h1.dim();
    const auto nn = static_cast<Eigen::Index>(n);
    const auto s1 = spreading_function(h1);
    const auto s2 = spreading_function(h2);
    auto exact = spreading_function(h1 * h2);

    CMatrix conv = CMatrix::Zero(nn, nn);
    for (const auto& [mp, lp] : s2.support()) {
        const Complex c2 = s2.at(mp, lp);
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t l = 0; l < n; ++l)
                conv(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) +=
                    s1.at(static_cast<std::int64_t>(m) - mp, static_cast<std::int64_t>(l) - lp) * c2;
    }
    ProductSpreading out{std::move(exact), SpreadingFunction(std::move(conv)), 0.0};
    const double ref = out.exact.coeffs().norm();
    const double diff = (out.exact.coeffs() - out.approx.coeffs()).norm();
    out.error = ref > 0.0 ? diff / ref : diff;
    return out;
}

double approx_eigen_defect(const DiscreteChannel& h, const Pulse& g, std::int64_t n0, std::int64_t k0) {
    const auto n = h.dim();
    if (g.dim() != n) throw InvalidDimension("pulse length does not match channel dimension");
    if (g.norm() == 0.0) throw InvalidInput("pulse has zero norm");
    if (std::abs(g.norm() - 1.0) > 1e-9) throw InvalidInput("pulse must have unit norm");

    // L[n0, k0] = sum_m H[n0, n0 - m] e^{-j2 pi k0 m / N}
    const auto row = static_cast<Eigen::Index>(wrap_index(n0, n));
    const auto kw = wrap_index(k0, n);
    Complex eigenvalue = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const auto col = static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(row) - static_cast<std::int64_t>(m), n));
        eigenvalue += h.matrix()(row, col) * unit_phasor(-static_cast<double>((kw * m) % n) / static_cast<double>(n));
    }
    const CVector shifted = apply_tf_shift(g.samples(), n0, k0);
    const double scale = h.frobenius_norm() / std::sqrt(static_cast<double>(n));
    if (scale == 0.0) return 0.0;
    return (h.apply(shifted) - eigenvalue * shifted).norm() / scale;
}

double multiplicativity_error(const DiscreteChannel& h1, const DiscreteChannel& h2) {
    const CMatrix l1 = tf_transfer(spreading_function(h1)).values();
    const CMatrix l2 = tf_transfer(spreading_function(h2)).values();
    const CMatrix l12 = tf_transfer(spreading_function(h1 * h2)).values();
    const CMatrix prod = l1.cwiseProduct(l2);
    const double ref = prod.norm();
    const double diff = (l12 - prod).norm();
    return ref > 0.0 ? diff / ref : diff;
}

SpreadMetrics spread_metrics(const SpreadingFunction& s, std::optional<double> sample_rate) {
    const auto n = s.dim();
    SpreadMetrics out;
    const auto support = s.support();
    out.support_count = support.size();
    out.normalized_spread = static_cast<double>(support.size()) / static_cast<double>(n);
    for (const auto& [m, l] : support) {
        out.max_delay = std::max(out.max_delay, std::abs(centered_index(m, n)));
        out.max_doppler = std::max(out.max_doppler, std::abs(centered_index(l, n)));
    }
    out.box_spread = 4.0 * static_cast<double>(out.max_delay) * static_cast<double>(out.max_doppler) /
                     static_cast<double>(n);
    if (sample_rate) {
        if (!(*sample_rate > 0.0)) throw InvalidInput("sample rate must be positive");
        out.max_delay_seconds = static_cast<double>(out.max_delay) / *sample_rate;
        out.max_doppler_hz = static_cast<double>(out.max_doppler) * *sample_rate / static_cast<double>(n);
        out.box_spread = channel_spread(*out.max_delay_seconds, *out.max_doppler_hz);
    }
    return out;
}

}  // namespace tfcomm
