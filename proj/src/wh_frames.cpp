#include "tfcomm/wh_frames.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dft.hpp"

namespace tfcomm {

namespace {

void require_matching(const Pulse& g, const WHGrid& grid) {
    if (g.dim() != grid.dim()) throw InvalidDimension("pulse length does not match grid dimension");
}

struct FrameSpectrum {
    Eigen::VectorXd values;
    CMatrix vectors;
};

FrameSpectrum frame_spectrum(const Pulse& g, const WHGrid& grid) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(frame_operator(g, grid).matrix());
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of frame operator failed");
    return {eig.eigenvalues(), eig.eigenvectors()};
}

FrameReport report_from(const Eigen::VectorXd& eigenvalues, double tight_tolerance) {
    FrameReport r;
    r.upper_bound = std::max(0.0, eigenvalues.maxCoeff());
    r.lower_bound = std::max(0.0, eigenvalues.minCoeff());
    r.is_frame = r.upper_bound > 0.0 && r.lower_bound > 1e-10 * r.upper_bound;
    r.condition = r.is_frame ? r.upper_bound / r.lower_bound : std::numeric_limits<double>::infinity();
    r.is_tight = r.is_frame && (r.condition - 1.0) <= tight_tolerance;
    return r;
}

// Applies f(lambda) of the frame operator to g.
Pulse spectral_apply(const Pulse& g, const WHGrid& grid, double (*f)(double)) {
    require_matching(g, grid);
    const auto spec = frame_spectrum(g, grid);
    const auto report = report_from(spec.values, 0.0);
    if (!report.is_frame)
        throw NotAFrame("Weyl-Heisenberg set is not a frame (lower bound " + std::to_string(report.lower_bound) +
                        ", upper bound " + std::to_string(report.upper_bound) + ")");
    const CVector coeffs = spec.vectors.adjoint() * g.samples();
    CVector scaled(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) scaled(i) = coeffs(i) * f(spec.values(i));
    return Pulse(spec.vectors * scaled);
}

double circular_spread(const Eigen::VectorXd& weights) {
    const auto n = static_cast<double>(weights.size());
    const double total = weights.sum();
    Complex first = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        first += weights(i) * std::polar(1.0, 2.0 * kPi * static_cast<double>(i) / n);
    const double mean = std::abs(first) > 1e-12 * total ? std::arg(first) * n / (2.0 * kPi) : 0.0;
    double moment = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double d = std::remainder(static_cast<double>(i) - mean, n);
        moment += weights(i) * d * d;
    }
    return std::sqrt(moment / total);
}

}  // namespace

WHGrid::WHGrid(std::size_t n, std::size_t time_step, std::size_t freq_step)
    : n_(n), a_(time_step), b_(freq_step) {
    if (n_ == 0) throw InvalidDimension("grid dimension must be positive");
    if (a_ == 0 || b_ == 0) throw InvalidDimension("grid steps must be positive");
    if (n_ % a_ != 0) throw InvalidDimension("time step must divide N");
    if (n_ % b_ != 0) throw InvalidDimension("frequency step must divide N");
}

double WHGrid::redundancy() const noexcept {
    return static_cast<double>(n_) / static_cast<double>(a_ * b_);
}

double WHGrid::tf_product() const noexcept {
    return static_cast<double>(a_ * b_) / static_cast<double>(n_);
}

CVector wh_element(const Pulse& g, const WHGrid& grid, std::size_t slot, std::size_t bin) {
    require_matching(g, grid);
    return apply_tf_shift(g.samples(), static_cast<std::int64_t>(slot * grid.time_step()),
                          static_cast<std::int64_t>(bin * grid.freq_step()));
}

CMatrix synthesis_matrix(const Pulse& g, const WHGrid& grid) {
    require_matching(g, grid);
    const auto n = grid.dim();
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix out(nn, static_cast<Eigen::Index>(grid.size()));
    // Precompute the modulation phasors once per bin.
    Eigen::Index col = 0;
    for (std::size_t slot = 0; slot < grid.time_slots(); ++slot) {
        const auto shift = static_cast<std::int64_t>(slot * grid.time_step());
        CVector shifted(nn);
        for (std::size_t i = 0; i < n; ++i)
            shifted(static_cast<Eigen::Index>(i)) =
                g.samples()(static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(i) - shift, n)));
        for (std::size_t bin = 0; bin < grid.freq_slots(); ++bin, ++col) {
            const auto freq = bin * grid.freq_step();
            for (std::size_t i = 0; i < n; ++i)
                out(static_cast<Eigen::Index>(i), col) =
                    shifted(static_cast<Eigen::Index>(i)) *
                    std::polar(1.0, 2.0 * kPi * static_cast<double>((freq * i) % n) / static_cast<double>(n));
        }
    }
    return out;
}

DiscreteChannel frame_operator(const Pulse& g, const WHGrid& grid) {
    const CMatrix synth = synthesis_matrix(g, grid);
    CMatrix s = synth * synth.adjoint();
    // Exact Hermitian symmetry for the eigensolver.
    s = 0.5 * (s + s.adjoint()).eval();
    return DiscreteChannel(std::move(s));
}

FrameReport frame_bounds(const Pulse& g, const WHGrid& grid, double tight_tolerance) {
    require_matching(g, grid);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(frame_operator(g, grid).matrix(), Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of frame operator failed");
    return report_from(eig.eigenvalues(), tight_tolerance);
}

Pulse dual_window(const Pulse& g, const WHGrid& grid) {
    return spectral_apply(g, grid, [](double lambda) { return 1.0 / lambda; });
}

Pulse tight_window(const Pulse& g, const WHGrid& grid) {
    return spectral_apply(g, grid, [](double lambda) { return 1.0 / std::sqrt(lambda); });
}

WexlerRazReport check_wexler_raz(const Pulse& g, const Pulse& gamma, const WHGrid& grid, double tolerance) {
    require_matching(g, grid);
    require_matching(gamma, grid);
    const auto nn = static_cast<Eigen::Index>(grid.dim());
    WexlerRazReport out;

    const CMatrix completeness = synthesis_matrix(g, grid) * synthesis_matrix(gamma, grid).adjoint();
    out.duality_defect = (completeness - CMatrix::Identity(nn, nn)).cwiseAbs().maxCoeff();

    const WHGrid adj = grid.adjoint();
    const auto k = static_cast<Eigen::Index>(adj.size());
    // gram(j, i) = <g~_i, gamma~_j>
    const CMatrix gram = synthesis_matrix(gamma, adj).adjoint() * synthesis_matrix(g, adj);
    const double constant = grid.tf_product();
    out.biorthogonal_defect = (gram - constant * CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();

    out.dual = out.duality_defect <= tolerance;
    out.biorthogonal = out.biorthogonal_defect <= tolerance;
    return out;
}

Localization localization_metrics(const Pulse& g) {
    if (g.norm() == 0.0) throw InvalidInput("localization of a zero pulse is undefined");
    Localization out;
    out.time_spread = circular_spread(g.samples().cwiseAbs2());
    out.freq_spread = circular_spread(detail::dft(g.samples()).cwiseAbs2());
    return out;
}

Pulse periodized_gaussian(std::size_t n, double sigma, double center) {
    if (n == 0) throw InvalidDimension("pulse length must be positive");
    if (!(sigma > 0.0)) throw InvalidInput("gaussian width must be positive");
    const auto nd = static_cast<double>(n);
    const auto wraps = static_cast<int>(std::ceil(6.0 * sigma / nd)) + 1;
    CVector samples(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int r = -wraps; r <= wraps; ++r) {
            const double t = static_cast<double>(i) - center + r * nd;
            acc += std::exp(-kPi * t * t / (sigma * sigma));
        }
        samples(static_cast<Eigen::Index>(i)) = acc;
    }
    return Pulse(std::move(samples)).normalized();
}

double grid_matched_sigma(const WHGrid& grid) {
    return std::sqrt(static_cast<double>(grid.time_step()) * static_cast<double>(grid.dim()) /
                     static_cast<double>(grid.freq_step()));
}

Pulse rectangular_pulse(std::size_t n, std::size_t start, std::size_t length, double amplitude) {
    if (n == 0) throw InvalidDimension("pulse length must be positive");
    if (length > n) throw InvalidInput("rectangle longer than the cycle");
    CVector samples = CVector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < length; ++i)
        samples(static_cast<Eigen::Index>((start + i) % n)) = amplitude;
    return Pulse(std::move(samples));
}

}  // namespace tfcomm
