#include "tfcomm/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <Eigen/SVD>

#include "tfcomm/ofdm_modem.hpp"

namespace tfcomm {

namespace {

void require_support(const Support& support) {
    if (support.empty()) throw InvalidInput("support must not be empty");
}

}  // namespace

CVector dirac_train(std::size_t n, std::size_t period, std::optional<CVector> weights) {
    if (n == 0 || period == 0) throw InvalidDimension("dimension and period must be positive");
    if (n % period != 0) throw InvalidDimension("period must divide N");
    const auto count = n / period;
    if (weights) {
        if (static_cast<std::size_t>(weights->size()) != count)
            throw InvalidInput("need one weight per impulse");
        for (Eigen::Index i = 0; i < weights->size(); ++i)
            if (std::abs(std::abs((*weights)(i)) - 1.0) > 1e-12) throw InvalidInput("weights must have unit modulus");
    }
    CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::size_t j = 0; j < count; ++j)
        x(static_cast<Eigen::Index>(j * period)) = amp * (weights ? (*weights)(static_cast<Eigen::Index>(j)) : Complex(1.0));
    return x;
}

Support centered_rectangle(std::size_t n_delays, std::size_t n_dopplers) {
    Support out;
    const auto d0 = -static_cast<std::int64_t>(n_delays / 2);
    const auto l0 = -static_cast<std::int64_t>(n_dopplers / 2);
    for (std::size_t i = 0; i < n_delays; ++i)
        for (std::size_t j = 0; j < n_dopplers; ++j)
            out.push_back({d0 + static_cast<std::int64_t>(i), l0 + static_cast<std::int64_t>(j)});
    return out;
}

CMatrix build_sounding_matrix(const CVector& x, const Support& support) {
    if (x.size() == 0) throw InvalidDimension("sounding signal must be non-empty");
    require_support(support);
    CMatrix out(x.size(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = apply_tf_shift(x, support[j].delay, support[j].doppler);
    return out;
}

CVector simulate_observation(const CVector& x, const Support& support, const CVector& coeffs) {
    if (static_cast<std::size_t>(coeffs.size()) != support.size())
        throw InvalidDimension("need one coefficient per support entry");
    return build_sounding_matrix(x, support) * coeffs;
}

IdentificationResult identify(const CVector& y, const CVector& x, const Support& support, double rank_tolerance) {
    if (y.size() != x.size()) throw InvalidDimension("observation and sounding lengths differ");
    const CMatrix xm = build_sounding_matrix(x, support);
    Eigen::BDCSVD<CMatrix> svd(xm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const auto rank = static_cast<std::size_t>((sv.array() > rank_tolerance * smax).count());
    if (support.size() > static_cast<std::size_t>(x.size()) || rank < support.size())
        throw IdentifiabilityError("sounding matrix has numerical rank " + std::to_string(rank) + " < " +
                                       std::to_string(support.size()) + " unknowns",
                                   rank, support.size());
    IdentificationResult out;
    svd.setThreshold(rank_tolerance);
    out.estimate = svd.solve(y);
    out.residual = (y - xm * out.estimate).norm();
    out.condition_number = smax / sv(sv.size() - 1);
    out.rank = rank;
    return out;
}

SoundingQuality sounding_quality(const CVector& x, const Support& support) {
    const CMatrix xm = build_sounding_matrix(x, support);
    Eigen::BDCSVD<CMatrix> svd(xm);
    const Eigen::VectorXd& sv = svd.singularValues();
    SoundingQuality out;
    const double smin = sv(sv.size() - 1);
    out.condition_number = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();

    const auto n = static_cast<std::size_t>(x.size());
    const Pulse px(x);
    const CMatrix amb = cross_ambiguity(px, px);
    std::set<std::pair<std::size_t, std::size_t>> diffs;
    for (const auto& p : support)
        for (const auto& q : support) {
            const auto dm = wrap_index(p.delay - q.delay, n);
            const auto dl = wrap_index(p.doppler - q.doppler, n);
            if (dm != 0 || dl != 0) diffs.insert({dm, dl});
        }
    for (const auto& [dm, dl] : diffs)
        out.max_offgrid_autoambiguity =
            std::max(out.max_offgrid_autoambiguity, std::abs(amb(static_cast<Eigen::Index>(dm), static_cast<Eigen::Index>(dl))));
    return out;
}

SpreadingFunction spreading_from_support(std::size_t n, const Support& support, const CVector& coeffs) {
    if (static_cast<std::size_t>(coeffs.size()) != support.size())
        throw InvalidDimension("need one coefficient per support entry");
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix grid = CMatrix::Zero(nn, nn);
    for (std::size_t j = 0; j < support.size(); ++j)
        grid(static_cast<Eigen::Index>(wrap_index(support[j].delay, n)),
             static_cast<Eigen::Index>(wrap_index(support[j].doppler, n))) += coeffs(static_cast<Eigen::Index>(j));
    return SpreadingFunction(std::move(grid));
}

}  // namespace tfcomm
