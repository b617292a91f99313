#include "tfcomm/channel_models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tfcomm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::int64_t integral_index(double v, const char* what) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-12) throw InvalidInput(std::string(what) + " must lie on the sample grid");
    return static_cast<std::int64_t>(r);
}

double jakes_cdf(double nu, double max_doppler) {
    if (nu <= -max_doppler) return 0.0;
    if (nu >= max_doppler) return 1.0;
    return 0.5 + std::asin(nu / max_doppler) / kPi;
}

}  // namespace

ScatteringProfile::ScatteringProfile(RMatrix intensities) : intensities_(std::move(intensities)) {
    if (intensities_.rows() == 0 || intensities_.rows() != intensities_.cols())
        throw InvalidDimension("scattering profile must be a non-empty square grid");
    if (!intensities_.allFinite()) throw InvalidInput("scattering profile must be finite");
    if ((intensities_.array() < 0.0).any()) throw InvalidInput("scattering profile must be nonnegative");
}

ScatteringProfile ScatteringProfile::zeros(std::size_t n) {
    if (n == 0) throw InvalidDimension("dimension must be positive");
    const auto nn = static_cast<Eigen::Index>(n);
    return ScatteringProfile(RMatrix::Zero(nn, nn));
}

ScatteringProfile ScatteringProfile::delta(std::size_t n, std::int64_t delay, std::int64_t doppler) {
    auto out = zeros(n);
    out.intensities_(static_cast<Eigen::Index>(wrap_index(delay, n)), static_cast<Eigen::Index>(wrap_index(doppler, n))) = 1.0;
    return out;
}

double ScatteringProfile::at(std::int64_t delay, std::int64_t doppler) const {
    return intensities_(static_cast<Eigen::Index>(wrap_index(delay, dim())),
                        static_cast<Eigen::Index>(wrap_index(doppler, dim())));
}

std::int64_t ScatteringProfile::max_delay() const {
    std::int64_t out = 0;
    for (Eigen::Index m = 0; m < intensities_.rows(); ++m)
        if (intensities_.row(m).maxCoeff() > 0.0) out = std::max(out, std::abs(centered_index(m, dim())));
    return out;
}

std::int64_t ScatteringProfile::max_doppler() const {
    std::int64_t out = 0;
    for (Eigen::Index l = 0; l < intensities_.cols(); ++l)
        if (intensities_.col(l).maxCoeff() > 0.0) out = std::max(out, std::abs(centered_index(l, dim())));
    return out;
}

std::size_t ScatteringProfile::support_size() const {
    return static_cast<std::size_t>((intensities_.array() > 0.0).count());
}

ScatteringProfile ScatteringProfile::scaled(double factor) const {
    if (!(factor >= 0.0)) throw InvalidInput("scale factor must be nonnegative");
    return ScatteringProfile(intensities_ * factor);
}

ScatteringProfile ScatteringProfile::normalized() const {
    const double total = total_gain();
    return total > 0.0 ? scaled(1.0 / total) : *this;
}

TFCorrelation::TFCorrelation(CMatrix values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.rows() != values_.cols())
        throw InvalidDimension("correlation grid must be a non-empty square grid");
}

Complex TFCorrelation::at(std::int64_t dn, std::int64_t dk) const {
    return values_(static_cast<Eigen::Index>(wrap_index(dn, dim())), static_cast<Eigen::Index>(wrap_index(dk, dim())));
}

SpreadingFunction from_specular(const SpecularPathSet& paths, std::size_t n) {
    if (n == 0) throw InvalidDimension("dimension must be positive");
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix coeffs = CMatrix::Zero(nn, nn);
    const auto nmax = static_cast<std::int64_t>(n);
    auto in_range = [nmax](std::int64_t v) { return 2 * v > -nmax && 2 * v <= nmax; };
    for (const auto& p : paths) {
        const auto m = integral_index(p.delay, "path delay");
        const auto l = integral_index(p.doppler, "path Doppler");
        if (!in_range(m) || !in_range(l))
            throw InvalidInput("path lies outside the centered delay-Doppler range");
        coeffs(static_cast<Eigen::Index>(wrap_index(m, n)), static_cast<Eigen::Index>(wrap_index(l, n))) += p.gain;
    }
    return SpreadingFunction(std::move(coeffs));
}

SpreadingFunction time_invariant(std::span<const Complex> taps, std::size_t n) {
    if (n == 0) throw InvalidDimension("dimension must be positive");
    if (taps.size() > n) throw InvalidInput("more taps than the cycle length");
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix coeffs = CMatrix::Zero(nn, nn);
    for (std::size_t d = 0; d < taps.size(); ++d) coeffs(static_cast<Eigen::Index>(d), 0) = taps[d];
    return SpreadingFunction(std::move(coeffs));
}

SpreadingFunction frequency_dispersive(const CVector& modulation) {
    const auto n = static_cast<std::size_t>(modulation.size());
    if (n == 0) throw InvalidDimension("dimension must be positive");
    // m[i] = sum_l S[0, l] e^{j2 pi l i / N}  =>  S[0, :] = DFT(m) / N
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix diag = CMatrix::Zero(nn, nn);
    diag.diagonal() = modulation;
    auto s = spreading_function(DiscreteChannel(std::move(diag)));
    CMatrix coeffs = CMatrix::Zero(nn, nn);
    coeffs.row(0) = s.coeffs().row(0);
    return SpreadingFunction(std::move(coeffs));
}

SpreadingFunction oscillator_impairment(std::int64_t freq_offset, std::int64_t timing_offset, const CVector& psi) {
    const auto n = static_cast<std::size_t>(psi.size());
    if (n == 0) throw InvalidDimension("dimension must be positive");
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix coeffs = CMatrix::Zero(nn, nn);
    const auto row = static_cast<Eigen::Index>(wrap_index(timing_offset, n));
    // S[dt, nu] = Psi[nu + df]
    for (std::size_t l = 0; l < n; ++l)
        coeffs(row, static_cast<Eigen::Index>(l)) =
            psi(static_cast<Eigen::Index>(wrap_index(static_cast<std::int64_t>(l) + freq_offset, n)));
    return SpreadingFunction(std::move(coeffs));
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

SpreadingFunction wssus_sample(const ScatteringProfile& profile, std::uint64_t seed) {
    const auto nn = static_cast<Eigen::Index>(profile.dim());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix coeffs(nn, nn);
    // Every cell consumes two variates so the stream layout does not depend on
    // the profile's support.
    for (Eigen::Index m = 0; m < nn; ++m)
        for (Eigen::Index l = 0; l < nn; ++l) {
            const double re = normal(rng);
            const double im = normal(rng);
            coeffs(m, l) = std::sqrt(profile.intensities()(m, l)) * Complex(re, im);
        }
    return SpreadingFunction(std::move(coeffs));
}

std::vector<SpreadingFunction> wssus_ensemble(const ScatteringProfile& profile, std::uint64_t seed, std::size_t count) {
    std::vector<SpreadingFunction> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(wssus_sample(profile, substream_seed(seed, k)));
    return out;
}

TFCorrelation tf_correlation(const ScatteringProfile& profile) {
    return TFCorrelation(transfer_transform(profile.intensities().cast<Complex>()));
}

ScatteringProfile scattering_from_correlation(const TFCorrelation& correlation) {
    const CMatrix c = inverse_transfer_transform(correlation.values());
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (c.imag().cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidInput("correlation is not the transform of a real scattering profile");
    // Clamp rounding-level negatives.
    RMatrix r = c.real();
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (r.data()[i] < 0.0 && r.data()[i] > -1e-9 * scale) r.data()[i] = 0.0;
    }
    return ScatteringProfile(std::move(r));
}

ScatteringProfile preset_profile(PresetKind kind, const PresetParams& p) {
    const auto n = p.n_dim;
    if (n == 0) throw InvalidDimension("dimension must be positive");
    const auto nn = static_cast<Eigen::Index>(n);
    const auto nmax = static_cast<std::int64_t>(n);
    RMatrix c = RMatrix::Zero(nn, nn);
    auto cell = [&](std::int64_t m, std::int64_t l) -> double& {
        return c(static_cast<Eigen::Index>(wrap_index(m, n)), static_cast<Eigen::Index>(wrap_index(l, n)));
    };

    switch (kind) {
    case PresetKind::flat_rect: {
        if (p.delay_min > p.delay_max || p.doppler_min > p.doppler_max)
            throw InvalidInput("flat_rect ranges must be nonempty");
        if (p.delay_max - p.delay_min >= nmax || p.doppler_max - p.doppler_min >= nmax)
            throw InvalidInput("flat_rect range exceeds the grid");
        for (auto m = p.delay_min; m <= p.delay_max; ++m)
            for (auto l = p.doppler_min; l <= p.doppler_max; ++l) cell(m, l) = 1.0;
        break;
    }
    case PresetKind::exponential_jakes: {
        if (!(p.delay_decay > 0.0) || !(p.max_doppler > 0.0))
            throw InvalidInput("exponential_jakes needs positive decay and maximum Doppler");
        const std::int64_t extent =
            p.delay_extent >= 0 ? p.delay_extent : static_cast<std::int64_t>(std::ceil(5.0 * p.delay_decay));
        const auto lmax = static_cast<std::int64_t>(std::ceil(p.max_doppler));
        if (extent >= nmax || 2 * lmax >= nmax) throw InvalidInput("exponential_jakes support exceeds the grid");
        for (std::int64_t l = -lmax; l <= lmax; ++l) {
            // Jakes density integrated over the bin cell [l - 1/2, l + 1/2).
            const double mass = jakes_cdf(static_cast<double>(l) + 0.5, p.max_doppler) -
                                jakes_cdf(static_cast<double>(l) - 0.5, p.max_doppler);
            if (mass <= 0.0) continue;
            for (std::int64_t m = 0; m <= extent; ++m)
                cell(m, l) = std::exp(-static_cast<double>(m) / p.delay_decay) * mass;
        }
        break;
    }
    case PresetKind::drm_like: {
        if (p.echo_delays.size() != p.echo_powers.size() || p.echo_delays.size() != p.echo_doppler_shifts.size())
            throw InvalidInput("drm_like echo lists must have equal length");
        if (!(p.doppler_spread > 0.0)) throw InvalidInput("drm_like needs a positive Doppler spread");
        for (std::size_t e = 0; e < p.echo_delays.size(); ++e) {
            if (p.echo_powers[e] < 0.0) throw InvalidInput("echo powers must be nonnegative");
            const double shift = p.echo_doppler_shifts[e];
            const auto lo = static_cast<std::int64_t>(std::floor(shift - 4.0 * p.doppler_spread));
            const auto hi = static_cast<std::int64_t>(std::ceil(shift + 4.0 * p.doppler_spread));
            if (hi - lo >= nmax) throw InvalidInput("drm_like Doppler extent exceeds the grid");
            double norm = 0.0;
            for (auto l = lo; l <= hi; ++l) {
                const double d = (static_cast<double>(l) - shift) / p.doppler_spread;
                norm += std::exp(-0.5 * d * d);
            }
            for (auto l = lo; l <= hi; ++l) {
                const double d = (static_cast<double>(l) - shift) / p.doppler_spread;
                cell(p.echo_delays[e], l) += p.echo_powers[e] * std::exp(-0.5 * d * d) / norm;
            }
        }
        break;
    }
    }
    ScatteringProfile out(std::move(c));
    return p.normalize ? out.normalized() : out;
}

PresetKind parse_preset_kind(const std::string& name) {
    if (name == "exponential_jakes") return PresetKind::exponential_jakes;
    if (name == "drm_like") return PresetKind::drm_like;
    if (name == "flat_rect") return PresetKind::flat_rect;
    throw InvalidInput("unknown preset kind '" + name + "'");
}

std::string to_string(PresetKind kind) {
    switch (kind) {
    case PresetKind::exponential_jakes: return "exponential_jakes";
    case PresetKind::drm_like: return "drm_like";
    case PresetKind::flat_rect: return "flat_rect";
    }
    return "unknown";
}

}  // namespace tfcomm
