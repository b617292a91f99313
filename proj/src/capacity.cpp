#include "tfcomm/capacity.hpp"

#include <cmath>

namespace tfcomm {

double awgn_capacity(double snr) {
    if (!(snr > 0.0)) throw InvalidInput("SNR must be positive");
    return std::log1p(snr);
}

CapacityEstimate capacity_low_snr(const CapacityQuery& q) {
    if (!(q.snr > 0.0)) throw InvalidInput("SNR must be positive");
    if (!(q.delay_cell > 0.0) || !(q.doppler_cell > 0.0)) throw InvalidInput("cell dimensions must be positive");
    const double area = q.delay_cell * q.doppler_cell;
    const RMatrix& c = q.profile.intensities();
    double penalty = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (c.data()[i] > 0.0) penalty += std::log1p(q.snr * c.data()[i]);
    CapacityEstimate out;
    out.penalty = penalty * area;
    out.awgn = awgn_capacity(q.snr);
    out.capacity = out.awgn - out.penalty;
    return out;
}

BandwidthSweep bandwidth_sweep(const ScatteringProfile& profile, double delay_cell, double doppler_cell,
                               double power_budget, const std::vector<double>& bandwidths) {
    if (!(power_budget > 0.0)) throw InvalidInput("power budget must be positive");
    if (bandwidths.empty()) throw InvalidInput("bandwidth grid must not be empty");
    BandwidthSweep out;
    CapacityQuery q{profile, delay_cell, doppler_cell, 1.0};
    for (const double w : bandwidths) {
        if (!(w > 0.0)) throw InvalidInput("bandwidths must be positive");
        q.snr = power_budget / w;
        const auto est = capacity_low_snr(q);
        out.points.push_back({w, q.snr, w * est.capacity, est.capacity, est.penalty});
    }
    for (std::size_t i = 1; i < out.points.size(); ++i)
        if (out.points[i].rate > out.points[out.argmax].rate) out.argmax = i;
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw InvalidInput("invalid logarithmic range");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
    return out;
}

CapacityQuery uniform_capacity_query(std::size_t n, std::size_t cells, double area, double snr) {
    if (cells == 0 || cells > n) throw InvalidInput("cell count must be in 1..N");
    if (!(area > 0.0)) throw InvalidInput("support area must be positive");
    auto nn = static_cast<Eigen::Index>(n);
    RMatrix c = RMatrix::Zero(nn, nn);
    for (std::size_t i = 0; i < cells; ++i) c(static_cast<Eigen::Index>(i), 0) = 1.0 / area;
    return CapacityQuery{ScatteringProfile(std::move(c)), area / static_cast<double>(cells), 1.0, snr};
}

}  // namespace tfcomm
