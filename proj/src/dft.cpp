#include "dft.hpp"

#include <unsupported/Eigen/FFT>

namespace tfcomm::detail {

namespace {

Eigen::FFT<double> make_fft() {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    return fft;
}

}  // namespace

CVector dft(const CVector& x) {
    if (x.size() == 0) return x;
    auto fft = make_fft();
    CVector out(x.size());
    fft.fwd(out, x);
    return out;
}

CVector idft_unscaled(const CVector& x) {
    if (x.size() == 0) return x;
    auto fft = make_fft();
    CVector out(x.size());
    fft.inv(out, x);
    return out;
}

CMatrix dft_columns(const CMatrix& m) {
    CMatrix out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = dft(m.col(c));
    return out;
}

CMatrix idft_columns_unscaled(const CMatrix& m) {
    CMatrix out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c) = idft_unscaled(m.col(c));
    return out;
}

}  // namespace tfcomm::detail
