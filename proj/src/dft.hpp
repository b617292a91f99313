#pragma once

#include "tfcomm/types.hpp"

namespace tfcomm::detail {

// X[k] = sum_i x[i] e^{-j2 pi k i / N}
CVector dft(const CVector& x);
// x[i] = sum_k X[k] e^{+j2 pi k i / N}, no 1/N factor
CVector idft_unscaled(const CVector& x);

// Column-wise transforms of a matrix.
CMatrix dft_columns(const CMatrix& m);
CMatrix idft_columns_unscaled(const CMatrix& m);

}  // namespace tfcomm::detail
