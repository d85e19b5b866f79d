// SPDX-License-Identifier: Apache-2.0
//
// Zero-forcing precoding with equal per-user power and the resulting sum rate.

#pragma once

#include <cstddef>
#include <stdexcept>

#include "mra/channel_model.hpp"

namespace mra {

// Gram matrices whose estimated condition number exceeds this are treated as singular.
inline constexpr double kGramConditionLimit = 1e12;

/// H H^H is not numerically invertible (degenerate antenna configuration).
class SingularGram : public std::runtime_error {
public:
    SingularGram() : std::runtime_error("channel Gram matrix is numerically singular") {}
};

struct PrecodingMatrix {
    CMatrix F;  // N x K, column k serves user k
    double power = 0.0;
};

/// F = H^H (H H^H)^{-1}, each column rescaled to squared norm P/K.
PrecodingMatrix zf_precoder(const CMatrix& H, double power);

double sinr(const CMatrix& H, const PrecodingMatrix& F, double noise_var, std::size_t k);

/// Sum over users of log2(1 + SINR_k), bits/s/Hz.
double sum_rate(const CMatrix& H, const PrecodingMatrix& F, double noise_var);

/// Closed-form ZF sum rate: sum_k log2(1 + (P/K)/sigma^2 / [(H H^H)^{-1}]_kk).
double zf_sum_rate(const CMatrix& H, double power, double noise_var);

/// Diagonal of (H H^H)^{-1}; throws SingularGram.
Vector inverse_gram_diagonal(const CMatrix& H);

}  // namespace mra
