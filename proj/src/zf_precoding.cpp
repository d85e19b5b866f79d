// SPDX-License-Identifier: Apache-2.0

#include "mra/zf_precoding.hpp"

#include <cmath>
#include <string>

namespace mra {

namespace {

void require_zf_shape(const CMatrix& H)
{
    if (H.rows() < 1 || H.rows() > H.cols())
        throw std::invalid_argument("zero-forcing requires 1 <= K <= N, got K=" +
                                    std::to_string(H.rows()) + " N=" + std::to_string(H.cols()));
}

Eigen::LLT<CMatrix> factor_gram(const CMatrix& H)
{
    require_zf_shape(H);
    CMatrix gram = H * H.adjoint();
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success || !(llt.rcond() * kGramConditionLimit >= 1.0))
        throw SingularGram();
    return llt;
}

}  // namespace

Vector inverse_gram_diagonal(const CMatrix& H)
{
    const auto llt = factor_gram(H);
    const auto k = H.rows();
    const CMatrix inv = llt.solve(CMatrix::Identity(k, k));
    Vector d(k);
    for (Eigen::Index i = 0; i < k; ++i)
        d[i] = inv(i, i).real();
    return d;
}

PrecodingMatrix zf_precoder(const CMatrix& H, double power)
{
    if (!(power > 0.0))
        throw std::invalid_argument("zf_precoder: power must be positive");
    const auto llt = factor_gram(H);
    const auto k = H.rows();
    CMatrix F = H.adjoint() * llt.solve(CMatrix::Identity(k, k));
    const double target = std::sqrt(power / static_cast<double>(k));
    for (Eigen::Index c = 0; c < k; ++c)
        F.col(c) *= target / F.col(c).norm();
    return {std::move(F), power};
}

double sinr(const CMatrix& H, const PrecodingMatrix& F, double noise_var, std::size_t k)
{
    if (F.F.rows() != H.cols() || F.F.cols() != H.rows())
        throw std::invalid_argument("sinr: H and F dimensions disagree");
    if (!(noise_var > 0.0))
        throw std::invalid_argument("sinr: noise_var must be positive");
    if (k >= static_cast<std::size_t>(H.rows()))
        throw std::out_of_range("sinr: user index " + std::to_string(k) + " out of range");

    const auto row = static_cast<Eigen::Index>(k);
    // H.row(k) already holds h_k^H.
    const Eigen::RowVectorXcd responses = H.row(row) * F.F;
    double interference = 0.0;
    for (Eigen::Index i = 0; i < responses.size(); ++i)
        if (i != row)
            interference += std::norm(responses[i]);
    return std::norm(responses[row]) / (interference + noise_var);
}

double sum_rate(const CMatrix& H, const PrecodingMatrix& F, double noise_var)
{
    double total = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(H.rows()); ++k)
        total += std::log2(1.0 + sinr(H, F, noise_var, k));
    return total;
}

double zf_sum_rate(const CMatrix& H, double power, double noise_var)
{
    if (!(power > 0.0) || !(noise_var > 0.0))
        throw std::invalid_argument("zf_sum_rate: power and noise_var must be positive");
    const Vector d = inverse_gram_diagonal(H);
    const double snr_per_user = power / static_cast<double>(H.rows()) / noise_var;
    double total = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k)
        total += std::log2(1.0 + snr_per_user / d[k]);
    return total;
}

}  // namespace mra
