#pragma once
// Second- and fourth-order moments of the Gaussian-kernelized input when
// the input and the dictionary elements are zero-mean Gaussian.
//
// Every moment is an expectation E{exp(s z)} of a quadratic form
// z = y' Q y in the stacked Gaussian vector y = (u, u_w1, ..., u_wt), which
// equals det(I - 2 s Q R_y)^{-1/2} with s = -1/(2 xi^2). Dictionary elements
// are mutually independent and independent of the input; the first L of
// them share the input autocorrelation R_uu and the rest have R_uu_tilde.

#include "kaf/kernel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <unordered_map>

namespace kaf {

struct DictionaryStatistics {
    std::size_t q = 1;  // input dimension
    std::size_t M = 0;  // dictionary size
    std::size_t L = 0;  // elements matching the input statistics, 0 <= L <= M
    Eigen::MatrixXd R_uu;        // q x q
    Eigen::MatrixXd R_uu_tilde;  // q x q, used by elements L..M-1

    // Throws std::invalid_argument on shape, symmetry or PSD violations.
    void validate() const;
    bool matched(std::size_t element) const { return element < L; }
    const Eigen::MatrixXd& element_autocorrelation(std::size_t element) const {
        return matched(element) ? R_uu : R_uu_tilde;
    }
};

// det(I - 2 s Q Ry)^{-1/2}. Throws NumericalError if the determinant is not
// positive (the MGF does not exist at s).
double quadratic_mgf(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Ry, double s);

// Block matrix of the quadratic form sum_k |u - u_wk|^2 over `terms`
// dictionary elements: terms*I in the top-left block, -I on the first block
// row and column, I on the remaining diagonal blocks. terms = 2 and 4 give
// the forms used for R_kk and the K tensor.
Eigen::MatrixXd sum_of_distances_form(std::size_t terms, std::size_t q);

// Covariance of (u, u_w[idx0], ..., u_w[idx_{t-1}]) under the block rule.
Eigen::MatrixXd stacked_covariance(const DictionaryStatistics& stats, std::span<const std::size_t> indices);

// R_kk(i,j) = E{kappa_i kappa_j}; exactly symmetric.
Eigen::MatrixXd compute_Rkk(const DictionaryStatistics& stats, const KernelParams& p);

// E{kappa_i kappa_j kappa_l kappa_p}; 0-based indices.
double compute_K(const DictionaryStatistics& stats, const KernelParams& p, std::size_t i, std::size_t j,
                 std::size_t l, std::size_t pp);

// Fourth-order moment tensor. A value depends only on which indices
// coincide and on the matched/unmatched membership of each distinct index,
// so the M^4 entries are stored as one value per such pattern.
class KTensor {
public:
    KTensor(const DictionaryStatistics& stats, const KernelParams& p);

    std::size_t size() const { return M_; }
    std::size_t pattern_count() const { return values_.size(); }
    double operator()(std::size_t i, std::size_t j, std::size_t l, std::size_t p) const;

    // Canonical pattern key of an index quadruple.
    std::uint32_t pattern_key(std::size_t i, std::size_t j, std::size_t l, std::size_t p) const;

private:
    std::size_t M_;
    std::size_t L_;
    std::unordered_map<std::uint32_t, double> values_;
};

KTensor k_tensor(const DictionaryStatistics& stats, const KernelParams& p);

}  // namespace kaf
