#include "kaf/moments.hpp"

#include "kaf/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kaf {

namespace {

void check_psd(const Eigen::MatrixXd& R, std::size_t q, const char* name) {
    if (static_cast<std::size_t>(R.rows()) != q || static_cast<std::size_t>(R.cols()) != q)
        throw std::invalid_argument(std::string(name) + " must be q x q");
    const double scale = std::max(R.cwiseAbs().maxCoeff(), 1e-300);
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument(std::string(name) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12 * scale)
        throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
}

}  // namespace

void DictionaryStatistics::validate() const {
    if (q == 0) throw std::invalid_argument("input dimension q must be >= 1");
    if (L > M) throw std::invalid_argument("matched count L must not exceed M");
    check_psd(R_uu, q, "R_uu");
    if (L < M) check_psd(R_uu_tilde, q, "R_uu_tilde");
}

double quadratic_mgf(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Ry, double s) {
    if (Q.rows() != Q.cols() || Q.rows() != Ry.rows() || Ry.rows() != Ry.cols())
        throw std::invalid_argument("quadratic_mgf: Q and Ry must be square of equal size");
    const Eigen::Index n = Q.rows();
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - 2.0 * s * Q * Ry;
    const double det = A.partialPivLu().determinant();
    if (!(det > 0.0) || !std::isfinite(det))
        throw NumericalError("quadratic_mgf: det(I - 2sQR) = " + std::to_string(det) + " is not positive");
    return 1.0 / std::sqrt(det);
}

Eigen::MatrixXd sum_of_distances_form(std::size_t terms, std::size_t q) {
    const auto nq = static_cast<Eigen::Index>(q);
    const auto n = static_cast<Eigen::Index>((terms + 1) * q);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nq, nq);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    Q.topLeftCorner(nq, nq) = static_cast<double>(terms) * I;
    for (std::size_t k = 1; k <= terms; ++k) {
        const auto off = static_cast<Eigen::Index>(k * q);
        Q.block(0, off, nq, nq) = -I;
        Q.block(off, 0, nq, nq) = -I;
        Q.block(off, off, nq, nq) = I;
    }
    return Q;
}

Eigen::MatrixXd stacked_covariance(const DictionaryStatistics& stats, std::span<const std::size_t> idx) {
    const auto q = static_cast<Eigen::Index>(stats.q);
    const auto n = static_cast<Eigen::Index>((idx.size() + 1) * stats.q);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
    R.topLeftCorner(q, q) = stats.R_uu;
    // Cross-correlation between distinct elements is zero; a repeated index
    // is the same random vector, so its off-diagonal block is its own
    // autocorrelation.
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            if (idx[a] == idx[b])
                R.block(static_cast<Eigen::Index>(a + 1) * q, static_cast<Eigen::Index>(b + 1) * q, q, q) =
                    stats.element_autocorrelation(idx[a]);
    return R;
}

Eigen::MatrixXd compute_Rkk(const DictionaryStatistics& stats, const KernelParams& p) {
    stats.validate();
    const Eigen::MatrixXd Q3 = sum_of_distances_form(2, stats.q);
    const double s = -p.inv_two_xi_sq();
    const auto M = static_cast<Eigen::Index>(stats.M);
    Eigen::MatrixXd R(M, M);
    for (std::size_t i = 0; i < stats.M; ++i) {
        for (std::size_t j = i; j < stats.M; ++j) {
            const std::array<std::size_t, 2> idx{i, j};
            const double v = quadratic_mgf(Q3, stacked_covariance(stats, idx), s);
            R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return R;
}

namespace {

std::uint32_t fourth_order_key(std::size_t L, std::size_t i, std::size_t j, std::size_t l, std::size_t p) {
    const std::array<std::size_t, 4> idx{i, j, l, p};
    std::array<std::uint32_t, 4> code{0, 0, 0, 0};
    std::size_t n = 0;
    for (std::size_t a = 0; a < 4; ++a) {
        bool seen = false;
        for (std::size_t b = 0; b < a; ++b) seen = seen || idx[b] == idx[a];
        if (seen) continue;
        std::uint32_t mult = 0;
        for (std::size_t b = 0; b < 4; ++b) mult += idx[b] == idx[a] ? 1u : 0u;
        code[n++] = mult * 2u + (idx[a] < L ? 1u : 0u);
    }
    std::sort(code.begin(), code.end(), std::greater<>());
    return code[0] | (code[1] << 4) | (code[2] << 8) | (code[3] << 12);
}

// Evaluates the moment on a canonical quadruple rebuilt from the key, so
// every quadruple of one pattern yields bit-identical values.
double fourth_order_value(const DictionaryStatistics& stats, std::uint32_t key, const Eigen::MatrixXd& Q5, double s) {
    DictionaryStatistics canon = stats;
    std::array<std::size_t, 4> idx{};
    std::vector<bool> matched;
    std::size_t pos = 0;
    for (int k = 0; k < 4; ++k) {
        const std::uint32_t code = (key >> (4 * k)) & 0xFu;
        if (code == 0) break;
        const std::size_t element = matched.size();
        matched.push_back((code & 1u) != 0);
        for (std::uint32_t r = 0; r < code / 2u; ++r) idx[pos++] = element;
    }
    // Synthetic elements: matched ones first, so canon.L splits them.
    std::vector<std::size_t> relabel(matched.size());
    std::size_t next = 0;
    for (std::size_t e = 0; e < matched.size(); ++e)
        if (matched[e]) relabel[e] = next++;
    canon.L = next;
    for (std::size_t e = 0; e < matched.size(); ++e)
        if (!matched[e]) relabel[e] = next++;
    canon.M = next;
    for (auto& v : idx) v = relabel[v];
    return quadratic_mgf(Q5, stacked_covariance(canon, idx), s);
}

}  // namespace

double compute_K(const DictionaryStatistics& stats, const KernelParams& p, std::size_t i, std::size_t j,
                 std::size_t l, std::size_t pp) {
    stats.validate();
    if (i >= stats.M || j >= stats.M || l >= stats.M || pp >= stats.M)
        throw std::out_of_range("compute_K: index out of range");
    return fourth_order_value(stats, fourth_order_key(stats.L, i, j, l, pp), sum_of_distances_form(4, stats.q),
                              -p.inv_two_xi_sq());
}

KTensor::KTensor(const DictionaryStatistics& stats, const KernelParams& p) : M_(stats.M), L_(stats.L) {
    stats.validate();
    const Eigen::MatrixXd Q5 = sum_of_distances_form(4, stats.q);
    const double s = -p.inv_two_xi_sq();
    // Every pattern has a representative among sorted quadruples.
    for (std::size_t i = 0; i < M_; ++i)
        for (std::size_t j = i; j < M_; ++j)
            for (std::size_t l = j; l < M_; ++l)
                for (std::size_t pp = l; pp < M_; ++pp) {
                    const auto key = pattern_key(i, j, l, pp);
                    if (!values_.count(key)) values_.emplace(key, fourth_order_value(stats, key, Q5, s));
                }
}

std::uint32_t KTensor::pattern_key(std::size_t i, std::size_t j, std::size_t l, std::size_t p) const {
    return fourth_order_key(L_, i, j, l, p);
}

double KTensor::operator()(std::size_t i, std::size_t j, std::size_t l, std::size_t p) const {
    return values_.at(pattern_key(i, j, l, p));
}

KTensor k_tensor(const DictionaryStatistics& stats, const KernelParams& p) { return KTensor(stats, p); }

}  // namespace kaf
