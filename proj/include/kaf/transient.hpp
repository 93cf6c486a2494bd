#pragma once
// Transient and steady-state mean-square model of KLMS over a fixed
// dictionary. Weight-error covariances are carried in lexicographic form:
// entry (i, j) of an M x M matrix sits at i + j*M.

#include "kaf/bench.hpp"
#include "kaf/error.hpp"
#include "kaf/moments.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kaf {

class ModelUnstable : public NumericalError {
public:
    ModelUnstable() : NumericalError("model unstable at this step size") {}
};

struct MomentEstimate {
    double d2 = 0.0;              // E{d^2}
    Eigen::VectorXd p_kd;         // E{d kappa}
};

inline constexpr std::size_t kMomentBurnIn = 1000;

// Sample averages of d^2 and d*kappa over a stationary stream driven at
// input deviation sigma, after a burn-in, for one realized dictionary.
// Throws std::invalid_argument when n_samples < 1000.
MomentEstimate estimate_moments(const SystemModel& system, std::span<const InputVector> dictionary, double sigma,
                                const KernelParams& p, std::size_t n_samples, std::uint64_t seed);

// Same averages taken over the dictionary ensemble: every sample pairs the
// stream with a fresh draw of each block's elements, so all entries of a
// block share one value. Entries follow the block order of `spec`.
MomentEstimate estimate_ensemble_moments(const SystemModel& system, const DictionarySpec& spec, double sigma,
                                         const KernelParams& p, std::size_t n_samples, std::uint64_t seed);

struct WienerSolution {
    Eigen::VectorXd alpha_opt;
    double J_min = 0.0;
};

// Throws NumericalError when Rkk is not positive definite.
WienerSolution wiener_and_jmin(const Eigen::MatrixXd& Rkk, const Eigen::VectorXd& p_kd, double d2);

// E{v_{n+1}} = (I - eta Rkk) E{v_n}; returns v_0 .. v_{N-1}.
std::vector<Eigen::VectorXd> mean_weight_trajectory(const Eigen::MatrixXd& Rkk, double eta, const Eigen::VectorXd& v0,
                                                    std::size_t N);

// I - eta (I (x) Rkk + Rkk (x) I) + eta^2 G3 with G3[i+jM, l+pM] = K(i,j,l,p).
Eigen::MatrixXd build_G(const Eigen::MatrixXd& Rkk, const KTensor& K, double eta);

Eigen::VectorXd lexicographic(const Eigen::MatrixXd& C);
Eigen::MatrixXd unlexicographic(const Eigen::VectorXd& c, std::size_t M);

struct TransientModel {
    Eigen::MatrixXd G;
    Eigen::MatrixXd Rkk;
    Eigen::VectorXd r_kk;
    double J_min = 0.0;
    double eta = 0.0;
    Eigen::VectorXd alpha_opt;
    Eigen::VectorXd c0;     // lexicographic alpha_opt alpha_opt'
    Eigen::VectorXd c_inf;  // empty when unstable
    double spectral_radius = 0.0;
    bool stable = false;

    std::size_t order() const { return static_cast<std::size_t>(Rkk.rows()); }
};

// Cold start alpha_0 = 0, so v_0 = -alpha_opt.
TransientModel build_transient_model(const Eigen::MatrixXd& Rkk, const KTensor& K, double eta,
                                     const WienerSolution& wiener);

struct SteadyState {
    Eigen::VectorXd c_inf;
    double J_ms_inf = 0.0;
    double J_ex_inf = 0.0;
};

// Throws ModelUnstable when the spectral radius of G is >= 1 - 1e-9.
SteadyState steady_state(const TransientModel& model);

// c_v(0) .. c_v(N-1) by direct iteration of c <- G c + eta^2 J_min r_kk.
std::vector<Eigen::VectorXd> cv_trajectory(const TransientModel& model, std::size_t N);

// c_v(n) = c_inf + V diag(lambda)^n V'(c0 - c_inf) from the eigendecomposition
// of the symmetric G.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const TransientModel& model);

    Eigen::VectorXd cv(std::size_t n) const;
    double excess_mse(std::size_t n) const;
    double distance_to_steady_state(std::size_t n) const;  // |c_v(n) - c_inf|_2

private:
    Eigen::VectorXd lambda_;
    Eigen::MatrixXd V_;
    Eigen::VectorXd z_;         // V'(c0 - c_inf)
    Eigen::VectorXd rv_;        // V' r_kk
    Eigen::VectorXd c_inf_;
    double ex_inf_ = 0.0;
    std::size_t order_ = 0;
};

enum class ToleranceMode { absolute, relative };

struct ModelCurve {
    std::vector<double> J_ms;
    std::vector<double> J_ex;
    std::optional<std::size_t> n_eps;
};

// J_ex(n) = r_kk' c_v(n), J_ms = J_min + J_ex. n_eps uses the absolute
// tolerance 1e-3 against model.c_inf, or against the last element of cv_seq
// when the model carries no steady state.
ModelCurve mse_curve(const TransientModel& model, std::span<const Eigen::VectorXd> cv_seq, const Eigen::MatrixXd& Rkk);

// Smallest n with |c_inf - c_v(n)|_2 <= tol (relative mode: tol * |c_inf|_2).
std::optional<std::size_t> convergence_iteration(std::span<const Eigen::VectorXd> cv_seq, const Eigen::VectorXd& c_inf,
                                                 double tol = 1e-3, ToleranceMode mode = ToleranceMode::absolute);

// Spectral variant, searching up to max_iter.
std::optional<std::size_t> convergence_iteration(const SpectralPropagator& prop, const Eigen::VectorXd& c_inf,
                                                 double tol, ToleranceMode mode, std::size_t max_iter);

// N-point curve of a stable model via the spectral propagator.
ModelCurve model_curve(const TransientModel& model, std::size_t N, double tol = 1e-3,
                       ToleranceMode mode = ToleranceMode::relative);

// Model of one segment of a fixed-dictionary experiment. Blocks whose
// deviation equals the input deviation are matched; the others must share a
// single deviation. Statistics list matched blocks first.
struct SegmentModelInput {
    SystemKind system = SystemKind::example1;
    double noise_variance = 0.0;
    KernelParams kernel{1.0};
    double eta = 0.01;
    double sigma = 1.0;  // input deviation of the segment
    DictionarySpec dictionary;
    std::size_t moment_samples = 1000000;
    std::uint64_t seed = 1;
};

struct SegmentModel {
    DictionarySpec ordered;  // matched blocks first
    DictionaryStatistics stats;
    MomentEstimate moments;
    TransientModel model;
    StabilityBound bound;
};

SegmentModel build_segment_model(const SegmentModelInput& in);

}  // namespace kaf
