#pragma once
// Forward-backward splitting for KLMS: proximity operators of the l1 and
// reweighted l1 penalties, the FOBOS-KLMS step with dictionary pruning,
// and the mean-stability step-size bound.

#include "kaf/filter.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kaf {

enum class RegularizerKind { none, l1, adaptive_l1 };

RegularizerKind parse_regularizer_kind(std::string_view s);
std::string_view to_string(RegularizerKind k);

struct RegularizerSpec {
    RegularizerKind kind = RegularizerKind::none;
    double lambda = 0.0;
    double epsilon_alpha = 1e-2;  // only read by adaptive_l1

    void validate() const;
};

// sign(a_m) * max(|a_m| - threshold, 0)
std::vector<double> prox_l1(std::span<const double> alpha, double threshold);

// sign(a_m) * max(|a_m| - base_threshold / (|prev_m| + eps), 0).
// alpha_prev may be shorter than alpha; missing entries (atoms admitted this
// step) count as 0, which gives them the largest weight 1/eps.
std::vector<double> prox_adaptive_l1(std::span<const double> alpha, double base_threshold,
                                     std::span<const double> alpha_prev, double eps);

// Per-step diagnostics of fobos_klms_step.
struct FobosTrace {
    std::vector<double> correction;  // alpha_hat - prox(alpha_hat), before pruning
    std::size_t pruned = 0;
};

// Gradient step (klms_step, with possible admission), proximity step, then
// removal of every center whose coefficient is exactly zero. With
// reg.kind == none this is klms_step.
StepOutcome fobos_klms_step(FilterState& state, InputView u, double d, const RegularizerSpec& reg,
                            FobosTrace* trace = nullptr);

struct StabilityBound {
    double lambda_max = 0.0;  // largest eigenvalue of Rkk
    double eta_max = 0.0;     // 2 / lambda_max
    // r_md + (M-1) r_od, present when Rkk has one diagonal and one
    // off-diagonal value.
    std::optional<double> closed_form_lambda_max;
};

// Throws std::invalid_argument for non-square or non-symmetric input and
// NumericalError when the largest eigenvalue is not positive.
StabilityBound stability_bound(const Eigen::MatrixXd& Rkk);

}  // namespace kaf
