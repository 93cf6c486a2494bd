#pragma once
// Kernel LMS with coherence-based dictionary growth.

#include "kaf/kernel.hpp"

#include <span>
#include <vector>

namespace kaf {

struct StepOutcome {
    double prediction = 0.0;  // a-priori estimate, pre-update coefficients
    double error = 0.0;       // desired - prediction
    bool admitted = false;    // dictionary grew this step
};

// Online learner state. alpha[m] is the coefficient of dictionary center m.
struct FilterState {
    FilterState(std::size_t dim, KernelParams params, double eta, double mu0);

    Dictionary dictionary;
    std::vector<double> alpha;
    KernelParams params;
    double eta;
    double mu0;

    std::size_t size() const { return alpha.size(); }

    // Scratch for the kernelized input of the last step; holds kappa_{omega,n}
    // over the post-admission dictionary after a step.
    std::vector<double> kvec;
};

// True iff max(kvec) <= mu0; true for an empty vector.
bool coherence_admit(std::span<const double> kvec, double mu0);

// One CS-KLMS iteration: coherence test, optional admission with a zero
// coefficient, then alpha += eta * e * kappa over the (possibly extended)
// dictionary.
StepOutcome klms_step(FilterState& state, InputView u, double d);

// LMS update over a frozen dictionary: no admission, no pruning.
StepOutcome lms_step_fixed(FilterState& state, InputView u, double d);

double predict(const FilterState& state, InputView u);

// Largest kernel value between distinct centers; 0 for fewer than two.
double dictionary_coherence(const Dictionary& dict, const KernelParams& p);

}  // namespace kaf
