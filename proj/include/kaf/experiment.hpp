#pragma once
// Runs a configured experiment and writes curves.csv and summary.csv.

#include "kaf/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kaf {

// Quantities of the last segment's model, as reported in summary.csv.
struct ExperimentSummary {
    bool model_run = false;
    bool unstable = false;
    double J_min_db = 0.0;
    double J_ms_inf_db = 0.0;
    double J_ex_inf_db = 0.0;
    std::optional<std::size_t> n_eps;  // counted from the start of the run
    double eta_max = 0.0;
};

struct ExperimentResult {
    McResult mc;
    // Modeled J_ms(n) in dB per iteration; empty when the model is disabled,
    // NaN inside segments whose model is unstable.
    std::vector<double> model_db;
    std::vector<SegmentModel> segment_models;
    ExperimentSummary summary;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double v);

std::string curves_csv(const ExperimentResult& r);
std::string summary_csv(const ExperimentResult& r);

// Creates `dir` if needed and writes both files.
void write_artifacts(const ExperimentResult& r, const std::filesystem::path& dir);

}  // namespace kaf
