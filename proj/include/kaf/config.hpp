#pragma once
// Experiment configuration: flat `dotted.key = value` lines, `#` comments.
//
//   system = example1
//   kernel.xi = 0.02
//   filter.eta = 0.01
//   input.segments = 20000@0.35, 20000@0.15
//   dictionary.spec = 10@0.35 ; 10@0.15 + 10@0.35
//
// dictionary.spec lists one dictionary per segment separated by `;` (or a
// single one for all segments); `+` concatenates blocks. Numbers accept
// sqrt(x).

#include "kaf/bench.hpp"
#include "kaf/transient.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kaf {

struct ConfigIssue {
    std::size_t line = 0;  // 0 when not tied to a line
    std::string key;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct ExperimentConfig {
    McConfig mc;
    bool model_enabled = false;
    std::optional<std::size_t> model_L;  // checked against the last segment
    std::size_t moment_samples = 1000000;
    double neps_tolerance = 1e-3;
    ToleranceMode neps_mode = ToleranceMode::relative;
    std::string output_path = "out";
};

double default_noise_variance(SystemKind kind);

// Parses and validates; throws ConfigError listing every violation.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Helpers shared with the command line.
double parse_number(std::string_view s);  // throws std::invalid_argument
std::vector<Segment> parse_segments(std::string_view s);
std::vector<DictionarySpec> parse_dictionary_specs(std::string_view s);

}  // namespace kaf
