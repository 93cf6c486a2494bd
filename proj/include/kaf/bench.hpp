#pragma once
// Benchmark systems, regime-switching inputs, random dictionaries and the
// Monte Carlo harness that averages learning curves over independent runs.

#include "kaf/filter.hpp"
#include "kaf/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace kaf {

// NaN passes through so diverged runs stay visible.
inline double to_db(double x) {
    if (std::isnan(x)) return x;
    return x > 0.0 ? std::max(10.0 * std::log10(x), -150.0) : -150.0;
}
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

enum class SystemKind { example1, example2 };

SystemKind parse_system_kind(std::string_view s);
std::string_view to_string(SystemKind k);
std::size_t input_dimension(SystemKind k);

// example1: y(n) = y(n-1)/(1+y(n-1)^2) + u(n-1)^3, d(n) = y(n) + z(n), q = 1.
// example2: y(n) = a'u_n - 0.2 y(n-1) + 0.35 y(n-2) with a = [1, 0.5]',
//           d(n) = phi(y(n)) + z(n), q = 2, y(1) = 0.
class SystemModel {
public:
    SystemModel(SystemKind kind, double noise_variance);

    SystemKind kind() const { return kind_; }
    double noise_variance() const { return noise_variance_; }
    std::size_t input_dim() const { return input_dimension(kind_); }

    void reset();
    // Noise-free output for the next input sample; advances the recursion.
    double advance(InputView u);

private:
    SystemKind kind_;
    double noise_variance_;
    double y1_ = 0.0;  // y(n-1)
    double y2_ = 0.0;  // y(n-2)
    double u_prev_ = 0.0;
    std::size_t steps_ = 0;
};

// Wiener nonlinearity of example2.
double example2_nonlinearity(double y);

struct Segment {
    std::size_t length = 0;
    double sigma = 0.0;  // input standard deviation during the segment
};

struct RegimeSchedule {
    std::vector<Segment> segments;

    void validate() const;
    std::size_t total_length() const;
    std::size_t segment_start(std::size_t k) const;
    std::size_t segment_of(std::size_t n) const;
};

// Row-major sequence of input vectors.
struct InputSequence {
    std::size_t dim = 1;
    std::vector<double> values;

    std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
    InputView operator[](std::size_t n) const { return InputView(values).subspan(n * dim, dim); }
};

// example1: u(n) ~ N(0, sigma^2). example2: u2, v ~ N(0, sigma^2) i.i.d.,
// u1 = 0.5 u2 + v. Deterministic given the seed.
InputSequence generate_input(const RegimeSchedule& schedule, SystemKind kind, std::uint64_t seed);

// Starts from the system's initial state; noise z ~ N(0, noise_variance).
std::vector<double> system_response(const SystemModel& system, const InputSequence& u, std::uint64_t seed);

// Input autocorrelation of the given system at input deviation sigma.
Eigen::MatrixXd input_autocorrelation(SystemKind kind, double sigma);

struct DictionaryBlock {
    std::size_t count = 0;
    double sigma = 0.0;
};
using DictionarySpec = std::vector<DictionaryBlock>;

std::size_t dictionary_size(const DictionarySpec& spec);

// M vectors with i.i.d. N(0, sigma^2) entries.
std::vector<InputVector> draw_dictionary(std::size_t M, std::size_t q, double sigma, std::uint64_t seed);
// Concatenation of the blocks in order.
std::vector<InputVector> draw_dictionary(const DictionarySpec& spec, std::size_t q, std::uint64_t seed);

enum class DictionaryMode { fixed, learned };

struct McConfig {
    SystemKind system = SystemKind::example1;
    double noise_variance = 0.0;
    RegimeSchedule schedule;
    KernelParams kernel{1.0};
    double eta = 0.01;
    double mu0 = 0.01;
    RegularizerSpec reg;
    DictionaryMode mode = DictionaryMode::fixed;
    // Fixed mode: one dictionary per segment, or a single one for all.
    std::vector<DictionarySpec> dictionaries;
    std::size_t runs = 200;
    std::uint64_t seed = 1;
    std::size_t workers = 0;  // 0: KAF_WORKERS or hardware concurrency

    void validate() const;
    const DictionarySpec& dictionary_for_segment(std::size_t k) const;
};

struct RunTrace {
    std::vector<double> sq_error;   // e_n^2 with a-priori errors
    std::vector<double> dict_size;  // dictionary size after step n
};

// Frozen-dictionary LMS over a whole schedule: coefficients restart at zero
// with the segment's dictionary at each segment start. Returns e_n.
std::vector<double> fixed_dictionary_klms_run(const McConfig& cfg, std::span<const std::vector<InputVector>> dictionaries,
                                              const InputSequence& u, std::span<const double> d);

// One realization: fresh input, noise and dictionaries from the run's streams.
RunTrace simulate_run(const McConfig& cfg, std::size_t run);

struct McResult {
    std::vector<double> mse;     // run-averaged squared error, linear
    std::vector<double> mse_db;  // 10 log10(mse)
    std::vector<double> dict_size;
    std::size_t runs = 0;
    std::uint64_t seed = 0;

    // 10 log10 of the mean of the last `window` averaged squared errors.
    double tail_mse_db(std::size_t window) const;
};

// Runs are reduced in run-index order regardless of the worker count.
McResult monte_carlo(const McConfig& cfg);

std::size_t resolve_workers(std::size_t requested);

}  // namespace kaf
