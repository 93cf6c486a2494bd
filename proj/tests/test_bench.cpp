#include "kaf/bench.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace kaf;

namespace {

double sample_variance(const std::vector<double>& x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

McConfig small_config() {
    McConfig c;
    c.system = SystemKind::example1;
    c.noise_variance = 1e-4;
    c.schedule.segments = {{600, 0.35}, {400, 0.15}};
    c.kernel = KernelParams(0.02);
    c.eta = 0.01;
    c.dictionaries = {{{10, 0.35}}, {{10, 0.15}, {5, 0.35}}};
    c.runs = 7;
    c.seed = 99;
    return c;
}

}  // namespace

TEST_CASE("input variance of a single segment") {
    const RegimeSchedule s{{{1000000, 0.35}}};
    const auto u = generate_input(s, SystemKind::example1, 4);
    CHECK(sample_variance(u.values) == doctest::Approx(0.35 * 0.35).epsilon(0.01));
}

TEST_CASE("correlated example2 input") {
    const double v = 0.0656;
    const RegimeSchedule s{{{1000000, std::sqrt(v)}}};
    const auto u = generate_input(s, SystemKind::example2, 5);
    double c12 = 0.0, c22 = 0.0, c11 = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        c11 += u[n][0] * u[n][0];
        c12 += u[n][0] * u[n][1];
        c22 += u[n][1] * u[n][1];
    }
    const double N = static_cast<double>(u.size());
    CHECK(c12 / N == doctest::Approx(0.5 * v).epsilon(0.02));
    CHECK(c22 / N == doctest::Approx(v).epsilon(0.02));
    CHECK(c11 / N == doctest::Approx(1.25 * v).epsilon(0.02));
    const auto R = input_autocorrelation(SystemKind::example2, std::sqrt(v));
    CHECK(R(0, 1) == doctest::Approx(0.5 * v));
}

TEST_CASE("variance changes at the changepoint") {
    const RegimeSchedule s{{{50000, 0.35}, {50000, 0.15}}};
    const auto u = generate_input(s, SystemKind::example1, 6);
    const std::vector<double> a(u.values.begin(), u.values.begin() + 50000);
    const std::vector<double> b(u.values.begin() + 50000, u.values.end());
    CHECK(sample_variance(a) == doctest::Approx(0.1225).epsilon(0.03));
    CHECK(sample_variance(b) == doctest::Approx(0.0225).epsilon(0.03));
    CHECK(s.segment_of(49999) == 0);
    CHECK(s.segment_of(50000) == 1);
    CHECK(s.segment_start(1) == 50000);
}

TEST_CASE("example1 recursion by hand") {
    InputSequence u;
    u.dim = 1;
    u.values = {1.0, 0.0, 0.0, 0.0, 0.0};
    const auto d = system_response(SystemModel(SystemKind::example1, 0.0), u, 1);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 1.0);
    CHECK(d[2] == 0.5);
    CHECK(d[3] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("zero input gives zero output") {
    for (auto kind : {SystemKind::example1, SystemKind::example2}) {
        InputSequence u;
        u.dim = input_dimension(kind);
        u.values.assign(100 * u.dim, 0.0);
        for (double d : system_response(SystemModel(kind, 0.0), u, 1)) CHECK(d == 0.0);
    }
    CHECK(example2_nonlinearity(0.0) == 0.0);
    CHECK(example2_nonlinearity(1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(example2_nonlinearity(-1.0) == doctest::Approx(-(1.0 - std::exp(-0.7)) / 3.0));
}

TEST_CASE("example2 recursion") {
    InputSequence u;
    u.dim = 2;
    u.values = {5.0, 5.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    SystemModel sys(SystemKind::example2, 0.0);
    // y(1) = 0 regardless of the first input, then y = a'u - 0.2 y1 + 0.35 y2.
    std::vector<double> y{0.0, 1.0, -0.2, 0.04 + 0.35};
    const auto d = system_response(sys, u, 1);
    for (std::size_t n = 0; n < y.size(); ++n) CHECK(d[n] == doctest::Approx(example2_nonlinearity(y[n])));
    CHECK_THROWS_AS(system_response(SystemModel(SystemKind::example1, 0.0), u, 1), std::invalid_argument);
}

TEST_CASE("dictionary draws") {
    const auto a = draw_dictionary(10000, 1, 0.35, 8);
    double mean = 0.0;
    for (const auto& c : a) mean += c[0];
    mean /= 10000.0;
    CHECK(std::abs(mean) < 3.0 * 0.35 / std::sqrt(10000.0));
    CHECK(draw_dictionary(10, 2, 0.35, 8) == draw_dictionary(10, 2, 0.35, 8));
    CHECK(draw_dictionary(10, 2, 0.35, 8) != draw_dictionary(10, 2, 0.35, 9));
    const DictionarySpec spec{{10, 0.15}, {10, 0.35}};
    CHECK(draw_dictionary(spec, 1, 1).size() == 20);
    CHECK_THROWS_AS(draw_dictionary(0, 1, 0.35, 1), std::invalid_argument);
}

TEST_CASE("fixed-dictionary run edge cases") {
    auto cfg = small_config();
    cfg.schedule.segments = {{200, 0.35}};
    const auto u = generate_input(cfg.schedule, cfg.system, 1);
    const auto d = system_response(SystemModel(cfg.system, cfg.noise_variance), u, 2);

    cfg.eta = 0.0;
    std::vector<std::vector<InputVector>> dicts{draw_dictionary(5, 1, 0.35, 3)};
    CHECK(fixed_dictionary_klms_run(cfg, dicts, u, d) == d);

    cfg.eta = 0.01;
    dicts = {{{1000.0}}};
    const auto far = fixed_dictionary_klms_run(cfg, dicts, u, d);
    for (std::size_t n = 0; n < d.size(); ++n) CHECK(far[n] == d[n]);
}

TEST_CASE("Monte Carlo determinism and worker independence") {
    auto cfg = small_config();
    cfg.workers = 1;
    const auto a = monte_carlo(cfg);
    cfg.workers = 3;
    const auto b = monte_carlo(cfg);
    CHECK(a.mse == b.mse);
    CHECK(a.dict_size == b.dict_size);
    CHECK(a.mse.size() == 1000);
    CHECK(a.runs == 7);
    CHECK(a.dict_size[0] == 10.0);
    CHECK(a.dict_size[999] == 15.0);

    cfg.mode = DictionaryMode::learned;
    cfg.reg = {RegularizerKind::l1, 5e-4, 0.01};
    const auto c = monte_carlo(cfg);
    cfg.workers = 1;
    CHECK(monte_carlo(cfg).mse == c.mse);

    cfg.runs = 0;
    CHECK_THROWS_AS(monte_carlo(cfg), std::invalid_argument);
}

TEST_CASE("a single noiseless run decreases early") {
    McConfig cfg;
    cfg.system = SystemKind::example2;
    cfg.noise_variance = 0.0;
    cfg.schedule.segments = {{3000, std::sqrt(0.0656)}};
    cfg.kernel = KernelParams(0.05);
    cfg.eta = 0.05;
    cfg.mode = DictionaryMode::learned;
    cfg.runs = 1;
    const auto r = monte_carlo(cfg);
    auto block = [&](std::size_t a, std::size_t b) {
        return std::accumulate(r.mse.begin() + static_cast<std::ptrdiff_t>(a), r.mse.begin() + static_cast<std::ptrdiff_t>(b), 0.0);
    };
    CHECK(block(0, 500) > block(500, 1000));
    CHECK(block(500, 1000) > block(2500, 3000));
    CHECK(r.dict_size.back() > 10.0);
}

TEST_CASE("doubling the runs halves the curve variance") {
    auto cfg = small_config();
    cfg.schedule.segments = {{6000, 0.15}};
    cfg.dictionaries = {{{10, 0.15}}};
    auto spread = [&](std::size_t runs) {
        cfg.runs = runs;
        const auto r = monte_carlo(cfg);
        return sample_variance(std::vector<double>(r.mse.begin() + 1000, r.mse.end()));
    };
    const double ratio = spread(100) / spread(200);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}
