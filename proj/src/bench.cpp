#include "kaf/bench.hpp"

#include "kaf/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace kaf {

SystemKind parse_system_kind(std::string_view s) {
    if (s == "example1") return SystemKind::example1;
    if (s == "example2") return SystemKind::example2;
    throw std::invalid_argument("unknown system '" + std::string(s) + "'");
}

std::string_view to_string(SystemKind k) { return k == SystemKind::example1 ? "example1" : "example2"; }

std::size_t input_dimension(SystemKind k) { return k == SystemKind::example1 ? 1 : 2; }

SystemModel::SystemModel(SystemKind kind, double noise_variance) : kind_(kind), noise_variance_(noise_variance) {
    if (!(noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
}

void SystemModel::reset() {
    y1_ = y2_ = u_prev_ = 0.0;
    steps_ = 0;
}

double example2_nonlinearity(double y) {
    if (y >= 0.0) return y / (3.0 * std::sqrt(0.1 + 0.9 * y * y));
    return -y * y * (1.0 - std::exp(0.7 * y)) / 3.0;
}

double SystemModel::advance(InputView u) {
    if (u.size() != input_dim()) throw std::invalid_argument("system input dimension mismatch");
    double out = 0.0;
    if (kind_ == SystemKind::example1) {
        const double y = y1_ / (1.0 + y1_ * y1_) + u_prev_ * u_prev_ * u_prev_;
        u_prev_ = u[0];
        y1_ = y;
        out = y;
    } else {
        const double y = steps_ == 0 ? 0.0 : u[0] + 0.5 * u[1] - 0.2 * y1_ + 0.35 * y2_;
        y2_ = y1_;
        y1_ = y;
        out = example2_nonlinearity(y);
    }
    ++steps_;
    return out;
}

void RegimeSchedule::validate() const {
    if (segments.empty()) throw std::invalid_argument("schedule needs at least one segment");
    for (const auto& s : segments) {
        if (s.length == 0) throw std::invalid_argument("segment length must be >= 1");
        if (!(s.sigma > 0.0)) throw std::invalid_argument("segment sigma must be > 0");
    }
}

std::size_t RegimeSchedule::total_length() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.length;
    return n;
}

std::size_t RegimeSchedule::segment_start(std::size_t k) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < k; ++i) n += segments.at(i).length;
    return n;
}

std::size_t RegimeSchedule::segment_of(std::size_t n) const {
    std::size_t end = 0;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        end += segments[k].length;
        if (n < end) return k;
    }
    throw std::out_of_range("sample index beyond schedule");
}

InputSequence generate_input(const RegimeSchedule& schedule, SystemKind kind, std::uint64_t seed) {
    schedule.validate();
    Engine eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    InputSequence seq;
    seq.dim = input_dimension(kind);
    seq.values.reserve(schedule.total_length() * seq.dim);
    for (const auto& seg : schedule.segments) {
        for (std::size_t n = 0; n < seg.length; ++n) {
            if (kind == SystemKind::example1) {
                seq.values.push_back(seg.sigma * gauss(eng));
            } else {
                const double u2 = seg.sigma * gauss(eng);
                const double v = seg.sigma * gauss(eng);
                seq.values.push_back(0.5 * u2 + v);
                seq.values.push_back(u2);
            }
        }
    }
    return seq;
}

std::vector<double> system_response(const SystemModel& system, const InputSequence& u, std::uint64_t seed) {
    if (u.dim != system.input_dim()) throw std::invalid_argument("system_response: input dimension mismatch");
    SystemModel sys = system;
    sys.reset();
    Engine eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sz = std::sqrt(sys.noise_variance());
    std::vector<double> d(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) d[n] = sys.advance(u[n]) + sz * gauss(eng);
    return d;
}

Eigen::MatrixXd input_autocorrelation(SystemKind kind, double sigma) {
    const double v = sigma * sigma;
    if (kind == SystemKind::example1) return Eigen::MatrixXd::Constant(1, 1, v);
    Eigen::MatrixXd R(2, 2);
    R << 1.25 * v, 0.5 * v, 0.5 * v, v;
    return R;
}

std::size_t dictionary_size(const DictionarySpec& spec) {
    std::size_t M = 0;
    for (const auto& b : spec) M += b.count;
    return M;
}

std::vector<InputVector> draw_dictionary(const DictionarySpec& spec, std::size_t q, std::uint64_t seed) {
    Engine eng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<InputVector> out;
    out.reserve(dictionary_size(spec));
    for (const auto& b : spec) {
        for (std::size_t m = 0; m < b.count; ++m) {
            InputVector c(q);
            for (auto& x : c) x = b.sigma * gauss(eng);
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<InputVector> draw_dictionary(std::size_t M, std::size_t q, double sigma, std::uint64_t seed) {
    if (M == 0) throw std::invalid_argument("draw_dictionary: M must be >= 1");
    return draw_dictionary(DictionarySpec{{M, sigma}}, q, seed);
}

void McConfig::validate() const {
    schedule.validate();
    if (runs == 0) throw std::invalid_argument("mc.runs must be >= 1");
    if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
    if (!(mu0 >= 0.0 && mu0 < 1.0)) throw std::invalid_argument("mu0 must be in [0,1)");
    reg.validate();
    if (mode == DictionaryMode::fixed) {
        if (dictionaries.empty()) throw std::invalid_argument("fixed dictionary mode needs a dictionary spec");
        if (dictionaries.size() != 1 && dictionaries.size() != schedule.segments.size())
            throw std::invalid_argument("need one dictionary, or one per segment");
        for (const auto& d : dictionaries) {
            if (dictionary_size(d) == 0) throw std::invalid_argument("fixed dictionaries must be non-empty");
            for (const auto& b : d)
                if (!(b.sigma > 0.0)) throw std::invalid_argument("dictionary sigma must be > 0");
        }
    }
}

const DictionarySpec& McConfig::dictionary_for_segment(std::size_t k) const {
    return dictionaries.size() == 1 ? dictionaries.front() : dictionaries.at(k);
}

std::vector<double> fixed_dictionary_klms_run(const McConfig& cfg, std::span<const std::vector<InputVector>> dictionaries,
                                              const InputSequence& u, std::span<const double> d) {
    if (dictionaries.size() != cfg.schedule.segments.size())
        throw std::invalid_argument("fixed_dictionary_klms_run: one dictionary per segment required");
    std::vector<double> err(u.size());
    std::size_t n = 0;
    for (std::size_t k = 0; k < dictionaries.size(); ++k) {
        if (dictionaries[k].empty()) throw std::invalid_argument("fixed_dictionary_klms_run: empty dictionary");
        FilterState state(u.dim, cfg.kernel, cfg.eta, cfg.mu0);
        state.dictionary = Dictionary(u.dim, dictionaries[k]);
        state.alpha.assign(dictionaries[k].size(), 0.0);
        const std::size_t end = n + cfg.schedule.segments[k].length;
        for (; n < end && n < u.size(); ++n) err[n] = lms_step_fixed(state, u[n], d[n]).error;
    }
    return err;
}

RunTrace simulate_run(const McConfig& cfg, std::size_t run) {
    const auto u = generate_input(cfg.schedule, cfg.system, derive_seed(cfg.seed, run, Stream::input));
    const auto d = system_response(SystemModel(cfg.system, cfg.noise_variance), u, derive_seed(cfg.seed, run, Stream::noise));
    const std::size_t N = u.size();
    RunTrace trace;
    trace.sq_error.resize(N);
    trace.dict_size.resize(N);

    if (cfg.mode == DictionaryMode::fixed) {
        const std::uint64_t dseed = derive_seed(cfg.seed, run, Stream::dictionary);
        std::vector<std::vector<InputVector>> dicts;
        for (std::size_t k = 0; k < cfg.schedule.segments.size(); ++k)
            dicts.push_back(draw_dictionary(cfg.dictionary_for_segment(k), u.dim, splitmix64(dseed + k)));
        const auto err = fixed_dictionary_klms_run(cfg, dicts, u, d);
        for (std::size_t n = 0; n < N; ++n) {
            trace.sq_error[n] = err[n] * err[n];
            trace.dict_size[n] = static_cast<double>(dicts[cfg.schedule.segment_of(n)].size());
        }
    } else {
        FilterState state(u.dim, cfg.kernel, cfg.eta, cfg.mu0);
        for (std::size_t n = 0; n < N; ++n) {
            const auto out = fobos_klms_step(state, u[n], d[n], cfg.reg);
            trace.sq_error[n] = out.error * out.error;
            trace.dict_size[n] = static_cast<double>(state.size());
        }
    }
    return trace;
}

double McResult::tail_mse_db(std::size_t window) const {
    if (mse.empty()) throw std::logic_error("empty Monte Carlo result");
    window = std::min(window, mse.size());
    double s = 0.0;
    for (std::size_t n = mse.size() - window; n < mse.size(); ++n) s += mse[n];
    return 10.0 * std::log10(s / static_cast<double>(window));
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KAF_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

McResult monte_carlo(const McConfig& cfg) {
    cfg.validate();
    const std::size_t N = cfg.schedule.total_length();
    const std::size_t workers = std::min(resolve_workers(cfg.workers), cfg.runs);
    McResult res;
    res.runs = cfg.runs;
    res.seed = cfg.seed;
    res.mse.assign(N, 0.0);
    res.dict_size.assign(N, 0.0);

    std::vector<RunTrace> batch(workers);
    for (std::size_t first = 0; first < cfg.runs; first += workers) {
        const std::size_t count = std::min(workers, cfg.runs - first);
        if (count == 1) {
            batch[0] = simulate_run(cfg, first);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < count; ++w)
                pool.emplace_back([&, w] { batch[w] = simulate_run(cfg, first + w); });
            for (auto& t : pool) t.join();
        }
        for (std::size_t w = 0; w < count; ++w) {
            for (std::size_t n = 0; n < N; ++n) {
                res.mse[n] += batch[w].sq_error[n];
                res.dict_size[n] += batch[w].dict_size[n];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(cfg.runs);
    res.mse_db.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        res.mse[n] *= inv;
        res.dict_size[n] *= inv;
        res.mse_db[n] = to_db(res.mse[n]);
    }
    return res;
}

}  // namespace kaf
