#include "kaf/experiment.hpp"

#include "kaf/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace kaf {

namespace {

constexpr std::size_t kMaxCurveRows = 100000;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const McConfig& mc = cfg.mc;
    mc.validate();
    ExperimentResult res;
    res.mc = monte_carlo(mc);
    if (!cfg.model_enabled) return res;

    const auto& segs = mc.schedule.segments;
    res.model_db.assign(mc.schedule.total_length(), std::numeric_limits<double>::quiet_NaN());
    std::size_t start = 0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        SegmentModelInput in;
        in.system = mc.system;
        in.noise_variance = mc.noise_variance;
        in.kernel = mc.kernel;
        in.eta = mc.eta;
        in.sigma = segs[k].sigma;
        in.dictionary = mc.dictionary_for_segment(k);
        in.moment_samples = cfg.moment_samples;
        in.seed = derive_seed(mc.seed, k, Stream::moments);
        auto sm = build_segment_model(in);
        if (sm.model.stable) {
            const auto curve = model_curve(sm.model, segs[k].length, cfg.neps_tolerance, cfg.neps_mode);
            for (std::size_t n = 0; n < segs[k].length; ++n) res.model_db[start + n] = to_db(curve.J_ms[n]);
            if (k + 1 == segs.size() && curve.n_eps) res.summary.n_eps = start + *curve.n_eps;
        }
        if (k + 1 == segs.size()) {
            auto& s = res.summary;
            s.model_run = true;
            s.unstable = !sm.model.stable;
            s.J_min_db = to_db(sm.model.J_min);
            s.eta_max = sm.bound.eta_max;
            if (sm.model.stable) {
                const auto ss = steady_state(sm.model);
                s.J_ms_inf_db = to_db(ss.J_ms_inf);
                s.J_ex_inf_db = to_db(ss.J_ex_inf);
            }
        }
        res.segment_models.push_back(std::move(sm));
        start += segs[k].length;
    }
    return res;
}

std::string curves_csv(const ExperimentResult& r) {
    const std::size_t N = r.mc.mse_db.size();
    const std::size_t step = N > kMaxCurveRows ? (N + kMaxCurveRows - 1) / kMaxCurveRows : 1;
    std::string out = "n,mse_db_mc,mse_db_model,dict_size_mean\n";
    for (std::size_t n = 0; n < N; n += step) {
        out += std::to_string(n);
        out += ',';
        out += format_number(r.mc.mse_db[n]);
        out += ',';
        if (!r.model_db.empty() && std::isfinite(r.model_db[n])) out += format_number(r.model_db[n]);
        out += ',';
        out += format_number(r.mc.dict_size[n]);
        out += '\n';
    }
    return out;
}

std::string summary_csv(const ExperimentResult& r) {
    std::string out = "J_min_db,J_ms_inf_db,J_ex_inf_db,n_eps,eta_max\n";
    const auto& s = r.summary;
    if (!s.model_run) return out + ",,,,\n";
    out += format_number(s.J_min_db) + ',';
    if (s.unstable) {
        out += "unstable,unstable,unstable,";
    } else {
        out += format_number(s.J_ms_inf_db) + ',' + format_number(s.J_ex_inf_db) + ',';
        out += s.n_eps ? std::to_string(*s.n_eps) : std::string("not_reached");
        out += ',';
    }
    out += format_number(s.eta_max) + '\n';
    return out;
}

void write_artifacts(const ExperimentResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "curves.csv", curves_csv(r));
    write_file(dir / "summary.csv", summary_csv(r));
}

}  // namespace kaf
