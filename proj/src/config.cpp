#include "kaf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace kaf {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        const auto& is = issues[i];
        if (i) os << '\n';
        if (is.line) os << "line " << is.line << ": ";
        if (!is.key.empty()) os << is.key << ": ";
        os << is.message;
    }
    return os.str();
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_plain(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw std::invalid_argument("'" + std::string(s) + "' is not a number");
    return v;
}

std::size_t parse_count(std::string_view s) {
    const double v = parse_number(s);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
        throw std::invalid_argument("'" + std::string(s) + "' is not a non-negative integer");
    return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("'" + std::string(s) + "' is not a boolean");
}

std::pair<std::size_t, double> parse_at(std::string_view item) {
    const auto at = item.find('@');
    if (at == std::string_view::npos) throw std::invalid_argument("expected count@sigma, got '" + std::string(item) + "'");
    return {parse_count(trim(item.substr(0, at))), parse_number(trim(item.substr(at + 1)))};
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

double default_noise_variance(SystemKind kind) { return kind == SystemKind::example1 ? 1e-4 : 1e-6; }

double parse_number(std::string_view s) {
    s = trim(s);
    if (s.starts_with("sqrt(") && s.ends_with(")")) {
        const double v = parse_plain(trim(s.substr(5, s.size() - 6)));
        if (v < 0.0) throw std::invalid_argument("sqrt of a negative number");
        return std::sqrt(v);
    }
    return parse_plain(s);
}

std::vector<Segment> parse_segments(std::string_view s) {
    std::vector<Segment> out;
    for (auto item : split(s, ',')) {
        const auto [len, sigma] = parse_at(item);
        out.push_back({len, sigma});
    }
    return out;
}

std::vector<DictionarySpec> parse_dictionary_specs(std::string_view s) {
    std::vector<DictionarySpec> out;
    for (auto dict : split(s, ';')) {
        DictionarySpec spec;
        for (auto block : split(dict, '+')) {
            const auto [count, sigma] = parse_at(block);
            spec.push_back({count, sigma});
        }
        out.push_back(std::move(spec));
    }
    return out;
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<ConfigIssue> issues;
    struct Entry {
        std::string value;
        std::size_t line;
    };
    std::map<std::string, Entry> entries;

    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back({lineno, "", "expected key = value"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            issues.push_back({lineno, "", "empty key"});
            continue;
        }
        if (const auto it = entries.find(key); it != entries.end()) {
            issues.push_back({lineno, key, "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
            continue;
        }
        entries.emplace(key, Entry{value, lineno});
    }

    ExperimentConfig cfg;
    auto& mc = cfg.mc;
    std::set<std::string> used;

    // Runs `apply` on the value of `key` if present; failures become issues.
    const auto with = [&](const std::string& key, bool required, const std::function<void(std::string_view)>& apply) {
        used.insert(key);
        const auto it = entries.find(key);
        if (it == entries.end()) {
            if (required) issues.push_back({0, key, "required key is missing"});
            return;
        }
        try {
            apply(it->second.value);
        } catch (const std::exception& e) {
            issues.push_back({it->second.line, key, e.what()});
        }
    };
    const auto line_of = [&](const std::string& key) -> std::size_t {
        const auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    };
    const auto check = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) issues.push_back({line_of(key), key, msg});
    };

    bool have_system = false;
    with("system", true, [&](std::string_view v) {
        mc.system = parse_system_kind(v);
        have_system = true;
    });
    mc.noise_variance = default_noise_variance(mc.system);
    with("system.noise_variance", false, [&](std::string_view v) {
        mc.noise_variance = parse_number(v);
        if (!(mc.noise_variance >= 0.0)) throw std::invalid_argument("must be >= 0");
    });
    with("kernel.xi", true, [&](std::string_view v) {
        const double xi = parse_number(v);
        if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("must be a positive finite number");
        mc.kernel = KernelParams(xi);
    });
    with("filter.eta", true, [&](std::string_view v) {
        mc.eta = parse_number(v);
        if (!(mc.eta >= 0.0) || !std::isfinite(mc.eta)) throw std::invalid_argument("must be a non-negative number");
    });
    mc.mu0 = 0.01;
    with("filter.mu0", false, [&](std::string_view v) {
        mc.mu0 = parse_number(v);
        if (!(mc.mu0 >= 0.0 && mc.mu0 < 1.0)) throw std::invalid_argument("must lie in [0, 1)");
    });
    with("reg.kind", false, [&](std::string_view v) { mc.reg.kind = parse_regularizer_kind(v); });
    with("reg.lambda", false, [&](std::string_view v) {
        mc.reg.lambda = parse_number(v);
        if (!(mc.reg.lambda >= 0.0)) throw std::invalid_argument("must be >= 0");
    });
    with("reg.epsilon_alpha", false, [&](std::string_view v) {
        mc.reg.epsilon_alpha = parse_number(v);
        if (!(mc.reg.epsilon_alpha > 0.0)) throw std::invalid_argument("must be > 0");
    });
    with("input.segments", true, [&](std::string_view v) {
        mc.schedule.segments = parse_segments(v);
        for (const auto& s : mc.schedule.segments) {
            if (s.length == 0) throw std::invalid_argument("segment length must be >= 1");
            if (!(s.sigma > 0.0)) throw std::invalid_argument("segment sigma must be > 0");
        }
    });
    with("dictionary.mode", false, [&](std::string_view v) {
        if (v == "fixed") mc.mode = DictionaryMode::fixed;
        else if (v == "learned") mc.mode = DictionaryMode::learned;
        else throw std::invalid_argument("must be fixed or learned");
    });
    with("dictionary.spec", mc.mode == DictionaryMode::fixed, [&](std::string_view v) {
        mc.dictionaries = parse_dictionary_specs(v);
        for (const auto& d : mc.dictionaries)
            for (const auto& b : d) {
                if (b.count == 0) throw std::invalid_argument("block count must be >= 1");
                if (!(b.sigma > 0.0)) throw std::invalid_argument("block sigma must be > 0");
            }
    });
    with("model.enabled", false, [&](std::string_view v) { cfg.model_enabled = parse_bool(v); });
    with("model.L", false, [&](std::string_view v) { cfg.model_L = parse_count(v); });
    with("model.moment_samples", false, [&](std::string_view v) {
        cfg.moment_samples = parse_count(v);
        if (cfg.moment_samples < 1000) throw std::invalid_argument("must be >= 1000");
    });
    with("model.neps_tolerance", false, [&](std::string_view v) {
        cfg.neps_tolerance = parse_number(v);
        if (!(cfg.neps_tolerance > 0.0)) throw std::invalid_argument("must be > 0");
    });
    with("model.neps_mode", false, [&](std::string_view v) {
        if (v == "relative") cfg.neps_mode = ToleranceMode::relative;
        else if (v == "absolute") cfg.neps_mode = ToleranceMode::absolute;
        else throw std::invalid_argument("must be relative or absolute");
    });
    with("mc.runs", false, [&](std::string_view v) {
        mc.runs = parse_count(v);
        if (mc.runs == 0) throw std::invalid_argument("must be >= 1");
    });
    with("mc.seed", false, [&](std::string_view v) { mc.seed = parse_count(v); });
    with("output.path", false, [&](std::string_view v) {
        if (v.empty()) throw std::invalid_argument("must not be empty");
        cfg.output_path = std::string(v);
    });

    for (const auto& [key, e] : entries)
        if (!used.count(key)) issues.push_back({e.line, key, "unknown key"});

    // Cross-key constraints.
    if (mc.reg.kind != RegularizerKind::none && mc.mode == DictionaryMode::fixed)
        check(false, "reg.kind", "regularization requires dictionary.mode = learned");
    if (cfg.model_enabled && mc.mode != DictionaryMode::fixed)
        check(false, "model.enabled", "the model requires dictionary.mode = fixed");
    if (mc.mode == DictionaryMode::fixed && !mc.dictionaries.empty() && !mc.schedule.segments.empty() &&
        mc.dictionaries.size() != 1 && mc.dictionaries.size() != mc.schedule.segments.size())
        check(false, "dictionary.spec", "give one dictionary, or one per input segment");
    if (mc.mode == DictionaryMode::learned && entries.count("dictionary.spec"))
        check(false, "dictionary.spec", "only used with dictionary.mode = fixed");
    if (cfg.model_L && cfg.model_enabled && have_system && !mc.dictionaries.empty() && !mc.schedule.segments.empty()) {
        const double sigma = mc.schedule.segments.back().sigma;
        std::size_t L = 0;
        for (const auto& b : mc.dictionary_for_segment(mc.schedule.segments.size() - 1))
            if (std::abs(b.sigma - sigma) <= 1e-12 * sigma) L += b.count;
        check(L == *cfg.model_L, "model.L",
              "last dictionary has " + std::to_string(L) + " matched elements, not " + std::to_string(*cfg.model_L));
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({{0, "", "cannot open " + path.string()}});
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace kaf
