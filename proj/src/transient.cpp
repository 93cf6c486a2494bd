#include "kaf/transient.hpp"

#include "kaf/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kaf {

namespace {

struct StationaryStream {
    InputSequence u;
    std::vector<double> d;
};

StationaryStream stationary_stream(const SystemModel& system, double sigma, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("moment estimation needs at least 1000 samples");
    if (!(sigma > 0.0)) throw std::invalid_argument("moment estimation: sigma must be > 0");
    RegimeSchedule sched{{{kMomentBurnIn + n_samples, sigma}}};
    StationaryStream s;
    s.u = generate_input(sched, system.kind(), derive_seed(seed, 0, Stream::input));
    s.d = system_response(system, s.u, derive_seed(seed, 0, Stream::noise));
    return s;
}

}  // namespace

MomentEstimate estimate_moments(const SystemModel& system, std::span<const InputVector> dictionary, double sigma,
                                const KernelParams& p, std::size_t n_samples, std::uint64_t seed) {
    const auto s = stationary_stream(system, sigma, n_samples, seed);
    const Dictionary dict(s.u.dim, dictionary);
    const std::size_t M = dict.size();
    MomentEstimate est;
    est.p_kd = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
    std::vector<double> k(M);
    double d2 = 0.0;
    for (std::size_t n = kMomentBurnIn; n < s.u.size(); ++n) {
        const double d = s.d[n];
        d2 += d * d;
        dict.kernel_vector(s.u[n], p, k);
        for (std::size_t m = 0; m < M; ++m) est.p_kd[static_cast<Eigen::Index>(m)] += d * k[m];
    }
    const double inv = 1.0 / static_cast<double>(n_samples);
    est.d2 = d2 * inv;
    est.p_kd *= inv;
    return est;
}

MomentEstimate estimate_ensemble_moments(const SystemModel& system, const DictionarySpec& spec, double sigma,
                                         const KernelParams& p, std::size_t n_samples, std::uint64_t seed) {
    const auto s = stationary_stream(system, sigma, n_samples, seed);
    const std::size_t q = s.u.dim;
    Engine eng(derive_seed(seed, 0, Stream::dictionary));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> acc(spec.size(), 0.0);
    InputVector w(q);
    double d2 = 0.0;
    for (std::size_t n = kMomentBurnIn; n < s.u.size(); ++n) {
        const double d = s.d[n];
        d2 += d * d;
        const auto u = s.u[n];
        for (std::size_t b = 0; b < spec.size(); ++b) {
            for (auto& x : w) x = spec[b].sigma * gauss(eng);
            acc[b] += d * gaussian_kernel(u, w, p);
        }
    }
    const double inv = 1.0 / static_cast<double>(n_samples);
    MomentEstimate est;
    est.d2 = d2 * inv;
    est.p_kd.resize(static_cast<Eigen::Index>(dictionary_size(spec)));
    Eigen::Index m = 0;
    for (std::size_t b = 0; b < spec.size(); ++b)
        for (std::size_t c = 0; c < spec[b].count; ++c) est.p_kd[m++] = acc[b] * inv;
    return est;
}

WienerSolution wiener_and_jmin(const Eigen::MatrixXd& Rkk, const Eigen::VectorXd& p_kd, double d2) {
    if (Rkk.rows() != Rkk.cols() || Rkk.rows() != p_kd.size())
        throw std::invalid_argument("wiener_and_jmin: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(Rkk);
    if (llt.info() != Eigen::Success) throw NumericalError("wiener_and_jmin: Rkk is not positive definite");
    WienerSolution w;
    w.alpha_opt = llt.solve(p_kd);
    w.J_min = d2 - p_kd.dot(w.alpha_opt);
    return w;
}

std::vector<Eigen::VectorXd> mean_weight_trajectory(const Eigen::MatrixXd& Rkk, double eta, const Eigen::VectorXd& v0,
                                                    std::size_t N) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(N);
    Eigen::VectorXd v = v0;
    for (std::size_t n = 0; n < N; ++n) {
        out.push_back(v);
        v = v - eta * (Rkk * v);
    }
    return out;
}

Eigen::MatrixXd build_G(const Eigen::MatrixXd& Rkk, const KTensor& K, double eta) {
    const auto M = Rkk.rows();
    if (Rkk.cols() != M || static_cast<std::size_t>(M) != K.size())
        throw std::invalid_argument("build_G: Rkk and K dimensions differ");
    const auto M2 = M * M;
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(M2, M2);
    // I (x) Rkk is block diagonal; Rkk (x) I places Rkk(j,p) I at block (j,p).
    for (Eigen::Index j = 0; j < M; ++j) {
        G.block(j * M, j * M, M, M) -= eta * Rkk;
        for (Eigen::Index p = 0; p < M; ++p)
            G.block(j * M, p * M, M, M).diagonal().array() -= eta * Rkk(j, p);
    }
    const double e2 = eta * eta;
    for (Eigen::Index p = 0; p < M; ++p)
        for (Eigen::Index l = 0; l < M; ++l)
            for (Eigen::Index j = 0; j < M; ++j)
                for (Eigen::Index i = 0; i < M; ++i)
                    G(i + j * M, l + p * M) += e2 * K(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                                      static_cast<std::size_t>(l), static_cast<std::size_t>(p));
    return G;
}

Eigen::VectorXd lexicographic(const Eigen::MatrixXd& C) {
    return Eigen::Map<const Eigen::VectorXd>(C.data(), C.size());
}

Eigen::MatrixXd unlexicographic(const Eigen::VectorXd& c, std::size_t M) {
    const auto m = static_cast<Eigen::Index>(M);
    if (c.size() != m * m) throw std::invalid_argument("unlexicographic: length is not M^2");
    return Eigen::Map<const Eigen::MatrixXd>(c.data(), m, m);
}

TransientModel build_transient_model(const Eigen::MatrixXd& Rkk, const KTensor& K, double eta,
                                     const WienerSolution& wiener) {
    TransientModel m;
    m.Rkk = Rkk;
    m.r_kk = lexicographic(Rkk);
    m.eta = eta;
    m.J_min = wiener.J_min;
    m.alpha_opt = wiener.alpha_opt;
    m.c0 = lexicographic(wiener.alpha_opt * wiener.alpha_opt.transpose());
    m.G = build_G(Rkk, K, eta);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.G, Eigen::EigenvaluesOnly);
    m.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    m.stable = m.spectral_radius < 1.0 - 1e-9;
    if (m.stable) m.c_inf = steady_state(m).c_inf;
    return m;
}

SteadyState steady_state(const TransientModel& model) {
    double rho = model.spectral_radius;
    if (rho == 0.0 && model.G.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.G, Eigen::EigenvaluesOnly);
        rho = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    if (!(rho < 1.0 - 1e-9)) throw ModelUnstable();
    const auto n = model.G.rows();
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - model.G;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("steady_state: I - G is not positive definite");
    SteadyState ss;
    ss.c_inf = llt.solve(model.eta * model.eta * model.J_min * model.r_kk);
    ss.J_ex_inf = model.r_kk.dot(ss.c_inf);
    ss.J_ms_inf = model.J_min + ss.J_ex_inf;
    return ss;
}

namespace {

// Averages mirrored entries so rounding in G c cannot break the symmetry of C_v.
void symmetrize(Eigen::VectorXd& c, std::size_t M) {
    const auto m = static_cast<Eigen::Index>(M);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = j + 1; i < m; ++i) {
            const double v = 0.5 * (c(i + j * m) + c(j + i * m));
            c(i + j * m) = v;
            c(j + i * m) = v;
        }
}

}  // namespace

std::vector<Eigen::VectorXd> cv_trajectory(const TransientModel& model, std::size_t N) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(N);
    const Eigen::VectorXd drive = model.eta * model.eta * model.J_min * model.r_kk;
    Eigen::VectorXd c = model.c0;
    for (std::size_t n = 0; n < N; ++n) {
        out.push_back(c);
        c = model.G * c + drive;
        symmetrize(c, model.order());
    }
    return out;
}

SpectralPropagator::SpectralPropagator(const TransientModel& model) {
    if (!model.stable) throw ModelUnstable();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.G);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of G failed");
    lambda_ = es.eigenvalues();
    V_ = es.eigenvectors();
    c_inf_ = model.c_inf;
    order_ = model.order();
    z_ = V_.transpose() * (model.c0 - c_inf_);
    rv_ = V_.transpose() * model.r_kk;
    ex_inf_ = model.r_kk.dot(c_inf_);
}

Eigen::VectorXd SpectralPropagator::cv(std::size_t n) const {
    const Eigen::VectorXd scaled = lambda_.array().pow(static_cast<double>(n)).matrix().cwiseProduct(z_);
    Eigen::VectorXd c = c_inf_ + V_ * scaled;
    symmetrize(c, order_);
    return c;
}

double SpectralPropagator::excess_mse(std::size_t n) const {
    return ex_inf_ + (lambda_.array().pow(static_cast<double>(n)) * z_.array() * rv_.array()).sum();
}

double SpectralPropagator::distance_to_steady_state(std::size_t n) const {
    return (lambda_.array().pow(static_cast<double>(n)) * z_.array()).matrix().norm();
}

ModelCurve mse_curve(const TransientModel& model, std::span<const Eigen::VectorXd> cv_seq, const Eigen::MatrixXd& Rkk) {
    const Eigen::VectorXd r = lexicographic(Rkk);
    ModelCurve curve;
    curve.J_ex.reserve(cv_seq.size());
    curve.J_ms.reserve(cv_seq.size());
    for (const auto& c : cv_seq) {
        const double ex = r.dot(c);
        curve.J_ex.push_back(ex);
        curve.J_ms.push_back(model.J_min + ex);
    }
    if (!cv_seq.empty())
        curve.n_eps = convergence_iteration(cv_seq, model.c_inf.size() == r.size() ? model.c_inf : cv_seq.back());
    return curve;
}

std::optional<std::size_t> convergence_iteration(std::span<const Eigen::VectorXd> cv_seq, const Eigen::VectorXd& c_inf,
                                                 double tol, ToleranceMode mode) {
    if (!(tol > 0.0)) throw std::invalid_argument("convergence tolerance must be > 0");
    const double bound = mode == ToleranceMode::relative ? tol * c_inf.norm() : tol;
    for (std::size_t n = 0; n < cv_seq.size(); ++n)
        if ((c_inf - cv_seq[n]).norm() <= bound) return n;
    return std::nullopt;
}

std::optional<std::size_t> convergence_iteration(const SpectralPropagator& prop, const Eigen::VectorXd& c_inf,
                                                 double tol, ToleranceMode mode, std::size_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("convergence tolerance must be > 0");
    const double bound = mode == ToleranceMode::relative ? tol * c_inf.norm() : tol;
    // The distance is non-increasing because every |lambda| < 1.
    if (prop.distance_to_steady_state(0) <= bound) return 0;
    std::size_t hi = 1;
    while (prop.distance_to_steady_state(hi) > bound) {
        if (hi >= max_iter) return std::nullopt;
        hi = std::min(hi * 2, max_iter);
    }
    std::size_t lo = hi / 2;  // distance(lo) > bound
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (prop.distance_to_steady_state(mid) <= bound) hi = mid;
        else lo = mid;
    }
    return hi;
}

ModelCurve model_curve(const TransientModel& model, std::size_t N, double tol, ToleranceMode mode) {
    const SpectralPropagator prop(model);
    ModelCurve curve;
    curve.J_ex.resize(N);
    curve.J_ms.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        curve.J_ex[n] = prop.excess_mse(n);
        curve.J_ms[n] = model.J_min + curve.J_ex[n];
    }
    curve.n_eps = convergence_iteration(prop, model.c_inf, tol, mode, std::size_t{1} << 40);
    return curve;
}

SegmentModel build_segment_model(const SegmentModelInput& in) {
    if (in.dictionary.empty()) throw std::invalid_argument("segment model needs a dictionary");
    const auto same = [&](double s) { return std::abs(s - in.sigma) <= 1e-12 * in.sigma; };
    SegmentModel out;
    for (const auto& b : in.dictionary)
        if (same(b.sigma)) out.ordered.push_back(b);
    std::optional<double> tilde;
    for (const auto& b : in.dictionary) {
        if (same(b.sigma)) continue;
        if (tilde && std::abs(*tilde - b.sigma) > 1e-12 * b.sigma)
            throw std::invalid_argument("segment model supports a single unmatched dictionary deviation");
        tilde = b.sigma;
        out.ordered.push_back(b);
    }
    const std::size_t q = input_dimension(in.system);
    auto& st = out.stats;
    st.q = q;
    st.M = dictionary_size(out.ordered);
    st.L = 0;
    for (const auto& b : out.ordered)
        if (same(b.sigma)) st.L += b.count;
    st.R_uu = input_autocorrelation(in.system, in.sigma);
    const auto nq = static_cast<Eigen::Index>(q);
    st.R_uu_tilde = tilde ? Eigen::MatrixXd(*tilde * *tilde * Eigen::MatrixXd::Identity(nq, nq)) : st.R_uu;

    out.moments = estimate_ensemble_moments(SystemModel(in.system, in.noise_variance), out.ordered, in.sigma, in.kernel,
                                            in.moment_samples, in.seed);
    const Eigen::MatrixXd Rkk = compute_Rkk(st, in.kernel);
    out.bound = stability_bound(Rkk);
    const KTensor K(st, in.kernel);
    out.model = build_transient_model(Rkk, K, in.eta, wiener_and_jmin(Rkk, out.moments.p_kd, out.moments.d2));
    return out;
}

}  // namespace kaf
