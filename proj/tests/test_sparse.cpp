#include "kaf/sparse.hpp"

#include "kaf/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace kaf;

TEST_CASE("l1 proximity operator") {
    const std::vector<double> a{0.5, -0.5, 0.05, -0.01, 0.0};
    const auto r = prox_l1(a, 0.1);
    CHECK(r[0] == doctest::Approx(0.4));
    CHECK(r[1] == doctest::Approx(-0.4));
    CHECK(r[2] == 0.0);
    CHECK(r[3] == 0.0);
    CHECK(r[4] == 0.0);
    CHECK(prox_l1(a, 0.0)[0] == 0.5);
    CHECK_THROWS_AS(prox_l1(a, -1.0), std::invalid_argument);
}

TEST_CASE("reweighted l1 proximity operator") {
    // threshold 0.05 / (|0.5| + 0.01) = 0.098039...
    const std::vector<double> a{0.5, 0.5};
    const std::vector<double> prev{0.5};
    const auto r = prox_adaptive_l1(a, 0.05, prev, 0.01);
    CHECK(r[0] == doctest::Approx(0.5 - 0.05 / 0.51).epsilon(1e-12));
    CHECK(r[0] == doctest::Approx(0.401961).epsilon(1e-6));
    // A missing previous value counts as zero: threshold 0.05 / 0.01 = 5.
    CHECK(r[1] == 0.0);
    CHECK_THROWS_AS(prox_adaptive_l1(a, 0.05, prev, 0.0), std::invalid_argument);
}

TEST_CASE("regularizer kinds parse") {
    CHECK(parse_regularizer_kind("l1") == RegularizerKind::l1);
    CHECK(parse_regularizer_kind("adaptive_l1") == RegularizerKind::adaptive_l1);
    CHECK(to_string(RegularizerKind::none) == "none");
    CHECK_THROWS_AS(parse_regularizer_kind("l2"), std::invalid_argument);
}

TEST_CASE("FOBOS step removes zeroed centers") {
    FilterState s(1, KernelParams(0.1), 0.1, 0.01);
    s.dictionary = Dictionary(1, std::vector<InputVector>{{0.0}, {10.0}, {20.0}});
    s.alpha = {0.001, 1.0, -0.002};
    RegularizerSpec reg{RegularizerKind::l1, 0.1, 0.01};
    FobosTrace trace;
    // Input far from every center: no gradient contribution, an admission,
    // and a threshold of 0.01 that removes both small coefficients.
    fobos_klms_step(s, InputVector{5.0}, 0.0, reg, &trace);
    CHECK(trace.pruned == 3);
    REQUIRE(s.size() == 1);
    CHECK(s.dictionary.center(0) == InputVector{10.0});
    CHECK(s.alpha[0] == doctest::Approx(0.99));
    CHECK(s.kvec.size() == s.size());
}

TEST_CASE("FOBOS correction stays within its bound") {
    std::mt19937_64 g(5);
    std::normal_distribution<double> N(0.0, 0.5);
    for (auto kind : {RegularizerKind::l1, RegularizerKind::adaptive_l1}) {
        FilterState s(1, KernelParams(0.1), 0.2, 0.05);
        const RegularizerSpec reg{kind, 1e-3, 0.05};
        const double bound = kind == RegularizerKind::l1 ? reg.lambda * s.eta : reg.lambda * s.eta / reg.epsilon_alpha;
        FobosTrace trace;
        for (int n = 0; n < 3000; ++n) {
            const double u = N(g);
            fobos_klms_step(s, InputVector{u}, std::sin(3.0 * u), reg, &trace);
            for (double f : trace.correction) CHECK(std::abs(f) <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("stability bound") {
    Eigen::MatrixXd R(3, 3);
    R << 0.5, 0.1, 0.1, 0.1, 0.5, 0.1, 0.1, 0.1, 0.5;
    const auto b = stability_bound(R);
    CHECK(b.lambda_max == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(b.eta_max == doctest::Approx(2.0 / 0.7).epsilon(1e-12));
    REQUIRE(b.closed_form_lambda_max);
    CHECK(*b.closed_form_lambda_max == doctest::Approx(0.7).epsilon(1e-15));

    R(0, 1) = R(1, 0) = 0.2;
    CHECK_FALSE(stability_bound(R).closed_form_lambda_max);
    R(0, 1) = 0.3;
    CHECK_THROWS_AS(stability_bound(R), std::invalid_argument);
    CHECK_THROWS_AS(stability_bound(-Eigen::MatrixXd::Identity(2, 2)), NumericalError);
}
