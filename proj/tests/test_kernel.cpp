#include "kaf/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace kaf;

TEST_CASE("gaussian kernel values") {
    const KernelParams p(0.5);
    const InputVector a{0.1, -0.2}, b{0.1, -0.2}, c{0.6, -0.2};
    CHECK(gaussian_kernel(a, b, p) == 1.0);
    // |a - c|^2 = xi^2 gives exp(-1/2).
    CHECK(gaussian_kernel(a, c, p) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(gaussian_kernel(a, c, p) == gaussian_kernel(c, a, p));
}

TEST_CASE("kernel parameter and dimension checks") {
    CHECK_THROWS_AS(KernelParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelParams(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelParams(std::nan("")), std::invalid_argument);
    const KernelParams p(1.0);
    const InputVector a{1.0}, b{1.0, 2.0};
    CHECK_THROWS_AS(gaussian_kernel(a, b, p), std::invalid_argument);
}

TEST_CASE("dictionary kernel vector matches per-center evaluation") {
    std::mt19937_64 g(3);
    std::normal_distribution<double> N(0.0, 0.4);
    for (std::size_t q : {1u, 2u, 3u}) {
        std::vector<InputVector> centers(23, InputVector(q));
        for (auto& c : centers)
            for (auto& x : c) x = N(g);
        const Dictionary dict(q, centers);
        const KernelParams p(0.3);
        for (int t = 0; t < 20; ++t) {
            InputVector u(q);
            for (auto& x : u) x = N(g);
            const auto fast = dict.kernel_vector(u, p);
            const auto ref = kernel_vector(u, centers, p);
            REQUIRE(fast.size() == ref.size());
            for (std::size_t m = 0; m < ref.size(); ++m) CHECK(fast[m] == doctest::Approx(ref[m]).epsilon(1e-13));
        }
    }
}

TEST_CASE("dictionary append, erase and center round trip") {
    Dictionary d(2);
    CHECK(d.empty());
    d.append(InputVector{1.0, 2.0});
    d.append(InputVector{3.0, 4.0});
    d.append(InputVector{5.0, 6.0});
    CHECK(d.size() == 3);
    d.erase(1);
    CHECK(d.size() == 2);
    CHECK(d.center(0) == InputVector{1.0, 2.0});
    CHECK(d.center(1) == InputVector{5.0, 6.0});
    CHECK(d.coordinate(1)[1] == 6.0);
    CHECK_THROWS(d.append(InputVector{1.0}));
    d.clear();
    CHECK(d.empty());
    CHECK(d.kernel_vector(InputVector{0.0, 0.0}, KernelParams(1.0)).empty());
}
