#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "asymsep/fft.hpp"

using asymsep::RealFft;

namespace {

// O(n^2) reference DFT with long double accumulation; the independent oracle
// every transform result is checked against.
std::vector<std::complex<double>> naive_real_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t m = 0; m < n; ++m) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                      static_cast<long double>(k * m % n) /
                                      static_cast<long double>(n);
            re += static_cast<long double>(x[m]) * std::cos(angle);
            im += static_cast<long double>(x[m]) * std::sin(angle);
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

double max_error(const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b) {
    REQUIRE(a.size() == b.size());
    double peak = 0.0, err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        peak = std::max(peak, std::abs(b[i]));
        err = std::max(err, std::abs(a[i] - b[i]));
    }
    return err / peak;
}

} // namespace

TEST_CASE("forward transform matches the naive DFT oracle", "[fft]") {
    for (std::size_t n : {std::size_t{2}, std::size_t{8}, std::size_t{64}, std::size_t{256},
                          std::size_t{512}}) {
        const std::vector<double> x = random_signal(n, 17 + n);
        const RealFft fft(n);
        CHECK(max_error(fft.forward(x), naive_real_dft(x)) < 1e-12);
    }
}

TEST_CASE("non-power-of-two sizes go through Bluestein and match the oracle", "[fft]") {
    for (std::size_t n : {std::size_t{6}, std::size_t{10}, std::size_t{100}, std::size_t{368}}) {
        const std::vector<double> x = random_signal(n, 1000 + n);
        const RealFft fft(n);
        CHECK(max_error(fft.forward(x), naive_real_dft(x)) < 1e-11);
    }
}

TEST_CASE("inverse(forward(x)) reproduces the input", "[fft]") {
    for (std::size_t n : {std::size_t{64}, std::size_t{368}, std::size_t{512}}) {
        const std::vector<double> x = random_signal(n, 3 * n);
        const RealFft fft(n);
        const std::vector<double> y = fft.inverse(fft.forward(x));
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(y[i] - x[i]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("Parseval consistency pins the transform scaling", "[fft]") {
    // forward unnormalized: sum x^2 == (1/n) * (|X0|^2 + |Xn/2|^2 + 2*sum others)
    for (std::size_t n : {std::size_t{64}, std::size_t{256}}) {
        const std::vector<double> x = random_signal(n, 99 + n);
        const RealFft fft(n);
        const auto spec = fft.forward(x);
        double time_energy = 0.0;
        for (double v : x) time_energy += v * v;
        double freq_energy = std::norm(spec.front()) + std::norm(spec.back());
        for (std::size_t k = 1; k < spec.size() - 1; ++k) freq_energy += 2.0 * std::norm(spec[k]);
        freq_energy /= static_cast<double>(n);
        CHECK(std::abs(freq_energy - time_energy) / time_energy < 1e-9);
    }
}

TEST_CASE("odd and degenerate sizes are rejected", "[fft]") {
    CHECK_THROWS_AS(RealFft(0), asymsep::ConfigError);
    CHECK_THROWS_AS(RealFft(7), asymsep::ConfigError);
    const RealFft fft(8);
    std::vector<double> wrong(7, 0.0);
    std::vector<std::complex<double>> out;
    CHECK_THROWS_AS(fft.forward(wrong, out), asymsep::ConfigError);
}
