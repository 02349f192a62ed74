#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "asymsep/window.hpp"

using asymsep::ConfigError;
using asymsep::design_asymmetric_pair;
using asymsep::design_symmetric_pair;
using asymsep::hann_prototype;
using asymsep::verify_perfect_reconstruction;
using asymsep::WindowConfig;
using asymsep::WindowPair;

namespace {

// max |A*S - zero-padded Hann prototype| over the full window length
double product_identity_error(const WindowPair& pair) {
    const std::size_t K = pair.config.analysis_len;
    const std::size_t two_m = pair.config.synthesis_len;
    const std::vector<double> proto = hann_prototype(two_m);
    double err = 0.0;
    for (std::size_t n = 0; n < K; ++n) {
        const double expected = n < K - two_m ? 0.0 : proto[n - K + two_m];
        err = std::max(err, std::abs(pair.analysis[n] * pair.synthesis[n] - expected));
    }
    return err;
}

// overlap-add of the window product at hop M, evaluated in steady state
double cola_deviation(const WindowPair& pair) {
    const std::size_t K = pair.config.analysis_len;
    const std::size_t M = pair.config.hop;
    const std::size_t span = 4 * K;
    std::vector<double> sum(span, 0.0);
    for (std::size_t start = 0; start + K <= span; start += M)
        for (std::size_t i = 0; i < K; ++i)
            sum[start + i] += pair.analysis[i] * pair.synthesis[i];
    double dev = 0.0;
    for (std::size_t n = K; n + K < span; ++n) dev = std::max(dev, std::abs(sum[n] - 1.0));
    return dev;
}

} // namespace

TEST_CASE("hann prototype evaluates the closed form", "[window]") {
    const std::vector<double> h = hann_prototype(4);
    REQUIRE(h.size() == 4);
    CHECK(h[0] == 0.0);
    CHECK(h[1] == Catch::Approx(0.5).margin(1e-15));
    CHECK(h[2] == 1.0);
    CHECK(h[3] == Catch::Approx(0.5).margin(1e-15));

    for (std::size_t len : {std::size_t{8}, std::size_t{64}, std::size_t{250}}) {
        const std::vector<double> w = hann_prototype(len);
        CHECK(w[0] == 0.0);            // cos(0) = 1
        CHECK(w[len / 2] == 1.0);      // cos(pi) = -1
    }

    CHECK_THROWS_AS(hann_prototype(0), ConfigError);
    CHECK_THROWS_AS(hann_prototype(5), ConfigError);
}

TEST_CASE("asymmetric pair samples match a high-precision evaluation", "[window]") {
    // (32 ms, 8 ms) at 8 kHz: K=256, M=32, d=0. Expected values computed
    // independently from the segment formulas in 50-digit arithmetic.
    const WindowPair pair =
        design_asymmetric_pair(WindowConfig::from_samples(256, 64, 0, 8000.0));
    CHECK(pair.analysis[64] == Catch::Approx(0.43388373911755812).epsilon(1e-14));
    CHECK(pair.synthesis[200] == Catch::Approx(0.14854540467863178).epsilon(1e-14));
}

TEST_CASE("window product equals the padded Hann prototype", "[window]") {
    const WindowPair pair =
        design_asymmetric_pair(WindowConfig::from_samples(256, 64, 0, 8000.0));
    CHECK(product_identity_error(pair) < 1e-12);
}

TEST_CASE("asymmetric pair structure", "[window]") {
    const std::size_t K = 256, two_m = 64, M = 32, d = 24;
    const WindowPair pair =
        design_asymmetric_pair(WindowConfig::from_samples(K, two_m, d, 8000.0));

    for (std::size_t n = 0; n < d; ++n) CHECK(pair.analysis[n] == 0.0);
    for (std::size_t n = 0; n < K - two_m; ++n) CHECK(pair.synthesis[n] == 0.0);
    for (std::size_t n = K - M; n < K; ++n) CHECK(pair.analysis[n] == pair.synthesis[n]);
    for (std::size_t n = 0; n < K; ++n) {
        CHECK(std::isfinite(pair.analysis[n]));
        CHECK(std::isfinite(pair.synthesis[n]));
        CHECK(pair.analysis[n] >= 0.0);
        CHECK(pair.synthesis[n] >= 0.0);
    }
}

TEST_CASE("degenerate K = 2M pair is the symmetric pair", "[window]") {
    const WindowPair asym = design_asymmetric_pair(WindowConfig::from_samples(64, 64, 0, 8000.0));
    const WindowPair sym = design_symmetric_pair(64, 8000.0);
    REQUIRE(asym.analysis.size() == sym.analysis.size());
    for (std::size_t n = 0; n < 64; ++n) {
        CHECK(asym.analysis[n] == sym.analysis[n]);
        CHECK(asym.synthesis[n] == sym.synthesis[n]);
    }
}

TEST_CASE("symmetric pair is the root-Hann window", "[window]") {
    const WindowPair pair = design_symmetric_pair(4, 8000.0);
    const double r = std::sqrt(0.5);
    CHECK(pair.analysis[0] == 0.0);
    CHECK(pair.analysis[1] == Catch::Approx(r).epsilon(1e-15));
    CHECK(pair.analysis[2] == 1.0);
    CHECK(pair.analysis[3] == Catch::Approx(r).epsilon(1e-15));
    CHECK(pair.analysis == pair.synthesis);

    CHECK(cola_deviation(design_symmetric_pair(64, 8000.0)) < 1e-12);
    CHECK(verify_perfect_reconstruction(design_symmetric_pair(64, 8000.0), 4096) < 1e-12);

    CHECK_THROWS_AS(design_symmetric_pair(5, 8000.0), ConfigError);
}

TEST_CASE("product identity, COLA, tail sharing and finiteness across configs", "[window]") {
    for (std::size_t K : {std::size_t{64}, std::size_t{128}, std::size_t{256}, std::size_t{512}}) {
        for (std::size_t two_m : {std::size_t{16}, std::size_t{32}, std::size_t{64}}) {
            if (two_m > K) continue;
            std::vector<std::size_t> dead_zones{0, K - two_m};
            if (K > two_m) dead_zones.push_back(K - two_m - 1);
            if (K - two_m > 1) dead_zones.push_back(1);
            for (std::size_t d : dead_zones) {
                CAPTURE(K, two_m, d);
                const WindowPair pair =
                    design_asymmetric_pair(WindowConfig::from_samples(K, two_m, d, 8000.0));
                CHECK(product_identity_error(pair) < 1e-12);
                CHECK(cola_deviation(pair) < 1e-12);
                for (std::size_t n = K - two_m / 2; n < K; ++n)
                    CHECK(pair.analysis[n] == pair.synthesis[n]);
                for (std::size_t n = 0; n < K; ++n) {
                    CHECK(std::isfinite(pair.synthesis[n]));
                }
            }
        }
    }
}

TEST_CASE("perfect reconstruction verification", "[window]") {
    const WindowPair asym = design_asymmetric_pair(WindowConfig::from_samples(256, 64, 0, 8000.0));
    CHECK(verify_perfect_reconstruction(asym, 4096) < 1e-10);

    SECTION("corrupted pair is caught") {
        WindowPair broken = asym;
        broken.synthesis[256 - 32] = 0.0; // product there should be 1
        CHECK(verify_perfect_reconstruction(broken, 4096) > 1e-3);
    }

    SECTION("test length precondition") {
        CHECK_THROWS_AS(verify_perfect_reconstruction(asym, 512), ConfigError);
    }
}

TEST_CASE("config validation", "[window]") {
    CHECK_THROWS_AS(WindowConfig::from_samples(32, 64, 0, 8000.0), ConfigError); // K < 2M
    CHECK_THROWS_AS(WindowConfig::from_samples(256, 64, 193, 8000.0), ConfigError); // d too big
    CHECK_THROWS_AS(WindowConfig::from_samples(256, 63, 0, 8000.0), ConfigError);   // odd 2M
    CHECK_THROWS_AS(WindowConfig::from_samples(0, 0, 0, 8000.0), ConfigError);
    CHECK_THROWS_AS(WindowConfig::from_samples(256, 64, 0, -1.0), ConfigError);

    const WindowConfig cfg = WindowConfig::from_ms(32.0, 8.0, 8000.0);
    CHECK(cfg.analysis_len == 256);
    CHECK(cfg.synthesis_len == 64);
    CHECK(cfg.hop == 32);

    // ms conversion rounds to the nearest even sample count
    const WindowConfig odd = WindowConfig::from_ms(46.0, 8.0, 8000.0);
    CHECK(odd.analysis_len == 368);
}
