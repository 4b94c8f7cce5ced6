#include "gsdst/denoise.hpp"
#include "gsdst/errors.hpp"
#include "gsdst/noinfra.hpp"

#include "golden.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace gsdst;

namespace {

/// Adds circular Gaussian noise with the given per-sample variance.
ComplexSequence add_noise(const ComplexSequence& s, double variance, oracle::Gen& gen) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    std::vector<Complex> out(s.begin(), s.end());
    for (auto& z : out) z += Complex{n(gen.rng), n(gen.rng)};
    return ComplexSequence(std::move(out));
}

/// Variance giving `snr_db` relative to the weakest component.
double noise_for(const Decomposition& d, double snr_db) {
    double weakest = INFINITY;
    for (const auto& c : d.components()) weakest = std::min(weakest, std::norm(c.initial_term()));
    return weakest / std::pow(10.0, snr_db / 10.0);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

ComplexSequence ramp(std::size_t n) {
    std::vector<Complex> v(n);
    for (std::size_t l = 0; l < n; ++l) v[l] = Complex{double(l) + 1.0, 0.5 * double(l)};
    return ComplexSequence(std::move(v));
}

} // namespace

TEST_SUITE("denoise") {

TEST_CASE("hankel shapes and entries") {
    const ComplexMatrix h = hankelize(ComplexSequence{1.0, 2.0, 3.0, 4.0, 5.0});
    REQUIRE(h.rows() == 3);
    REQUIRE(h.cols() == 3);
    for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t n = 0; n < 3; ++n) CHECK(h(m, n) == Complex(double(m + n + 1)));
    const ComplexMatrix big = hankelize(ramp(30));
    CHECK(big.rows() == 15);
    CHECK(big.cols() == 16);
    const ComplexMatrix two = hankelize(ComplexSequence{Complex{1, 2}, Complex{3, 4}});
    CHECK(two.rows() == 1);
    CHECK(two.cols() == 2);
    CHECK(two(0, 1) == Complex(3, 4));
}

TEST_CASE("anti-diagonal averaging") {
    CHECK(dehankelize(ComplexMatrix{{1.0, 3.0}, {3.0, 5.0}}) == ComplexSequence{1.0, 3.0, 5.0});
    CHECK(dehankelize(ComplexMatrix{{0.0, 2.0}, {4.0, 6.0}}) == ComplexSequence{0.0, 3.0, 6.0});
    oracle::Gen gen(50);
    for (std::size_t p = 2; p <= 40; ++p) {
        std::vector<Complex> v(p);
        for (auto& z : v) z = gen.complex_box(1e3);
        const ComplexSequence s(v);
        CHECK(dehankelize(hankelize(s)) == s);
    }
}

TEST_CASE("hankel matrix of k components has rank k") {
    oracle::Gen gen(51);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = gen.index(1, 5);
        const ComplexSequence s = synthesize(gen.decomposition(k, 0.8, 1.25), gen.index(2 * k + 1, 40));
        const auto sv = svd(hankelize(s)).singular_values;
        if (k < sv.size()) CHECK(sv[k] / sv[0] < 1e-10);
    }
}

TEST_CASE("noiseless sequences are a fixed point") {
    oracle::Gen gen(52);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = gen.index(1, 5);
        const ComplexSequence s = synthesize(gen.decomposition(k, 0.8, 1.25), gen.index(2 * k + 1, 40));
        const DenoiseResult r = cadzow_denoise(s, k);
        CHECK(r.iterations == 1);
        CHECK(r.converged);
        CHECK(nmse(s, r.sequence) < 1e-9);
    }
    const DenoiseResult golden = cadzow_denoise(golden::real_sequence(), 3);
    CHECK(golden.iterations == 1);
    CHECK(nmse(golden::real_sequence(), golden.sequence) < 1e-9);
}

TEST_CASE("cadzow rejects bad arguments") {
    CHECK_THROWS_AS(cadzow_denoise(ramp(10), 0), InputError);
    CHECK_THROWS_AS(cadzow_denoise(ramp(10), 6), InputError);
    DenoiseConfig bad;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(cadzow_denoise(ramp(10), 2, bad), InputError);
    bad = {};
    bad.max_iterations = 0;
    CHECK_THROWS_AS(cadzow_denoise(ramp(10), 2, bad), InputError);
}

TEST_CASE("projection residual never increases") {
    oracle::Gen gen(53);
    DenoiseConfig cfg;
    cfg.max_iterations = 50;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = gen.index(1, 4);
        const Decomposition d = gen.decomposition(k, 0.9, 1.1);
        const ComplexSequence s_w = add_noise(synthesize(d, 30), noise_for(d, gen.uniform(0.0, 40.0)), gen);
        const DenoiseResult r = cadzow_denoise(s_w, k, cfg);
        CHECK(r.projection_residuals.size() == r.iterations);
        for (std::size_t i = 1; i < r.projection_residuals.size(); ++i)
            CHECK(r.projection_residuals[i] <= r.projection_residuals[i - 1] + 1e-12);
    }
}

TEST_CASE("de-noising moves noisy samples toward the clean sequence") {
    oracle::Gen gen(54);
    int improved = 0;
    const int trials = 500;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t k = gen.index(1, 3);
        const Decomposition d = gen.decomposition(k, 0.9, 1.1);
        const ComplexSequence s = synthesize(d, 30);
        const ComplexSequence s_w = add_noise(s, noise_for(d, 30.0), gen);
        if (nmse(s, cadzow_denoise(s_w, k).sequence) < nmse(s, s_w)) ++improved;
    }
    CHECK(improved >= 475);
}

TEST_CASE("informative quotients") {
    const auto real = informative_quotients(golden::real_sequence(), 3, IndexPattern::consecutive(3));
    CHECK(oracle::max_rel_err(real, {4.0, 1.0, -6.0}) < 1e-12);
    const auto cplx = informative_quotients(golden::complex_sequence(), 2, IndexPattern::consecutive(2));
    CHECK(oracle::max_rel_err(cplx, {Complex{2.5, 0.5}, Complex{1.5, -0.5}}) < 1e-12);
    const Complex r{0.3, -1.1};
    const auto one = informative_quotients(synthesize(Decomposition({{Complex{2, 1}, r}}), 5), 1,
                                           IndexPattern::consecutive(1));
    CHECK(oracle::max_rel_err(one, {r}) < 1e-14);
}

TEST_CASE("similarity vanishes only at the true order") {
    for (SimilarityKind kind : {SimilarityKind::full, SimilarityKind::diagonal, SimilarityKind::rapid}) {
        CAPTURE(to_string(kind));
        SimilarityOptions o{kind, kDefaultPairBudget};
        CHECK(similarity(golden::real_sequence(), 3, o, 1) < 1e-7);
        CHECK(similarity(golden::complex_sequence(), 2, o, 1) < 1e-7);
        CHECK(estimate_k(golden::real_sequence(), 4, o, 7) == 3);
    }
    CHECK(similarity(golden::real_sequence(), 2, {SimilarityKind::diagonal}, 0) > 1e-3);
    CHECK(estimate_k(ComplexSequence{1.0, 2.0, 4.0, 8.0, 16.0, 32.0}, 2) == 1);

    // A constant sequence gives the same quotient from every pattern.
    CHECK(similarity(ComplexSequence{3.0, 3.0, 3.0}, 1, {SimilarityKind::full}) == 0.0);

    oracle::Gen gen(55);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = gen.index(1, 3);
        const ComplexSequence s = synthesize(gen.decomposition(k, 0.9, 1.1), 30);
        CHECK(similarity(s, k, {}, trial) < 1e-7);
        for (std::size_t other = 1; other <= 4; ++other)
            if (other != k) CHECK(similarity(s, other, {}, trial) > 1e-7);
        CHECK(estimate_k(s, 4, {}, trial) == k);
    }
}

TEST_CASE("similarity arguments") {
    CHECK_THROWS_AS(similarity(ComplexSequence{1.0, 2.0}, 1), InfeasibleError);
    CHECK_THROWS_AS(similarity(golden::real_sequence(), 0), InputError);
    CHECK_THROWS_AS(similarity(golden::real_sequence(), 1, {SimilarityKind::full, 0}), InputError);
    CHECK(parse_similarity_kind("diag") == SimilarityKind::diagonal);
    CHECK(parse_similarity_kind("diagonal") == SimilarityKind::diagonal);
    CHECK(parse_similarity_kind("full") == SimilarityKind::full);
    CHECK(parse_similarity_kind("rapid") == SimilarityKind::rapid);
    CHECK_THROWS_AS(parse_similarity_kind("fast"), InputError);
}

TEST_CASE("order estimation is deterministic") {
    oracle::Gen gen(56);
    for (int trial = 0; trial < 30; ++trial) {
        const Decomposition d = gen.decomposition(2, 0.9, 1.1);
        const ComplexSequence s_w = add_noise(synthesize(d, 30), noise_for(d, 20.0), gen);
        for (SimilarityKind kind : {SimilarityKind::full, SimilarityKind::diagonal, SimilarityKind::rapid}) {
            const SimilarityOptions o{kind, 500};
            CHECK(similarity(s_w, 2, o, 99) == similarity(s_w, 2, o, 99));
            CHECK(estimate_k(s_w, 4, o, 99) == estimate_k(s_w, 4, o, 99));
        }
    }
}

TEST_CASE("order estimation on simulated two-transmitter signals") {
    SimConfig cfg;
    cfg.k = 2;
    cfg.gamma_db = 60.0;
    cfg.sigma_db = 0.0;
    const int trials = 5000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        auto rng = trial_rng(2024, t);
        const Scenario sc = draw_scenario(cfg, rng);
        const ComplexSequence s_w = received_sequence(sc, cfg, rng);
        if (estimate_k(s_w, 4, {SimilarityKind::full, 2000}, t) == 2) ++hits;
    }
    CHECK(double(hits) / trials >= 0.85);
}

TEST_CASE("noisy decomposition") {
    NoisyDecomposeOptions known;
    known.k = 3;
    const Decomposition a = decompose_noisy(golden::real_sequence(), known);
    const auto m = match_components(decompose(golden::real_sequence()), a);
    CHECK(m.max_ratio_error < 1e-9);
    CHECK(m.max_initial_term_error < 1e-9);

    const NoisyDecomposeReport automatic = decompose_noisy_detailed(golden::real_sequence());
    CHECK(automatic.k == 3);
    CHECK(automatic.k_estimated);

    oracle::Gen gen(57);
    std::vector<double> ratio_errors;
    for (int trial = 0; trial < 200; ++trial) {
        const Decomposition d = gen.decomposition(2, 0.9, 1.1);
        const ComplexSequence s_w = add_noise(synthesize(d, 30), noise_for(d, 60.0), gen);
        NoisyDecomposeOptions o;
        o.k = 2;
        ratio_errors.push_back(match_components(d, decompose_noisy(s_w, o)).max_ratio_error);
    }
    CHECK(median(ratio_errors) < 1e-3);

    std::vector<double> fitted;
    std::vector<double> observed;
    for (int trial = 0; trial < 200; ++trial) {
        const Decomposition d = gen.decomposition(4, 0.9, 1.1);
        const ComplexSequence s = synthesize(d, 30);
        const ComplexSequence s_w = add_noise(s, noise_for(d, 30.0), gen);
        NoisyDecomposeOptions o;
        o.k = 4;
        try {
            fitted.push_back(nmse(s, synthesize(decompose_noisy(s_w, o), 30)));
        } catch (const AlgorithmError&) {
            fitted.push_back(INFINITY);
        }
        observed.push_back(nmse(s, s_w));
    }
    CHECK(median(fitted) < median(observed));
}

}
