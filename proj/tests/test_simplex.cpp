#include "gsdst/errors.hpp"
#include "gsdst/simplex.hpp"

#include "golden.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace gsdst;

namespace {

Decomposition make(const ComplexVector& a, const ComplexVector& r) {
    std::vector<GeometricComponent> c;
    for (std::size_t n = 0; n < a.size(); ++n) c.emplace_back(a[n], r[n]);
    return Decomposition(std::move(c));
}

ComplexVector powers(const ComplexVector& r, std::size_t p) {
    ComplexVector out;
    for (Complex z : r) out.push_back(std::pow(z, static_cast<double>(p)));
    return out;
}

Complex product(const ComplexVector& r) {
    Complex p{1.0};
    for (Complex z : r) p *= z;
    return p;
}

std::size_t length_for(const IndexPattern& p, std::size_t vertices) {
    return p.stride() * (vertices - 1) + p.last_offset() + 1;
}

} // namespace

TEST_SUITE("simplex") {

TEST_CASE("search space vertices") {
    const auto s = golden::real_sequence();
    const SearchSpace strided = build_search_space(s, IndexPattern(2, {0, 1, 4}), 2);
    REQUIRE(strided.cardinality() == 2);
    CHECK(strided.vertices[0] == ComplexVector{7.0, 3.0, 117.0});
    CHECK(strided.vertices[1] == ComplexVector{21.0, 39.0, 861.0});

    const SearchSpace consecutive = build_search_space(s, IndexPattern::consecutive(3), 4);
    CHECK(consecutive.vertices[0] == ComplexVector{7.0, 3.0, 21.0});
    CHECK(consecutive.vertices[3] == ComplexVector{39.0, 117.0, 303.0});

    const SearchSpace samples = build_search_space(s, IndexPattern::consecutive(1), 9);
    for (std::size_t l = 0; l < 9; ++l) CHECK(samples.vertices[l] == ComplexVector{s[l]});

    try {
        build_search_space(s, IndexPattern(2, {0, 1, 4}), 5);
        FAIL("expected InsufficientSamplesError");
    } catch (const InsufficientSamplesError& e) {
        CHECK(e.required_index() == 12);
        CHECK(e.length() == 9);
    }
}

TEST_CASE("basic volume series of the integer example") {
    const auto s = golden::real_sequence();
    const auto two = basic_volume_series(s, IndexPattern::consecutive(2), 4).volumes;
    REQUIRE(two.size() == 3);
    CHECK(oracle::max_rel_err(two, {69.0, -162.0, 468.0}) < 1e-12);

    const auto three = basic_volume_series(s, IndexPattern::consecutive(3), 5).volumes;
    REQUIRE(three.size() == 3);
    CHECK(oracle::max_rel_err(three, {192.0, -1152.0, 6912.0}) < 1e-12);

    const auto spread = basic_volume_series(s, IndexPattern(1, {0, 1, 7}), 2).volumes;
    CHECK(spread.empty());
    const ComplexSequence longer = synthesize(make(golden::real_a(), golden::real_r()), 12);
    const auto wide = basic_volume_series(longer, IndexPattern(1, {0, 1, 7}), 5).volumes;
    CHECK(oracle::max_rel_err(wide, {96768.0, -580608.0, 3483648.0}) < 1e-12);
}

TEST_CASE("geometric test") {
    const auto yes = is_geometric(ComplexVector{192.0, -1152.0, 6912.0});
    CHECK(yes.geometric);
    REQUIRE(yes.ratio);
    CHECK(oracle::rel_err(*yes.ratio, -6.0) < 1e-12);

    CHECK_FALSE(is_geometric(ComplexVector{69.0, -162.0, 468.0}).geometric);
    CHECK_FALSE(is_geometric(ComplexVector{69.0, -162.0, 468.0}).ratio);

    const auto cplx = is_geometric(ComplexVector{Complex{-18, 13.5}, Complex{-20.25, 29.25}, Complex{-15.75, 54}});
    CHECK(cplx.geometric);
    CHECK(oracle::rel_err(*cplx.ratio, Complex{1.5, -0.5}) < 1e-12);

    CHECK_FALSE(is_geometric(ComplexVector{1.0, 2.0, 4.0}, 1e-9, 1.5).geometric);
    CHECK_FALSE(is_geometric(ComplexVector{0.0, 0.0, 0.0}).geometric);
    CHECK_THROWS_AS(is_geometric(ComplexVector{1.0, 2.0}), InputError);
}

TEST_CASE("complex example volumes") {
    const auto v = basic_volume_series(golden::complex_sequence(), IndexPattern::consecutive(2), 4).volumes;
    CHECK(oracle::max_rel_err(v, {Complex{-18, 13.5}, Complex{-20.25, 29.25}, Complex{-15.75, 54}}) < 1e-12);
}

TEST_CASE("union polyhedron columns") {
    const auto s = golden::real_sequence();
    const ComplexMatrix u = union_polyhedron(s, IndexPattern::consecutive(3), 0);
    REQUIRE(u.rows() == 3);
    REQUIRE(u.cols() == 4);
    CHECK(u.column(0) == ComplexVector{7.0, 3.0, 21.0});
    CHECK(u.column(3) == ComplexVector{39.0, 117.0, 303.0});

    const ComplexSequence longer = synthesize(make(golden::real_a(), golden::real_r()), 11);
    const ComplexMatrix w = union_polyhedron(longer, IndexPattern(1, {0, 1, 7}), 0);
    CHECK(w.column(0) == ComplexVector{7.0, 3.0, 2439.0});
    CHECK(w.column(1) == ComplexVector{3.0, 21.0, 7077.0});
    CHECK(w.column(2) == ComplexVector{21.0, 39.0, 20703.0});
    CHECK(w.column(3) == ComplexVector{39.0, 117.0, 61101.0});

    const ComplexMatrix one = union_polyhedron(s, IndexPattern::consecutive(1), 0);
    CHECK(one.rows() == 1);
    CHECK(one.column(1) == ComplexVector{3.0});
    CHECK_THROWS_AS(union_polyhedron(s, IndexPattern(1, {0, 1, 7}), 0), InsufficientSamplesError);
}

TEST_CASE("volume quotients of the examples") {
    const auto s = golden::real_sequence();
    const auto q = volume_quotients(s, IndexPattern::consecutive(3), 0);
    CHECK(oracle::max_rel_err(q.values, {1.0, 4.0, 1.0, -6.0}) < 1e-12);
    CHECK(q.values[0] == Complex{1.0});
    CHECK(q.order() == 3);

    const ComplexSequence longer = synthesize(make(golden::real_a(), golden::real_r()), 11);
    const auto wide = volume_quotients(longer, IndexPattern(1, {0, 1, 7}), 0);
    CHECK(oracle::max_rel_err(wide.values, {1.0, 4.0, 1.0, -6.0}) < 1e-10);

    const auto c = volume_quotients(golden::complex_sequence(), IndexPattern::consecutive(2), 0);
    CHECK(oracle::max_rel_err(c.values, oracle::elementary_symmetric(golden::complex_r())) < 1e-12);
}

TEST_CASE("quotients equal ratios of combinatorial simplex volumes") {
    // Direct definition: drop one column of the union matrix at a time.
    oracle::Gen gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = gen.index(1, 4);
        const ComplexSequence s = synthesize(gen.decomposition(k), 2 * k + 3);
        const IndexPattern p = IndexPattern::consecutive(k);
        const ComplexMatrix u = union_polyhedron(s, p, 1);
        auto minor = [&](std::size_t drop) {
            std::vector<ComplexVector> rows(k);
            for (std::size_t m = 0; m < k; ++m)
                for (std::size_t t = 0; t <= k; ++t)
                    if (t != drop) rows[m].push_back(u(m, t));
            return oracle::cofactor_det(rows);
        };
        const Complex reference = minor(k);
        const auto q = volume_quotients(s, p, 1);
        for (std::size_t l = 1; l <= k; ++l) CHECK(oracle::rel_err(q.values[l], minor(k - l) / reference) < 1e-9);
    }
}

TEST_CASE("degenerate reference simplex") {
    // One component seen at order 2.
    const ComplexSequence s = synthesize(make({1.0}, {Complex{0.8, 0.6}}), 8);
    CHECK_THROWS_AS(volume_quotients(s, IndexPattern::consecutive(2), 0), DegenerateSimplexError);
    CHECK_FALSE(try_volume_quotients(s, IndexPattern::consecutive(2), 0));
    CHECK_THROWS_AS(try_volume_quotients(s, IndexPattern::consecutive(5), 0), InsufficientSamplesError);
}

TEST_CASE("consecutive volume ratio is the ratio product raised to the stride") {
    oracle::Gen gen(32);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = gen.index(1, 5);
        const Decomposition d = gen.decomposition(k);
        const IndexPattern p(gen.index(1, 3), gen.offsets(k));
        const std::size_t vertices = k + 3;
        const ComplexSequence s = synthesize(d, length_for(p, vertices));
        const auto v = basic_volume_series(s, p, vertices).volumes;
        const Complex want = std::pow(product(d.ratios()), static_cast<double>(p.stride()));
        for (std::size_t j = 0; j + 1 < v.size(); ++j) CHECK(oracle::rel_err(v[j + 1] / v[j], want) < 1e-7);
        CHECK(is_geometric(v, 1e-7).geometric);
        if (p.stride() == 1) CHECK(is_geometric(v, 1e-7, zero_volume_threshold(s, p, vertices)).geometric);
    }
}

TEST_CASE("volume series is not geometric below the true order and vanishes above it") {
    oracle::Gen gen(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = gen.index(2, 5);
        const Decomposition d = gen.decomposition(k);
        const std::size_t below = gen.index(1, k - 1);
        const IndexPattern low(1, gen.offsets(below, 2));
        const ComplexSequence s = synthesize(d, 40);
        const auto v = basic_volume_series(s, low, below + 3).volumes;
        CHECK_FALSE(is_geometric(v, 1e-9, zero_volume_threshold(s, low, below + 3)).geometric);

        const std::size_t above = gen.index(k + 1, k + 3);
        const IndexPattern high(gen.index(1, 2), gen.offsets(above, 2));
        const std::size_t vertices = above + 2;
        REQUIRE(length_for(high, vertices) <= s.size());
        double g = 0.0;
        for (Complex z : s) g = std::max(g, std::abs(z));
        for (Complex vol : basic_volume_series(s, high, vertices).volumes)
            CHECK(std::abs(vol) < 1e-8 * std::pow(g, static_cast<double>(above)));
    }
}

TEST_CASE("degenerate volume threshold separates the true order from the next") {
    oracle::Gen gen(35);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = gen.index(1, 5);
        const Decomposition d = gen.decomposition(k);
        const ComplexSequence s = synthesize(d, 2 * k + 3);
        const IndexPattern at(1, gen.offsets(k, 1));
        const std::size_t n = s.size() - at.offsets().back();
        const double keep = degenerate_volume_threshold(s, at, n);
        for (Complex vol : basic_volume_series(s, at, n).volumes) CHECK(std::abs(vol) > keep);

        const IndexPattern over = IndexPattern::consecutive(k + 1);
        const std::size_t m = s.size() - k;
        const double drop = degenerate_volume_threshold(s, over, m);
        for (Complex vol : basic_volume_series(s, over, m).volumes) CHECK(std::abs(vol) < drop);
    }
    CHECK(degenerate_volume_threshold(ComplexSequence({3.0, 4.0, 0.0}), IndexPattern::consecutive(2), 2) ==
          doctest::Approx(1e-14 * 25.0 / 2.0));
}

TEST_CASE("quotients are the same for every union polyhedron and pattern") {
    oracle::Gen gen(34);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = gen.index(1, 5);
        const Decomposition d = gen.decomposition(k);
        const std::size_t stride = gen.index(1, 3);
        const ComplexVector oracle_e = oracle::elementary_symmetric(powers(d.ratios(), stride));
        const ComplexSequence s = synthesize(d, 60);
        for (int choice = 0; choice < 6; ++choice) {
            const IndexPattern p(stride, gen.offsets(k));
            const std::size_t j = gen.index(0, 3);
            const auto q = volume_quotients(s, p, j);
            double scale = 0.0;
            for (Complex e : oracle_e) scale = std::max(scale, std::abs(e));
            for (std::size_t l = 0; l <= k; ++l) CHECK(std::abs(q.values[l] - oracle_e[l]) <= 1e-7 * scale);
        }
    }
}

TEST_CASE("volume changes sign when two vertices swap") {
    oracle::Gen gen(35);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = gen.index(2, 4);
        const ComplexSequence s = synthesize(gen.decomposition(k), 2 * k + 2);
        const ComplexMatrix u = union_polyhedron(s, IndexPattern::consecutive(k), 0);
        const ComplexMatrix basic(k, k, [&](std::size_t r, std::size_t c) { return u(r, c); });
        const Complex d = determinant(basic);
        const Complex swapped = determinant(basic.with_swapped_columns(0, k - 1));
        double bound = 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            double col = 0.0;
            for (std::size_t r = 0; r < k; ++r) col += std::norm(basic(r, c));
            bound *= std::sqrt(col);
        }
        CHECK(std::abs(d + swapped) <= 1e-12 * bound);
    }
}

}
