#include "gsdst/simplex.hpp"

#include "gsdst/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsdst {

namespace {

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

std::size_t sample_index(const IndexPattern& pattern, std::size_t vertex, std::size_t coordinate) {
    return pattern.stride() * vertex + pattern.offsets()[coordinate];
}

void require_vertices(const ComplexSequence& s, const IndexPattern& pattern,
                      std::size_t vertex_count) {
    if (vertex_count == 0) return;
    const std::size_t last = sample_index(pattern, vertex_count - 1, pattern.order() - 1);
    if (last >= s.size()) throw InsufficientSamplesError(last, s.size());
}

double max_magnitude(const ComplexSequence& s, const IndexPattern& pattern,
                     std::size_t vertex_count) {
    double g = 0.0;
    for (std::size_t v = 0; v < vertex_count; ++v)
        for (std::size_t m = 0; m < pattern.order(); ++m)
            g = std::max(g, std::abs(s[sample_index(pattern, v, m)]));
    return g;
}

// The quotients are the normalized null vector of the union matrix A = [B | c]
// (Cramer's rule): with B x = -c, Lambda(drop column i) / Lambda(drop column k)
// = (-1)^(k-i) x[i]. One pivoted elimination of B yields both x and det(B).
bool quotients_into(const ComplexSequence& s, std::size_t stride, std::span<const std::size_t> offsets,
                    std::size_t j, std::span<Complex> out) {
    const std::size_t k = offsets.size();
    const std::size_t w = k + 1;
    thread_local std::vector<Complex> scratch;
    if (scratch.size() < k * w) scratch.resize(k * w);
    Complex* a = scratch.data();
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t t = 0; t <= k; ++t) a[m * w + t] = s[stride * (j + t) + offsets[m]];

    // Degenerate when |det B| is at rounding level relative to the product of its
    // column norms; rank-deficient unions land near 1e-16 of that bound. Both
    // products are kept as mantissa and binary exponent.
    double bound = kDegenerateQuotientTolerance * kDegenerateQuotientTolerance;
    int bound_exp = 0;
    for (std::size_t col = 0; col < k; ++col) {
        double norm2 = 0.0;
        for (std::size_t m = 0; m < k; ++m) norm2 += std::norm(a[m * w + col]);
        if (norm2 == 0.0) return false;
        bound *= norm2;
        if (bound > 1e100 || bound < 1e-100) {
            int e = 0;
            bound = std::frexp(bound, &e);
            bound_exp += e;
        }
    }

    double det2 = 1.0;
    int det_exp = 0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot_row = col;
        double pivot_norm = std::norm(a[col * w + col]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double candidate = std::norm(a[r * w + col]);
            if (candidate > pivot_norm) {
                pivot_norm = candidate;
                pivot_row = r;
            }
        }
        if (pivot_norm == 0.0) return false;
        if (pivot_row != col) {
            for (std::size_t c = col; c < w; ++c) std::swap(a[col * w + c], a[pivot_row * w + c]);
        }
        det2 *= pivot_norm;
        if (det2 > 1e100 || det2 < 1e-100) {
            int e = 0;
            det2 = std::frexp(det2, &e);
            det_exp += e;
        }
        const Complex inv_pivot = 1.0 / a[col * w + col];
        for (std::size_t r = col + 1; r < k; ++r) {
            const Complex factor = a[r * w + col] * inv_pivot;
            if (factor == Complex{}) continue;
            for (std::size_t c = col + 1; c < w; ++c) a[r * w + c] -= factor * a[col * w + c];
        }
    }
    int e = 0;
    det2 = std::frexp(det2, &e);
    det_exp += e;
    bound = std::frexp(bound, &e);
    bound_exp += e;
    // Both mantissas now lie in [0.5, 1).
    if (det_exp < bound_exp || (det_exp == bound_exp && det2 < bound)) return false;

    // Back substitution for B x = -c; c sits in column k. x[row] goes to out[k - row].
    out[0] = Complex{1.0, 0.0};
    for (std::size_t row = k; row-- > 0;) {
        Complex sum = -a[row * w + k];
        for (std::size_t c = row + 1; c < k; ++c) sum -= a[row * w + c] * a[c * w + k];
        const Complex x = sum / a[row * w + row];
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        a[row * w + k] = x;
        const std::size_t l = k - row;
        out[l] = (l % 2 == 0) ? x : -x;
    }
    return true;
}

std::optional<VolumeQuotients> compute_quotients(const ComplexSequence& s, const IndexPattern& pattern,
                                                 std::size_t j) {
    require_vertices(s, pattern, j + pattern.order() + 1);
    VolumeQuotients out;
    out.values.resize(pattern.order() + 1);
    if (!quotients_into(s, pattern.stride(), pattern.offsets(), j, out.values)) return {};
    return out;
}

} // namespace

SearchSpace build_search_space(const ComplexSequence& s, const IndexPattern& pattern,
                               std::size_t count) {
    require_vertices(s, pattern, count);
    SearchSpace space{pattern, {}};
    space.vertices.reserve(count);
    for (std::size_t v = 0; v < count; ++v) {
        ComplexVector vertex(pattern.order());
        for (std::size_t m = 0; m < pattern.order(); ++m) vertex[m] = s[sample_index(pattern, v, m)];
        space.vertices.push_back(std::move(vertex));
    }
    return space;
}

VolumeSeries basic_volume_series(const ComplexSequence& s, const IndexPattern& pattern,
                                 std::size_t vertex_count) {
    const std::size_t k = pattern.order();
    require_vertices(s, pattern, vertex_count);
    VolumeSeries series;
    if (vertex_count < k) return series;

    const double scale = factorial(k);
    std::vector<Complex> scratch(k * k);
    series.volumes.reserve(vertex_count - k + 1);
    for (std::size_t j = 0; j + k <= vertex_count; ++j) {
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t m = 0; m < k; ++m) scratch[m * k + c] = s[sample_index(pattern, j + c, m)];
        const ScaledDeterminant det = detail::lu_determinant_inplace(scratch, k);
        series.volumes.push_back(det.value() / scale);
    }
    return series;
}

double zero_volume_threshold(const ComplexSequence& s, const IndexPattern& pattern,
                             std::size_t vertex_count) {
    require_vertices(s, pattern, vertex_count);
    const double g = max_magnitude(s, pattern, vertex_count);
    return kZeroVolumeTolerance * std::pow(g, static_cast<double>(pattern.order()));
}

double degenerate_volume_threshold(const ComplexSequence& s, const IndexPattern& pattern,
                                   std::size_t vertex_count) {
    require_vertices(s, pattern, vertex_count);
    double largest = 0.0;
    for (std::size_t v = 0; v < vertex_count; ++v) {
        double norm2 = 0.0;
        for (std::size_t m = 0; m < pattern.order(); ++m) norm2 += std::norm(s[sample_index(pattern, v, m)]);
        largest = std::max(largest, norm2);
    }
    const double k = static_cast<double>(pattern.order());
    return kDegenerateQuotientTolerance * std::pow(largest, 0.5 * k) / factorial(pattern.order());
}

GeometricTest is_geometric(std::span<const Complex> v, double tol, double zero_threshold) {
    if (v.size() < 3) {
        throw InputError("is_geometric needs at least 3 terms, got " + std::to_string(v.size()));
    }
    for (Complex z : v) {
        if (!(std::abs(z) > zero_threshold)) return {};
    }
    ComplexVector ratios(v.size() - 1);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) ratios[j] = v[j + 1] / v[j];
    for (std::size_t a = 0; a < ratios.size(); ++a)
        for (std::size_t b = a + 1; b < ratios.size(); ++b) {
            const double scale = std::max(std::abs(ratios[a]), std::abs(ratios[b]));
            if (std::abs(ratios[a] - ratios[b]) > tol * scale) return {};
        }
    Complex mean{};
    for (Complex q : ratios) mean += q;
    return {true, mean / static_cast<double>(ratios.size())};
}

ComplexMatrix union_polyhedron(const ComplexSequence& s, const IndexPattern& pattern,
                               std::size_t j) {
    const std::size_t k = pattern.order();
    require_vertices(s, pattern, j + k + 1);
    return ComplexMatrix(k, k + 1, [&](std::size_t m, std::size_t t) {
        return s[sample_index(pattern, j + t, m)];
    });
}

std::optional<VolumeQuotients> try_volume_quotients(const ComplexSequence& s,
                                                    const IndexPattern& pattern, std::size_t j) {
    return compute_quotients(s, pattern, j);
}

bool try_volume_quotients_into(const ComplexSequence& s, std::size_t stride,
                               std::span<const std::size_t> offsets, std::size_t j,
                               std::span<Complex> out) {
    if (stride < 1 || offsets.empty() || out.size() != offsets.size() + 1) {
        throw InputError("try_volume_quotients_into: bad pattern or output size");
    }
    const std::size_t k = offsets.size();
    for (std::size_t m = 1; m < k; ++m)
        if (offsets[m] <= offsets[m - 1]) throw InputError("offsets must be strictly increasing");
    const std::size_t last = stride * (j + k) + offsets.back();
    if (last >= s.size()) throw InsufficientSamplesError(last, s.size());
    return quotients_into(s, stride, offsets, j, out);
}

VolumeQuotients volume_quotients(const ComplexSequence& s, const IndexPattern& pattern,
                                 std::size_t j) {
    auto quotients = compute_quotients(s, pattern, j);
    if (!quotients) {
        throw DegenerateSimplexError(
            "reference simplex volume is numerically zero (order " +
            std::to_string(pattern.order()) +
            " too high for the sequence, or repeated common ratios)");
    }
    return std::move(*quotients);
}

} // namespace gsdst
