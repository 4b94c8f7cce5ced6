#include "gsdst/gsd.hpp"

#include "gsdst/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gsdst {

bool check_condition1(std::size_t length, const IndexPattern& pattern) {
    const std::size_t needed = pattern.stride() * (pattern.order() + 1) + pattern.last_offset();
    return length >= 1 && needed <= length - 1;
}

std::size_t detect_k(const ComplexSequence& s, const DetectOptions& options) {
    const std::size_t length = s.size();
    if (length < 3) throw InputError("detect_k needs at least 3 samples");
    const std::size_t k_max = options.k_max.value_or((length - 1) / 2);
    if (k_max < 1) throw InputError("detect_k: k_max must be >= 1");

    for (std::size_t k_hat = 1; k_hat <= k_max; ++k_hat) {
        const IndexPattern pattern =
            options.pattern_for ? options.pattern_for(k_hat) : IndexPattern::consecutive(k_hat);
        if (pattern.order() != k_hat) {
            throw InputError("detect_k: pattern for order " + std::to_string(k_hat) + " has order " +
                             std::to_string(pattern.order()));
        }
        if (!check_condition1(length, pattern)) break;

        // Condition 1 guarantees at least three volumes; keep up to k_hat+3.
        const std::size_t available = pattern.vertex_capacity(length) - k_hat + 1;
        const std::size_t volumes = std::min(available, k_hat + 3);
        const std::size_t vertices = volumes + k_hat - 1;

        const VolumeSeries series = basic_volume_series(s, pattern, vertices);
        const double threshold = degenerate_volume_threshold(s, pattern, vertices);
        if (is_geometric(series.volumes, options.tolerance, threshold).geometric) return k_hat;
    }
    throw DetectionError("no order up to " + std::to_string(k_max) +
                         " yields a geometric volume series (noise, repeated ratios, or too few "
                         "samples)");
}

ComplexVector extract_ratios(const VolumeQuotients& v) {
    if (v.values.size() < 2 || v.values[0] != Complex{1.0, 0.0}) {
        throw InputError("volume quotients must start with 1 and have order >= 1");
    }
    ComplexVector coefficients(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i)
        coefficients[i] = (i % 2 == 0) ? v.values[i] : -v.values[i];
    return polynomial_roots(coefficients);
}

ComplexVector extract_initial_terms(const ComplexSequence& s, std::span<const Complex> ratios) {
    const std::size_t k = ratios.size();
    if (k == 0) throw InputError("extract_initial_terms: no ratios");
    if (s.size() < k) {
        throw InputError("extract_initial_terms: need at least " + std::to_string(k) + " samples");
    }
    std::vector<Complex> entries(s.size() * k);
    for (std::size_t n = 0; n < k; ++n) {
        Complex power{1.0, 0.0};
        for (std::size_t m = 0; m < s.size(); ++m) {
            entries[m * k + n] = power;
            power *= ratios[n];
        }
    }
    const ComplexMatrix vandermonde(s.size(), k, std::move(entries));
    return least_squares(vandermonde, s.samples());
}

bool has_near_duplicate_ratios(std::span<const Complex> ratios) {
    for (std::size_t i = 0; i < ratios.size(); ++i)
        for (std::size_t j = i + 1; j < ratios.size(); ++j) {
            const double scale = std::max({std::abs(ratios[i]), std::abs(ratios[j]), 1e-300});
            if (std::abs(ratios[i] - ratios[j]) < kDuplicateRootTolerance * scale) return true;
        }
    return false;
}

DecomposeReport extract_components(const ComplexSequence& s, const IndexPattern& pattern,
                                   std::size_t union_index) {
    if (pattern.stride() != 1) {
        throw InputError("component extraction requires a stride-1 pattern");
    }
    const VolumeQuotients quotients = volume_quotients(s, pattern, union_index);
    const ComplexVector ratios = extract_ratios(quotients);

    std::vector<std::string> warnings;
    if (has_near_duplicate_ratios(ratios)) {
        warnings.emplace_back("near-duplicate common ratios; initial terms are ill-conditioned");
    }
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (ratios[i] == Complex{}) throw DegenerateSimplexError("extracted a zero common ratio");
        for (std::size_t j = i + 1; j < ratios.size(); ++j)
            if (std::abs(ratios[i] - ratios[j]) <= kDefaultDistinctTolerance) {
                throw DegenerateSimplexError("extracted repeated common ratios");
            }
    }

    const ComplexVector initial = extract_initial_terms(s, ratios);
    std::vector<GeometricComponent> components;
    components.reserve(ratios.size());
    for (std::size_t n = 0; n < ratios.size(); ++n) {
        if (initial[n] == Complex{}) {
            throw DegenerateSimplexError("initial term of component " + std::to_string(n) +
                                         " is exactly zero");
        }
        components.emplace_back(initial[n], ratios[n]);
    }
    Decomposition decomposition(std::move(components));
    const double error = nmse(s, synthesize(decomposition, s.size()));
    return {std::move(decomposition), ratios.size(), error, std::move(warnings)};
}

DecomposeReport decompose_detailed(const ComplexSequence& s, const DecomposeOptions& options) {
    const std::size_t k = options.k ? *options.k : detect_k(s, options.detect);
    if (k < 1) throw InputError("decompose: k must be >= 1");
    const IndexPattern pattern = options.pattern.value_or(IndexPattern::consecutive(k));
    if (pattern.order() != k) {
        throw InputError("decompose: pattern order " + std::to_string(pattern.order()) +
                         " differs from k=" + std::to_string(k));
    }
    DecomposeReport report = extract_components(s, pattern, options.union_index);
    if (options.verify_round_trip && std::sqrt(report.round_trip_nmse) > kRoundTripTolerance) {
        throw InconsistencyError("decomposition does not reproduce the sequence (relative error " +
                                 std::to_string(std::sqrt(report.round_trip_nmse)) + ")");
    }
    return report;
}

Decomposition decompose(const ComplexSequence& s, const DecomposeOptions& options) {
    return decompose_detailed(s, options).decomposition;
}

} // namespace gsdst
