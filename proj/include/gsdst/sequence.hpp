#pragma once

#include "gsdst/linalg.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace gsdst {

/// Finite sequence of complex samples, length >= 1, all finite.
class ComplexSequence {
public:
    explicit ComplexSequence(std::vector<Complex> samples);
    ComplexSequence(std::initializer_list<Complex> samples);

    std::size_t size() const noexcept { return samples_.size(); }
    Complex operator[](std::size_t l) const { return samples_[l]; }
    std::span<const Complex> samples() const noexcept { return samples_; }
    auto begin() const noexcept { return samples_.begin(); }
    auto end() const noexcept { return samples_.end(); }

    double norm() const;
    ComplexSequence scaled(Complex c) const;

    friend ComplexSequence operator+(const ComplexSequence& lhs, const ComplexSequence& rhs);
    friend bool operator==(const ComplexSequence&, const ComplexSequence&) = default;

private:
    std::vector<Complex> samples_;
};

/// One geometric sequence a * r^l. Both terms must be nonzero.
class GeometricComponent {
public:
    GeometricComponent(Complex initial_term, Complex ratio);

    Complex initial_term() const noexcept { return initial_term_; }
    Complex ratio() const noexcept { return ratio_; }

private:
    Complex initial_term_;
    Complex ratio_;
};

inline constexpr double kDefaultDistinctTolerance = 1e-9;

/// Unordered set of geometric components with pairwise-distinct ratios.
class Decomposition {
public:
    explicit Decomposition(std::vector<GeometricComponent> components,
                           double distinct_tolerance = kDefaultDistinctTolerance);

    std::size_t k() const noexcept { return components_.size(); }
    const std::vector<GeometricComponent>& components() const noexcept { return components_; }
    const GeometricComponent& operator[](std::size_t i) const { return components_[i]; }

    ComplexVector initial_terms() const;
    ComplexVector ratios() const;

private:
    std::vector<GeometricComponent> components_;
};

/// Index-shift stride plus a strictly increasing set of offsets.
///
/// Vertex j of the search space it spans is
/// (s[stride*j + offsets[0]], ..., s[stride*j + offsets[n-1]]).
class IndexPattern {
public:
    IndexPattern(std::size_t stride, std::vector<std::size_t> offsets);

    /// stride 1, offsets {0, 1, ..., order-1}.
    static IndexPattern consecutive(std::size_t order, std::size_t stride = 1);

    std::size_t stride() const noexcept { return stride_; }
    std::size_t order() const noexcept { return offsets_.size(); }
    const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    std::size_t last_offset() const noexcept { return offsets_.back(); }

    /// Number of search-space vertices realizable from `length` samples.
    std::size_t vertex_capacity(std::size_t length) const noexcept;

    friend bool operator==(const IndexPattern&, const IndexPattern&) = default;

private:
    std::size_t stride_;
    std::vector<std::size_t> offsets_;
};

/// sample[l] = sum_n a_n r_n^l for l in [0, length).
ComplexSequence synthesize(const Decomposition& d, std::size_t length);

/// ||estimate - reference||^2 / ||reference||^2.
double nmse(const ComplexSequence& reference, const ComplexSequence& estimate);

struct ComponentMatch {
    /// (truth index, estimate index)
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double max_initial_term_error = 0.0;
    double max_ratio_error = 0.0;
};

/// Greedy matching on |r_truth - r_estimate|, with relative errors of the
/// matched pairs.
ComponentMatch match_components(const Decomposition& truth, const Decomposition& estimate);

} // namespace gsdst
