#pragma once

// Simplex-volume transform. A sequence is lifted into a k-dimensional
// space by an IndexPattern: every vertex is a k-vector of samples, and
// successive vertices are shifted by the pattern stride. Simplexes are
// spanned by the origin and k vertices; their signed volumes are
// det([v_0 .. v_{k-1}]) / k! with vertices as matrix columns.

#include "gsdst/linalg.hpp"
#include "gsdst/sequence.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gsdst {

struct SearchSpace {
    IndexPattern pattern;
    std::vector<ComplexVector> vertices;

    std::size_t cardinality() const noexcept { return vertices.size(); }
};

/// Volumes of the basic simplexes on vertices j .. j+order-1, j = 0, 1, ...
struct VolumeSeries {
    ComplexVector volumes;
};

/// Volume quotients of the combinatorial simplexes of one union polyhedron.
/// values[0] == 1; values[l] equals the l-th elementary symmetric polynomial
/// of the common ratios (raised to the pattern stride) when the order is right.
struct VolumeQuotients {
    ComplexVector values;

    std::size_t order() const noexcept { return values.size() - 1; }
    /// The quotients without the leading 1.
    std::span<const Complex> informative() const noexcept {
        return std::span<const Complex>(values).subspan(1);
    }
};

struct GeometricTest {
    bool geometric = false;
    std::optional<Complex> ratio;
};

/// Relative threshold under which a volume counts as zero.
inline constexpr double kZeroVolumeTolerance = 1e-10;
/// volume_quotients treats the reference simplex as degenerate when its
/// determinant falls below this fraction of the product of its column norms.
inline constexpr double kDegenerateQuotientTolerance = 1e-14;
inline constexpr double kDefaultGeometricTolerance = 1e-9;

/// `count` vertices; vertex j coordinate m is s[stride*j + offsets[m]].
/// Throws InsufficientSamplesError naming the largest index required.
SearchSpace build_search_space(const ComplexSequence& s, const IndexPattern& pattern,
                               std::size_t count);

/// Volumes of the basic simplexes over the first `vertex_count` vertices;
/// yields vertex_count - order + 1 volumes (empty if fewer vertices than order).
VolumeSeries basic_volume_series(const ComplexSequence& s, const IndexPattern& pattern,
                                 std::size_t vertex_count);

/// 1e-10 * G^order, G = max |s[l]| over the indices the first
/// `vertex_count` vertices touch.
double zero_volume_threshold(const ComplexSequence& s, const IndexPattern& pattern,
                             std::size_t vertex_count);

/// 1e-14 * N^order / order!, N = largest vertex norm among the first
/// `vertex_count` vertices. Bounds the volume of a rank-deficient simplex
/// after rounding; used by order detection.
double degenerate_volume_threshold(const ComplexSequence& s, const IndexPattern& pattern,
                                   std::size_t vertex_count);

/// True iff every |v[j]| > zero_threshold and all consecutive ratios agree
/// pairwise within relative tolerance `tol`. Requires v.size() >= 3.
GeometricTest is_geometric(std::span<const Complex> v, double tol = kDefaultGeometricTolerance,
                           double zero_threshold = 0.0);

/// The order+1 vertices j .. j+order of the pattern's search space as the
/// columns of an order x (order+1) matrix.
ComplexMatrix union_polyhedron(const ComplexSequence& s, const IndexPattern& pattern,
                               std::size_t j);

/// Quotients Lambda(subset l) / Lambda(subset 0) over the order+1 column
/// subsets of the j-th union polyhedron, subsets taken in lexicographic order
/// of their retained column indices. Throws DegenerateSimplexError when the
/// reference volume is numerically zero (see kDegenerateQuotientTolerance).
VolumeQuotients volume_quotients(const ComplexSequence& s, const IndexPattern& pattern,
                                 std::size_t j);

/// Same as volume_quotients but returns nullopt instead of throwing on a
/// degenerate reference simplex. Index feasibility is still checked.
std::optional<VolumeQuotients> try_volume_quotients(const ComplexSequence& s,
                                                    const IndexPattern& pattern, std::size_t j);

/// Allocation-free try_volume_quotients for scans over many patterns; `out`
/// receives order+1 values. Returns false on a degenerate reference simplex.
bool try_volume_quotients_into(const ComplexSequence& s, std::size_t stride,
                               std::span<const std::size_t> offsets, std::size_t j,
                               std::span<Complex> out);

} // namespace gsdst
