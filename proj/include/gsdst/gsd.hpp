#pragma once

// Noiseless geometric sequence decomposition: find the number of
// superposed components from the basic-simplex volume series, read the
// common ratios off the volume quotients as polynomial roots, then solve
// for the initial terms by least squares.

#include "gsdst/linalg.hpp"
#include "gsdst/sequence.hpp"
#include "gsdst/simplex.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gsdst {

/// Roots closer than this (relative) are reported as degenerate.
inline constexpr double kDuplicateRootTolerance = 1e-6;
/// decompose() rejects results whose round-trip error exceeds this (relative norm).
inline constexpr double kRoundTripTolerance = 1e-4;

/// True iff `length` samples realize at least order+2 search-space vertices,
/// i.e. stride*(order+1) + last_offset <= length-1.
bool check_condition1(std::size_t length, const IndexPattern& pattern);

struct DetectOptions {
    double tolerance = kDefaultGeometricTolerance;
    /// Defaults to floor((P-1)/2).
    std::optional<std::size_t> k_max;
    /// Pattern used for candidate order k_hat; defaults to stride 1, offsets {0..k_hat-1}.
    std::function<IndexPattern(std::size_t)> pattern_for;
};

/// Smallest order whose basic volume series is a nonzero geometric sequence.
/// Throws DetectionError if none up to k_max qualifies.
std::size_t detect_k(const ComplexSequence& s, const DetectOptions& options = {});

/// Roots of r^k - v1 r^(k-1) + v2 r^(k-2) - ... + (-1)^k vk.
ComplexVector extract_ratios(const VolumeQuotients& v);

/// Least-squares a for s[m] = sum_n a_n r_n^m over every sample.
ComplexVector extract_initial_terms(const ComplexSequence& s, std::span<const Complex> ratios);

/// True if any two ratios lie within kDuplicateRootTolerance of each other (relative).
bool has_near_duplicate_ratios(std::span<const Complex> ratios);

struct DecomposeOptions {
    DetectOptions detect;
    /// Known order; skips detection when set.
    std::optional<std::size_t> k;
    /// Stride-1 pattern whose union polyhedron yields the quotients;
    /// defaults to offsets {0..k-1}.
    std::optional<IndexPattern> pattern;
    std::size_t union_index = 0;
    bool verify_round_trip = true;
};

struct DecomposeReport {
    Decomposition decomposition;
    std::size_t k = 0;
    double round_trip_nmse = 0.0;
    std::vector<std::string> warnings;
};

/// Ratios and initial terms of a sequence whose order is known. The pattern
/// must have stride 1 and order k; the union polyhedron must fit in s.
DecomposeReport extract_components(const ComplexSequence& s, const IndexPattern& pattern,
                                   std::size_t union_index = 0);

/// Full pipeline: detect k (unless given), extract components, check that
/// synthesis reproduces s.
DecomposeReport decompose_detailed(const ComplexSequence& s, const DecomposeOptions& options = {});
Decomposition decompose(const ComplexSequence& s, const DecomposeOptions& options = {});

} // namespace gsdst
