#pragma once

// Noisy samples: Hankel low-rank de-noising and model-order estimation by
// the spread of volume quotients over many index patterns.

#include "gsdst/gsd.hpp"
#include "gsdst/linalg.hpp"
#include "gsdst/sequence.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gsdst {

struct DenoiseConfig {
    double epsilon = 1e-10;
    std::size_t max_iterations = 30;

    /// Throws InputError unless epsilon > 0 and max_iterations >= 1.
    void validate() const;
};

enum class SimilarityKind { full, diagonal, rapid };

std::string_view to_string(SimilarityKind kind);
/// Accepts "full", "diag"/"diagonal", "rapid".
SimilarityKind parse_similarity_kind(std::string_view name);

inline constexpr std::size_t kDefaultPairBudget = 20000;

struct SimilarityOptions {
    SimilarityKind kind = SimilarityKind::diagonal;
    /// Upper bound on the number of distances evaluated by full and diagonal.
    std::size_t pair_budget = kDefaultPairBudget;
};

/// P_h x (P - P_h + 1) matrix with Q[m,n] = s[m+n], P_h = floor((P+1)/2).
ComplexMatrix hankelize(const ComplexSequence& s);

/// Anti-diagonal means of q.
ComplexSequence dehankelize(const ComplexMatrix& q);

struct DenoiseResult {
    ComplexSequence sequence;
    std::size_t iterations = 0;
    bool converged = false;
    /// ||H(s_i) - rank-k truncation||_F before each iteration's truncation.
    std::vector<double> projection_residuals;
};

/// Alternate between rank-k truncation and Hankel structure until the
/// relative change of the sequence drops below cfg.epsilon.
DenoiseResult cadzow_denoise(const ComplexSequence& s_w, std::size_t k,
                             const DenoiseConfig& cfg = {});

/// Volume quotients of the pattern's j-th union polyhedron without the leading 1.
ComplexVector informative_quotients(const ComplexSequence& s_w, std::size_t k_hat,
                                    const IndexPattern& pattern, std::size_t j = 0);

/// Geometric mean of distances between informative quotients of different
/// index patterns sharing a stride. Zero for a noiseless sequence at its true
/// order; +inf if every candidate is degenerate. Throws InfeasibleError if the
/// sequence is too short for two candidates.
double similarity(const ComplexSequence& s_w, std::size_t k_hat,
                  const SimilarityOptions& options = {}, std::uint64_t seed = 0);

/// argmin of similarity over k_hat in [1, k_max]; ties go to the smaller order.
std::size_t estimate_k(const ComplexSequence& s_w, std::size_t k_max,
                       const SimilarityOptions& options = {}, std::uint64_t seed = 0);

struct NoisyDecomposeOptions {
    /// Estimated by similarity when unset.
    std::optional<std::size_t> k;
    /// Defaults to floor((P-1)/2).
    std::optional<std::size_t> k_max;
    DenoiseConfig denoise;
    SimilarityOptions similarity;
    std::uint64_t seed = 0;
};

struct NoisyDecomposeReport {
    Decomposition decomposition;
    std::size_t k = 0;
    bool k_estimated = false;
    DenoiseResult denoise;
    /// nmse(s_w, synthesize(decomposition)).
    double round_trip_nmse = 0.0;
    std::vector<std::string> warnings;
};

NoisyDecomposeReport decompose_noisy_detailed(const ComplexSequence& s_w,
                                              const NoisyDecomposeOptions& options = {});
Decomposition decompose_noisy(const ComplexSequence& s_w,
                              const NoisyDecomposeOptions& options = {});

} // namespace gsdst
