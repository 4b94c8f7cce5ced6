#include "gsdst/denoise.hpp"

#include "gsdst/errors.hpp"
#include "gsdst/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <numbers>
#include <span>

namespace gsdst {

namespace {

constexpr double kDistanceFloor = 1e-300;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
    return result;
}

// binomial(n, r) for n < rows and r <= cols, row-major.
struct Pascal {
    std::size_t cols;
    std::vector<std::uint64_t> table;

    Pascal(std::size_t n, std::size_t k) : cols(k + 1), table((n + 1) * (k + 1), 0) {
        for (std::size_t i = 0; i <= n; ++i) {
            table[i * cols] = 1;
            for (std::size_t r = 1; r <= std::min(i, k); ++r)
                table[i * cols + r] = table[(i - 1) * cols + r - 1] + (r <= i - 1 ? table[(i - 1) * cols + r] : 0);
        }
    }
    std::uint64_t operator()(std::size_t n, std::size_t r) const { return table[n * cols + r]; }
};

// The rank-th k-subset of {0..n-1} in lexicographic order, written to out.
void unrank_combination(std::uint64_t rank, std::size_t n, std::span<std::size_t> out,
                        const Pascal& choose) {
    const std::size_t k = out.size();
    std::size_t next = 0;
    for (std::size_t slot = 0; slot < k; ++slot) {
        for (;; ++next) {
            const std::uint64_t with_next = choose(n - next - 1, k - slot - 1);
            if (rank < with_next) break;
            rank -= with_next;
        }
        out[slot] = next++;
    }
}

// The rank-th pair (i < j) of n items, row-major over i.
std::pair<std::uint64_t, std::uint64_t> unrank_pair(std::uint64_t rank, std::uint64_t n) {
    // first(i) = i*n - i*(i+1)/2 pairs precede row i; invert the quadratic, then correct.
    auto first = [n](std::uint64_t i) { return i * n - i * (i + 1) / 2; };
    const double b = 2.0 * static_cast<double>(n) - 1.0;
    const double root = std::sqrt(std::max(0.0, b * b - 8.0 * static_cast<double>(rank)));
    std::uint64_t i = static_cast<std::uint64_t>(std::max(0.0, std::floor((b - root) / 2.0)));
    i = std::min<std::uint64_t>(i, n - 2);
    while (i > 0 && first(i) > rank) --i;
    while (i + 2 < n && first(i + 1) <= rank) ++i;
    return {i, i + 1 + (rank - first(i))};
}

// Uniform sample of m distinct values from [0, n), sorted. Dense cases use
// sequential selection; sparse ones draw in batches and discard repeats (the
// first m distinct draws form a uniform m-subset).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t m,
                                                      std::mt19937_64& rng) {
    std::vector<std::uint64_t> out;
    out.reserve(m);
    if (n <= 16 * m) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::uint64_t i = 0; i < n && out.size() < m; ++i) {
            const double need = static_cast<double>(m - out.size());
            if (static_cast<double>(n - i) * u(rng) < need) out.push_back(i);
        }
        return out;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (out.size() < m) {
        const std::size_t have = out.size();
        for (std::uint64_t i = have; i < m; ++i) out.push_back(pick(rng));
        std::sort(out.begin() + static_cast<std::ptrdiff_t>(have), out.end());
        std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(have), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

struct CandidateGroup {
    std::size_t stride;
    std::size_t offset_range; // offsets drawn from {0..offset_range-1}
    std::uint64_t candidates;
    std::uint64_t pairs;
};

std::vector<CandidateGroup> candidate_groups(std::size_t length, std::size_t k_hat,
                                             std::size_t max_stride) {
    std::vector<CandidateGroup> groups;
    for (std::size_t stride = 1; stride <= max_stride; ++stride) {
        if (stride * k_hat >= length) break;
        const std::size_t range = length - stride * k_hat;
        const std::uint64_t n = binomial(range, k_hat);
        groups.push_back({stride, range, n, n * (n - 1) / 2});
    }
    return groups;
}

double geometric_mean(const std::vector<double>& distances) {
    if (distances.empty()) return std::numeric_limits<double>::infinity();
    if (std::all_of(distances.begin(), distances.end(), [](double d) { return d == 0.0; })) return 0.0;
    // Product as mantissa and binary exponent; one log at the end.
    double mantissa = 1.0;
    long long exponent = 0;
    for (double d : distances) {
        mantissa *= std::max(d, kDistanceFloor);
        if (mantissa > 1e100 || mantissa < 1e-100) {
            int e = 0;
            mantissa = std::frexp(mantissa, &e);
            exponent += e;
        }
    }
    const double log_product = std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
    return std::exp(log_product / static_cast<double>(distances.size()));
}

double distance(std::span<const Complex> a, std::span<const Complex> b) {
    double sum = 0.0;
    for (std::size_t l = 1; l < a.size(); ++l) sum += std::norm(a[l] - b[l]);
    return std::sqrt(sum);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void DenoiseConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be > 0");
    if (max_iterations < 1) throw InputError("max_iterations must be >= 1");
}

std::string_view to_string(SimilarityKind kind) {
    switch (kind) {
    case SimilarityKind::full: return "full";
    case SimilarityKind::diagonal: return "diag";
    case SimilarityKind::rapid: return "rapid";
    }
    return "?";
}

SimilarityKind parse_similarity_kind(std::string_view name) {
    if (name == "full") return SimilarityKind::full;
    if (name == "diag" || name == "diagonal") return SimilarityKind::diagonal;
    if (name == "rapid") return SimilarityKind::rapid;
    throw InputError("unknown similarity kind '" + std::string(name) + "'");
}

ComplexMatrix hankelize(const ComplexSequence& s) {
    const std::size_t length = s.size();
    if (length < 2) throw InputError("hankelize needs at least 2 samples");
    const std::size_t rows = (length + 1) / 2;
    return ComplexMatrix(rows, length - rows + 1,
                         [&](std::size_t m, std::size_t n) { return s[m + n]; });
}

ComplexSequence dehankelize(const ComplexMatrix& q) {
    // Mean as first + mean of deviations, so constant anti-diagonals come back exactly.
    const std::size_t length = q.rows() + q.cols() - 1;
    std::vector<Complex> first(length);
    std::vector<Complex> deviation(length);
    std::vector<std::size_t> counts(length, 0);
    for (std::size_t m = 0; m < q.rows(); ++m)
        for (std::size_t n = 0; n < q.cols(); ++n) {
            if (counts[m + n]++ == 0) first[m + n] = q(m, n);
            else deviation[m + n] += q(m, n) - first[m + n];
        }
    for (std::size_t l = 0; l < length; ++l)
        first[l] += deviation[l] / static_cast<double>(counts[l]);
    return ComplexSequence(std::move(first));
}

DenoiseResult cadzow_denoise(const ComplexSequence& s_w, std::size_t k, const DenoiseConfig& cfg) {
    cfg.validate();
    if (s_w.size() < 2) throw InputError("cadzow_denoise needs at least 2 samples");
    const std::size_t rows = (s_w.size() + 1) / 2;
    const std::size_t limit = std::min(rows, s_w.size() - rows + 1);
    if (k < 1 || k > limit) {
        throw InputError("cadzow_denoise: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(limit) + "]");
    }

    DenoiseResult result{s_w, 0, false, {}};
    while (result.iterations < cfg.max_iterations) {
        const ComplexMatrix q = hankelize(result.sequence);
        const ComplexMatrix low_rank = rank_truncate(q, k);
        result.projection_residuals.push_back((q - low_rank).frobenius_norm());
        ComplexSequence next = dehankelize(low_rank);
        ++result.iterations;

        const double before = result.sequence.norm();
        double change = 0.0;
        for (std::size_t l = 0; l < next.size(); ++l) change += std::norm(next[l] - result.sequence[l]);
        change = std::sqrt(change);
        result.sequence = std::move(next);
        if (change < cfg.epsilon * before || change == 0.0) {
            result.converged = true;
            break;
        }
    }
    return result;
}

ComplexVector informative_quotients(const ComplexSequence& s_w, std::size_t k_hat,
                                    const IndexPattern& pattern, std::size_t j) {
    if (pattern.order() != k_hat) throw InputError("informative_quotients: pattern order mismatch");
    const VolumeQuotients q = volume_quotients(s_w, pattern, j);
    return ComplexVector(q.values.begin() + 1, q.values.end());
}

double similarity(const ComplexSequence& s_w, std::size_t k_hat, const SimilarityOptions& options,
                  std::uint64_t seed) {
    if (k_hat < 1) throw InputError("similarity: k_hat must be >= 1");
    if (options.pair_budget < 1) throw InputError("similarity: pair_budget must be >= 1");
    const std::size_t length = s_w.size();
    if (length < k_hat + 1) {
        throw InfeasibleError("similarity: " + std::to_string(length) +
                              " samples cannot hold a union polyhedron of order " +
                              std::to_string(k_hat));
    }
    const std::size_t upper = (length - k_hat) / (k_hat + 1);
    const std::size_t max_stride = options.kind == SimilarityKind::full ? upper : 1;
    std::vector<CandidateGroup> groups = candidate_groups(length, k_hat, std::max<std::size_t>(max_stride, 1));
    std::erase_if(groups, [](const CandidateGroup& g) { return g.candidates < 2; });
    if (groups.empty() || (options.kind == SimilarityKind::full && upper < 1)) {
        throw InfeasibleError("similarity: fewer than two quotient candidates for order " +
                              std::to_string(k_hat) + " with " + std::to_string(length) +
                              " samples");
    }

    std::mt19937_64 rng(seed);
    std::uint64_t total = 0;
    for (const auto& g : groups) total += g.pairs;

    std::vector<std::uint64_t> picks;
    if (options.kind == SimilarityKind::rapid) {
        picks.push_back(std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng));
    } else if (total <= options.pair_budget) {
        picks.resize(total);
        for (std::uint64_t i = 0; i < total; ++i) picks[i] = i;
    } else {
        picks = sample_without_replacement(total, options.pair_budget, rng);
    }

    std::size_t widest = 0;
    for (const auto& g : groups) widest = std::max(widest, g.offset_range);
    const Pascal choose(widest, k_hat);

    // Per-candidate quotients of the current group, computed on first use.
    enum : std::uint8_t { unknown, usable, degenerate };
    std::vector<std::uint8_t> state;
    std::vector<Complex> values;
    std::vector<std::size_t> offsets(k_hat);
    const std::size_t width = k_hat + 1;
    std::size_t group = 0;
    std::uint64_t group_start = 0;
    auto open_group = [&] {
        state.assign(groups[group].candidates, unknown);
        values.resize(groups[group].candidates * width);
    };
    auto candidate = [&](std::uint64_t rank) -> bool {
        if (state[rank] == unknown) {
            const CandidateGroup& g = groups[group];
            unrank_combination(rank, g.offset_range, offsets, choose);
            const std::span<Complex> out(values.data() + rank * width, width);
            state[rank] = try_volume_quotients_into(s_w, g.stride, offsets, 0, out) ? usable : degenerate;
        }
        return state[rank] == usable;
    };

    std::vector<double> distances;
    distances.reserve(picks.size());
    open_group();
    for (std::uint64_t pick : picks) {
        if (pick >= group_start + groups[group].pairs) {
            while (pick >= group_start + groups[group].pairs) {
                group_start += groups[group].pairs;
                ++group;
            }
            open_group();
        }
        const auto [i, j] = unrank_pair(pick - group_start, groups[group].candidates);
        if (!candidate(i) || !candidate(j)) continue;
        distances.push_back(distance({values.data() + i * width, width}, {values.data() + j * width, width}));
    }
    return geometric_mean(distances);
}

std::size_t estimate_k(const ComplexSequence& s_w, std::size_t k_max, const SimilarityOptions& options,
                       std::uint64_t seed) {
    if (k_max < 1) throw InputError("estimate_k: k_max must be >= 1");
    std::optional<std::size_t> best;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k_hat = 1; k_hat <= k_max; ++k_hat) {
        double value;
        try {
            value = similarity(s_w, k_hat, options, mix_seed(seed, k_hat));
        } catch (const InfeasibleError&) {
            continue;
        }
        if (!best || value < best_value) {
            best = k_hat;
            best_value = value;
        }
    }
    if (!best) {
        throw InfeasibleError("estimate_k: no order in [1, " + std::to_string(k_max) +
                              "] is feasible for " + std::to_string(s_w.size()) + " samples");
    }
    return *best;
}

NoisyDecomposeReport decompose_noisy_detailed(const ComplexSequence& s_w,
                                              const NoisyDecomposeOptions& options) {
    options.denoise.validate();
    const std::size_t length = s_w.size();
    std::size_t k = 0;
    bool estimated = false;
    if (options.k) {
        k = *options.k;
    } else {
        const std::size_t k_max = options.k_max.value_or(length >= 3 ? (length - 1) / 2 : 0);
        if (k_max < 1) throw InsufficientSamplesError(2, length);
        k = estimate_k(s_w, k_max, options.similarity, options.seed);
        estimated = true;
    }
    if (k < 1) throw InputError("decompose_noisy: k must be >= 1");
    if (length < 2 * k) throw InsufficientSamplesError(2 * k - 1, length);

    DenoiseResult cleaned = cadzow_denoise(s_w, k, options.denoise);
    DecomposeReport extracted = extract_components(cleaned.sequence, IndexPattern::consecutive(k), 0);
    const double error = nmse(s_w, synthesize(extracted.decomposition, length));
    return {std::move(extracted.decomposition), k, estimated, std::move(cleaned), error,
            std::move(extracted.warnings)};
}

Decomposition decompose_noisy(const ComplexSequence& s_w, const NoisyDecomposeOptions& options) {
    return decompose_noisy_detailed(s_w, options).decomposition;
}

} // namespace gsdst
