#include "gsdst/sequence.hpp"

#include "gsdst/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gsdst {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

ComplexSequence::ComplexSequence(std::vector<Complex> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw InputError("sequence must have at least one sample");
    for (std::size_t l = 0; l < samples_.size(); ++l) {
        if (!finite(samples_[l])) {
            throw InputError("sequence sample " + std::to_string(l) + " is not finite");
        }
    }
}

ComplexSequence::ComplexSequence(std::initializer_list<Complex> samples)
    : ComplexSequence(std::vector<Complex>(samples)) {}

double ComplexSequence::norm() const {
    double sum = 0.0;
    for (Complex z : samples_) sum += std::norm(z);
    return std::sqrt(sum);
}

ComplexSequence ComplexSequence::scaled(Complex c) const {
    std::vector<Complex> out(samples_);
    for (Complex& z : out) z *= c;
    return ComplexSequence(std::move(out));
}

ComplexSequence operator+(const ComplexSequence& lhs, const ComplexSequence& rhs) {
    if (lhs.size() != rhs.size()) throw InputError("sequence sum: length mismatch");
    std::vector<Complex> out(lhs.size());
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = lhs[l] + rhs[l];
    return ComplexSequence(std::move(out));
}

GeometricComponent::GeometricComponent(Complex initial_term, Complex ratio)
    : initial_term_(initial_term), ratio_(ratio) {
    if (!finite(initial_term_) || !finite(ratio_)) {
        throw InputError("geometric component terms must be finite");
    }
    if (initial_term_ == Complex{}) throw InputError("initial term must be nonzero");
    if (ratio_ == Complex{}) throw InputError("common ratio must be nonzero");
}

Decomposition::Decomposition(std::vector<GeometricComponent> components, double distinct_tolerance)
    : components_(std::move(components)) {
    if (components_.empty()) throw InputError("decomposition needs at least one component");
    for (std::size_t i = 0; i < components_.size(); ++i)
        for (std::size_t j = i + 1; j < components_.size(); ++j) {
            if (std::abs(components_[i].ratio() - components_[j].ratio()) <= distinct_tolerance) {
                throw InputError("common ratios of components " + std::to_string(i) + " and " +
                                 std::to_string(j) + " are not distinct");
            }
        }
}

ComplexVector Decomposition::initial_terms() const {
    ComplexVector out;
    out.reserve(k());
    for (const auto& c : components_) out.push_back(c.initial_term());
    return out;
}

ComplexVector Decomposition::ratios() const {
    ComplexVector out;
    out.reserve(k());
    for (const auto& c : components_) out.push_back(c.ratio());
    return out;
}

IndexPattern::IndexPattern(std::size_t stride, std::vector<std::size_t> offsets)
    : stride_(stride), offsets_(std::move(offsets)) {
    if (stride_ < 1) throw InputError("index pattern stride must be >= 1");
    if (offsets_.empty()) throw InputError("index pattern needs at least one offset");
    for (std::size_t m = 1; m < offsets_.size(); ++m) {
        if (offsets_[m] <= offsets_[m - 1]) {
            throw InputError("index pattern offsets must be strictly increasing");
        }
    }
}

IndexPattern IndexPattern::consecutive(std::size_t order, std::size_t stride) {
    std::vector<std::size_t> offsets(order);
    for (std::size_t m = 0; m < order; ++m) offsets[m] = m;
    return IndexPattern(stride, std::move(offsets));
}

std::size_t IndexPattern::vertex_capacity(std::size_t length) const noexcept {
    if (length == 0 || last_offset() > length - 1) return 0;
    return (length - 1 - last_offset()) / stride_ + 1;
}

ComplexSequence synthesize(const Decomposition& d, std::size_t length) {
    if (length < 1) throw InputError("synthesize: length must be >= 1");
    std::vector<Complex> out(length);
    for (const auto& c : d.components()) {
        Complex term = c.initial_term();
        for (std::size_t l = 0; l < length; ++l) {
            out[l] += term;
            term *= c.ratio();
        }
    }
    return ComplexSequence(std::move(out));
}

double nmse(const ComplexSequence& reference, const ComplexSequence& estimate) {
    if (reference.size() != estimate.size()) {
        throw InputError("nmse: length mismatch (" + std::to_string(reference.size()) + " vs " +
                         std::to_string(estimate.size()) + ")");
    }
    double error = 0.0;
    double energy = 0.0;
    for (std::size_t l = 0; l < reference.size(); ++l) {
        error += std::norm(estimate[l] - reference[l]);
        energy += std::norm(reference[l]);
    }
    if (energy == 0.0) throw InputError("nmse: reference has zero norm");
    return error / energy;
}

ComponentMatch match_components(const Decomposition& truth, const Decomposition& estimate) {
    const std::size_t k = truth.k();
    if (estimate.k() != k) {
        throw InputError("match_components: k mismatch (" + std::to_string(k) + " vs " +
                         std::to_string(estimate.k()) + ")");
    }
    std::vector<bool> truth_used(k, false);
    std::vector<bool> estimate_used(k, false);
    ComponentMatch match;
    for (std::size_t round = 0; round < k; ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_t = 0;
        std::size_t best_e = 0;
        for (std::size_t t = 0; t < k; ++t) {
            if (truth_used[t]) continue;
            for (std::size_t e = 0; e < k; ++e) {
                if (estimate_used[e]) continue;
                const double cost = std::abs(truth[t].ratio() - estimate[e].ratio());
                if (cost < best) {
                    best = cost;
                    best_t = t;
                    best_e = e;
                }
            }
        }
        truth_used[best_t] = true;
        estimate_used[best_e] = true;
        match.pairs.emplace_back(best_t, best_e);
        const auto& t = truth[best_t];
        const auto& e = estimate[best_e];
        match.max_ratio_error =
            std::max(match.max_ratio_error, std::abs(t.ratio() - e.ratio()) / std::abs(t.ratio()));
        match.max_initial_term_error =
            std::max(match.max_initial_term_error,
                     std::abs(t.initial_term() - e.initial_term()) / std::abs(t.initial_term()));
    }
    std::sort(match.pairs.begin(), match.pairs.end());
    return match;
}

} // namespace gsdst
