#include "gsdst/qam.hpp"

#include "gsdst/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace gsdst {

namespace {

// Amplitude of the Gray label `bits` on a PAM line with `levels` points,
// spaced 2 apart and centred on 0, largest amplitude first.
double pam_level(std::size_t bits, std::size_t levels) {
    std::size_t position = bits;
    for (std::size_t shift = bits >> 1; shift != 0; shift >>= 1) position ^= shift;
    return static_cast<double>(levels - 1) - 2.0 * static_cast<double>(position);
}

} // namespace

bool is_power_of_two(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

QamConstellation::QamConstellation(std::size_t order) {
    if (order < 2 || !is_power_of_two(order)) {
        throw InputError("modulation order must be a power of two >= 2, got " + std::to_string(order));
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < order) ++bits;
    const std::size_t q_bits = bits / 2;
    const std::size_t i_bits = bits - q_bits;
    const std::size_t i_levels = std::size_t{1} << i_bits;
    const std::size_t q_levels = std::size_t{1} << q_bits;

    points_.resize(order);
    double energy = 0.0;
    for (std::size_t index = 0; index < order; ++index) {
        const double re = pam_level(index >> q_bits, i_levels);
        const double im = q_bits == 0 ? 0.0 : pam_level(index & (q_levels - 1), q_levels);
        points_[index] = {re, im};
        energy += re * re + im * im;
    }
    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(order));
    for (Complex& p : points_) p *= scale;
}

Complex QamConstellation::modulate(std::size_t index) const {
    if (index >= points_.size()) {
        throw InputError("symbol index " + std::to_string(index) + " out of range for M=" +
                         std::to_string(points_.size()));
    }
    return points_[index];
}

std::size_t QamConstellation::demodulate(Complex y) const {
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t index = 0; index < points_.size(); ++index) {
        const double d = std::norm(y - points_[index]);
        if (d < best_distance) {
            best_distance = d;
            best = index;
        }
    }
    return best;
}

double QamConstellation::min_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < points_.size(); ++a)
        for (std::size_t b = a + 1; b < points_.size(); ++b)
            best = std::min(best, std::abs(points_[a] - points_[b]));
    return best;
}

const QamConstellation& constellation(std::size_t order) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<QamConstellation>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot) {
        try {
            slot = std::make_unique<QamConstellation>(order);
        } catch (...) {
            cache.erase(order);
            throw;
        }
    }
    return *slot;
}

Complex qam_modulate(std::size_t index, std::size_t order) {
    return constellation(order).modulate(index);
}

std::size_t qam_demodulate(Complex y, std::size_t order) { return constellation(order).demodulate(y); }

} // namespace gsdst
