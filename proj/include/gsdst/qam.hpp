#pragma once

#include "gsdst/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace gsdst {

/// Gray-coded QAM with unit average energy. Square for even log2(M),
/// rectangular (one more in-phase bit) for odd log2(M); M = 2 is BPSK.
/// The in-phase bits are the high bits of the symbol index.
class QamConstellation {
public:
    explicit QamConstellation(std::size_t order);

    std::size_t order() const noexcept { return points_.size(); }
    std::span<const Complex> points() const noexcept { return points_; }

    Complex modulate(std::size_t index) const;
    /// Nearest point; ties go to the smaller index.
    std::size_t demodulate(Complex y) const;
    double min_distance() const;

private:
    std::vector<Complex> points_;
};

bool is_power_of_two(std::size_t m);

/// Shared constellation for order M; built once per order.
const QamConstellation& constellation(std::size_t order);

Complex qam_modulate(std::size_t index, std::size_t order);
std::size_t qam_demodulate(Complex y, std::size_t order);

} // namespace gsdst
