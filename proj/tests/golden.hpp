#pragma once

#include "gsdst/sequence.hpp"

namespace golden {

using gsdst::Complex;

// Three integer components: (2, 2), (1, 3), (4, -1).
inline gsdst::ComplexSequence real_sequence() {
    return {7, 3, 21, 39, 117, 303, 861, 2439, 7077};
}

// Two complex components: (64+32j, 0.5-0.5j), (0.125+0.0625j, 2+j).
inline gsdst::ComplexSequence complex_sequence() {
    return {Complex{64.125, 32.0625}, Complex{48.1875, -15.75}, Complex{16.125, -31.3125},
            Complex{-8.4375, -22.5},  Complex{-18.375, -5.4375}, Complex{-19.3125, 6.75},
            Complex{-21.375, 6.1875}, Complex{-30.9375, -15.0}};
}

inline gsdst::ComplexVector real_a() { return {2.0, 1.0, 4.0}; }
inline gsdst::ComplexVector real_r() { return {2.0, 3.0, -1.0}; }
inline gsdst::ComplexVector complex_a() { return {Complex{64, 32}, Complex{0.125, 0.0625}}; }
inline gsdst::ComplexVector complex_r() { return {Complex{0.5, -0.5}, Complex{2, 1}}; }

} // namespace golden
