#pragma once

// Link-level model of uncoordinated random access. No-INFRA transmitters
// pick a continuous random frequency and the receiver separates the
// superposition by geometric sequence decomposition; the ORA+SIC baseline
// uses a grid of orthogonal subcarriers, a DFT, and power-ordered SIC for
// collided bins.

#include "gsdst/denoise.hpp"
#include "gsdst/linalg.hpp"
#include "gsdst/sequence.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace gsdst {

enum class Receiver { noinfra, ora_sic };

std::string_view to_string(Receiver receiver);
/// Accepts "noinfra"/"no_infra"/"no-infra" and "ora_sic"/"ora+sic"/"orasic".
Receiver parse_receiver(std::string_view name);

/// How recovered components are assigned to known transmitter channels.
enum class Association {
    /// Minimize sum | |a_i| - beta_n |.
    amplitude,
    /// Minimize sum min_q |a_i - beta_n e^{j theta_n} c_q|^2 over constellation points c_q.
    constellation,
};

std::string_view to_string(Association association);
Association parse_association(std::string_view name);

struct SimConfig {
    double center_frequency = 6e9;     // Hz; carried for reporting only
    double bandwidth = 1e6;            // F, Hz; also the sampling rate
    double symbol_duration = 30e-6;    // T, s
    std::size_t samples_per_symbol = 30; // P = T * F
    std::size_t k = 2;
    std::size_t modulation_order = 16;
    double gamma_db = 30.0;
    double sigma_db = 0.0;
    std::array<double, 2> doppler_range{-1e3, 1e3};       // Hz
    std::array<double, 2> delay_spread_range{0.0, 1e-6};  // s
    double noise_variance = 1.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    Receiver receiver = Receiver::noinfra;
    /// ORA only: when false, transmitters pick distinct subcarriers.
    bool allow_collisions = true;
    Association association = Association::constellation;
    DenoiseConfig denoise;

    /// Throws InputError on an inconsistent configuration.
    void validate() const;
    double sample_interval() const { return 1.0 / bandwidth; }
};

struct TransmitterRealization {
    std::size_t symbol_index = 0;
    Complex symbol;
    double frequency = 0.0;         // f, Hz
    double shifted_frequency = 0.0; // f + Doppler, Hz
    double beta = 0.0;
    double theta = 0.0;             // radians in [0, 2 pi)
    double snr_db = 0.0;
    double delay = 0.0;
    double doppler = 0.0;
    /// Grid index in [1, P] for ORA draws.
    std::optional<std::size_t> subcarrier;

    Complex initial_term() const;
};

struct Scenario {
    std::vector<TransmitterRealization> transmitters;
    double noise_variance = 1.0;
};

/// Trial-local random stream from (master seed, trial index, stream id).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0);

/// Draws k transmitters; frequencies follow cfg.receiver (continuous for
/// No-INFRA, grid subcarriers for ORA).
Scenario draw_scenario(const SimConfig& cfg, std::mt19937_64& rng);

/// Components a_n = beta e^{j theta} x, r_n = e^{j 2 pi f~ dT}. Throws
/// InputError if two ratios coincide.
Decomposition implied_decomposition(const Scenario& scenario, const SimConfig& cfg);

/// Noiseless samples of the scenario.
ComplexSequence clean_sequence(const Scenario& scenario, const SimConfig& cfg);

/// Clean samples plus circular complex Gaussian noise of the scenario's variance.
ComplexSequence received_sequence(const Scenario& scenario, const SimConfig& cfg,
                                  std::mt19937_64& rng);

struct KnownChannel {
    double beta = 0.0;
    double theta = 0.0;
};

/// Decompose (k known, or estimated when unset), associate components to the
/// known channels and demodulate. Entries are empty for transmitters left
/// without a component, and all are empty when decomposition fails.
std::vector<std::optional<std::size_t>> noinfra_receive(const ComplexSequence& s_w,
                                                        std::span<const KnownChannel> known,
                                                        std::optional<std::size_t> k,
                                                        const SimConfig& cfg,
                                                        const SimilarityOptions& similarity = {},
                                                        std::uint64_t seed = 0);

/// Component-to-channel assignment: result[i] is the channel of component i,
/// or empty when there are more components than channels.
std::vector<std::optional<std::size_t>> associate_components(std::span<const Complex> initial_terms,
                                                             std::span<const KnownChannel> known,
                                                             Association rule, std::size_t order);

struct OraKnown {
    double beta = 0.0;
    double theta = 0.0;
    std::size_t subcarrier = 0;
    double shifted_frequency = 0.0;
};

/// (1/P) sum_l s[l] e^{-j 2 pi b l / P}.
Complex dft_bin(std::span<const Complex> s, std::size_t bin);

/// DFT demodulation per occupied bin, genie-aided SIC inside collided bins.
std::vector<std::size_t> ora_sic_receive(const ComplexSequence& s_w, std::span<const OraKnown> known,
                                         const SimConfig& cfg);

} // namespace gsdst
