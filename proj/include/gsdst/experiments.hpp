#pragma once

// Seeded Monte Carlo sweeps. Trial t of every sweep point draws from
// trial_rng(seed, t, stream), so points share random numbers and reports
// do not depend on the number of worker threads.

#include "gsdst/denoise.hpp"
#include "gsdst/noinfra.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace gsdst {

enum class ExperimentKind { ser, detection, denoise };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ser;
    /// Fixed parameters; sweep lists below override k, M, gamma_db, sigma_db.
    SimConfig base;
    std::vector<std::size_t> k_values;
    std::vector<std::size_t> m_values;
    std::vector<double> gamma_values;
    std::vector<double> sigma_values;
    std::vector<Receiver> receivers{Receiver::noinfra, Receiver::ora_sic};
    std::vector<SimilarityKind> similarity_kinds{SimilarityKind::diagonal};
    std::size_t pair_budget = kDefaultPairBudget;
    /// Largest order tried by the detection experiment.
    std::size_t k_max = 4;
    std::size_t threads = 1;

    void validate() const;
};

struct SerRow {
    std::size_t k = 0;
    std::size_t m = 0;
    double gamma_db = 0.0;
    double sigma_db = 0.0;
    std::optional<double> noinfra_ser;
    std::optional<double> orasic_ser;
    std::size_t trials = 0;
};

struct DetectionRow {
    std::size_t k = 0;
    double gamma_db = 0.0;
    double sigma_db = 0.0;
    SimilarityKind kind = SimilarityKind::diagonal;
    double rate = 0.0;
    std::size_t trials = 0;
};

struct DenoiseRow {
    std::size_t k = 0;
    double gamma_db = 0.0;
    double sigma_db = 0.0;
    double nmse_observed = 0.0;
    /// Reconstruction straight from the noisy samples.
    double nmse_raw = 0.0;
    /// Reconstruction after de-noising.
    double nmse_denoised = 0.0;
    double mean_iterations = 0.0;
    double nonconverged_fraction = 0.0;
    /// Trials where the raw or de-noised extraction failed; excluded from the NMSE means.
    std::size_t raw_failures = 0;
    std::size_t denoised_failures = 0;
    /// histogram[i] = trials that stopped after i iterations.
    std::vector<std::size_t> iteration_histogram;
    std::size_t trials = 0;
};

struct SimReport {
    ExperimentKind kind = ExperimentKind::ser;
    std::vector<SerRow> ser;
    std::vector<DetectionRow> detection;
    std::vector<DenoiseRow> denoise;
    std::size_t trials_run = 0;
    double wallclock_seconds = 0.0;
};

SimReport run_ser_experiment(const ExperimentConfig& cfg);
SimReport run_detection_experiment(const ExperimentConfig& cfg);
SimReport run_denoise_experiment(const ExperimentConfig& cfg);
SimReport run_experiment(const ExperimentConfig& cfg);

} // namespace gsdst
