#include "gsdst/experiments.hpp"

#include "gsdst/errors.hpp"
#include "gsdst/gsd.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace gsdst {

namespace {

enum Stream : std::uint64_t { kNoInfraStream = 0, kOraStream = 1, kDetectionStream = 2, kDenoiseStream = 3 };

// Runs body(t) for t in [0, count) on up to `threads` workers.
template <typename Body>
void parallel_trials(std::size_t count, std::size_t threads, Body&& body) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t t = 0; t < count; ++t) body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t t = next++; t < count; t = next++) {
                try {
                    body(t);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (failure) std::rethrow_exception(failure);
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& values, T fallback) {
    return values.empty() ? std::vector<T>{fallback} : values;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    return trial_rng(seed, trial, 0xfeed)();
}

std::vector<KnownChannel> channels_of(const Scenario& scenario) {
    std::vector<KnownChannel> out;
    for (const auto& tx : scenario.transmitters) out.push_back({tx.beta, tx.theta});
    return out;
}

std::vector<OraKnown> ora_channels_of(const Scenario& scenario) {
    std::vector<OraKnown> out;
    for (const auto& tx : scenario.transmitters)
        out.push_back({tx.beta, tx.theta, tx.subcarrier.value_or(0), tx.shifted_frequency});
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::ser: return "ser";
    case ExperimentKind::detection: return "detection";
    case ExperimentKind::denoise: return "denoise";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    if (name == "ser") return ExperimentKind::ser;
    if (name == "detection") return ExperimentKind::detection;
    if (name == "denoise") return ExperimentKind::denoise;
    throw InputError("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    SimConfig probe = base;
    for (std::size_t k : or_default(k_values, base.k)) {
        probe.k = k;
        for (std::size_t m : or_default(m_values, base.modulation_order)) {
            probe.modulation_order = m;
            for (double gamma : or_default(gamma_values, base.gamma_db)) {
                probe.gamma_db = gamma;
                for (double sigma : or_default(sigma_values, base.sigma_db)) {
                    probe.sigma_db = sigma;
                    probe.validate();
                }
            }
        }
    }
    if (kind == ExperimentKind::ser && receivers.empty()) throw InputError("no receivers selected");
    if (kind == ExperimentKind::detection) {
        if (similarity_kinds.empty()) throw InputError("no similarity kinds selected");
        if (k_max < 1) throw InputError("k_max must be >= 1");
    }
    if (pair_budget < 1) throw InputError("pair_budget must be >= 1");
    if (threads < 1) throw InputError("threads must be >= 1");
}

SimReport run_ser_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const bool with_noinfra =
        std::find(cfg.receivers.begin(), cfg.receivers.end(), Receiver::noinfra) != cfg.receivers.end();
    const bool with_ora =
        std::find(cfg.receivers.begin(), cfg.receivers.end(), Receiver::ora_sic) != cfg.receivers.end();

    SimReport report;
    report.kind = ExperimentKind::ser;
    for (std::size_t k : or_default(cfg.k_values, cfg.base.k))
        for (std::size_t m : or_default(cfg.m_values, cfg.base.modulation_order))
            for (double gamma : or_default(cfg.gamma_values, cfg.base.gamma_db))
                for (double sigma : or_default(cfg.sigma_values, cfg.base.sigma_db)) {
                    SimConfig point = cfg.base;
                    point.k = k;
                    point.modulation_order = m;
                    point.gamma_db = gamma;
                    point.sigma_db = sigma;
                    const std::size_t trials = point.trials;

                    std::vector<std::size_t> noinfra_errors(trials, 0);
                    std::vector<std::size_t> ora_errors(trials, 0);
                    parallel_trials(trials, cfg.threads, [&](std::size_t t) {
                        if (with_noinfra) {
                            SimConfig c = point;
                            c.receiver = Receiver::noinfra;
                            auto rng = trial_rng(c.seed, t, kNoInfraStream);
                            const Scenario scenario = draw_scenario(c, rng);
                            const ComplexSequence s_w = received_sequence(scenario, c, rng);
                            const auto known = channels_of(scenario);
                            const auto symbols = noinfra_receive(s_w, known, k, c);
                            for (std::size_t n = 0; n < k; ++n)
                                if (symbols[n] != scenario.transmitters[n].symbol_index) ++noinfra_errors[t];
                        }
                        if (with_ora) {
                            SimConfig c = point;
                            c.receiver = Receiver::ora_sic;
                            auto rng = trial_rng(c.seed, t, kOraStream);
                            const Scenario scenario = draw_scenario(c, rng);
                            const ComplexSequence s_w = received_sequence(scenario, c, rng);
                            const auto symbols = ora_sic_receive(s_w, ora_channels_of(scenario), c);
                            for (std::size_t n = 0; n < k; ++n)
                                if (symbols[n] != scenario.transmitters[n].symbol_index) ++ora_errors[t];
                        }
                    });

                    SerRow row{k, m, gamma, sigma, std::nullopt, std::nullopt, trials};
                    const double symbols = static_cast<double>(k * trials);
                    auto total = [](const std::vector<std::size_t>& v) {
                        std::size_t sum = 0;
                        for (std::size_t e : v) sum += e;
                        return sum;
                    };
                    if (with_noinfra) row.noinfra_ser = static_cast<double>(total(noinfra_errors)) / symbols;
                    if (with_ora) row.orasic_ser = static_cast<double>(total(ora_errors)) / symbols;
                    report.ser.push_back(row);
                    report.trials_run += trials;
                }
    report.wallclock_seconds = seconds_since(start);
    return report;
}

SimReport run_detection_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    SimReport report;
    report.kind = ExperimentKind::detection;
    const std::size_t kinds = cfg.similarity_kinds.size();
    for (std::size_t k : or_default(cfg.k_values, cfg.base.k))
        for (double gamma : or_default(cfg.gamma_values, cfg.base.gamma_db))
            for (double sigma : or_default(cfg.sigma_values, cfg.base.sigma_db)) {
                SimConfig point = cfg.base;
                point.k = k;
                point.gamma_db = gamma;
                point.sigma_db = sigma;
                point.receiver = Receiver::noinfra;
                const std::size_t trials = point.trials;

                std::vector<unsigned char> hits(trials * kinds, 0);
                parallel_trials(trials, cfg.threads, [&](std::size_t t) {
                    auto rng = trial_rng(point.seed, t, kDetectionStream);
                    const Scenario scenario = draw_scenario(point, rng);
                    const ComplexSequence s_w = received_sequence(scenario, point, rng);
                    for (std::size_t i = 0; i < kinds; ++i) {
                        try {
                            const std::size_t estimate =
                                estimate_k(s_w, cfg.k_max, {cfg.similarity_kinds[i], cfg.pair_budget},
                                           trial_seed(point.seed, t));
                            hits[t * kinds + i] = estimate == k;
                        } catch (const AlgorithmError&) {
                            hits[t * kinds + i] = 0;
                        }
                    }
                });

                for (std::size_t i = 0; i < kinds; ++i) {
                    std::size_t count = 0;
                    for (std::size_t t = 0; t < trials; ++t) count += hits[t * kinds + i];
                    report.detection.push_back({k, gamma, sigma, cfg.similarity_kinds[i],
                                                static_cast<double>(count) / static_cast<double>(trials),
                                                trials});
                }
                report.trials_run += trials;
            }
    report.wallclock_seconds = seconds_since(start);
    return report;
}

SimReport run_denoise_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    SimReport report;
    report.kind = ExperimentKind::denoise;

    struct Outcome {
        double observed = 0.0;
        std::optional<double> raw;
        std::optional<double> denoised;
        std::size_t iterations = 0;
        bool converged = false;
    };

    for (std::size_t k : or_default(cfg.k_values, cfg.base.k))
        for (double gamma : or_default(cfg.gamma_values, cfg.base.gamma_db))
            for (double sigma : or_default(cfg.sigma_values, cfg.base.sigma_db)) {
                SimConfig point = cfg.base;
                point.k = k;
                point.gamma_db = gamma;
                point.sigma_db = sigma;
                point.receiver = Receiver::noinfra;
                const std::size_t trials = point.trials;
                const std::size_t length = point.samples_per_symbol;

                std::vector<Outcome> outcomes(trials);
                parallel_trials(trials, cfg.threads, [&](std::size_t t) {
                    auto rng = trial_rng(point.seed, t, kDenoiseStream);
                    const Scenario scenario = draw_scenario(point, rng);
                    const ComplexSequence clean = clean_sequence(scenario, point);
                    const ComplexSequence s_w = received_sequence(scenario, point, rng);
                    Outcome& out = outcomes[t];
                    out.observed = nmse(clean, s_w);
                    try {
                        const auto raw = extract_components(s_w, IndexPattern::consecutive(k), 0);
                        out.raw = nmse(clean, synthesize(raw.decomposition, length));
                    } catch (const Error&) {
                    }
                    const DenoiseResult cleaned = cadzow_denoise(s_w, k, point.denoise);
                    out.iterations = cleaned.iterations;
                    out.converged = cleaned.converged;
                    try {
                        const auto est = extract_components(cleaned.sequence, IndexPattern::consecutive(k), 0);
                        out.denoised = nmse(clean, synthesize(est.decomposition, length));
                    } catch (const Error&) {
                    }
                });

                DenoiseRow row;
                row.k = k;
                row.gamma_db = gamma;
                row.sigma_db = sigma;
                row.trials = trials;
                row.iteration_histogram.assign(point.denoise.max_iterations + 1, 0);
                double observed = 0.0, raw = 0.0, denoised = 0.0, iterations = 0.0;
                std::size_t raw_ok = 0, denoised_ok = 0, nonconverged = 0;
                for (const Outcome& o : outcomes) {
                    observed += o.observed;
                    if (o.raw) {
                        raw += *o.raw;
                        ++raw_ok;
                    }
                    if (o.denoised) {
                        denoised += *o.denoised;
                        ++denoised_ok;
                    }
                    iterations += static_cast<double>(o.iterations);
                    ++row.iteration_histogram[o.iterations];
                    if (!o.converged) ++nonconverged;
                }
                const double n = static_cast<double>(trials);
                row.nmse_observed = observed / n;
                row.nmse_raw = raw_ok ? raw / static_cast<double>(raw_ok) : std::numeric_limits<double>::quiet_NaN();
                row.nmse_denoised =
                    denoised_ok ? denoised / static_cast<double>(denoised_ok) : std::numeric_limits<double>::quiet_NaN();
                row.mean_iterations = iterations / n;
                row.nonconverged_fraction = static_cast<double>(nonconverged) / n;
                row.raw_failures = trials - raw_ok;
                row.denoised_failures = trials - denoised_ok;
                report.denoise.push_back(std::move(row));
                report.trials_run += trials;
            }
    report.wallclock_seconds = seconds_since(start);
    return report;
}

SimReport run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
    case ExperimentKind::ser: return run_ser_experiment(cfg);
    case ExperimentKind::detection: return run_detection_experiment(cfg);
    case ExperimentKind::denoise: return run_denoise_experiment(cfg);
    }
    throw InputError("unknown experiment kind");
}

} // namespace gsdst
