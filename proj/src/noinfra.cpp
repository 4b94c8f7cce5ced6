#include "gsdst/noinfra.hpp"

#include "gsdst/errors.hpp"
#include "gsdst/qam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

namespace gsdst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double theta) {
    double wrapped = std::fmod(theta, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, const std::array<double, 2>& range) {
    if (range[0] == range[1]) return range[0];
    return std::uniform_real_distribution<double>(range[0], range[1])(rng);
}

Complex tone(double frequency, double interval, std::size_t l) {
    return std::polar(1.0, kTwoPi * frequency * interval * static_cast<double>(l));
}

void check_range(const std::array<double, 2>& range, const char* name) {
    if (!std::isfinite(range[0]) || !std::isfinite(range[1]) || range[0] > range[1]) {
        throw InputError(std::string(name) + " must be a finite interval [lo, hi] with lo <= hi");
    }
}

double association_cost(Complex a, const KnownChannel& channel, Association rule,
                        const QamConstellation* points) {
    if (rule == Association::amplitude) return std::abs(std::abs(a) - channel.beta);
    const Complex gain = std::polar(channel.beta, channel.theta);
    double best = std::numeric_limits<double>::infinity();
    for (Complex c : points->points()) best = std::min(best, std::norm(a - gain * c));
    return best;
}

} // namespace

std::string_view to_string(Receiver receiver) {
    return receiver == Receiver::noinfra ? "noinfra" : "ora_sic";
}

Receiver parse_receiver(std::string_view name) {
    if (name == "noinfra" || name == "no_infra" || name == "no-infra") return Receiver::noinfra;
    if (name == "ora_sic" || name == "ora+sic" || name == "orasic") return Receiver::ora_sic;
    throw InputError("unknown receiver '" + std::string(name) + "'");
}

std::string_view to_string(Association association) {
    return association == Association::amplitude ? "amplitude" : "constellation";
}

Association parse_association(std::string_view name) {
    if (name == "amplitude") return Association::amplitude;
    if (name == "constellation") return Association::constellation;
    throw InputError("unknown association rule '" + std::string(name) + "'");
}

void SimConfig::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InputError("bandwidth must be > 0");
    if (!(symbol_duration > 0.0) || !std::isfinite(symbol_duration)) {
        throw InputError("symbol_duration must be > 0");
    }
    if (samples_per_symbol < 2) throw InputError("samples_per_symbol must be >= 2");
    const double expected = symbol_duration * bandwidth;
    if (std::abs(expected - static_cast<double>(samples_per_symbol)) > 1e-6 * expected) {
        throw InputError("samples_per_symbol must equal symbol_duration * bandwidth (" +
                         std::to_string(expected) + ")");
    }
    if (k < 1) throw InputError("k must be >= 1");
    if (modulation_order < 2 || !is_power_of_two(modulation_order)) {
        throw InputError("modulation_order must be a power of two >= 2");
    }
    if (!std::isfinite(gamma_db)) throw InputError("gamma_db must be finite");
    if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db)) throw InputError("sigma_db must be >= 0");
    check_range(doppler_range, "doppler_range");
    check_range(delay_spread_range, "delay_spread_range");
    if (delay_spread_range[0] < 0.0) throw InputError("delay_spread_range must be nonnegative");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
        throw InputError("noise_variance must be >= 0");
    }
    if (trials < 1) throw InputError("trials must be >= 1");
    if (receiver == Receiver::ora_sic && !allow_collisions && k > samples_per_symbol) {
        throw InputError("collision-free ORA needs k <= samples_per_symbol");
    }
    denoise.validate();
}

Complex TransmitterRealization::initial_term() const { return std::polar(beta, theta) * symbol; }

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix(state);
    state ^= trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    const std::uint64_t b = splitmix(state);
    state ^= stream * 0xaf251af3b0f025b5ULL + 0x632be59bd9b4e019ULL;
    const std::uint64_t c = splitmix(state);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return std::mt19937_64(seq);
}

Scenario draw_scenario(const SimConfig& cfg, std::mt19937_64& rng) {
    const QamConstellation& points = constellation(cfg.modulation_order);
    const std::size_t grid = cfg.samples_per_symbol;

    std::vector<std::size_t> grid_indices;
    if (cfg.receiver == Receiver::ora_sic) {
        if (cfg.allow_collisions) {
            std::uniform_int_distribution<std::size_t> pick(1, grid);
            for (std::size_t n = 0; n < cfg.k; ++n) grid_indices.push_back(pick(rng));
        } else {
            std::vector<std::size_t> all(grid);
            std::iota(all.begin(), all.end(), std::size_t{1});
            for (std::size_t n = 0; n < cfg.k; ++n) {
                const std::size_t j = std::uniform_int_distribution<std::size_t>(n, grid - 1)(rng);
                std::swap(all[n], all[j]);
                grid_indices.push_back(all[n]);
            }
        }
    }

    Scenario scenario;
    scenario.noise_variance = cfg.noise_variance;
    std::normal_distribution<double> snr(cfg.gamma_db, cfg.sigma_db);
    std::uniform_int_distribution<std::size_t> symbol(0, cfg.modulation_order - 1);
    for (std::size_t n = 0; n < cfg.k; ++n) {
        TransmitterRealization tx;
        tx.snr_db = cfg.sigma_db > 0.0 ? snr(rng) : cfg.gamma_db;
        tx.beta = std::pow(10.0, tx.snr_db / 20.0);
        tx.delay = uniform(rng, cfg.delay_spread_range);
        tx.doppler = uniform(rng, cfg.doppler_range);
        if (cfg.receiver == Receiver::ora_sic) {
            tx.subcarrier = grid_indices[n];
            tx.frequency = static_cast<double>(grid_indices[n]) / cfg.symbol_duration;
        } else {
            tx.frequency =
                std::uniform_real_distribution<double>(1.0 / cfg.symbol_duration, cfg.bandwidth)(rng);
        }
        tx.shifted_frequency = tx.frequency + tx.doppler;
        tx.theta = wrap_phase(-kTwoPi * tx.shifted_frequency * tx.delay);
        tx.symbol_index = symbol(rng);
        tx.symbol = points.modulate(tx.symbol_index);
        scenario.transmitters.push_back(tx);
    }
    return scenario;
}

Decomposition implied_decomposition(const Scenario& scenario, const SimConfig& cfg) {
    std::vector<GeometricComponent> components;
    for (const auto& tx : scenario.transmitters)
        components.emplace_back(tx.initial_term(), tone(tx.shifted_frequency, cfg.sample_interval(), 1));
    return Decomposition(std::move(components));
}

ComplexSequence clean_sequence(const Scenario& scenario, const SimConfig& cfg) {
    std::vector<Complex> samples(cfg.samples_per_symbol);
    for (const auto& tx : scenario.transmitters) {
        const Complex a = tx.initial_term();
        for (std::size_t l = 0; l < samples.size(); ++l)
            samples[l] += a * tone(tx.shifted_frequency, cfg.sample_interval(), l);
    }
    return ComplexSequence(std::move(samples));
}

ComplexSequence received_sequence(const Scenario& scenario, const SimConfig& cfg,
                                  std::mt19937_64& rng) {
    const ComplexSequence clean = clean_sequence(scenario, cfg);
    std::vector<Complex> samples(clean.begin(), clean.end());
    if (scenario.noise_variance > 0.0) {
        std::normal_distribution<double> noise(0.0, std::sqrt(scenario.noise_variance / 2.0));
        for (Complex& z : samples) {
            const double re = noise(rng);
            const double im = noise(rng);
            z += Complex{re, im};
        }
    }
    return ComplexSequence(std::move(samples));
}

std::vector<std::optional<std::size_t>> associate_components(std::span<const Complex> initial_terms,
                                                             std::span<const KnownChannel> known,
                                                             Association rule, std::size_t order) {
    const std::size_t rows = initial_terms.size();
    const std::size_t cols = known.size();
    std::vector<std::optional<std::size_t>> result(rows);
    if (rows == 0 || cols == 0) return result;

    const QamConstellation* points = rule == Association::constellation ? &constellation(order) : nullptr;
    std::vector<double> cost(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t n = 0; n < cols; ++n)
            cost[i * cols + n] = association_cost(initial_terms[i], known[n], rule, points);

    const std::size_t pairs = std::min(rows, cols);
    // assignment[i] = channel of component i (size rows, npos when unassigned)
    constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best(rows, npos);

    if (std::max(rows, cols) <= 7) {
        const bool by_channel = rows <= cols;
        std::vector<std::size_t> perm(by_channel ? cols : rows);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best_cost = std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (std::size_t p = 0; p < pairs; ++p) {
                const std::size_t i = by_channel ? p : perm[p];
                const std::size_t n = by_channel ? perm[p] : p;
                total += cost[i * cols + n];
            }
            if (total < best_cost) {
                best_cost = total;
                std::fill(best.begin(), best.end(), npos);
                for (std::size_t p = 0; p < pairs; ++p) {
                    if (by_channel) best[p] = perm[p];
                    else best[perm[p]] = p;
                }
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<bool> row_used(rows, false);
        std::vector<bool> col_used(cols, false);
        for (std::size_t round = 0; round < pairs; ++round) {
            double lowest = std::numeric_limits<double>::infinity();
            std::size_t bi = 0;
            std::size_t bn = 0;
            for (std::size_t i = 0; i < rows; ++i) {
                if (row_used[i]) continue;
                for (std::size_t n = 0; n < cols; ++n) {
                    if (col_used[n] || !(cost[i * cols + n] < lowest)) continue;
                    lowest = cost[i * cols + n];
                    bi = i;
                    bn = n;
                }
            }
            row_used[bi] = col_used[bn] = true;
            best[bi] = bn;
        }
        for (bool improved = true; improved;) {
            improved = false;
            for (std::size_t a = 0; a < rows; ++a)
                for (std::size_t b = a + 1; b < rows; ++b) {
                    if (best[a] == npos || best[b] == npos) continue;
                    const double now = cost[a * cols + best[a]] + cost[b * cols + best[b]];
                    const double swapped = cost[a * cols + best[b]] + cost[b * cols + best[a]];
                    if (swapped < now) {
                        std::swap(best[a], best[b]);
                        improved = true;
                    }
                }
        }
    }
    for (std::size_t i = 0; i < rows; ++i)
        if (best[i] != npos) result[i] = best[i];
    return result;
}

std::vector<std::optional<std::size_t>> noinfra_receive(const ComplexSequence& s_w,
                                                        std::span<const KnownChannel> known,
                                                        std::optional<std::size_t> k,
                                                        const SimConfig& cfg,
                                                        const SimilarityOptions& similarity,
                                                        std::uint64_t seed) {
    std::vector<std::optional<std::size_t>> symbols(known.size());
    NoisyDecomposeOptions options;
    options.k = k;
    options.denoise = cfg.denoise;
    options.similarity = similarity;
    options.seed = seed;

    std::optional<NoisyDecomposeReport> report;
    try {
        report = decompose_noisy_detailed(s_w, options);
    } catch (const Error&) {
        return symbols;
    }
    const ComplexVector initial = report->decomposition.initial_terms();
    const auto assignment = associate_components(initial, known, cfg.association, cfg.modulation_order);
    const QamConstellation& points = constellation(cfg.modulation_order);
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (!assignment[i]) continue;
        const KnownChannel& channel = known[*assignment[i]];
        symbols[*assignment[i]] = points.demodulate(initial[i] / std::polar(channel.beta, channel.theta));
    }
    return symbols;
}

Complex dft_bin(std::span<const Complex> s, std::size_t bin) {
    const double length = static_cast<double>(s.size());
    Complex sum{};
    for (std::size_t l = 0; l < s.size(); ++l) {
        const std::size_t phase_index = (bin * l) % s.size();
        sum += s[l] * std::polar(1.0, -kTwoPi * static_cast<double>(phase_index) / length);
    }
    return sum / length;
}

std::vector<std::size_t> ora_sic_receive(const ComplexSequence& s_w, std::span<const OraKnown> known,
                                         const SimConfig& cfg) {
    const std::size_t length = s_w.size();
    const QamConstellation& points = constellation(cfg.modulation_order);
    std::map<std::size_t, std::vector<std::size_t>> occupants;
    for (std::size_t n = 0; n < known.size(); ++n) occupants[known[n].subcarrier % length].push_back(n);

    std::vector<std::size_t> symbols(known.size(), 0);
    for (auto& [bin, users] : occupants) {
        if (users.size() == 1) {
            const OraKnown& u = known[users.front()];
            symbols[users.front()] = points.demodulate(dft_bin(s_w.samples(), bin) / std::polar(u.beta, u.theta));
            continue;
        }
        std::stable_sort(users.begin(), users.end(),
                         [&](std::size_t a, std::size_t b) { return known[a].beta > known[b].beta; });
        std::vector<Complex> residual(s_w.begin(), s_w.end());
        for (std::size_t n : users) {
            const OraKnown& u = known[n];
            const Complex gain = std::polar(u.beta, u.theta);
            const std::size_t decided = points.demodulate(dft_bin(residual, bin) / gain);
            symbols[n] = decided;
            const Complex amplitude = gain * points.modulate(decided);
            for (std::size_t l = 0; l < length; ++l)
                residual[l] -= amplitude * tone(u.shifted_frequency, cfg.sample_interval(), l);
        }
    }
    return symbols;
}

} // namespace gsdst
