// gsdst: synthesize, decompose and simulate superposed geometric sequences.
//
//   gsdst synth config.json [--out seq.csv]
//   gsdst decompose seq.csv [--noisy] [--k n|auto] [--similarity full|diag|rapid] ...
//   gsdst sim experiment.json --out dir [--threads n]
//
// Exit status: 0 success, 2 usage or input error, 3 algorithm failure.

#include "gsdst/denoise.hpp"
#include "gsdst/errors.hpp"
#include "gsdst/experiments.hpp"
#include "gsdst/gsd.hpp"
#include "gsdst/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace gsdst;

constexpr int kExitInput = 2;
constexpr int kExitAlgorithm = 3;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    if (!out) throw InputError("cannot write " + out_path);
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

struct DecomposeArgs {
    std::string input;
    std::string out;
    bool noisy = false;
    std::string k = "auto";
    std::string similarity = "diag";
    std::uint64_t seed = 0;
    double epsilon = 1e-10;
    std::size_t imax = 30;
    std::size_t kmax = 0;
    std::size_t pair_budget = kDefaultPairBudget;
};

int run_synth(const std::string& config, const std::string& out) {
    const SynthRequest request = synth_request_from_json(read_text_file(config));
    const ComplexSequence s = synthesize(request.decomposition, request.length);
    std::ostringstream csv;
    write_sequence_csv(csv, s);
    emit(csv.str(), out);
    std::cerr << "k=" << request.decomposition.k() << " P=" << request.length << '\n';
    return 0;
}

int run_decompose(const DecomposeArgs& args) {
    std::ifstream in(args.input, std::ios::binary);
    if (!in) throw InputError("cannot open " + args.input);
    const ComplexSequence s = read_sequence_csv(in);

    std::optional<std::size_t> k;
    if (args.k != "auto") {
        try {
            std::size_t used = 0;
            const unsigned long value = std::stoul(args.k, &used);
            if (used != args.k.size() || value == 0) throw std::invalid_argument(args.k);
            k = value;
        } catch (const std::logic_error&) {
            throw InputError("--k expects a positive integer or 'auto', got '" + args.k + "'");
        }
    }
    const std::optional<std::size_t> k_max = args.kmax ? std::optional(args.kmax) : std::nullopt;

    std::string body;
    if (args.noisy) {
        NoisyDecomposeOptions options;
        options.k = k;
        options.k_max = k_max;
        options.denoise = {args.epsilon, args.imax};
        options.similarity = {parse_similarity_kind(args.similarity), args.pair_budget};
        options.seed = args.seed;
        const NoisyDecomposeReport report = decompose_noisy_detailed(s, options);
        const std::string json = decomposition_to_json(report.decomposition);
        body = json.substr(0, json.size() - 1) + ",\"k\":" + std::to_string(report.k) +
               ",\"k_estimated\":" + (report.k_estimated ? "true" : "false") +
               ",\"round_trip_nmse\":" + format_double(report.round_trip_nmse) +
               ",\"denoise_iterations\":" + std::to_string(report.denoise.iterations) +
               ",\"denoise_converged\":" + (report.denoise.converged ? "true" : "false");
        body += ",\"warnings\":[";
        for (std::size_t i = 0; i < report.warnings.size(); ++i)
            body += (i ? "," : "") + json_string(report.warnings[i]);
        body += "]}\n";
    } else {
        DecomposeOptions options;
        options.k = k;
        options.detect.k_max = k_max;
        const DecomposeReport report = decompose_detailed(s, options);
        const std::string json = decomposition_to_json(report.decomposition);
        body = json.substr(0, json.size() - 1) + ",\"k\":" + std::to_string(report.k) +
               ",\"k_estimated\":" + (k ? "false" : "true") +
               ",\"round_trip_nmse\":" + format_double(report.round_trip_nmse);
        body += ",\"warnings\":[";
        for (std::size_t i = 0; i < report.warnings.size(); ++i)
            body += (i ? "," : "") + json_string(report.warnings[i]);
        body += "]}\n";
    }
    emit(body, args.out);
    return 0;
}

void print_summary(const SimReport& report) {
    switch (report.kind) {
    case ExperimentKind::ser:
        std::printf("%4s %5s %9s %9s %14s %14s\n", "k", "M", "gamma_db", "sigma_db", "noinfra_ser", "orasic_ser");
        for (const auto& r : report.ser) {
            std::printf("%4zu %5zu %9.2f %9.2f %14s %14s\n", r.k, r.m, r.gamma_db, r.sigma_db,
                        r.noinfra_ser ? std::to_string(*r.noinfra_ser).c_str() : "-",
                        r.orasic_ser ? std::to_string(*r.orasic_ser).c_str() : "-");
        }
        break;
    case ExperimentKind::detection:
        std::printf("%4s %9s %9s %6s %8s\n", "k", "gamma_db", "sigma_db", "kind", "rate");
        for (const auto& r : report.detection)
            std::printf("%4zu %9.2f %9.2f %6s %8.4f\n", r.k, r.gamma_db, r.sigma_db,
                        std::string(to_string(r.kind)).c_str(), r.rate);
        break;
    case ExperimentKind::denoise:
        std::printf("%4s %9s %13s %13s %13s %9s %9s\n", "k", "gamma_db", "nmse_obs", "nmse_raw",
                    "nmse_denoised", "mean_it", "nonconv");
        for (const auto& r : report.denoise)
            std::printf("%4zu %9.2f %13.4e %13.4e %13.4e %9.3f %9.4f\n", r.k, r.gamma_db, r.nmse_observed,
                        r.nmse_raw, r.nmse_denoised, r.mean_iterations, r.nonconverged_fraction);
        break;
    }
    std::printf("trials: %zu, wallclock: %.2f s\n", report.trials_run, report.wallclock_seconds);
}

int run_sim(const std::string& config, const std::string& out_dir, std::size_t threads) {
    ExperimentConfig cfg = experiment_config_from_json(read_text_file(config));
    if (threads) cfg.threads = threads;
    const SimReport report = run_experiment(cfg);
    for (const auto& path : write_report(report, out_dir)) std::cerr << "wrote " << path.string() << '\n';
    print_summary(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decomposition of superposed geometric sequences via simplex volumes"};
    app.require_subcommand(1);

    std::string synth_config, synth_out;
    auto* synth = app.add_subcommand("synth", "Synthesize a sequence CSV from a decomposition JSON");
    synth->add_option("config", synth_config, "JSON with \"components\" and \"length\"")->required();
    synth->add_option("--out", synth_out, "Output CSV (default: stdout)");

    DecomposeArgs dec;
    auto* decompose = app.add_subcommand("decompose", "Decompose a sequence CSV");
    decompose->add_option("input", dec.input, "Sequence CSV (index,re,im)")->required();
    decompose->add_flag("--noisy", dec.noisy, "De-noise and estimate k by similarity");
    decompose->add_option("--k", dec.k, "Number of components or 'auto'");
    decompose->add_option("--similarity", dec.similarity, "full, diag or rapid (noisy mode)")
        ->check(CLI::IsMember({"full", "diag", "diagonal", "rapid"}));
    decompose->add_option("--seed", dec.seed, "Seed for similarity pair sampling");
    decompose->add_option("--epsilon", dec.epsilon, "De-noising stopping threshold");
    decompose->add_option("--imax", dec.imax, "De-noising iteration cap");
    decompose->add_option("--kmax", dec.kmax, "Largest order tried (default floor((P-1)/2))");
    decompose->add_option("--pair-budget", dec.pair_budget, "Distances sampled per similarity");
    decompose->add_option("--out", dec.out, "Output JSON (default: stdout)");

    std::string sim_config, sim_out;
    std::size_t threads = 0;
    auto* sim = app.add_subcommand("sim", "Run a Monte Carlo experiment");
    sim->add_option("config", sim_config, "Experiment JSON")->required();
    sim->add_option("--out", sim_out, "Directory for the report CSVs")->required();
    sim->add_option("--threads", threads, "Worker threads (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*synth) return run_synth(synth_config, synth_out);
        if (*decompose) return run_decompose(dec);
        if (*sim) return run_sim(sim_config, sim_out, threads);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const AlgorithmError& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitAlgorithm;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
