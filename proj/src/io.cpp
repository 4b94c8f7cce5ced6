#include "gsdst/io.hpp"

#include "gsdst/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace gsdst {

namespace {

using nlohmann::json;

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

double to_double(std::string_view field, std::size_t line) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw InputError("line " + std::to_string(line) + ": cannot parse number '" +
                         std::string(field) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

Complex complex_from(const json& node, const char* what) {
    if (!node.is_object() || !node.contains("re") || !node.contains("im") ||
        !node["re"].is_number() || !node["im"].is_number()) {
        throw InputError(std::string(what) + " must be an object {\"re\": number, \"im\": number}");
    }
    return {node["re"].get<double>(), node["im"].get<double>()};
}

Decomposition decomposition_from(const json& doc) {
    if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_array()) {
        throw InputError("decomposition JSON needs a \"components\" array");
    }
    std::vector<GeometricComponent> components;
    for (const json& c : doc["components"]) {
        if (!c.is_object() || !c.contains("a") || !c.contains("r")) {
            throw InputError("each component needs \"a\" and \"r\"");
        }
        components.emplace_back(complex_from(c["a"], "a"), complex_from(c["r"], "r"));
    }
    return Decomposition(std::move(components));
}

template <typename T>
std::vector<T> scalar_or_array(const json& node, const char* name) {
    std::vector<T> out;
    if (node.is_array()) {
        for (const json& v : node) out.push_back(v.get<T>());
    } else {
        out.push_back(node.get<T>());
    }
    if (out.empty()) throw InputError(std::string(name) + " must not be empty");
    return out;
}

std::size_t count_of(const json& node, const char* name) {
    if (!node.is_number_integer() || node.get<long long>() < 0) {
        throw InputError(std::string(name) + " must be a nonnegative integer");
    }
    return node.get<std::size_t>();
}

std::array<double, 2> range_of(const json& node, const char* name) {
    if (!node.is_array() || node.size() != 2) throw InputError(std::string(name) + " must be [lo, hi]");
    return {node[0].get<double>(), node[1].get<double>()};
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

} // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_sequence_csv(std::ostream& out, const ComplexSequence& s) {
    out << "index,re,im\n";
    for (std::size_t l = 0; l < s.size(); ++l)
        out << l << ',' << format_double(s[l].real()) << ',' << format_double(s[l].imag()) << '\n';
}

ComplexSequence read_sequence_csv(std::istream& in) {
    std::string line;
    std::size_t line_number = 0;
    bool header = false;
    std::vector<Complex> samples;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (!header) {
            if (text != "index,re,im") {
                throw InputError("sequence CSV must start with the header 'index,re,im'");
            }
            header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (std::size_t comma; (comma = text.find(',', start)) != std::string_view::npos; start = comma + 1)
            fields.push_back(trim(text.substr(start, comma - start)));
        fields.push_back(trim(text.substr(start)));
        if (fields.size() != 3) {
            throw InputError("line " + std::to_string(line_number) + ": expected 3 fields");
        }
        const double index = to_double(fields[0], line_number);
        if (index != static_cast<double>(samples.size())) {
            throw InputError("line " + std::to_string(line_number) + ": expected index " +
                             std::to_string(samples.size()));
        }
        samples.emplace_back(to_double(fields[1], line_number), to_double(fields[2], line_number));
    }
    if (!header) throw InputError("sequence CSV is empty");
    if (samples.empty()) throw InputError("sequence CSV has no samples");
    return ComplexSequence(std::move(samples));
}

std::string decomposition_to_json(const Decomposition& d) {
    std::string out = "{\"components\":[";
    for (std::size_t i = 0; i < d.k(); ++i) {
        const Complex a = d[i].initial_term();
        const Complex r = d[i].ratio();
        if (i) out += ',';
        out += "{\"a\":{\"re\":" + format_double(a.real()) + ",\"im\":" + format_double(a.imag()) +
               "},\"r\":{\"re\":" + format_double(r.real()) + ",\"im\":" + format_double(r.imag()) + "}}";
    }
    out += "]}";
    return out;
}

Decomposition decomposition_from_json(std::string_view text) {
    try {
        return decomposition_from(parse_json(text));
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid decomposition JSON: ") + e.what());
    }
}

SynthRequest synth_request_from_json(std::string_view text) {
    try {
        const json doc = parse_json(text);
        if (!doc.is_object() || !doc.contains("length")) {
            throw InputError("synth config needs a \"length\" member");
        }
        const std::size_t length = count_of(doc["length"], "length");
        if (length < 1) throw InputError("length must be >= 1");
        return {decomposition_from(doc), length};
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid synth JSON: ") + e.what());
    }
}

ExperimentConfig experiment_config_from_json(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw InputError("experiment config must be a JSON object");
    if (!doc.contains("experiment")) throw InputError("experiment config needs \"experiment\"");

    static const std::set<std::string> known{
        "experiment", "center_frequency", "bandwidth", "symbol_duration", "samples_per_symbol",
        "k", "M", "gamma_db", "sigma_db", "doppler_range", "delay_spread_range", "noise_variance",
        "trials", "seed", "receivers", "similarity", "pair_budget", "k_max", "threads",
        "allow_collisions", "association", "epsilon", "imax"};
    for (const auto& item : doc.items()) {
        if (!known.contains(item.key())) throw InputError("unknown config key \"" + item.key() + "\"");
    }

    ExperimentConfig cfg;
    try {
        cfg.kind = parse_experiment_kind(doc["experiment"].get<std::string>());
        SimConfig& b = cfg.base;
        if (doc.contains("center_frequency")) b.center_frequency = doc["center_frequency"].get<double>();
        if (doc.contains("bandwidth")) b.bandwidth = doc["bandwidth"].get<double>();
        if (doc.contains("symbol_duration")) b.symbol_duration = doc["symbol_duration"].get<double>();
        if (doc.contains("samples_per_symbol")) {
            b.samples_per_symbol = count_of(doc["samples_per_symbol"], "samples_per_symbol");
        }
        if (doc.contains("k")) {
            for (const json& v : doc["k"].is_array() ? doc["k"] : json::array({doc["k"]}))
                cfg.k_values.push_back(count_of(v, "k"));
            if (cfg.k_values.empty()) throw InputError("k must not be empty");
        }
        if (doc.contains("M")) {
            for (const json& v : doc["M"].is_array() ? doc["M"] : json::array({doc["M"]}))
                cfg.m_values.push_back(count_of(v, "M"));
            if (cfg.m_values.empty()) throw InputError("M must not be empty");
        }
        if (doc.contains("gamma_db")) cfg.gamma_values = scalar_or_array<double>(doc["gamma_db"], "gamma_db");
        if (doc.contains("sigma_db")) cfg.sigma_values = scalar_or_array<double>(doc["sigma_db"], "sigma_db");
        if (doc.contains("doppler_range")) b.doppler_range = range_of(doc["doppler_range"], "doppler_range");
        if (doc.contains("delay_spread_range")) {
            b.delay_spread_range = range_of(doc["delay_spread_range"], "delay_spread_range");
        }
        if (doc.contains("noise_variance")) b.noise_variance = doc["noise_variance"].get<double>();
        if (doc.contains("trials")) b.trials = count_of(doc["trials"], "trials");
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
            b.seed = doc["seed"].get<std::uint64_t>();
        }
        if (doc.contains("receivers")) {
            cfg.receivers.clear();
            for (const auto& name : scalar_or_array<std::string>(doc["receivers"], "receivers"))
                cfg.receivers.push_back(parse_receiver(name));
        }
        if (doc.contains("similarity")) {
            cfg.similarity_kinds.clear();
            for (const auto& name : scalar_or_array<std::string>(doc["similarity"], "similarity"))
                cfg.similarity_kinds.push_back(parse_similarity_kind(name));
        }
        if (doc.contains("pair_budget")) cfg.pair_budget = count_of(doc["pair_budget"], "pair_budget");
        if (doc.contains("k_max")) cfg.k_max = count_of(doc["k_max"], "k_max");
        if (doc.contains("threads")) cfg.threads = count_of(doc["threads"], "threads");
        if (doc.contains("allow_collisions")) b.allow_collisions = doc["allow_collisions"].get<bool>();
        if (doc.contains("association")) {
            b.association = parse_association(doc["association"].get<std::string>());
        }
        if (doc.contains("epsilon")) b.denoise.epsilon = doc["epsilon"].get<double>();
        if (doc.contains("imax")) b.denoise.max_iterations = count_of(doc["imax"], "imax");
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid experiment config: ") + e.what());
    }
    if (!cfg.k_values.empty()) cfg.base.k = cfg.k_values.front();
    if (!cfg.m_values.empty()) cfg.base.modulation_order = cfg.m_values.front();
    if (!cfg.gamma_values.empty()) cfg.base.gamma_db = cfg.gamma_values.front();
    if (!cfg.sigma_values.empty()) cfg.base.sigma_db = cfg.sigma_values.front();
    cfg.validate();
    return cfg;
}

std::string ser_csv(const SimReport& report) {
    std::string out = "k,M,gamma_db,sigma_db,noinfra_ser,orasic_ser,trials\n";
    for (const SerRow& r : report.ser) {
        out += std::to_string(r.k) + ',' + std::to_string(r.m) + ',' + format_double(r.gamma_db) + ',' +
               format_double(r.sigma_db) + ',' + optional_cell(r.noinfra_ser) + ',' +
               optional_cell(r.orasic_ser) + ',' + std::to_string(r.trials) + '\n';
    }
    return out;
}

std::string detection_csv(const SimReport& report) {
    std::string out = "k,gamma_db,sigma_db,kind,rate,trials\n";
    for (const DetectionRow& r : report.detection) {
        out += std::to_string(r.k) + ',' + format_double(r.gamma_db) + ',' + format_double(r.sigma_db) +
               ',' + std::string(to_string(r.kind)) + ',' + format_double(r.rate) + ',' +
               std::to_string(r.trials) + '\n';
    }
    return out;
}

std::string denoise_csv(const SimReport& report) {
    std::string out =
        "k,gamma_db,sigma_db,nmse_observed,nmse_raw,nmse_denoised,mean_iterations,"
        "nonconverged_fraction,raw_failures,denoised_failures,trials\n";
    for (const DenoiseRow& r : report.denoise) {
        out += std::to_string(r.k) + ',' + format_double(r.gamma_db) + ',' + format_double(r.sigma_db) +
               ',' + format_double(r.nmse_observed) + ',' + format_double(r.nmse_raw) + ',' +
               format_double(r.nmse_denoised) + ',' + format_double(r.mean_iterations) + ',' +
               format_double(r.nonconverged_fraction) + ',' + std::to_string(r.raw_failures) + ',' +
               std::to_string(r.denoised_failures) + ',' + std::to_string(r.trials) + '\n';
    }
    return out;
}

std::string denoise_iterations_csv(const SimReport& report) {
    std::string out = "k,gamma_db,sigma_db,iterations,count\n";
    for (const DenoiseRow& r : report.denoise)
        for (std::size_t i = 0; i < r.iteration_histogram.size(); ++i) {
            if (r.iteration_histogram[i] == 0) continue;
            out += std::to_string(r.k) + ',' + format_double(r.gamma_db) + ',' +
                   format_double(r.sigma_db) + ',' + std::to_string(i) + ',' +
                   std::to_string(r.iteration_histogram[i]) + '\n';
        }
    return out;
}

std::vector<std::filesystem::path> write_report(const SimReport& report,
                                                const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::pair<std::string, std::string>> files;
    switch (report.kind) {
    case ExperimentKind::ser: files.emplace_back("ser.csv", ser_csv(report)); break;
    case ExperimentKind::detection: files.emplace_back("detection.csv", detection_csv(report)); break;
    case ExperimentKind::denoise:
        files.emplace_back("denoise.csv", denoise_csv(report));
        files.emplace_back("denoise_iterations.csv", denoise_iterations_csv(report));
        break;
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : files) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) throw InputError("cannot write " + path.string());
        written.push_back(path);
    }
    return written;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace gsdst
