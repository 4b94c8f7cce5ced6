#pragma once

// File formats: sequences as CSV (index,re,im), decompositions and
// experiment configurations as JSON, experiment reports as CSV.

#include "gsdst/experiments.hpp"
#include "gsdst/sequence.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gsdst {

/// %.17g
std::string format_double(double value);

void write_sequence_csv(std::ostream& out, const ComplexSequence& s);
/// Requires the header `index,re,im` and rows indexed 0..P-1 in order.
ComplexSequence read_sequence_csv(std::istream& in);

std::string decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(std::string_view text);

struct SynthRequest {
    Decomposition decomposition;
    std::size_t length;
};

/// A decomposition document with an additional "length" member.
SynthRequest synth_request_from_json(std::string_view text);

/// Scalars or arrays for k, M, gamma_db, sigma_db; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(std::string_view text);

std::string ser_csv(const SimReport& report);
std::string detection_csv(const SimReport& report);
std::string denoise_csv(const SimReport& report);
std::string denoise_iterations_csv(const SimReport& report);

/// Writes the report's CSV files into `dir` (created if missing) and
/// returns their paths.
std::vector<std::filesystem::path> write_report(const SimReport& report,
                                                const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);

} // namespace gsdst
