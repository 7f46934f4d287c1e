#pragma once

// File formats: refinement traces as JSON, and atomic file output.
//
// Trace schema (version 1):
//   {
//     "schema": 1,
//     "n_ancilla": N, "delta_t": dt, "mode": "exact" | "sampled",
//     "iterations": [
//       {"n", "alpha", "y", "plateau_start", "c_slots",
//        "interval_lo", "interval_hi", "interval_center", "interval_half_width",
//        "epsilon", "attempts"}, ...
//     ],
//     "energy_low": E_lo, "energy_high": E_hi
//   }

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "iqpe/refine.hpp"

namespace iqpe {

inline constexpr int kTraceSchemaVersion = 1;

std::string to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view text);

void write_trace_json(std::ostream& os, const RefinementTrace& trace, SamplingMode mode);
/// Throws iqpe::Error on malformed input or an unknown schema version.
RefinementTrace read_trace_json(std::istream& is);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace iqpe
