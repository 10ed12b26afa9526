#pragma once

// Text file formats.
//
// Spectrum CSV (one or more blocks separated by a blank line):
//     # temperature_K=<T> resolution_meV=<r>
//     energy_meV,intensity
//     <e>,<I>
//
// Peak table CSV:
//     temperature_K,e_upper_meV,e_lower_meV,fwhm_upper_meV,fwhm_lower_meV,amp_upper,amp_lower
//   Lines starting with '#' before the header are ignored.
//
// Fit result (flat key=value):
//     <name>[<unit>]=<value> ± <sigma>
//     converged=true|false
//     residual_rms=<x>
//     iterations=<n>
//
// Numbers are written in shortest round-trip form, so write(read(x)) == x for
// any file produced by the writers.

#include "cqed/fitting.hpp"
#include "cqed/lineshape.hpp"
#include "cqed/lm.hpp"
#include "cqed/wgm.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cqed::io {

std::string format_double(double v);
// Whole-token parse; throws InvalidInput on trailing garbage.
double parse_double(std::string_view text);

void write_spectra(std::ostream& os, std::span<const Spectrum> spectra);
std::vector<Spectrum> read_spectra(std::istream& is);

void write_peak_table(std::ostream& os, const PeakTable& table);
PeakTable read_peak_table(std::istream& is);

void write_fit_result(std::ostream& os, const FitResult& result);
FitResult read_fit_result(std::istream& is);

void write_mode_table(std::ostream& os, std::span<const WgmMode> modes);

std::string read_file(const std::filesystem::path& path);
// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace cqed::io
