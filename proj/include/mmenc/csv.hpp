#pragma once

// CSV file formats (UTF-8, '.' decimal separator, one header line):
//   sweep    freq_hz,re,im        uniform ascending grid
//   cir      time_s,re,im         uniform ascending grid
//   profile  delay_s,power_linear
//   ber      ebn0_db,ber,bits,errors

#include "mmenc/dsp.hpp"
#include "mmenc/extraction.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace mmenc {

FrequencySweep read_sweep_csv(const std::filesystem::path& path);
std::string format_sweep_csv(const FrequencySweep& sweep);

ImpulseResponse read_cir_csv(const std::filesystem::path& path);
std::string format_cir_csv(const ImpulseResponse& cir);

/// threshold_db of the returned profile is +inf (nothing was cut).
MultipathProfile read_profile_csv(const std::filesystem::path& path);
std::string format_profile_csv(const MultipathProfile& profile);

/// First line of a file, without line terminator.
std::string read_header(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Writes to a temporary sibling and renames it over path.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace mmenc
