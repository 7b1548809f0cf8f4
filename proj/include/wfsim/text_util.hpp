#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace wfsim {

// Shortest decimal form that parses back to the identical double. Integral
// values print without a fraction part ("12"); large magnitudes switch to
// scientific notation ("1e+06") when that form is shorter.
std::string format_number(double value);

// Parses a complete finite numeric token. Returns nothing when the text is
// empty, has trailing characters, or encodes an infinity/NaN.
std::optional<double> try_parse_number(const std::string& text);

// Reads a whole file into memory; throws std::runtime_error naming the path
// when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

// Writes text to a file, creating parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace wfsim
