#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netprof {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

std::string hex_encode(const std::vector<uint8_t>& data);
std::vector<uint8_t> hex_decode(std::string_view hex);

// Lossless double formatting (shortest round-trip is not needed; %.17g
// re-reads exactly and is byte-stable across runs).
std::string fmt_double(double v);

// CSV field quoting per RFC 4180 when the value needs it.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_parse_line(const std::string& line);

// epoch microseconds from a civil UTC timestamp
int64_t civil_to_epoch_us(int year, int month, int day, int hour, int min, int sec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace netprof
