#pragma once

#include <span>
#include <string>
#include <string_view>

namespace gmratio {

// Shortest decimal text that parses back to exactly `v`; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double v);

// RFC 4180 field quoting.
std::string csv_field(std::string_view text);
std::string csv_row(std::span<const std::string> fields);

}  // namespace gmratio
