#pragma once

#include <string>
#include <vector>

namespace tad {

// Round-trip-exact formatting (17 significant digits) used for all CSV output.
std::string format_double(double v);

// Splits one CSV line on commas; a trailing '\r' is stripped first.
// No quoting: identifiers must not contain commas.
std::vector<std::string> split_csv(std::string line);

}  // namespace tad
