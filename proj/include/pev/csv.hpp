#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pev/experiments.hpp"

namespace pev {

// Locale-independent formatting: '.' decimal point, 9 significant digits.
std::string format_double(double v);

// Profile CSV: header `position,clicks,received,oracle_value` (the oracle
// column only when values are supplied), '\n' newlines. Angular positions are
// written in degrees, flat-screen positions in millimeters.
void write_profile(const RunResult& result, const std::vector<double>* oracle_values,
                   const std::string& path, bool angular_positions);

// Oracle-only profile: clicks and received written as zero.
void write_oracle_profile(const std::vector<double>& positions, const std::vector<double>& values,
                          const std::string& path, bool angular_positions);

struct ParsedProfile {
  std::vector<double> positions;  // as written (deg or mm)
  std::vector<std::uint64_t> clicks;
  std::vector<std::uint64_t> received;
  std::vector<double> oracle;  // empty when the column is absent
};
ParsedProfile read_profile(const std::string& path);

// Free-form numeric table with a caller-supplied header, same formatting.
void write_table(const std::string& header, const std::vector<std::vector<double>>& columns,
                 const std::string& path);

}  // namespace pev
