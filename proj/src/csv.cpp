#include "pev/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pev {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps '\n' on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

double parse_field(const std::string& field, const std::string& path) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw std::runtime_error(path + ": bad numeric field '" + field + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_profile(const RunResult& result, const std::vector<double>* oracle_values,
                   const std::string& path, bool angular_positions) {
  if (result.positions.empty()) throw std::invalid_argument("write_profile: empty result");
  if (oracle_values && oracle_values->size() != result.positions.size())
    throw std::invalid_argument("write_profile: oracle column size mismatch");
  auto out = open_out(path);
  out << (oracle_values ? "position,clicks,received,oracle_value\n" : "position,clicks,received\n");
  const double unit = angular_positions ? kRadToDeg : 1e3;
  for (std::size_t i = 0; i < result.positions.size(); ++i) {
    out << format_double(result.positions[i] * unit) << ',' << result.clicks[i] << ','
        << result.received[i];
    if (oracle_values) out << ',' << format_double((*oracle_values)[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_oracle_profile(const std::vector<double>& positions, const std::vector<double>& values,
                          const std::string& path, bool angular_positions) {
  if (positions.empty() || positions.size() != values.size())
    throw std::invalid_argument("write_oracle_profile: empty or mismatched profile");
  auto out = open_out(path);
  out << "position,clicks,received,oracle_value\n";
  const double unit = angular_positions ? kRadToDeg : 1e3;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out << format_double(positions[i] * unit) << ",0,0," << format_double(values[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParsedProfile read_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const bool has_oracle = line == "position,clicks,received,oracle_value";
  if (!has_oracle && line != "position,clicks,received")
    throw std::runtime_error(path + ": unrecognized header '" + line + "'");

  ParsedProfile out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != (has_oracle ? 4u : 3u))
      throw std::runtime_error(path + ": wrong field count in row '" + line + "'");
    out.positions.push_back(parse_field(fields[0], path));
    out.clicks.push_back(static_cast<std::uint64_t>(parse_field(fields[1], path)));
    out.received.push_back(static_cast<std::uint64_t>(parse_field(fields[2], path)));
    if (has_oracle) out.oracle.push_back(parse_field(fields[3], path));
  }
  if (out.positions.empty()) throw std::runtime_error(path + ": no data rows");
  return out;
}

void write_table(const std::string& header, const std::vector<std::vector<double>>& columns,
                 const std::string& path) {
  if (columns.empty() || columns.front().empty())
    throw std::invalid_argument("write_table: no data");
  for (const auto& c : columns)
    if (c.size() != columns.front().size())
      throw std::invalid_argument("write_table: ragged columns");
  auto out = open_out(path);
  out << header << '\n';
  for (std::size_t i = 0; i < columns.front().size(); ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      out << format_double(columns[c][i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pev
