#pragma once

#include "shapefit/confidence.hpp"
#include "shapefit/current_status.hpp"
#include "shapefit/error.hpp"
#include "shapefit/incubation.hpp"
#include "shapefit/smle.hpp"
#include "shapefit/step_distribution.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace shapefit::io {

//! 17 significant digits round-trip every double.
inline std::string
format_double(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view>
split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      return out;
    start = comma + 1;
  }
}

inline double
parse_number(std::string_view field, std::size_t line_no)
{
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" +
                    std::string(field) + "'");
  return v;
}

// Reads two-column numeric CSV with the given header; calls row(a, b, line).
template<typename Row>
void
read_two_columns(std::istream& in, std::string_view col1, std::string_view col2, Row&& row)
{
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#')
      continue;
    const auto fields = split(view);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 2 && fields[0] == col1 && fields[1] == col2)
        continue;
      throw DataError("line " + std::to_string(line_no) + ": expected header '" +
                      std::string(col1) + "," + std::string(col2) + "'");
    }
    if (fields.size() != 2)
      throw DataError("line " + std::to_string(line_no) + ": expected 2 fields, found " +
                      std::to_string(fields.size()));
    row(parse_number(fields[0], line_no), parse_number(fields[1], line_no), line_no);
  }
  if (!header_seen)
    throw DataError("empty input: expected header '" + std::string(col1) + "," +
                    std::string(col2) + "'");
}

inline std::ifstream
open_input(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open input file '" + path + "'");
  return in;
}

} // namespace detail

//! CSV with header `t,delta`; delta must be 0 or 1.
inline CurrentStatusData
read_current_status(std::istream& in)
{
  CurrentStatusData data;
  detail::read_two_columns(in, "t", "delta", [&](double t, double d, std::size_t line) {
    if (!std::isfinite(t) || !(t > 0.0))
      throw DataError("line " + std::to_string(line) + ": time must be finite and positive");
    if (d != 0.0 && d != 1.0)
      throw DataError("line " + std::to_string(line) + ": delta must be 0 or 1");
    data.records.push_back({ t, static_cast<int>(d) });
  });
  return data;
}

inline CurrentStatusData
read_current_status(const std::string& path)
{
  auto in = detail::open_input(path);
  return read_current_status(in);
}

//! CSV with header `e,s`.
inline IncubationData
read_incubation(std::istream& in)
{
  IncubationData data;
  detail::read_two_columns(in, "e", "s", [&](double e, double s, std::size_t line) {
    if (!std::isfinite(e) || !(e > 0.0))
      throw DataError("line " + std::to_string(line) +
                      ": exposure length must be finite and positive");
    if (!std::isfinite(s) || !(s > 0.0))
      throw DataError("line " + std::to_string(line) +
                      ": symptom time must be finite and positive");
    data.records.push_back({ e, s });
  });
  return data;
}

inline IncubationData
read_incubation(const std::string& path)
{
  auto in = detail::open_input(path);
  return read_incubation(in);
}

inline void
write_current_status(std::ostream& out, const CurrentStatusData& data)
{
  out << "t,delta\n";
  for (const auto& r : data.records)
    out << format_double(r.t) << ',' << r.delta << '\n';
}

inline void
write_incubation(std::ostream& out, const IncubationData& data)
{
  out << "e,s\n";
  for (const auto& r : data.records)
    out << format_double(r.e) << ',' << format_double(r.s) << '\n';
}

//! Step cdf as `x,cdf` at the support points.
inline void
write_step_cdf(std::ostream& out, const StepDistribution& f)
{
  out << "x,cdf\n";
  for (std::size_t j = 0; j < f.size(); ++j)
    out << format_double(f.points()[j]) << ',' << format_double(f.cdf_at(j)) << '\n';
}

inline void
write_curve(std::ostream& out, const SmleCurve& curve)
{
  out << "t,estimate\n";
  for (std::size_t k = 0; k < curve.grid.size(); ++k)
    out << format_double(curve.grid[k]) << ',' << format_double(curve.values[k]) << '\n';
}

inline void
write_band(std::ostream& out, const ConfidenceBand& band)
{
  out << "t,lower,estimate,upper\n";
  for (std::size_t k = 0; k < band.grid.size(); ++k)
    out << format_double(band.grid[k]) << ',' << format_double(band.lower[k]) << ','
        << format_double(band.estimate[k]) << ',' << format_double(band.upper[k]) << '\n';
}

inline void
write_coverage(std::ostream& out, const CoverageResult& res)
{
  out << "t,noncoverage\n";
  for (std::size_t k = 0; k < res.grid.size(); ++k)
    out << format_double(res.grid[k]) << ',' << format_double(res.noncoverage[k]) << '\n';
}

} // namespace shapefit::io
