#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gupnoise/io/serialize.hpp"

namespace gupnoise::io {

enum class Format { Csv, Json };

inline const char* to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

// Shortest round-trip representation, so files reproduce values bit for bit.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest round-trip form; very large or small magnitudes always use an
  // exponent so that values such as 2.7e20 are not printed as long integers.
  char buf[64];
  const double a = std::abs(v);
  const bool sci = a != 0.0 && (a >= 1e16 || a < 1e-5);
  const auto res = sci ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific)
                       : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Everything a command produces: provenance metadata, an optional table and
// a structured result.
struct Output {
  json metadata = json::object();
  json result = json::object();
  std::optional<Table> table;
};

inline std::string render_csv(const Output& out) {
  if (!out.table) throw UsageError("this command produces a single result; use --format json");
  std::ostringstream s;
  s << "# gupnoise " << kVersion << "\n";
  for (const auto& [key, value] : out.metadata.items()) s << "# " << key << "=" << value.dump() << "\n";
  const Table& t = *out.table;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s << (i ? "," : "") << t.columns[i];
  s << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
    s << "\n";
  }
  return s.str();
}

inline std::string render_json(const Output& out) {
  json j = out.metadata;
  j["version"] = kVersion;
  j["result"] = out.result;
  if (out.table) {
    json rows = json::array();
    for (const auto& r : out.table->rows) {
      json row = json::object();
      for (std::size_t i = 0; i < r.size(); ++i) {
        double v = 0.0;
        const auto& cell = r[i];
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec == std::errc() && res.ptr == cell.data() + cell.size()) row[out.table->columns[i]] = v;
        else row[out.table->columns[i]] = cell;
      }
      rows.push_back(row);
    }
    j["rows"] = rows;
  }
  return j.dump(2) + "\n";
}

// Writes to path, or stdout when path is empty or "-".
inline void emit(const Output& out, Format format, const std::string& path) {
  const std::string text = format == Format::Csv ? render_csv(out) : render_json(out);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Table builders

inline Table curve_table(const SpectrumCurve& c) {
  Table t{{"omega_rad_s", "psd_m2_per_hz", "kind"}, {}};
  for (std::size_t i = 0; i < c.omegas.size(); ++i)
    t.rows.push_back({format_double(c.omegas[i]), format_double(c.values[i]), to_string(c.kind)});
  return t;
}

inline Table bound_table(const std::vector<BoundResult>& points, double scale = 1.0) {
  Table t{{"scale", "omega_rad_s", "beta0_max", "beta_e_max", "criterion"}, {}};
  for (const auto& p : points)
    t.rows.push_back({format_double(scale), format_double(p.omega), format_double(p.beta0_max),
                      format_double(p.beta_e_max), to_string(p.criterion)});
  return t;
}

// ---------------------------------------------------------------------------
// Observed spectra

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  const auto res = std::from_chars(b, s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(v);
}

// Sorts by frequency and averages duplicate frequencies.
inline SpectrumCurve finalize_observed(std::vector<std::pair<double, double>> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SpectrumCurve c;
  c.kind = CurveKind::Observed;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < rows.size() && rows[j].first == rows[i].first) sum += rows[j++].second;
    c.omegas.push_back(rows[i].first);
    c.values.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return c;
}

}  // namespace detail

// Reads an observed spectrum. CSV needs a header naming `omega_rad_s` or
// `freq_hz` (converted by 2 pi) followed by `psd_m2_per_hz`; further columns
// are ignored and lines starting with '#' are comments. JSON accepts
// {"omegas": [...], "values": [...]}.
inline SpectrumCurve ingest_observed(const std::string& path, Format format = Format::Csv) {
  std::ifstream in(path);
  if (!in) throw InputError(InputErrorKind::Missing, "cannot open observed spectrum '" + path + "'");
  std::vector<std::pair<double, double>> rows;

  auto check_row = [&](double w, double s, const std::string& where) {
    if (!(w > 0.0)) throw InputError(InputErrorKind::NonPositive, "non-positive frequency " + where);
    if (!(s > 0.0)) throw InputError(InputErrorKind::NonPositive, "non-positive PSD value " + where);
    rows.emplace_back(w, s);
  };

  if (format == Format::Json) {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(InputErrorKind::NonNumeric, "malformed JSON in '" + path + "': " + e.what());
    }
    if (!j.contains("omegas") || !j.contains("values")) throw InputError(InputErrorKind::BadHeader, "JSON spectrum needs 'omegas' and 'values'");
    const auto& om = j.at("omegas");
    const auto& va = j.at("values");
    if (om.size() != va.size()) throw InputError(InputErrorKind::Invalid, "'omegas' and 'values' differ in length");
    for (std::size_t i = 0; i < om.size(); ++i) {
      if (!om[i].is_number() || !va[i].is_number())
        throw InputError(InputErrorKind::NonNumeric, "non-numeric entry at index " + std::to_string(i));
      check_row(om[i].get<double>(), va[i].get<double>(), "at index " + std::to_string(i));
    }
  } else {
    std::string line;
    std::size_t lineno = 0;
    double unit = 0.0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto cells = detail::split_csv(t);
      if (unit == 0.0) {
        if (cells.size() < 2 || cells[1] != "psd_m2_per_hz" || (cells[0] != "omega_rad_s" && cells[0] != "freq_hz"))
          throw InputError(InputErrorKind::BadHeader,
                           "expected header 'omega_rad_s,psd_m2_per_hz' or 'freq_hz,psd_m2_per_hz' in '" + path + "'");
        unit = cells[0] == "freq_hz" ? two_pi : 1.0;
        continue;
      }
      double w = 0.0, s = 0.0;
      if (cells.size() < 2 || !detail::parse_number(cells[0], w) || !detail::parse_number(cells[1], s))
        throw InputError(InputErrorKind::NonNumeric, "non-numeric data on line " + std::to_string(lineno) + " of '" + path + "'");
      check_row(w * unit, s, "on line " + std::to_string(lineno));
    }
  }
  if (rows.empty()) throw InputError(InputErrorKind::Empty, "observed spectrum '" + path + "' contains no data rows");
  return detail::finalize_observed(std::move(rows));
}

}  // namespace gupnoise::io
