#include "beamspace/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "beamspace/error.hpp"

namespace beamspace {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double unit_multiplier(const std::string& unit) {
  const std::string u = lower(unit);
  if (u == "hz") return 1.0;
  if (u == "khz") return 1e3;
  if (u == "mhz") return 1e6;
  if (u == "ghz") return 1e9;
  throw IngestionError("touchstone: unknown frequency unit '" + unit + "'");
}

std::string canonical_unit(const std::string& unit) {
  const std::string u = lower(unit);
  if (u == "hz") return "Hz";
  if (u == "khz") return "kHz";
  if (u == "mhz") return "MHz";
  return "GHz";
}

const char* format_name(TouchstoneFormat f) {
  switch (f) {
    case TouchstoneFormat::ri:
      return "RI";
    case TouchstoneFormat::ma:
      return "MA";
    case TouchstoneFormat::db:
      return "DB";
  }
  return "RI";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Matrix entry addressed by the k-th pair in a frequency record. Two-port
// files use the column-major order S11 S21 S12 S22; all others row-major.
std::pair<Eigen::Index, Eigen::Index> entry_of(std::size_t k, std::size_t ports) {
  const auto n = static_cast<Eigen::Index>(ports);
  const auto kk = static_cast<Eigen::Index>(k);
  if (ports == 2) return {kk % n, kk / n};
  return {kk / n, kk % n};
}

cplx decode(double a, double b, TouchstoneFormat f) {
  constexpr double deg = std::numbers::pi / 180.0;
  switch (f) {
    case TouchstoneFormat::ri:
      return {a, b};
    case TouchstoneFormat::ma:
      return std::polar(a, b * deg);
    case TouchstoneFormat::db:
      return std::polar(std::pow(10.0, a / 20.0), b * deg);
  }
  return {a, b};
}

std::pair<double, double> encode(cplx z, TouchstoneFormat f) {
  constexpr double deg = 180.0 / std::numbers::pi;
  switch (f) {
    case TouchstoneFormat::ri:
      return {z.real(), z.imag()};
    case TouchstoneFormat::ma:
      return {std::abs(z), std::arg(z) * deg};
    case TouchstoneFormat::db:
      return {20.0 * std::log10(std::abs(z)), std::arg(z) * deg};
  }
  return {z.real(), z.imag()};
}

}  // namespace

TouchstoneData read_touchstone(std::istream& in, std::size_t ports, const std::string& source) {
  if (ports < 1 || ports > 4) throw IngestionError(source + ": only 1- to 4-port Touchstone files are supported");
  TouchstoneData data;
  data.ports = ports;
  data.unit = "GHz";
  data.format = TouchstoneFormat::ma;
  double multiplier = 1e9;
  bool seen_option = false;

  const std::size_t per_record = 1 + 2 * ports * ports;
  std::vector<double> record;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record_line = 0;

  auto flush_record = [&]() {
    ComplexMatrix s(static_cast<Eigen::Index>(ports), static_cast<Eigen::Index>(ports));
    for (std::size_t k = 0; k < ports * ports; ++k) {
      const auto [r, c] = entry_of(k, ports);
      s(r, c) = decode(record[1 + 2 * k], record[2 + 2 * k], data.format);
    }
    const double f = record[0] * multiplier;
    if (!data.frequencies.empty() && !(f > data.frequencies.back())) {
      throw IngestionError(source + ": line " + std::to_string(record_line) + ": frequencies must be strictly increasing");
    }
    data.frequencies.push_back(f);
    data.s.push_back(std::move(s));
    record.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      if (seen_option) throw IngestionError(source + ": line " + std::to_string(line_no) + ": duplicate option line");
      seen_option = true;
      std::vector<std::string> tokens;
      if (first.size() > 1) tokens.push_back(first.substr(1));
      for (std::string t; ls >> t;) tokens.push_back(t);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string t = lower(tokens[i]);
        if (t == "hz" || t == "khz" || t == "mhz" || t == "ghz") {
          data.unit = canonical_unit(t);
          multiplier = unit_multiplier(t);
        } else if (t == "s") {
        } else if (t == "y" || t == "z" || t == "h" || t == "g") {
          throw IngestionError(source + ": line " + std::to_string(line_no) + ": only S parameters are supported");
        } else if (t == "ri") {
          data.format = TouchstoneFormat::ri;
        } else if (t == "ma") {
          data.format = TouchstoneFormat::ma;
        } else if (t == "db") {
          data.format = TouchstoneFormat::db;
        } else if (t == "r") {
          if (i + 1 >= tokens.size()) throw IngestionError(source + ": line " + std::to_string(line_no) + ": R without value");
          try {
            data.z_ref = std::stod(tokens[++i]);
          } catch (const std::exception&) {
            throw IngestionError(source + ": line " + std::to_string(line_no) + ": bad reference impedance");
          }
          if (!(data.z_ref > 0.0)) throw IngestionError(source + ": line " + std::to_string(line_no) + ": bad reference impedance");
        } else {
          throw IngestionError(source + ": line " + std::to_string(line_no) + ": unknown option token '" + tokens[i] + "'");
        }
      }
      continue;
    }
    ls.clear();
    ls.seekg(0);
    for (std::string t; ls >> t;) {
      if (record.empty()) record_line = line_no;
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != t.size()) throw IngestionError(source + ": line " + std::to_string(line_no) + ": malformed number '" + t + "'");
      record.push_back(v);
      if (record.size() == per_record) flush_record();
    }
  }
  if (!record.empty()) {
    throw IngestionError(source + ": line " + std::to_string(record_line) + ": truncated frequency record (" +
                         std::to_string(record.size()) + " of " + std::to_string(per_record) + " values)");
  }
  if (data.frequencies.empty()) throw IngestionError(source + ": no data");
  return data;
}

TouchstoneData read_touchstone(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext.size() != 4 || ext[1] != 's' || ext[3] != 'p' || !std::isdigit(static_cast<unsigned char>(ext[2]))) {
    throw IngestionError(path.string() + ": expected a .sNp extension");
  }
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string() + ": cannot open");
  return read_touchstone(in, static_cast<std::size_t>(ext[2] - '0'), path.string());
}

void write_touchstone(std::ostream& out, const TouchstoneData& data) {
  const double multiplier = unit_multiplier(data.unit);
  out << "! beamspace " << data.ports << "-port S-parameters\n";
  out << "# " << canonical_unit(data.unit) << " S " << format_name(data.format) << " R " << num(data.z_ref) << "\n";
  const std::size_t n = data.ports;
  for (std::size_t fi = 0; fi < data.frequencies.size(); ++fi) {
    out << num(data.frequencies[fi] / multiplier);
    for (std::size_t k = 0; k < n * n; ++k) {
      const auto [r, c] = entry_of(k, n);
      const auto [a, b] = encode(data.s[fi](r, c), data.format);
      // Three- and four-port rows each start a new line.
      if (n > 2 && k > 0 && k % n == 0) out << "\n";
      out << ' ' << num(a) << ' ' << num(b);
    }
    out << "\n";
  }
}

void write_touchstone(const std::filesystem::path& path, const TouchstoneData& data) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string() + ": cannot open for writing");
  write_touchstone(out, data);
}

std::vector<ComplexMatrix> touchstone_to_z(const TouchstoneData& data) {
  std::vector<ComplexMatrix> z;
  z.reserve(data.s.size());
  for (const auto& s : data.s) z.push_back(s_to_z(s, data.z_ref));
  return z;
}

TouchstoneData touchstone_from_network(const PortNetwork& net) {
  TouchstoneData data;
  data.ports = net.port_count();
  data.frequencies = net.frequencies;
  data.z_ref = net.z_ref;
  for (const auto& z : net.z_matrices) data.s.push_back(z_to_s(z, net.z_ref));
  return data;
}

}  // namespace beamspace
