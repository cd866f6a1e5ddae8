#include "beamspace/pattern_io.hpp"

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

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Row {
  std::size_t line = 0;
  double f = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  cplx et;
  cplx ep;
};

std::string at_row(const std::string& source, std::size_t line) { return source + ": row " + std::to_string(line) + ": "; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_pattern_csv(std::ostream& out, std::span<const VectorPattern> per_frequency) {
  out << kPatternCsvHeader << "\n";
  for (const auto& p : per_frequency) {
    if (!per_frequency.empty() && !(p.grid == per_frequency[0].grid || *p.grid == *per_frequency[0].grid)) {
      throw std::invalid_argument("write_pattern_csv: patterns must share one grid");
    }
    const auto& g = *p.grid;
    for (std::size_t i = 0; i < g.n_theta(); ++i) {
      for (std::size_t j = 0; j < g.n_phi(); ++j) {
        const std::size_t k = g.index(i, j);
        out << fmt(p.frequency) << ',' << fmt(g.theta_nodes()[i] * kDeg) << ',' << fmt(g.phi_nodes()[j] * kDeg) << ','
            << fmt(p.e_theta[k].real()) << ',' << fmt(p.e_theta[k].imag()) << ',' << fmt(p.e_phi[k].real()) << ','
            << fmt(p.e_phi[k].imag()) << "\n";
      }
    }
  }
}

void write_pattern_csv(const std::filesystem::path& path, std::span<const VectorPattern> per_frequency) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string() + ": cannot open for writing");
  write_pattern_csv(out, per_frequency);
}

std::vector<VectorPattern> read_pattern_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IngestionError(source + ": empty pattern file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPatternCsvHeader) throw IngestionError(at_row(source, 1) + "expected header '" + kPatternCsvHeader + "'");

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[7];
    for (int c = 0; c < 7; ++c) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) throw IngestionError(at_row(source, line_no) + "expected 7 columns");
      std::size_t used = 0;
      try {
        v[c] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (used != cell.size()) throw IngestionError(at_row(source, line_no) + "malformed number '" + cell + "'");
    }
    if (std::string extra; std::getline(ls, extra, ',')) throw IngestionError(at_row(source, line_no) + "expected 7 columns");
    rows.push_back({line_no, v[0], v[1], v[2], {v[3], v[4]}, {v[5], v[6]}});
  }
  if (rows.empty()) throw IngestionError(source + ": no pattern rows");

  // The first theta block fixes the phi axis; the first frequency block fixes theta.
  std::vector<double> phi_deg;
  for (const auto& r : rows) {
    if (r.f != rows[0].f || r.theta != rows[0].theta) break;
    phi_deg.push_back(r.phi);
  }
  const std::size_t n_phi = phi_deg.size();
  if (n_phi < 2 || n_phi % 2 != 0) {
    throw IngestionError(source + ": phi axis must have an even number (>= 2) of samples, found " + std::to_string(n_phi));
  }
  for (std::size_t j = 0; j < n_phi; ++j) {
    const double expect = -180.0 + 360.0 * static_cast<double>(j) / static_cast<double>(n_phi);
    if (std::abs(phi_deg[j] - expect) > 1e-9) {
      throw IngestionError(at_row(source, rows[j].line) + "phi axis must be uniform from -180 deg, expected " + fmt(expect) +
                           " found " + fmt(phi_deg[j]));
    }
  }

  std::vector<double> theta_deg;
  std::vector<double> freqs;
  std::size_t cursor = 0;
  while (cursor < rows.size()) {
    const double f = rows[cursor].f;
    const bool first_freq = freqs.empty();
    if (!first_freq && !(f > freqs.back())) {
      throw IngestionError(at_row(source, rows[cursor].line) + "frequencies must be strictly increasing");
    }
    freqs.push_back(f);
    std::size_t i_theta = 0;
    while (cursor < rows.size() && rows[cursor].f == f) {
      const double th = rows[cursor].theta;
      if (first_freq) {
        theta_deg.push_back(th);
      } else if (i_theta >= theta_deg.size() || th != theta_deg[i_theta]) {
        throw IngestionError(at_row(source, rows[cursor].line) + "theta " + fmt(th) +
                             " deg does not match the first frequency's theta axis");
      }
      for (std::size_t j = 0; j < n_phi; ++j, ++cursor) {
        if (cursor >= rows.size() || rows[cursor].f != f || rows[cursor].theta != th) {
          const std::size_t where = cursor < rows.size() ? rows[cursor].line : rows.back().line + 1;
          throw IngestionError(at_row(source, where) + "missing phi row " + fmt(phi_deg[j]) + " deg for theta " + fmt(th) +
                               " deg (" + std::to_string(j) + " of " + std::to_string(n_phi) + " present)");
        }
        if (rows[cursor].phi != phi_deg[j]) {
          throw IngestionError(at_row(source, rows[cursor].line) + "expected phi " + fmt(phi_deg[j]) + " deg, found " +
                               fmt(rows[cursor].phi) + " (theta " + fmt(th) + " deg)");
        }
      }
      ++i_theta;
    }
    if (i_theta != theta_deg.size()) {
      throw IngestionError(source + ": frequency " + fmt(f) + " Hz has " + std::to_string(i_theta) + " theta rows, expected " +
                           std::to_string(theta_deg.size()));
    }
  }

  std::vector<double> theta(theta_deg.size());
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = theta_deg[i] / kDeg;
  GridPtr grid;
  try {
    grid = std::make_shared<const SphericalGrid>(SphericalGrid::from_theta_nodes(std::move(theta), n_phi));
  } catch (const std::invalid_argument& e) {
    throw IngestionError(source + ": " + e.what());
  }

  std::vector<VectorPattern> out;
  const std::size_t block = grid->size();
  for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
    VectorPattern p = VectorPattern::zeros(grid, freqs[fi]);
    for (std::size_t k = 0; k < block; ++k) {
      p.e_theta[k] = rows[fi * block + k].et;
      p.e_phi[k] = rows[fi * block + k].ep;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<VectorPattern> read_pattern_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string() + ": cannot open");
  return read_pattern_csv(in, path.string());
}

}  // namespace beamspace
