#include "beamspace/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "beamspace/error.hpp"
#include "beamspace/rng.hpp"

namespace beamspace::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) {
  return v ? num(*v) : std::string("nan");
}

// -------------------------------------------------------------- config ----

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.contains(it.key())) bad(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
  }
}

const json& object_at(const json& parent, const char* key, const std::string& field) {
  const json& v = parent.at(key);
  if (!v.is_object()) bad(field, "must be an object");
  return v;
}

double get_number(const json& obj, const char* key, const std::string& field, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(field, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(field, "must be finite");
  return d;
}

double get_positive(const json& obj, const char* key, const std::string& field, double fallback) {
  const double d = get_number(obj, key, field, fallback);
  if (!(d > 0.0)) bad(field, "must be positive");
  return d;
}

std::size_t get_count(const json& obj, const char* key, const std::string& field, std::size_t fallback,
                      std::size_t minimum = 1) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) bad(field, "must be an integer");
  if (v.is_number_integer() && v.get<long long>() < 0) bad(field, "must be non-negative");
  const auto n = v.get<std::size_t>();
  if (n < minimum) bad(field, "must be at least " + std::to_string(minimum));
  return n;
}

bool get_bool(const json& obj, const char* key, const std::string& field, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) bad(field, "must be true or false");
  return obj.at(key).get<bool>();
}

std::vector<double> get_number_list(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) bad(field, "must be a number or a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(field + "[" + std::to_string(i) + "]", "must be a number");
    out.push_back(v[i].get<double>());
    if (!std::isfinite(out.back())) bad(field + "[" + std::to_string(i) + "]", "must be finite");
  }
  return out;
}

cplx get_impedance(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad(field, "impedance must be [re, im] in ohm");
  }
  const cplx z(v[0].get<double>(), v[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) bad(field, "must be finite");
  if (z.real() < 0.0) bad(field, "real part must be non-negative (passive load)");
  return z;
}

// "diode" or [[r1, x1], [r2, x2]].
LoadState get_load_state(const json& v, const std::string& field) {
  if (v.is_string()) {
    if (v.get<std::string>() != "diode") bad(field, "unknown load preset '" + v.get<std::string>() + "' (expected \"diode\")");
    return diode_fixture();
  }
  if (!v.is_array() || v.size() != 2) bad(field, "must be \"diode\" or [[r1, x1], [r2, x2]]");
  return LoadState{{get_impedance(v[0], field + "[0]"), get_impedance(v[1], field + "[1]")}};
}

json load_state_json(const LoadState& s) {
  json out = json::array();
  for (const auto& z : s.loads) out.push_back({z.real(), z.imag()});
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return fs::absolute(path).lexically_normal();
}

DipoleArraySpec parse_analytic(const json& a, std::vector<double>& frequencies) {
  reject_unknown(a, "antenna.analytic",
                 {"design_frequency", "element_length", "parasitic_length", "wire_radius", "spacing", "frequencies"});
  const double f0 = get_positive(a, "design_frequency", "antenna.analytic.design_frequency", kDesignFrequency);
  std::vector<double> freqs;
  if (a.contains("frequencies")) freqs = get_number_list(a.at("frequencies"), "antenna.analytic.frequencies");
  else if (!frequencies.empty()) freqs = frequencies;
  DipoleArraySpec spec = default_dipole_array(f0, freqs);
  spec.element_length = get_positive(a, "element_length", "antenna.analytic.element_length", spec.element_length);
  spec.parasitic_length = get_number(a, "parasitic_length", "antenna.analytic.parasitic_length", 0.0);
  spec.wire_radius = get_positive(a, "wire_radius", "antenna.analytic.wire_radius", spec.wire_radius);
  spec.spacing = get_positive(a, "spacing", "antenna.analytic.spacing", spec.spacing);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    bad("antenna.analytic", e.what());
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const json& raw_input, std::optional<std::uint64_t> seed_override, const fs::path& base_dir) {
  if (!raw_input.is_object()) throw ConfigError("config: top level must be a JSON object");
  // A sidecar from an earlier run carries the effective config under "config".
  const json& input = (raw_input.contains("artifact") && raw_input.contains("config")) ? raw_input.at("config") : raw_input;
  if (!input.is_object()) throw ConfigError("config: must be a JSON object");
  reject_unknown(input, "",
                 {"seed", "antenna", "grid", "frequencies", "loads", "channel", "capacity", "sweep", "waveform", "threads"});

  RunConfig cfg;

  if (seed_override) {
    cfg.seed = *seed_override;
  } else {
    if (!input.contains("seed")) throw ConfigError("seed: required (set it in the config or pass --seed)");
    const json& s = input.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      bad("seed", "must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }

  if (input.contains("threads")) cfg.threads = static_cast<unsigned>(get_count(input, "threads", "threads", 1));

  if (input.contains("frequencies")) cfg.frequencies = get_number_list(input.at("frequencies"), "frequencies");
  for (double f : cfg.frequencies) {
    if (!(f > 0.0)) bad("frequencies", "must be positive");
  }

  if (input.contains("grid")) {
    const json& g = object_at(input, "grid", "grid");
    reject_unknown(g, "grid", {"n_theta", "n_phi"});
    cfg.n_theta = get_count(g, "n_theta", "grid.n_theta", cfg.n_theta, 2);
    cfg.n_phi = get_count(g, "n_phi", "grid.n_phi", cfg.n_phi, 2);
    if (cfg.n_phi % 2 != 0) bad("grid.n_phi", "must be even");
  }

  if (!input.contains("antenna")) throw ConfigError("antenna: required (exactly one of \"analytic\" or \"imported\")");
  const json& ant = object_at(input, "antenna", "antenna");
  reject_unknown(ant, "antenna", {"analytic", "imported"});
  if (ant.contains("analytic") == ant.contains("imported")) {
    throw ConfigError("antenna: exactly one of \"analytic\" or \"imported\" must be given");
  }
  json ant_echo;
  if (ant.contains("analytic")) {
    const json& a = object_at(ant, "analytic", "antenna.analytic");
    cfg.analytic = parse_analytic(a, cfg.frequencies);
    ant_echo["analytic"] = *cfg.analytic;
  } else {
    const json& im = object_at(ant, "imported", "antenna.imported");
    reject_unknown(im, "antenna.imported", {"touchstone", "patterns", "normalization"});
    ImportedAntenna src;
    if (!im.contains("touchstone") || !im.at("touchstone").is_string()) bad("antenna.imported.touchstone", "path required");
    src.touchstone_path = resolve(base_dir, im.at("touchstone").get<std::string>());
    if (im.contains("patterns")) {
      const json& p = im.at("patterns");
      if (!p.is_array()) bad("antenna.imported.patterns", "must be an array of paths");
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p[i].is_string()) bad("antenna.imported.patterns[" + std::to_string(i) + "]", "must be a path");
        src.pattern_paths.push_back(resolve(base_dir, p[i].get<std::string>()));
      }
    }
    if (im.contains("normalization")) {
      if (!im.at("normalization").is_string()) bad("antenna.imported.normalization", "must be \"watts\" or \"volts\"");
      try {
        src.normalization = parse_normalization(im.at("normalization").get<std::string>());
      } catch (const std::invalid_argument& e) {
        bad("antenna.imported.normalization", e.what());
      }
    }
    json paths = json::array();
    for (const auto& p : src.pattern_paths) paths.push_back(p.string());
    ant_echo["imported"] = {{"touchstone", src.touchstone_path.string()},
                            {"patterns", paths},
                            {"normalization", normalization_name(src.normalization)}};
    cfg.imported = std::move(src);
  }

  if (input.contains("loads")) cfg.loads = get_load_state(input.at("loads"), "loads");

  if (input.contains("channel")) {
    const json& c = object_at(input, "channel", "channel");
    reject_unknown(c, "channel", {"snr_db", "n_channels", "n_noise"});
    if (c.contains("snr_db")) cfg.snr_db = get_number_list(c.at("snr_db"), "channel.snr_db");
    cfg.n_channels = get_count(c, "n_channels", "channel.n_channels", cfg.n_channels);
    cfg.n_noise = get_count(c, "n_noise", "channel.n_noise", cfg.n_noise);
  }

  if (input.contains("capacity")) {
    const json& c = object_at(input, "capacity", "capacity");
    reject_unknown(c, "capacity", {"ideal"});
    cfg.ideal = get_bool(c, "ideal", "capacity.ideal", false);
  }

  if (input.contains("sweep")) {
    const json& s = object_at(input, "sweep", "sweep");
    reject_unknown(s, "sweep", {"x_min", "x_max", "points", "refine", "series_resistance", "subbands", "fixed_loads"});
    auto& sw = cfg.sweep;
    sw.x_min = get_number(s, "x_min", "sweep.x_min", sw.x_min);
    sw.x_max = get_number(s, "x_max", "sweep.x_max", sw.x_max);
    if (!(sw.x_max > sw.x_min)) bad("sweep.x_max", "must exceed sweep.x_min");
    sw.points = get_count(s, "points", "sweep.points", sw.points, 2);
    sw.refine = static_cast<unsigned>(get_count(s, "refine", "sweep.refine", sw.refine, 0));
    if (sw.refine > 6) bad("sweep.refine", "at most 6 refinement levels");
    sw.series_resistance = get_number(s, "series_resistance", "sweep.series_resistance", sw.series_resistance);
    if (sw.series_resistance < 0.0) bad("sweep.series_resistance", "must be non-negative");
    if (s.contains("subbands")) {
      const auto ks = get_number_list(s.at("subbands"), "sweep.subbands");
      sw.subbands.clear();
      for (double k : ks) {
        if (!(k >= 1.0) || k != std::floor(k)) bad("sweep.subbands", "entries must be positive integers");
        sw.subbands.push_back(static_cast<std::size_t>(k));
      }
    }
    if (s.contains("fixed_loads")) {
      const json& fl = s.at("fixed_loads");
      if (!fl.is_array()) bad("sweep.fixed_loads", "must be an array of load states");
      sw.fixed_loads.clear();
      for (std::size_t i = 0; i < fl.size(); ++i) {
        sw.fixed_loads.push_back(get_load_state(fl[i], "sweep.fixed_loads[" + std::to_string(i) + "]"));
      }
    }
  }

  if (input.contains("waveform")) {
    const json& w = object_at(input, "waveform", "waveform");
    reject_unknown(w, "waveform",
                   {"symbol_rate", "rolloff", "span", "sps", "symbols", "segment", "overlap", "ramp_fractions",
                    "direction_deg", "band_edge", "dump_envelope"});
    auto& wf = cfg.waveform;
    wf.symbol_rate = get_positive(w, "symbol_rate", "waveform.symbol_rate", wf.symbol_rate);
    wf.shape.rolloff = get_number(w, "rolloff", "waveform.rolloff", wf.shape.rolloff);
    wf.shape.span = get_count(w, "span", "waveform.span", wf.shape.span);
    wf.shape.sps = get_count(w, "sps", "waveform.sps", wf.shape.sps, 2);
    wf.symbols = get_count(w, "symbols", "waveform.symbols", wf.symbols, 2);
    wf.segment = get_count(w, "segment", "waveform.segment", wf.segment, 2);
    wf.overlap = get_number(w, "overlap", "waveform.overlap", wf.overlap);
    if (!(wf.overlap >= 0.0 && wf.overlap < 1.0)) bad("waveform.overlap", "must lie in [0, 1)");
    if (w.contains("ramp_fractions")) wf.ramp_fractions = get_number_list(w.at("ramp_fractions"), "waveform.ramp_fractions");
    for (double r : wf.ramp_fractions) {
      if (!(r >= 0.0 && r <= 1.0)) bad("waveform.ramp_fractions", "entries must lie in [0, 1]");
    }
    if (w.contains("direction_deg")) {
      const auto d = get_number_list(w.at("direction_deg"), "waveform.direction_deg");
      if (d.size() != 2) bad("waveform.direction_deg", "must be [theta, phi] in degrees");
      if (!(d[0] >= 0.0 && d[0] <= 180.0)) bad("waveform.direction_deg", "theta must lie in [0, 180]");
      wf.theta_deg = d[0];
      wf.phi_deg = d[1];
    }
    wf.band_edge = get_positive(w, "band_edge", "waveform.band_edge", wf.band_edge);
    wf.dump_envelope = get_bool(w, "dump_envelope", "waveform.dump_envelope", false);
    try {
      wf.shape.validate();
    } catch (const std::invalid_argument& e) {
      bad("waveform", e.what());
    }
    if (wf.segment > wf.symbols * wf.shape.sps) bad("waveform.segment", "longer than the simulated signal");
    if (wf.band_edge >= 0.5 * wf.symbol_rate * static_cast<double>(wf.shape.sps)) {
      bad("waveform.band_edge", "beyond the Nyquist frequency");
    }
  }

  // Effective configuration: every field resolved, so a sidecar reproduces the run.
  json sweep_fixed = json::array();
  for (const auto& s : cfg.sweep.fixed_loads) sweep_fixed.push_back(load_state_json(s));
  cfg.echo = {
      {"seed", cfg.seed},
      {"antenna", ant_echo},
      {"grid", {{"n_theta", cfg.n_theta}, {"n_phi", cfg.n_phi}}},
      {"frequencies", cfg.frequencies},
      {"loads", load_state_json(cfg.loads)},
      {"channel", {{"snr_db", cfg.snr_db}, {"n_channels", cfg.n_channels}, {"n_noise", cfg.n_noise}}},
      {"capacity", {{"ideal", cfg.ideal}}},
      {"sweep",
       {{"x_min", cfg.sweep.x_min},
        {"x_max", cfg.sweep.x_max},
        {"points", cfg.sweep.points},
        {"refine", cfg.sweep.refine},
        {"series_resistance", cfg.sweep.series_resistance},
        {"subbands", cfg.sweep.subbands},
        {"fixed_loads", sweep_fixed}}},
      {"waveform",
       {{"symbol_rate", cfg.waveform.symbol_rate},
        {"rolloff", cfg.waveform.shape.rolloff},
        {"span", cfg.waveform.shape.span},
        {"sps", cfg.waveform.shape.sps},
        {"symbols", cfg.waveform.symbols},
        {"segment", cfg.waveform.segment},
        {"overlap", cfg.waveform.overlap},
        {"ramp_fractions", cfg.waveform.ramp_fractions},
        {"direction_deg", {cfg.waveform.theta_deg, cfg.waveform.phi_deg}},
        {"band_edge", cfg.waveform.band_edge},
        {"dump_envelope", cfg.waveform.dump_envelope}}},
  };
  if (cfg.echo["frequencies"].empty()) cfg.echo.erase("frequencies");
  return cfg;
}

PortNetwork load_antenna(const RunConfig& cfg) {
  if (cfg.analytic) return build_network(*cfg.analytic, make_grid(cfg.n_theta, cfg.n_phi));
  if (cfg.imported) return load_imported(*cfg.imported);
  throw ConfigError("antenna: no source configured");
}

namespace {

// ------------------------------------------------------------- outputs ----

class Writer {
 public:
  Writer(const RunConfig& cfg, fs::path dir, std::string command)
      : cfg_(cfg), dir_(std::move(dir)), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("--out: cannot create directory " + dir_.string() + ": " + ec.message());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void text(const std::string& name, const std::string& body) {
    const auto p = path(name);
    {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw IngestionError(p.string() + ": cannot open for writing");
      out << body;
      if (!out) throw IngestionError(p.string() + ": write failed");
    }
    sidecar(p, json::object());
  }

  /// Record a file produced by a library writer and attach its sidecar,
  /// merging any metadata the writer already put there.
  void adopt(const fs::path& p) {
    json extra = json::object();
    const fs::path side = p.string() + ".json";
    if (fs::exists(side)) {
      std::ifstream in(side);
      extra = json::parse(in);
    }
    sidecar(p, extra);
  }

  const std::vector<fs::path>& written() const { return written_; }

 private:
  void sidecar(const fs::path& p, json extra) {
    extra["artifact"] = kArtifactName;
    extra["version"] = kVersion;
    extra["command"] = command_;
    extra["file"] = p.filename().string();
    extra["config"] = cfg_.echo;
    const fs::path side = p.string() + ".json";
    std::ofstream out(side, std::ios::binary);
    if (!out) throw IngestionError(side.string() + ": cannot open for writing");
    out << extra.dump(2) << "\n";
    written_.push_back(p);
    written_.push_back(side);
  }

  const RunConfig& cfg_;
  fs::path dir_;
  std::string command_;
  std::vector<fs::path> written_;
};

std::vector<double> analysis_frequencies(const RunConfig& cfg, const PortNetwork& net) {
  if (cfg.frequencies.empty()) return net.frequencies;
  for (double f : cfg.frequencies) {
    try {
      net.frequency_index(f);
    } catch (const std::invalid_argument&) {
      bad("frequencies", num(f) + " Hz is not sampled by the antenna");
    }
  }
  return cfg.frequencies;
}

void require_three_ports(const PortNetwork& net) {
  if (net.port_count() != 3) {
    throw IngestionError("antenna: expected a 3-port antenna (one driven, two parasitic), got " +
                         std::to_string(net.port_count()) + " ports");
  }
}

void require_patterns(const PortNetwork& net) {
  if (!net.has_patterns()) throw IngestionError("antenna: this command needs port patterns");
}

struct StateAnalysis {
  DrivenSolution a;
  DrivenSolution b;
  BasisPair basis;
};

StateAnalysis analyze_states(const PortNetwork& net, double f, const LoadState& loads) {
  auto [a, b] = state_pair(net, f, loads, loads.swapped());
  BasisPair basis = basis_from_states(a.pattern, b.pattern);
  return {std::move(a), std::move(b), std::move(basis)};
}

double gain_dbi(cplx e) {
  const double u = std::norm(e);
  if (u == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(4.0 * kPi * u);
}

ChannelConfig channel(const RunConfig& cfg, double snr_db) {
  ChannelConfig cc;
  cc.snr_db = snr_db;
  cc.n_channels = cfg.n_channels;
  cc.n_noise = cfg.n_noise;
  cc.seed = cfg.seed;
  return cc;
}

}  // namespace

// ------------------------------------------------------------ commands ----

std::vector<fs::path> cmd_model(const RunConfig& cfg, const fs::path& out) {
  const PortNetwork net = load_antenna(cfg);
  Writer w(cfg, out, "model");
  const auto files = write_network_files(net, out, "antenna");
  w.adopt(files.touchstone_path);
  for (const auto& p : files.pattern_paths) w.adopt(p);
  json desc;
  if (cfg.analytic) {
    desc["analytic"] = *cfg.analytic;
    const auto warnings = cfg.analytic->validate();
    desc["warnings"] = warnings;
  }
  desc["ports"] = net.port_count();
  desc["provenance"] = net.provenance;
  desc["z_ref"] = net.z_ref;
  w.text("antenna_spec.json", desc.dump(2) + "\n");
  return w.written();
}

std::vector<fs::path> cmd_analyze(const RunConfig& cfg, const fs::path& out) {
  const PortNetwork net = load_antenna(cfg);
  require_three_ports(net);
  require_patterns(net);
  const auto freqs = analysis_frequencies(cfg, net);
  Writer w(cfg, out, "analyze");

  std::ostringstream table;
  table << "f_hz,rl_db,imbalance_db,p_g1,p_g2,p_b1,p_b2,cross_correlation,p_rad,p_load,p_mismatch,z_in_re,z_in_im\n";
  std::ostringstream cut;
  cut << "f_hz,theta_deg,phi_deg,g1_co_dbi,g1_cross_dbi,g2_co_dbi,g2_cross_dbi,b1_co_dbi,b1_cross_dbi,b2_co_dbi,"
         "b2_cross_dbi\n";

  for (double f : freqs) {
    const auto s = analyze_states(net, f, cfg.loads);
    table << num(f) << ',' << num(return_loss_db(s.a)) << ',' << opt_num(imbalance_db(s.basis)) << ','
          << num(power(s.a.pattern)) << ',' << num(power(s.b.pattern)) << ',' << num(s.basis.p_b1) << ','
          << num(s.basis.p_b2) << ',' << num(s.basis.normalized_cross_correlation()) << ',' << num(s.a.p_rad) << ','
          << num(s.a.p_load) << ',' << num(s.a.p_mismatch) << ',' << num(s.a.z_in.real()) << ','
          << num(s.a.z_in.imag()) << '\n';

    // Plane-of-platform cut: the theta row nearest 90 degrees.
    const auto& grid = *s.a.pattern.grid;
    const std::size_t row = grid.nearest_node(kPi / 2.0, 0.0) / grid.n_phi();
    const double theta = grid.theta_nodes()[row];
    for (std::size_t ip = 0; ip < grid.n_phi(); ++ip) {
      const std::size_t idx = grid.index(row, ip);
      cut << num(f) << ',' << num(theta / kDeg) << ',' << num(grid.phi_nodes()[ip] / kDeg);
      for (const VectorPattern* p : {&s.a.pattern, &s.b.pattern, &s.basis.b1, &s.basis.b2}) {
        cut << ',' << num(gain_dbi(p->e_theta[idx])) << ',' << num(gain_dbi(p->e_phi[idx]));
      }
      cut << '\n';
    }
  }
  w.text("analyze.csv", table.str());
  w.text("pattern_cut.csv", cut.str());
  return w.written();
}

std::vector<fs::path> cmd_capacity(const RunConfig& cfg, const fs::path& out) {
  const PortNetwork net = load_antenna(cfg);
  const auto freqs = analysis_frequencies(cfg, net);
  if (!cfg.ideal) {
    require_three_ports(net);
    require_patterns(net);
  }
  Writer w(cfg, out, "capacity");
  ErgodicOptions opts;
  opts.threads = cfg.threads;

  std::ostringstream table;
  table << "f_hz,snr_db,r_tx,capacity,std_error,p_b1,p_b2\n";
  for (double f : freqs) {
    TxCorrelation r = TxCorrelation::identity();
    if (!cfg.ideal) r = tx_correlation(analyze_states(net, f, cfg.loads).basis);
    for (double snr : cfg.snr_db) {
      const auto est = ergodic_capacity(r, channel(cfg, snr), opts);
      table << num(f) << ',' << num(snr) << ',' << (cfg.ideal ? "ideal" : "antenna") << ','
            << num(est.bits_per_symbol) << ',' << num(est.std_error) << ',' << num(r.r(0, 0).real()) << ','
            << num(r.r(1, 1).real()) << '\n';
    }
  }
  w.text("capacity.csv", table.str());
  return w.written();
}

std::vector<fs::path> cmd_optimize(const RunConfig& cfg, const fs::path& out) {
  const PortNetwork net = load_antenna(cfg);
  require_three_ports(net);
  require_patterns(net);
  const auto freqs = analysis_frequencies(cfg, net);
  for (std::size_t i = 1; i < freqs.size(); ++i) {
    if (!(freqs[i] > freqs[i - 1])) bad("frequencies", "must be strictly increasing for optimize");
  }
  for (std::size_t k : cfg.sweep.subbands) {
    if (k > freqs.size()) bad("sweep.subbands", "k = " + std::to_string(k) + " exceeds the number of frequencies");
  }

  Writer w(cfg, out, "optimize");
  const auto grid = ReactanceGrid::uniform(cfg.sweep.x_min, cfg.sweep.x_max, cfg.sweep.points).refined(cfg.sweep.refine);
  const ChannelConfig cc = channel(cfg, cfg.snr_db.front());
  SweepOptions so;
  so.series_resistance = cfg.sweep.series_resistance;
  so.threads = cfg.threads;
  const auto results = optimize_band(net, freqs, grid, cc, so);
  ErgodicOptions eo;
  eo.threads = cfg.threads;
  const auto ideal = ideal_reference(cc, eo);

  std::ostringstream opt;
  opt << "f_hz,x1_ohm,x2_ohm,capacity,std_error,rl_db,imbalance_db,ratio_to_ideal\n";
  json plateau = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    opt << num(r.frequency) << ',' << num(r.best.x1) << ',' << num(r.best.x2) << ',' << num(r.best.capacity) << ','
        << num(r.best.std_error) << ',' << num(r.best.return_loss_db) << ',' << opt_num(r.best.imbalance_db) << ','
        << num(r.best.capacity / ideal.bits_per_symbol) << '\n';
    const auto contour = export_contour(r);
    std::ostringstream c;
    c << "x1_ohm,x2_ohm,capacity\n";
    for (const auto& row : contour.rows) c << num(row[0]) << ',' << num(row[1]) << ',' << num(row[2]) << '\n';
    w.text("contour_" + std::to_string(i) + ".csv", c.str());
    plateau.push_back({{"f_hz", r.frequency}, {"plateau_fraction", contour.plateau_fraction}});
  }
  w.text("optimum.csv", opt.str());

  json plans = json::array();
  for (std::size_t k : cfg.sweep.subbands) {
    const auto plan = subband_quantize(results, k);
    json segs = json::array();
    for (const auto& s : plan.segments) {
      segs.push_back({{"f_low_hz", s.f_low},
                      {"f_high_hz", s.f_high},
                      {"first", s.first},
                      {"last", s.last},
                      {"x1_ohm", s.x1},
                      {"x2_ohm", s.x2},
                      {"worst_case_capacity", s.worst_case_capacity}});
    }
    plans.push_back({{"k", k}, {"worst_case_capacity", plan.worst_case_capacity()}, {"segments", segs}});
  }
  w.text("subbands.json", json{{"plans", plans}}.dump(2) + "\n");

  std::ostringstream fixed;
  fixed << "f_hz,load_index,capacity,std_error,rl_db,imbalance_db\n";
  for (double f : freqs) {
    for (std::size_t li = 0; li < cfg.sweep.fixed_loads.size(); ++li) {
      const auto e = evaluate_loads(net, f, cfg.sweep.fixed_loads[li], cc, so);
      fixed << num(f) << ',' << li << ',' << num(e.capacity) << ',' << num(e.std_error) << ',' << num(e.return_loss_db)
            << ',' << opt_num(e.imbalance_db) << '\n';
    }
  }
  w.text("fixed_loads.csv", fixed.str());

  // Longest contiguous run of frequencies whose optimum stays within 20% of the ideal reference.
  std::size_t best_first = 0, best_last = 0, run_first = 0;
  bool have = false, in_run = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const bool ok = results[i].best.capacity >= 0.8 * ideal.bits_per_symbol;
    if (ok && !in_run) run_first = i;
    in_run = ok;
    if (ok && (!have || results[i].frequency / results[run_first].frequency >
                            results[best_last].frequency / results[best_first].frequency)) {
      best_first = run_first;
      best_last = i;
      have = true;
    }
  }
  json summary = {{"snr_db", cc.snr_db},
                  {"ideal_capacity", ideal.bits_per_symbol},
                  {"ideal_std_error", ideal.std_error},
                  {"grid_points", grid.size()},
                  {"plateau", plateau}};
  if (have) {
    summary["within_20pct_span"] = {{"f_low_hz", results[best_first].frequency},
                                    {"f_high_hz", results[best_last].frequency},
                                    {"ratio", results[best_last].frequency / results[best_first].frequency}};
  } else {
    summary["within_20pct_span"] = nullptr;
  }
  w.text("optimize_summary.json", summary.dump(2) + "\n");
  return w.written();
}

std::vector<fs::path> cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
  const PortNetwork net = load_antenna(cfg);
  require_three_ports(net);
  require_patterns(net);
  const auto freqs = analysis_frequencies(cfg, net);
  const double f = freqs.front();
  const auto& wf = cfg.waveform;
  Writer w(cfg, out, "spectrum");

  const auto s = analyze_states(net, f, cfg.loads);
  const StateValues values = state_values(s.a.pattern, s.b.pattern, wf.theta_deg * kDeg, wf.phi_deg * kDeg);
  const auto s1 = random_bpsk(wf.symbols, derive_seed(cfg.seed, {1}));
  const auto s2 = random_bpsk(wf.symbols, derive_seed(cfg.seed, {2}));
  const double symbol_period = 1.0 / wf.symbol_rate;

  struct Case {
    std::string label;
    bool switched;
    double ramp_fraction;
  };
  std::vector<Case> cases{{"single_state", false, 0.0}};
  for (double r : wf.ramp_fractions) {
    char label[48];
    std::snprintf(label, sizeof label, "switched_ramp_%03d", static_cast<int>(std::lround(r * 100.0)));
    cases.push_back({label, true, r});
  }

  std::ostringstream summary;
  summary << "case,ramp_fraction,oob_db,switch_events,peak_db,state_preserving_fraction\n";
  const auto states = state_sequence(s1, s2);
  for (const auto& c : cases) {
    const TransitionProfile profile =
        c.ramp_fraction > 0.0 ? TransitionProfile::ramp(c.ramp_fraction * symbol_period) : TransitionProfile::rectangular();
    // The single-state reference sends s2 = s1, which holds state II throughout.
    const auto env = multiplex_timeseries(s1, c.switched ? std::span<const int>(s2) : std::span<const int>(s1), values,
                                          wf.shape, profile, wf.symbol_rate);
    const auto spec = psd_estimate(env.samples, env.fs, wf.segment, wf.overlap);
    std::ostringstream psd;
    psd << "freq_hz,psd_db\n";
    for (std::size_t i = 0; i < spec.freqs.size(); ++i) psd << num(spec.freqs[i]) << ',' << num(spec.psd_db[i]) << '\n';
    w.text("psd_" + c.label + ".csv", psd.str());
    summary << c.label << ',' << num(c.switched ? c.ramp_fraction : 0.0) << ',' << num(oob_power_ratio(spec, wf.band_edge))
            << ',' << env.switch_events << ',' << num(spec.peak_db) << ','
            << num(c.switched ? state_preserving_fraction(states) : 1.0) << '\n';
    if (wf.dump_envelope) {
      const auto p = w.path("envelope_" + c.label + ".iq");
      write_envelope(p, env);
      w.adopt(p);
    }
  }
  w.text("spectrum_summary.csv", summary.str());
  return w.written();
}

// --------------------------------------------------------- entry point ----

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beam-space MIMO parasitic-array simulator", "beamspace"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  struct Command {
    const char* name;
    const char* help;
    std::vector<fs::path> (*fn)(const RunConfig&, const fs::path&);
  };
  const Command commands[] = {
      {"model", "Build or ingest the antenna and write Touchstone plus port patterns", cmd_model},
      {"analyze", "Return loss, basis powers and pattern cuts for fixed load states", cmd_analyze},
      {"capacity", "Ergodic BPSK capacity per frequency and SNR", cmd_capacity},
      {"optimize", "Reactance sweeps, optimal loads and sub-band quantization", cmd_optimize},
      {"spectrum", "Switched-pattern waveform simulation and PSD", cmd_spectrum},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON run configuration (or a sidecar of an earlier run)")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed (overrides the config)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::config);
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config: cannot open " + config_path);
    json input;
    try {
      input = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config: " + config_path + ": " + e.what());
    }
    RunConfig cfg = parse_config(input, seed, fs::absolute(config_path).parent_path());
    if (threads) cfg.threads = *threads;
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) {
        const auto files = c.fn(cfg, out_dir);
        for (const auto& p : files) out << p.string() << '\n';
      }
    }
    return 0;
  } catch (const Error& e) {
    err << category_name(e.category()) << " error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const json::exception& e) {
    err << category_name(ErrorCategory::config) << " error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::config);
  } catch (const std::invalid_argument& e) {
    err << category_name(ErrorCategory::config) << " error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::config);
  } catch (const std::exception& e) {
    err << category_name(ErrorCategory::internal) << " error: " << e.what() << '\n';
    return static_cast<int>(ErrorCategory::internal);
  }
}

}  // namespace beamspace::cli
