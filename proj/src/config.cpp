#include "kitres/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kitres {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string Config::get_string(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: " + v);
  }
}

int Config::get_int(const std::string& key) const {
  const double x = get_double(key);
  const int i = static_cast<int>(std::lround(x));
  if (std::abs(x - i) > 1e-9) throw ConfigError("config key " + key + " is not an integer");
  return i;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be section.key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!has(key)) throw ConfigError("override references unknown parameter: " + key);
  entries[key] = value;
}

SpinSystem Config::spin_system() const {
  SpinSystem s;
  s.s = get_double("spin.s");
  s.i = get_double("spin.i");
  s.gamma_e = get_double("spin.gamma_e");
  s.gamma_n = get_double("spin.gamma_n");
  s.hyperfine = get_double("spin.hyperfine");
  return s;
}

CircuitNetlist Config::netlist() const {
  CircuitNetlist n;
  n.inductor_a = {get_double("circuit.lk0_a"), get_double("circuit.lg_a"), get_double("circuit.istar_a"),
                  get_double("circuit.alpha_a")};
  n.inductor_c = {get_double("circuit.lk0_c"), get_double("circuit.lg_c"), get_double("circuit.istar_c"),
                  get_double("circuit.alpha_c")};
  n.lb = get_double("circuit.lb");
  n.ca = get_double("circuit.ca");
  n.cb = get_double("circuit.cb");
  n.bias_a = get_double("circuit.bias_a");
  n.bias_b = get_double("circuit.bias_b");
  return n;
}

ModePair Config::mode_pair() const {
  ModePair m;
  m.fa = get_double("modes.fa");
  m.fb = get_double("modes.fb");
  m.kappa_ca = get_double("modes.kappa_ca");
  m.kappa_ia = get_double("modes.kappa_ia");
  m.kappa_cb = get_double("modes.kappa_cb");
  m.kappa_ib = get_double("modes.kappa_ib");
  return m;
}

EnsembleModel Config::ensemble() const {
  EnsembleModel e;
  e.n_spins = get_int("ensemble.n_spins");
  e.detuning_sigma = get_double("ensemble.detuning_sigma");
  e.t1 = get_double("ensemble.t1");
  e.t2 = get_double("ensemble.t2");
  return e;
}

EndorConfig Config::endor() const {
  EndorConfig c;
  c.bz = get_double("endor.bz");
  c.rf_area = get_double("endor.rf_area");
  c.delta_b0 = get_double("endor.delta_b0");
  c.probes = {{{4, 0}, {5, 1}, get_double("endor.weight_primary")},
              {{4, 1}, {5, 0}, get_double("endor.weight_secondary")}};
  return c;
}

Config default_config() {
  Config c;
  auto& e = c.entries;
  e["spin.s"] = "0.5";
  e["spin.i"] = "4.5";
  e["spin.gamma_e"] = "-28e9";
  e["spin.gamma_n"] = "8e6";
  e["spin.hyperfine"] = "1.47507e9";
  e["spin.delta_b0"] = "4e-6";

  e["circuit.lk0_a"] = "2.2137e-10";
  e["circuit.lg_a"] = "1.77365e-9";
  e["circuit.istar_a"] = "9.53e-3";
  e["circuit.alpha_a"] = "0.3";
  e["circuit.lk0_c"] = "5e-12";
  e["circuit.lg_c"] = "0";
  e["circuit.istar_c"] = "5.73e-3";
  e["circuit.alpha_c"] = "0.3";
  e["circuit.lb"] = "1.5e-9";
  e["circuit.ca"] = "2.29916e-13";
  e["circuit.cb"] = "3.85800e-13";
  e["circuit.bias_a"] = "0";
  e["circuit.bias_b"] = "0";
  e["circuit.z0"] = "50";
  e["circuit.attenuation"] = "1";

  e["modes.fa"] = "7.422e9";
  e["modes.fb"] = "6.605e9";
  e["modes.kappa_ca"] = "9.4e4";
  e["modes.kappa_ia"] = "7.5e5";
  e["modes.kappa_cb"] = "2.6e7";
  e["modes.kappa_ib"] = "5.7e6";

  e["ensemble.n_spins"] = "201";
  e["ensemble.detuning_sigma"] = "5e4";
  e["ensemble.t1"] = "53";
  e["ensemble.t2"] = "0.45";

  e["endor.bz"] = "13.49e-3";
  e["endor.rf_area"] = "2.0";
  e["endor.delta_b0"] = "4e-6";
  e["endor.weight_primary"] = "0.8";
  e["endor.weight_secondary"] = "0.2";

  e["run.seed"] = "1";
  return c;
}

Config parse_config_text(const std::string& text) {
  Config c = default_config();
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    c.entries[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_csv_atomic(const std::string& path, const CsvTable& table) {
  std::ostringstream out;
  for (size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  CsvTable t;
  t.header = {"axis", "real", "imag", "abs"};
  t.rows.reserve(trace.axis.size());
  for (size_t k = 0; k < trace.axis.size(); ++k)
    t.rows.push_back({trace.axis[k], trace.values[k].real(), trace.values[k].imag(), std::abs(trace.values[k])});
  write_csv_atomic(path, t);
}

void write_metadata(const std::string& path, const std::map<std::string, std::string>& meta) {
  std::ostringstream out;
  for (const auto& [k, v] : meta) out << k << " = " << v << "\n";
  write_text_atomic(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (first) {
      first = false;
      bool numeric = true;
      try {
        (void)std::stod(cells.at(0));
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) {
        t.header = cells;
        continue;
      }
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace kitres
