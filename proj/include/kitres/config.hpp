#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kitres/circuit.hpp"
#include "kitres/dynamics.hpp"
#include "kitres/spin.hpp"

namespace kitres {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value store; keys are "section.key". Sections map onto modules
// (spin, circuit, modes, ensemble, endor, run).
struct Config {
  std::map<std::string, std::string> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;

  // "section.key=value"; the key must already exist.
  void apply_override(const std::string& assignment);

  SpinSystem spin_system() const;
  CircuitNetlist netlist() const;
  ModePair mode_pair() const;
  EnsembleModel ensemble() const;
  EndorConfig endor() const;
};

// All defaults: measured device values plus element values engineered to
// reproduce them.
Config default_config();
// INI-style sections with key = value lines; '#' comments.
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text);

// Fixed 12-significant-digit formatting so outputs are byte-reproducible.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Temp-then-rename write.
void write_csv_atomic(const std::string& path, const CsvTable& table);
void write_trace_csv(const std::string& path, const Trace& trace);  // axis, real, imag, abs
void write_text_atomic(const std::string& path, const std::string& text);
void write_metadata(const std::string& path, const std::map<std::string, std::string>& meta);

CsvTable read_csv(const std::string& path);

}  // namespace kitres
