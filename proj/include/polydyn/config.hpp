#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polydyn/discrep.hpp"
#include "polydyn/genseq.hpp"
#include "polydyn/spectra.hpp"
#include "polydyn/trisys.hpp"

namespace polydyn {

// Key-value entries by section, with the line each came from (0 for values
// set programmatically, e.g. command-line overrides).
class RawConfig {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  void set(const std::string& section, const std::string& key, std::string value,
           std::size_t line = 0);
  const Entry* find(const std::string& section, const std::string& key) const;
  const std::map<std::string, Entry>& section(const std::string& name) const;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

// INI-like text with [system], [run], [budgets]; keys before any header
// belong to [system]. '#' and ';' start comment lines. Unknown sections or
// keys and repeated keys throw ParseError with the line number.
RawConfig parse_config_text(std::string_view text);

struct Budgets {
  std::size_t term_cap = kDefaultTermCap;
  std::uint64_t step_cap = kDefaultStepCap;
  std::uint64_t enum_cap = kDefaultEnumCap;
  std::uint64_t work_cap = kDefaultWorkCap;
};

struct RunOptions {
  StateVector seed;  // zero state unless given
  std::uint64_t n_points = 100'000;
  std::vector<std::uint64_t> nus{1};
  std::uint64_t L = 0;  // min(p - 1, 64) unless given
  std::uint64_t k = 5;
  std::uint64_t abox = 2;
  bool advance = true;  // move to the periodic part before sums
  std::string out;
  std::string format = "csv";
};

struct ExperimentConfig {
  TriangularSystem system;
  RunOptions run;
  Budgets budgets;
};

// Builds the system and applies defaults. Field and system errors are
// rethrown with the offending line as location; missing p, m or g_i and a
// seed of the wrong length throw MissingField.
ExperimentConfig resolve_config(const RawConfig& raw);
ExperimentConfig parse_config(std::string_view text);

}  // namespace polydyn
