#ifndef MAGTRAP_CONFIG_HPP
#define MAGTRAP_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "magtrap/pulse_engine.hpp"
#include "magtrap/spin_couplings.hpp"
#include "magtrap/trap_model.hpp"

namespace magtrap {

//! Malformed config input; the message names the offending line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/**
 * One published parameter row. Frequencies are in rad/s, lengths in m.
 *
 * Micro-trap rows set d, outer and middle; linear rows set h and outer (= W).
 * The tabulated outputs ride along so reports and the CNOT timing can use
 * the published couplings verbatim.
 */
struct Preset {
  std::string name;
  TrapMode mode = TrapMode::MultiTrap;
  double d = 0.0;
  double h = 0.0;
  double outer = 0.0;
  double middle = 0.0;
  double gradient = 0.0;
  double epsilon_max = 0.0;
  double displacement = 0.0;  // multi-trap only
  double J = 0.0;
  double J13 = 0.0;
};

const std::vector<Preset>& presets();
//! Throws std::invalid_argument listing the known names.
const Preset& find_preset(const std::string& name);

//! Physical inputs shared by every command.
struct PhysicalSetup {
  std::string preset;  // empty when built from defaults or overrides
  TrapMode mode = TrapMode::MultiTrap;
  double d = 4e-6;
  double outer = two_pi * 1.37e6;   // W_1 = W_3, or W in linear mode
  double middle = two_pi * 1.24e6;  // W_2
  FieldConfig field{1.0, 500.0, 1e-6, true};
  PhysicalConstants constants{};
  PulseTiming timing{};
  // Published couplings of the preset, dropped as soon as any physical input
  // is overridden.
  std::optional<double> tabulated_J;
  std::optional<double> tabulated_J13;

  static PhysicalSetup from_preset(const Preset& p);
  TrapLayout layout() const;
  void validate() const;
};

enum class OutputFormat { Json, Csv, Text };

const char* to_string(OutputFormat f);
OutputFormat parse_output_format(const std::string& s);

struct RunConfig {
  std::string command;
  std::string config_path;
  OutputFormat format = OutputFormat::Text;
  std::uint64_t seed = 0;
  std::string output_path;  // empty: stdout
  PhysicalSetup setup;
};

/**
 * key = value lines, '#' starts a comment. Frequencies are given in units of
 * 2 pi MHz, lengths in um. A `preset` line is applied before every other key
 * regardless of where it appears.
 *
 * Keys: preset, mode, d_um, W1_MHz, W2_MHz, W_MHz, gradient_T_per_m, offset_T,
 * lamb_dicke, ion_mass_u, g_factor, hyperfine_GHz, pulse_time_us, rabi_MHz,
 * format, seed, output.
 */
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

}  // namespace magtrap

#endif
