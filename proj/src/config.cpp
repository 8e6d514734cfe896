#include "magtrap/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace magtrap {

namespace {

constexpr double um = 1e-6;
constexpr double mhz = two_pi * 1e6;
constexpr double khz = two_pi * 1e3;

Preset multi(int d, double w1, double w2, double g, double delta, double eps, double J,
             double J13) {
  Preset p;
  p.name = "table1-d" + std::to_string(d);
  p.mode = TrapMode::MultiTrap;
  p.d = d * um;
  p.h = (d + delta) * um;
  p.outer = w1 * mhz;
  p.middle = w2 * mhz;
  p.gradient = g;
  p.displacement = delta * um;
  p.epsilon_max = eps;
  p.J = J * khz;
  p.J13 = J13 * khz;
  return p;
}

Preset linear(int h, double w, double g, double eps, double J, double J13) {
  Preset p;
  p.name = "table3-h" + std::to_string(h);
  p.mode = TrapMode::Linear;
  p.h = h * um;
  p.outer = p.middle = w * mhz;
  p.gradient = g;
  p.epsilon_max = eps;
  p.J = J * khz;
  p.J13 = J13 * khz;
  return p;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end || !std::isfinite(x))
    throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not a number", line);
  return x;
}

std::uint64_t to_u64(const std::string& v, int line) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("line " + std::to_string(line) + ": '" + v + "' is not an unsigned integer",
                      line);
  return x;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> rows = {
      multi(1, 3.20, 0.097, 1200, 0.779, 0.0376, 1.60, 0.746),
      multi(2, 2.72, 1.27, 1000, 0.531, 0.0422, 1.07, 0.337),
      multi(3, 1.85, 1.10, 600, 0.578, 0.0427, 0.645, 0.179),
      multi(4, 1.37, 1.24, 500, 0.628, 0.0340, 0.459, 0.135),
      multi(5, 1.21, 1.05, 400, 0.558, 0.0382, 0.334, 0.0820),
      multi(6, 0.971, 0.891, 300, 0.612, 0.0356, 0.254, 0.0623),
      multi(7, 0.732, 0.700, 200, 0.777, 0.0319, 0.197, 0.0515),
      linear(2, 1.77, 750, 0.0276, 1.12, 0.794),
      linear(3, 0.966, 300, 0.0271, 0.605, 0.429),
      linear(4, 0.628, 150, 0.0263, 0.359, 0.254),
      linear(5, 0.449, 100, 0.0289, 0.311, 0.220),
      linear(6, 0.342, 50, 0.0218, 0.134, 0.0952),
  };
  return rows;
}

const Preset& find_preset(const std::string& name) {
  const auto& all = presets();
  const auto it = std::find_if(all.begin(), all.end(), [&](const Preset& p) { return p.name == name; });
  if (it != all.end()) return *it;
  std::string known;
  for (const auto& p : all) known += (known.empty() ? "" : ", ") + p.name;
  throw std::invalid_argument("unknown preset '" + name + "' (known: " + known + ")");
}

PhysicalSetup PhysicalSetup::from_preset(const Preset& p) {
  PhysicalSetup s;
  s.preset = p.name;
  s.mode = p.mode;
  s.d = p.d;
  s.outer = p.outer;
  s.middle = p.middle;
  s.field.gradient = p.gradient;
  s.tabulated_J = p.J;
  s.tabulated_J13 = p.J13;
  return s;
}

TrapLayout PhysicalSetup::layout() const {
  return mode == TrapMode::MultiTrap ? TrapLayout::multi_trap(d, outer, middle, constants)
                                     : TrapLayout::linear(outer, constants);
}

void PhysicalSetup::validate() const {
  constants.validate();
  field.validate();
  layout().validate();
  if (!(timing.pulse_time > 0) || timing.rabi_frequency < 0)
    throw std::invalid_argument("pulse time must be positive and Rabi frequency non-negative");
}

const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  return "?";
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "text") return OutputFormat::Text;
  throw std::invalid_argument("unknown output format '" + s + "' (json|csv|text)");
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected key = value", line);
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty() || e.value.empty())
      throw ConfigError("line " + std::to_string(line) + ": empty key or value", line);
    entries.push_back(std::move(e));
  }

  RunConfig cfg = std::move(base);
  PhysicalSetup& s = cfg.setup;
  for (const auto& e : entries) {
    if (e.key != "preset") continue;
    try {
      s = PhysicalSetup::from_preset(find_preset(e.value));
    } catch (const std::invalid_argument& x) {
      throw ConfigError("line " + std::to_string(e.line) + ": " + x.what(), e.line);
    }
  }

  using Setter = std::function<void(const std::string&, int)>;
  auto physical = [&](auto fn) -> Setter {
    return [&s, fn](const std::string& v, int line) {
      fn(to_double(v, line));
      s.tabulated_J.reset();
      s.tabulated_J13.reset();
    };
  };
  const std::map<std::string, Setter> setters = {
      {"preset", [](const std::string&, int) {}},
      {"mode",
       [&](const std::string& v, int line) {
         if (v == "multi-trap")
           s.mode = TrapMode::MultiTrap;
         else if (v == "linear")
           s.mode = TrapMode::Linear;
         else
           throw ConfigError("line " + std::to_string(line) + ": mode must be multi-trap or linear",
                             line);
         s.tabulated_J.reset();
         s.tabulated_J13.reset();
       }},
      {"d_um", physical([&](double x) { s.d = x * um; })},
      {"W1_MHz", physical([&](double x) { s.outer = x * mhz; })},
      {"W2_MHz", physical([&](double x) { s.middle = x * mhz; })},
      {"W_MHz", physical([&](double x) { s.outer = s.middle = x * mhz; })},
      {"gradient_T_per_m", physical([&](double x) { s.field.gradient = x; })},
      {"offset_T", physical([&](double x) { s.field.offset = x; })},
      {"lamb_dicke", physical([&](double x) { s.field.lamb_dicke = x; })},
      {"ion_mass_u", physical([&](double x) { s.constants.ion_mass_u = x; })},
      {"g_factor", physical([&](double x) { s.constants.g_factor = x; })},
      {"hyperfine_GHz", physical([&](double x) { s.constants.hyperfine_splitting = two_pi * 1e9 * x; })},
      {"pulse_time_us", [&](const std::string& v, int line) { s.timing.pulse_time = to_double(v, line) * 1e-6; }},
      {"rabi_MHz", [&](const std::string& v, int line) { s.timing.rabi_frequency = to_double(v, line) * mhz; }},
      {"seed", [&](const std::string& v, int line) { cfg.seed = to_u64(v, line); }},
      {"output", [&](const std::string& v, int) { cfg.output_path = v; }},
      {"format",
       [&](const std::string& v, int line) {
         try {
           cfg.format = parse_output_format(v);
         } catch (const std::invalid_argument& x) {
           throw ConfigError("line " + std::to_string(line) + ": " + x.what(), line);
         }
       }},
  };

  for (const auto& e : entries) {
    const auto it = setters.find(e.key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'", e.line);
    it->second(e.value, e.line);
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  RunConfig cfg = parse_config(in, std::move(base));
  cfg.config_path = path;
  return cfg;
}

}  // namespace magtrap
