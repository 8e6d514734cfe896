#include "magtrap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "magtrap/config.hpp"
#include "magtrap/integrator.hpp"
#include "magtrap/param_search.hpp"
#include "magtrap/schedule_io.hpp"
#include "magtrap/teleportation.hpp"
#include "magtrap/verify.hpp"

namespace magtrap {

namespace {

using nlohmann::ordered_json;

// Thrown for bad flag values found after CLI11 has accepted the syntax.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string g(double x, int sig = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, x);
  return buf;
}

double to_khz(double w) { return w / (two_pi * 1e3); }
double to_mhz(double w) { return w / (two_pi * 1e6); }
double to_um(double x) { return x * 1e6; }

ordered_json vec_json(const Vec3& v) { return {v[0], v[1], v[2]}; }

ordered_json mat_json(const Mat3& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

struct Report {
  ordered_json json = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> lines;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void line(std::string key, std::string value) { lines.emplace_back(std::move(key), std::move(value)); }
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void render(const Report& r, OutputFormat f, std::ostream& os) {
  switch (f) {
    case OutputFormat::Json:
      os << r.json.dump(2) << '\n';
      return;
    case OutputFormat::Csv:
      if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << csv_field(r.columns[i]);
        os << '\n';
        for (const auto& row : r.rows) {
          for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
          os << '\n';
        }
      } else {
        os << "key,value\n";
        for (const auto& [k, v] : r.lines) os << csv_field(k) << ',' << csv_field(v) << '\n';
      }
      return;
    case OutputFormat::Text: {
      std::size_t w = 0;
      for (const auto& kv : r.lines) w = std::max(w, kv.first.size());
      for (const auto& [k, v] : r.lines) os << k << std::string(w - k.size(), ' ') << "  " << v << '\n';
      if (r.columns.empty()) return;
      if (!r.lines.empty()) os << '\n';
      std::vector<std::size_t> width(r.columns.size());
      for (std::size_t i = 0; i < width.size(); ++i) {
        width[i] = r.columns[i].size();
        for (const auto& row : r.rows) width[i] = std::max(width[i], row[i].size());
      }
      auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i)
          os << (i ? "  " : "") << row[i] << std::string(width[i] - row[i].size(), ' ');
        os << '\n';
      };
      emit(r.columns);
      for (const auto& row : r.rows) emit(row);
      return;
    }
  }
}

struct Computed {
  EquilibriumSolution eq;
  NormalModes modes;
  CouplingSet couplings;
};

Computed compute(const PhysicalSetup& s) {
  s.validate();
  const TrapLayout layout = s.layout();
  Computed c;
  c.eq = solve_equilibrium(layout);
  c.modes = normal_modes(layout, c.eq);
  c.couplings = compute_couplings(c.modes, s.field, c.eq, s.constants);
  return c;
}

ordered_json setup_json(const PhysicalSetup& s) {
  ordered_json j;
  j["preset"] = s.preset.empty() ? ordered_json(nullptr) : ordered_json(s.preset);
  j["mode"] = s.mode == TrapMode::MultiTrap ? "multi-trap" : "linear";
  if (s.mode == TrapMode::MultiTrap) {
    j["d_m"] = s.d;
    j["W1_rad_per_s"] = s.outer;
    j["W2_rad_per_s"] = s.middle;
  } else {
    j["W_rad_per_s"] = s.outer;
  }
  j["gradient_T_per_m"] = s.field.gradient;
  j["offset_T"] = s.field.offset;
  return j;
}

void setup_lines(Report& r, const PhysicalSetup& s) {
  r.line("preset", s.preset.empty() ? "(none)" : s.preset);
  if (s.mode == TrapMode::MultiTrap) {
    r.line("trap", "multi-trap, d = " + g(to_um(s.d)) + " um");
    r.line("W1 = W3", g(to_mhz(s.outer)) + " x2pi MHz");
    r.line("W2", g(to_mhz(s.middle)) + " x2pi MHz");
  } else {
    r.line("trap", "linear");
    r.line("W", g(to_mhz(s.outer)) + " x2pi MHz");
  }
  r.line("dB/dz", g(s.field.gradient) + " T/m");
}

// Couplings handed to the pulse engine: computed, or the published J, J13
// on top of the computed qubit frequencies.
CouplingSet gate_couplings(const PhysicalSetup& s, const Computed& c, const std::string& source,
                           std::string& used) {
  const bool have_tab = s.tabulated_J && s.tabulated_J13;
  used = source.empty() ? (have_tab ? "tabulated" : "computed") : source;
  if (used == "computed") return c.couplings;
  if (used != "tabulated") throw UsageError("--couplings must be computed or tabulated");
  if (!have_tab) throw UsageError("tabulated couplings need a table preset");
  CouplingSet cs = c.couplings;
  cs.J = *s.tabulated_J;
  cs.J13 = *s.tabulated_J13;
  return cs;
}

// ---------------------------------------------------------------- commands

Report cmd_modes(const RunConfig& cfg) {
  const PhysicalSetup& s = cfg.setup;
  const Computed c = compute(s);
  Report r;
  r.json["setup"] = setup_json(s);
  r.json["positions_m"] = vec_json(c.eq.positions);
  r.json["displacement_m"] = c.eq.outer_displacement;
  r.json["spacing_m"] = c.eq.spacing;
  r.json["residual_N"] = c.eq.residual;
  r.json["iterations"] = c.eq.iterations;
  r.json["frequencies_rad_per_s"] = vec_json(c.modes.frequencies);
  r.json["mode_vectors"] = mat_json(c.modes.vectors);

  setup_lines(r, s);
  r.line("positions", g(to_um(c.eq.positions[0])) + ", " + g(to_um(c.eq.positions[1])) + ", " +
                          g(to_um(c.eq.positions[2])) + " um");
  if (s.mode == TrapMode::MultiTrap) r.line("Delta", g(to_um(c.eq.outer_displacement)) + " um");
  r.line("h", g(to_um(c.eq.spacing)) + " um");

  r.columns = {"mode", "nu(MHz)", "D_1", "D_2", "D_3"};
  for (int l = 0; l < 3; ++l)
    r.rows.push_back({std::to_string(l + 1), g(to_mhz(c.modes.frequencies[l])),
                      g(c.modes.vectors(0, l)), g(c.modes.vectors(1, l)), g(c.modes.vectors(2, l))});
  return r;
}

Report cmd_couplings(const RunConfig& cfg) {
  const PhysicalSetup& s = cfg.setup;
  const Computed c = compute(s);
  const CouplingSet& k = c.couplings;
  const double shift = neighbor_resonance_shift(s.field, c.eq.spacing, s.constants);

  Report r;
  r.json["setup"] = setup_json(s);
  r.json["displacement_m"] = c.eq.outer_displacement;
  r.json["spacing_m"] = c.eq.spacing;
  r.json["qubit_frequencies_rad_per_s"] = vec_json(k.qubit_frequencies);
  r.json["frequency_slope_rad_per_s_m"] = k.frequency_slope;
  r.json["neighbor_shift_rad_per_s"] = shift;
  r.json["J_rad_per_s"] = k.J;
  r.json["J13_rad_per_s"] = k.J13;
  r.json["ising_rad_per_s"] = mat_json(k.ising);
  r.json["epsilon"] = mat_json(k.epsilon);
  r.json["epsilon_max"] = k.epsilon_max;
  r.json["effective_lamb_dicke"] = mat_json(k.effective_lamb_dicke);
  if (s.tabulated_J) {
    const Preset& p = find_preset(s.preset);
    r.json["published"] = {{"J_rad_per_s", p.J},
                           {"J13_rad_per_s", p.J13},
                           {"epsilon_max", p.epsilon_max}};
  }

  setup_lines(r, s);
  if (s.mode == TrapMode::MultiTrap) r.line("Delta", g(to_um(c.eq.outer_displacement)) + " um");
  r.line("h", g(to_um(c.eq.spacing)) + " um");
  r.line("J", g(to_khz(k.J)) + " x2pi kHz");
  r.line("J13", g(to_khz(k.J13)) + " x2pi kHz");
  r.line("eps_max", g(k.epsilon_max));
  r.line("neighbor shift", g(to_mhz(shift)) + " x2pi MHz");
  for (int i = 0; i < 3; ++i)
    r.line("w_" + std::to_string(i + 1), g(k.qubit_frequencies[i] / (two_pi * 1e9), 10) + " x2pi GHz");

  if (s.mode == TrapMode::MultiTrap) {
    r.columns = {"d(um)", "W1(MHz)", "W2(MHz)", "dB/dz(T/m)", "Delta(um)", "eps_max", "h(um)", "J(kHz)", "J13(kHz)"};
    r.rows.push_back({g(to_um(s.d)), g(to_mhz(s.outer)), g(to_mhz(s.middle)), g(s.field.gradient),
                      g(to_um(c.eq.outer_displacement)), g(k.epsilon_max), g(to_um(c.eq.spacing)),
                      g(to_khz(k.J)), g(to_khz(k.J13))});
  } else {
    r.columns = {"h(um)", "W(MHz)", "dB/dz(T/m)", "eps_max", "J(kHz)", "J13(kHz)"};
    r.rows.push_back({g(to_um(c.eq.spacing)), g(to_mhz(s.outer)), g(s.field.gradient), g(k.epsilon_max),
                      g(to_khz(k.J)), g(to_khz(k.J13))});
  }
  return r;
}

Report cmd_spectrum(const RunConfig& cfg) {
  const PhysicalSetup& s = cfg.setup;
  const Computed c = compute(s);
  const auto spec = spin_spectrum(c.couplings);
  const auto car = carrier_spectrum(c.couplings);

  Report r;
  r.json["setup"] = setup_json(s);
  ordered_json levels = ordered_json::array();
  for (int b : SpinSpectrum::listing_order) {
    const std::string label = "|" + std::to_string((b >> 2) & 1) + std::to_string((b >> 1) & 1) +
                              std::to_string(b & 1) + ">";
    levels.push_back({{"state", label}, {"energy_rad_per_s", spec.energies[b]}});
  }
  r.json["energies"] = levels;
  ordered_json carriers = ordered_json::array();
  setup_lines(r, s);
  r.columns = {"ion", "others", "frequency(GHz)", "offset(kHz)"};
  for (int ion = 1; ion <= 3; ++ion) {
    const auto& row = car.transitions[ion - 1];
    double mean = 0.0;
    for (const auto& t : row) mean += t.frequency / 4;
    for (const auto& t : row) {
      carriers.push_back({{"ion", ion}, {"others", t.label}, {"frequency_rad_per_s", t.frequency}});
      r.rows.push_back({std::to_string(ion), t.label, g(t.frequency / (two_pi * 1e9), 12),
                        g(to_khz(t.frequency - mean))});
    }
    r.line("spread ion " + std::to_string(ion), g(to_khz(car.spread[ion - 1])) + " x2pi kHz");
  }
  r.json["carriers"] = carriers;
  r.json["spread_rad_per_s"] = vec_json(car.spread);
  return r;
}

struct SearchOptions {
  std::optional<double> target_um;
  double epsilon_ceiling = 0.05;
  double gradient_step = 50.0;
  double gradient_max = 1500.0;
  bool serial = false;
};

SearchSpace make_space(const SearchOptions& o, bool multi, const PhysicalSetup& s) {
  SearchSpace sp = multi ? SearchSpace::multi_trap_default() : SearchSpace::linear_default();
  sp.epsilon_ceiling = o.epsilon_ceiling;
  sp.gradient_step = o.gradient_step;
  sp.gradient_max = o.gradient_max;
  sp.policy = o.serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
  sp.field.offset = s.field.offset;
  sp.field.lamb_dicke = s.field.lamb_dicke;
  sp.constants = s.constants;
  return sp;
}

const Preset* published_row(const std::string& prefix, double target_um) {
  const double n = std::round(target_um);
  if (std::abs(n - target_um) > 1e-9) return nullptr;
  try {
    return &find_preset(prefix + std::to_string(static_cast<int>(n)));
  } catch (const std::invalid_argument&) {
    return nullptr;
  }
}

Report cmd_table1(const RunConfig& cfg, const SearchOptions& o) {
  std::vector<double> targets;
  if (o.target_um)
    targets.push_back(*o.target_um);
  else
    for (int d = 1; d <= 7; ++d) targets.push_back(d);

  const SearchSpace sp = make_space(o, true, cfg.setup);
  Report r;
  r.columns = {"d(um)", "W1(MHz)", "W2(MHz)", "dB/dz(T/m)", "Delta(um)", "eps_max", "h(um)", "J(kHz)", "J13(kHz)"};
  ordered_json rows = ordered_json::array();
  for (double d : targets) {
    const SearchResult res = maximize_J_multitrap(d * 1e-6, sp);
    const SearchPoint& b = res.best;
    ordered_json j;
    j["d_m"] = d * 1e-6;
    j["feasible"] = res.feasible;
    j["evaluations"] = res.evaluations;
    if (res.feasible) {
      j["W1_rad_per_s"] = b.outer;
      j["W2_rad_per_s"] = b.middle;
      j["gradient_T_per_m"] = b.gradient;
      j["displacement_m"] = b.displacement;
      j["epsilon_max"] = b.epsilon_max;
      j["spacing_m"] = b.spacing;
      j["J_rad_per_s"] = b.J;
      j["J13_rad_per_s"] = b.J13;
      r.rows.push_back({g(d), g(to_mhz(b.outer), 4), g(to_mhz(b.middle), 4), g(b.gradient, 5),
                        g(to_um(b.displacement), 4), g(b.epsilon_max, 4), g(to_um(b.spacing), 5),
                        g(to_khz(b.J), 4), g(to_khz(b.J13), 4)});
    } else {
      r.rows.push_back({g(d), "-", "-", "-", "-", "-", "-", "-", "-"});
    }
    if (const Preset* p = published_row("table1-d", d))
      j["published"] = {{"J_rad_per_s", p->J}, {"J13_rad_per_s", p->J13}, {"gradient_T_per_m", p->gradient}};
    rows.push_back(j);
    r.line("d = " + g(d) + " um", res.feasible ? std::to_string(res.evaluations) + " evaluations"
                                                : "no feasible point");
  }
  r.json["epsilon_ceiling"] = o.epsilon_ceiling;
  r.json["rows"] = rows;
  return r;
}

Report cmd_table3(const RunConfig& cfg, const SearchOptions& o) {
  std::vector<double> targets;
  if (o.target_um)
    targets.push_back(*o.target_um);
  else
    for (int h = 2; h <= 6; ++h) targets.push_back(h);

  const SearchSpace sp = make_space(o, false, cfg.setup);
  Report r;
  r.columns = {"h(um)", "W(MHz)", "dB/dz(T/m)", "eps_max", "J(kHz)", "J13(kHz)"};
  ordered_json rows = ordered_json::array();
  for (double h : targets) {
    const SearchResult res = maximize_J_linear(h * 1e-6, sp);
    const SearchPoint& b = res.best;
    ordered_json j;
    j["h_m"] = h * 1e-6;
    j["feasible"] = res.feasible;
    j["evaluations"] = res.evaluations;
    if (res.feasible) {
      j["W_rad_per_s"] = b.outer;
      j["gradient_T_per_m"] = b.gradient;
      j["epsilon_max"] = b.epsilon_max;
      j["J_rad_per_s"] = b.J;
      j["J13_rad_per_s"] = b.J13;
      r.rows.push_back({g(h), g(to_mhz(b.outer), 4), g(b.gradient, 5), g(b.epsilon_max, 4),
                        g(to_khz(b.J), 4), g(to_khz(b.J13), 4)});
    } else {
      r.rows.push_back({g(h), "-", "-", "-", "-", "-"});
    }
    if (const Preset* p = published_row("table3-h", h))
      j["published"] = {{"W_rad_per_s", p->outer}, {"J_rad_per_s", p->J}, {"J13_rad_per_s", p->J13},
                        {"gradient_T_per_m", p->gradient}};
    rows.push_back(j);
    r.line("h = " + g(h) + " um", res.feasible ? std::to_string(res.evaluations) + " evaluations"
                                                : "no feasible point");
  }
  r.json["epsilon_ceiling"] = o.epsilon_ceiling;
  r.json["rows"] = rows;
  return r;
}

std::array<int, 2> parse_pair(const std::string& s) {
  int a = 0, b = 0;
  char comma = 0, extra = 0;
  std::istringstream in(s);
  if (!(in >> a >> comma >> b) || comma != ',' || (in >> extra))
    throw UsageError("--pair expects 'control,target', e.g. 2,3");
  return {a, b};
}

double average_gate_fidelity(const Unitary8& u, const Unitary8& v) {
  const double t = std::norm((u.adjoint() * v).trace());
  return (t + 8.0) / 72.0;
}

struct CnotOptions {
  std::string pair = "2,3";
  std::string frame = "interaction";
  std::string emit;
  std::string couplings;
  std::optional<double> rabi_mhz;
  std::optional<double> pulse_time_us;
  bool commensurate = false;
  bool integrate = false;
  double step = 1e-8;
};

Frame parse_frame(const std::string& f) {
  if (f == "lab") return Frame::Lab;
  if (f == "interaction") return Frame::Interaction;
  throw UsageError("--frame must be lab or interaction");
}

Report cmd_cnot(const RunConfig& cfg, const CnotOptions& o) {
  const PhysicalSetup& s = cfg.setup;
  const auto [control, target] = parse_pair(o.pair);
  const Frame frame = parse_frame(o.frame);
  if (o.integrate && frame != Frame::Interaction)
    throw UsageError("--integrate runs in the interaction frame only");

  const Computed c = compute(s);
  std::string used;
  const CouplingSet cs = gate_couplings(s, c, o.couplings, used);

  PulseTiming timing = s.timing;
  if (o.pulse_time_us) timing.pulse_time = *o.pulse_time_us * 1e-6;
  if (o.rabi_mhz) timing.rabi_frequency = *o.rabi_mhz * two_pi * 1e6;
  if (o.commensurate) timing.commensurate_with = cs.qubit_frequencies;

  const PulseSchedule sched = build_cnot(control, target, cs, timing, frame);
  const double t_zz = refocusing_time(pair_coupling(cs, control, target));
  const Unitary8 u = schedule_unitary(sched, cs);
  const Unitary8 ideal = cnot_matrix(control, target);
  const double gate_error = distance_up_to_phase(u, ideal);
  double unitarity = 0.0;
  std::size_t pulses = 0;
  for (const auto& seg : sched.segments) {
    const Unitary8 v = segment_unitary(seg, cs, frame);
    unitarity = std::max(unitarity, (v.adjoint() * v - Unitary8::Identity()).cwiseAbs().maxCoeff());
    pulses += seg.is_pulse();
  }

  if (!o.emit.empty()) {
    std::ofstream f(o.emit);
    if (!f) throw std::runtime_error("cannot write schedule to '" + o.emit + "'");
    write_schedule(f, sched);
  }

  Report r;
  r.json["setup"] = setup_json(s);
  r.json["control"] = control;
  r.json["target"] = target;
  r.json["frame"] = to_string(frame);
  r.json["couplings"] = used;
  r.json["J_rad_per_s"] = pair_coupling(cs, control, target);
  r.json["zz_time_s"] = t_zz;
  r.json["total_duration_s"] = sched.total_duration();
  r.json["segments"] = sched.segments.size();
  r.json["pulses"] = pulses;
  r.json["gate_error"] = gate_error;
  r.json["average_gate_fidelity"] = average_gate_fidelity(u, ideal);
  r.json["max_unitarity_error"] = unitarity;
  r.json["max_commensuration_residual_rad"] = sched.max_commensuration_residual();
  if (used == "tabulated") {
    const double Jc = pair_coupling(c.couplings, control, target);
    r.json["computed_J_rad_per_s"] = Jc;
    r.json["computed_J_zz_time_s"] = refocusing_time(Jc);
  }

  setup_lines(r, s);
  r.line("gate", "CNOT control " + std::to_string(control) + ", target " + std::to_string(target));
  r.line("frame", to_string(frame));
  r.line("couplings", used + ", J = " + g(to_khz(pair_coupling(cs, control, target))) + " x2pi kHz");
  r.line("zz time", g(t_zz * 1e3) + " ms");
  r.line("total duration", g(sched.total_duration() * 1e3) + " ms");
  r.line("segments", std::to_string(sched.segments.size()) + " (" + std::to_string(pulses) + " pulses)");
  r.line("gate error", g(gate_error, 3));
  r.line("max unitarity error", g(unitarity, 3));
  if (o.commensurate)
    r.line("max commensuration residual", g(sched.max_commensuration_residual(), 3) + " rad");
  if (used == "tabulated")
    r.line("zz time (computed J)", g(refocusing_time(pair_coupling(c.couplings, control, target)) * 1e3) + " ms");

  if (o.integrate) {
    Unitary8 p = Unitary8::Identity();
    long steps = 0;
    for (const auto& seg : sched.segments) p = segment_propagator(seg, cs, DriveModel{}, o.step, &steps) * p;
    const double f = average_gate_fidelity(p, u);
    r.json["integrated"] = {{"step_s", o.step}, {"steps", steps}, {"fidelity_vs_ideal", f}};
    r.line("integrated fidelity", g(f, 12) + " (" + std::to_string(steps) + " steps)");
  }
  if (!o.emit.empty()) r.line("schedule", o.emit);

  r.columns = {"segment", "kind", "ions", "theta", "phi", "duration(us)", "term"};
  for (std::size_t i = 0; i < sched.segments.size(); ++i) {
    const Segment& seg = sched.segments[i];
    if (const auto* pl = std::get_if<Pulse>(&seg.item)) {
      std::string ions;
      for (int ion : pl->ions) ions += (ions.empty() ? "" : ",") + std::to_string(ion);
      r.rows.push_back({std::to_string(i + 1), "pulse", ions, g(pl->angle), g(pl->phase),
                        g(pl->duration * 1e6), seg.term});
    } else {
      r.rows.push_back({std::to_string(i + 1), "free", "-", "-", "-", g(seg.duration() * 1e6), seg.term});
    }
  }
  return r;
}

cplx parse_complex(const std::string& s, const char* flag) {
  std::istringstream in(s);
  double re = 0, im = 0;
  char comma = 0, extra = 0;
  if (!(in >> re)) throw UsageError(std::string(flag) + " expects re[,im]");
  if (in >> comma) {
    if (comma != ',' || !(in >> im) || (in >> extra)) throw UsageError(std::string(flag) + " expects re[,im]");
  }
  return {re, im};
}

struct TeleportOptions {
  std::string alpha = "1";
  std::string beta = "0";
  std::string mode = "ideal";
  std::string outcome;
  std::string dephasing;
  std::string couplings;
  double step = 1e-8;
};

Report cmd_teleport(const RunConfig& cfg, const TeleportOptions& o) {
  ProtocolConfig pc;
  pc.alpha = parse_complex(o.alpha, "--alpha");
  pc.beta = parse_complex(o.beta, "--beta");
  try {
    pc.mode = parse_gate_mode(o.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  pc.seed = cfg.seed;
  pc.timing = cfg.setup.timing;
  pc.integrator_step = o.step;
  if (!o.outcome.empty()) {
    const auto& b = o.outcome;
    if (b.size() != 2 || (b[0] != '0' && b[0] != '1') || (b[1] != '0' && b[1] != '1'))
      throw UsageError("--outcome expects two bits b1b2, e.g. 01");
    pc.forced_outcome = 2 * (b[0] - '0') + (b[1] - '0');
  }
  if (!o.dephasing.empty()) {
    std::istringstream in(o.dephasing);
    char comma = 0;
    if (!(in >> pc.dephasing_rate[0] >> comma >> pc.dephasing_rate[1] >> comma >> pc.dephasing_rate[2]))
      throw UsageError("--dephasing expects three rates r1,r2,r3 in 1/s");
  }
  std::string used = "none";
  if (pc.mode != GateMode::Ideal) {
    const Computed c = compute(cfg.setup);
    pc.couplings = gate_couplings(cfg.setup, c, o.couplings, used);
  }

  const TeleportRecord rec = run_teleport(pc);
  Report r;
  r.json = to_json(rec);
  r.json["couplings"] = used;
  r.line("outcome", rec.bits());
  r.line("correction", to_string(rec.correction));
  r.line("outcome probability", g(rec.outcome_probability, 10));
  r.line("fidelity", g(rec.fidelity, 12));
  auto amp = [](cplx z) { return g(z.real(), 10) + (z.imag() < 0 ? " - " : " + ") + g(std::abs(z.imag()), 10) + "i"; };
  r.line("output |0>", amp(rec.output[0]));
  r.line("output |1>", amp(rec.output[1]));
  r.line("mode", to_string(pc.mode));
  r.line("couplings", used);
  r.line("duration entangle", g(rec.durations.entangle * 1e3) + " ms");
  r.line("duration encode", g(rec.durations.encode * 1e3) + " ms");
  r.line("duration correct", g(rec.durations.correct * 1e3) + " ms");
  r.line("duration total", g(rec.durations.total * 1e3) + " ms");
  r.line("seed", std::to_string(pc.seed));
  return r;
}

Report cmd_verify(const RunConfig& cfg, bool& all_passed) {
  const auto results = run_verify(cfg.seed);
  Report r;
  r.columns = {"check", "worst", "tolerance", "status"};
  ordered_json checks = ordered_json::array();
  all_passed = true;
  for (const auto& c : results) {
    all_passed = all_passed && c.passed;
    r.rows.push_back({c.name, g(c.worst, 3), g(c.tolerance, 3), c.passed ? "PASS" : "FAIL"});
    ordered_json j{{"check", c.name}, {"worst", c.worst}, {"tolerance", c.tolerance}, {"passed", c.passed}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(j);
  }
  r.json["seed"] = cfg.seed;
  r.json["passed"] = all_passed;
  r.json["checks"] = checks;
  r.line("seed", std::to_string(cfg.seed));
  r.line("result", all_passed ? "all checks passed" : "FAILURES");
  return r;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-ion magnetic-gradient register: couplings, CNOT schedules, teleportation"};
  app.name("magtrap");
  app.require_subcommand(1, 1);

  std::string config_path, preset, format, output;
  std::optional<std::uint64_t> seed;
  std::optional<double> gradient;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--preset", preset, "table1-d1..7 or table3-h2..6");
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--output", output, "write the report to this file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--gradient", gradient, "field gradient override, T/m");

  auto* modes = app.add_subcommand("modes", "equilibrium positions and normal modes");
  auto* couplings = app.add_subcommand("couplings", "qubit frequencies, Ising couplings, Lamb-Dicke factors");
  auto* spectrum = app.add_subcommand("spectrum", "spin energies and conditional carrier frequencies");

  SearchOptions s1, s3;
  auto* table1 = app.add_subcommand("table1", "maximise J over micro-trap parameters");
  table1->add_option("--d", s1.target_um, "neighbouring trap distance, um (default: 1..7)");
  auto* table3 = app.add_subcommand("table3", "maximise J in a linear trap");
  table3->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
  table3->add_option("--h", s3.target_um, "inter-ion distance, um (default: 2..6)");
  for (auto [cmd, o] : {std::pair{table1, &s1}, {table3, &s3}}) {
    cmd->add_option("--epsilon-ceiling", o->epsilon_ceiling, "upper bound on eps_max");
    cmd->add_option("--gradient-step", o->gradient_step, "coarse gradient step, T/m");
    cmd->add_option("--gradient-max", o->gradient_max, "largest gradient, T/m");
    cmd->add_flag("--serial", o->serial, "use the serial reference kernel");
  }

  CnotOptions co;
  auto* cnot = app.add_subcommand("cnot", "refocused CNOT schedule and gate check");
  cnot->add_option("--pair", co.pair, "control,target");
  cnot->add_option("--frame", co.frame, "lab | interaction");
  cnot->add_option("--emit-schedule", co.emit, "write the pulse schedule to this file");
  cnot->add_option("--couplings", co.couplings, "computed | tabulated (default tabulated for presets)");
  cnot->add_option("--rabi-MHz", co.rabi_mhz, "Rabi frequency in units of 2pi MHz");
  cnot->add_option("--pulse-time-us", co.pulse_time_us, "single rotation time, us");
  cnot->add_flag("--commensurate", co.commensurate, "commensurate pulse lengths with the qubit frequencies");
  cnot->add_flag("--integrate", co.integrate, "also integrate the schedule with Ising terms during pulses");
  cnot->add_option("--step", co.step, "integrator step, s");

  TeleportOptions to;
  auto* teleport = app.add_subcommand("teleport", "run the teleportation protocol");
  teleport->add_option("--alpha", to.alpha, "amplitude of |0>, re[,im]");
  teleport->add_option("--beta", to.beta, "amplitude of |1>, re[,im]");
  teleport->add_option("--mode", to.mode, "ideal | scheduled | integrated");
  teleport->add_option("--outcome", to.outcome, "force the measurement outcome b1b2");
  teleport->add_option("--dephasing", to.dephasing, "phase-damping rates r1,r2,r3 in 1/s");
  teleport->add_option("--couplings", to.couplings, "computed | tabulated");
  teleport->add_option("--step", to.step, "integrator step, s");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!preset.empty()) cfg.setup = PhysicalSetup::from_preset(find_preset(preset));
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (!format.empty()) cfg.format = parse_output_format(format);
    if (!output.empty()) cfg.output_path = output;
    if (seed) cfg.seed = *seed;
    if (gradient) {
      cfg.setup.field.gradient = *gradient;
      cfg.setup.tabulated_J.reset();
      cfg.setup.tabulated_J13.reset();
    }
    cfg.command = app.get_subcommands().front()->get_name();
  } catch (const std::exception& e) {
    err << "magtrap: " << e.what() << '\n';
    return kExitUsage;
  }

  int code = kExitOk;
  Report report;
  try {
    if (*modes) report = cmd_modes(cfg);
    else if (*couplings) report = cmd_couplings(cfg);
    else if (*spectrum) report = cmd_spectrum(cfg);
    else if (*table1) report = cmd_table1(cfg, s1);
    else if (*table3) report = cmd_table3(cfg, s3);
    else if (*cnot) report = cmd_cnot(cfg, co);
    else if (*teleport) report = cmd_teleport(cfg, to);
    else if (*verify) {
      bool ok = false;
      report = cmd_verify(cfg, ok);
      if (!ok) code = kExitFailure;
    }
  } catch (const UsageError& e) {
    err << "magtrap " << cfg.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "magtrap " << cfg.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "magtrap " << cfg.command << ": " << e.what() << '\n';
    return kExitFailure;
  }

  if (cfg.output_path.empty()) {
    render(report, cfg.format, out);
  } else {
    std::ofstream f(cfg.output_path);
    if (!f) {
      err << "magtrap: cannot write '" << cfg.output_path << "'\n";
      return kExitFailure;
    }
    render(report, cfg.format, f);
  }
  return code;
}

}  // namespace magtrap
