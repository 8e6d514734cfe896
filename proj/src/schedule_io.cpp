#include "magtrap/schedule_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace magtrap {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw std::runtime_error("schedule line " + std::to_string(line) + ": " + msg);
}

}  // namespace

void write_schedule(std::ostream& out, const PulseSchedule& schedule) {
  out << "# frame: " << to_string(schedule.frame) << '\n';
  for (const auto& seg : schedule.segments) {
    if (const auto* p = std::get_if<Pulse>(&seg.item)) {
      out << "PULSE ";
      for (std::size_t k = 0; k < p->ions.size(); ++k) out << (k ? "," : "") << p->ions[k];
      out << ' ' << num(p->angle) << ' ' << num(p->phase) << ' ' << num(p->rabi) << ' '
          << num(p->duration) << '\n';
    } else {
      out << "FREE " << num(std::get<FreeEvolution>(seg.item).duration) << '\n';
    }
  }
}

PulseSchedule read_schedule(std::istream& in) {
  PulseSchedule s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("frame: lab") != std::string::npos) s.frame = Frame::Lab;
      else if (line.find("frame: interaction") != std::string::npos) s.frame = Frame::Interaction;
      continue;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "FREE") {
      FreeEvolution f;
      if (!(ls >> f.duration) || f.duration < 0) parse_error(lineno, "bad FREE duration");
      s.segments.push_back({f, ""});
    } else if (kind == "PULSE") {
      std::string ions;
      Pulse p;
      if (!(ls >> ions >> p.angle >> p.phase >> p.rabi >> p.duration))
        parse_error(lineno, "expected PULSE ions theta phi Omega T");
      std::istringstream is(ions);
      for (std::string tok; std::getline(is, tok, ',');) {
        try {
          p.ions.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          parse_error(lineno, "bad ion list '" + ions + "'");
        }
        if (p.ions.back() < 1 || p.ions.back() > 3) parse_error(lineno, "ion outside 1..3");
      }
      if (p.ions.empty() || p.duration < 0) parse_error(lineno, "bad pulse");
      s.segments.push_back({p, ""});
    } else {
      parse_error(lineno, "unknown segment '" + kind + "'");
    }
    std::string extra;
    if (ls >> extra) parse_error(lineno, "trailing token '" + extra + "'");
  }
  return s;
}

}  // namespace magtrap
