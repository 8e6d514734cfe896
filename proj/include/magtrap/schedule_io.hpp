#ifndef MAGTRAP_SCHEDULE_IO_HPP
#define MAGTRAP_SCHEDULE_IO_HPP

#include <iosfwd>

#include "magtrap/pulse_engine.hpp"

namespace magtrap {

/// Line-oriented schedule text, one segment per line:
///   PULSE <ions> <theta> <phi> <Omega> <T>
///   FREE <T>
/// `ions` is a single index or a comma list for simultaneous pulses ("2,3").
/// Angles in rad, Omega in rad/s, durations in s, 15 significant digits.
/// Lines starting with '#' are comments; "# frame: lab" selects the frame.
void write_schedule(std::ostream& out, const PulseSchedule& schedule);
PulseSchedule read_schedule(std::istream& in);

}  // namespace magtrap

#endif
