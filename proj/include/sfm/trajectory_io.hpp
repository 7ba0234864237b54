#pragma once

#include <iosfwd>
#include <string>

#include "sfm/trajectory.hpp"

namespace sfm {

/// First line of every trajectory file.
inline constexpr const char* kTrajectoryFormat = "# sfm-trajectory v1";

/// Writes one CSV row per (frame, pedestrian) with columns
/// t,id,x,y,vx,vy,p,M,E and, when `verbose`, the twelve force components.
/// Floats use 9 significant digits. Returns the number of bytes written;
/// throws std::runtime_error when the sink fails.
std::size_t write_trajectory(const TrajectoryLog& log, std::ostream& sink, bool verbose = false);

/// Parses a file produced by write_trajectory. Rows with equal t form one
/// frame. Throws std::runtime_error on malformed input.
TrajectoryLog read_trajectory(std::istream& source);

/// %.9g formatting used by every CSV writer.
std::string format_float(double v);

}  // namespace sfm
