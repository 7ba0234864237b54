#include "sfm/trajectory_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sfm {

namespace {

constexpr const char* kBaseHeader = "t,id,x,y,vx,vy,p,M,E";
constexpr const char* kForceHeader =
    ",f_pref_x,f_pref_y,f_rep_x,f_rep_y,f_att_x,f_att_y,f_push_x,f_push_y,f_fric_x,f_fric_y,f_noise_x,f_noise_y";

double parse_double(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("trajectory line " + std::to_string(line) + ": bad number '" + field + "'");
  }
}

}  // namespace

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::size_t write_trajectory(const TrajectoryLog& log, std::ostream& sink, bool verbose) {
  std::string out;
  out += kTrajectoryFormat;
  out += '\n';
  out += kBaseHeader;
  if (verbose) out += kForceHeader;
  out += '\n';
  for (const Frame& frame : log.frames) {
    const std::string t = format_float(frame.time);
    for (const AgentRecord& a : frame.agents) {
      out += t;
      out += ',';
      out += std::to_string(a.id);
      for (double v : {a.pos.x, a.pos.y, a.vel.x, a.vel.y, a.p, a.M, a.E}) {
        out += ',';
        out += format_float(v);
      }
      if (verbose) {
        const StepForces& f = a.forces;
        for (Vec2 c : {f.preferred, f.social_rep, f.social_att, f.pushing, f.friction, f.noise}) {
          out += ',';
          out += format_float(c.x);
          out += ',';
          out += format_float(c.y);
        }
      }
      out += '\n';
    }
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!sink) throw std::runtime_error("failed to write trajectory");
  return out.size();
}

TrajectoryLog read_trajectory(std::istream& source) {
  std::string line;
  if (!std::getline(source, line) || line != kTrajectoryFormat)
    throw std::runtime_error("not an sfm trajectory file (missing format line)");
  if (!std::getline(source, line)) throw std::runtime_error("trajectory header missing");
  bool verbose = false;
  if (line == std::string(kBaseHeader) + kForceHeader)
    verbose = true;
  else if (line != kBaseHeader)
    throw std::runtime_error("unexpected trajectory header: " + line);
  const std::size_t columns = verbose ? 21 : 9;

  TrajectoryLog log;
  std::size_t line_no = 2;
  std::vector<std::string> fields;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    fields.clear();
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != columns)
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns");
    const double t = parse_double(fields[0], line_no);
    if (log.frames.empty() || log.frames.back().time != t) {
      Frame frame;
      frame.time = t;
      log.frames.push_back(frame);
    }
    AgentRecord a;
    unsigned long id = 0;
    const auto res = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), id);
    if (res.ec != std::errc() || res.ptr != fields[1].data() + fields[1].size())
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": bad id");
    a.id = static_cast<PedestrianId>(id);
    double v[19];
    for (std::size_t k = 2; k < columns; ++k) v[k - 2] = parse_double(fields[k], line_no);
    a.pos = {v[0], v[1]};
    a.vel = {v[2], v[3]};
    a.p = v[4];
    a.M = v[5];
    a.E = v[6];
    if (verbose) {
      Vec2* parts[] = {&a.forces.preferred, &a.forces.social_rep, &a.forces.social_att,
                       &a.forces.pushing,   &a.forces.friction,   &a.forces.noise};
      for (int c = 0; c < 6; ++c) *parts[c] = {v[7 + 2 * c], v[8 + 2 * c]};
    }
    log.frames.back().agents.push_back(a);
  }
  if (!log.frames.empty()) log.end_time = log.frames.back().time;
  return log;
}

}  // namespace sfm
