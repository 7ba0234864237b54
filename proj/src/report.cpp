#include "sfm/report.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

#include "sfm/scenario.hpp"

namespace sfm {

std::string metrics_document(const RunSummary& summary, const SimulationConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["format"] = kMetricsFormat;
  doc["config.variant"] = std::string(to_string(cfg.model.variant));
  for (const std::string& key : config_keys()) {
    const double v = get_config_value(cfg, key);
    if (key == "seed" || key == "output_every")
      doc["config." + key] = static_cast<std::uint64_t>(v);
    else
      doc["config." + key] = v;
  }
  doc["config.seed"] = cfg.seed;
  doc["config.workers"] = cfg.workers;

  doc["scenario.id"] = summary.scenario_id;
  doc["label"] = summary.label;
  doc["population"] = summary.population;
  doc["evacuated"] = summary.evacuated;
  doc["all_evacuated"] = summary.all_evacuated;
  for (const auto& [name, value] : scalar_metrics(summary)) {
    if (value)
      doc[name] = *value;
    else
      doc[name] = nullptr;
  }
  for (const auto& [exit, flow] : summary.mean_flow) doc["mean_flow." + exit] = flow;
  for (const auto& [exit, times] : summary.exit_crossings) doc["crossings." + exit] = times.size();

  nlohmann::ordered_json ids = nlohmann::ordered_json::array();
  nlohmann::ordered_json times = nlohmann::ordered_json::array();
  for (const auto& [id, t] : summary.exit_times) {
    ids.push_back(id);
    times.push_back(t);
  }
  doc["exit_times.id"] = ids;
  doc["exit_times.t"] = times;
  doc["series.t"] = summary.series_time;
  doc["series.mean_speed"] = summary.series_mean_speed;
  if (summary.has_nervousness) doc["series.mean_nervousness"] = summary.series_mean_nervousness;
  return doc.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into " + path.string() + ": " + ec.message());
  }
}

}  // namespace sfm
