#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sfm/dynamics.hpp"
#include "sfm/metrics.hpp"

namespace sfm {

inline constexpr const char* kMetricsFormat = "sfm-metrics v1";

/// Flat key-value JSON document: the effective configuration under
/// `config.*`, then the run metrics. Series are stored as arrays.
std::string metrics_document(const RunSummary& summary, const SimulationConfig& cfg);

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace sfm
