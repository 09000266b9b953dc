#pragma once

#include <string>
#include <vector>

#include "gravaudit/catalog/catalog.hpp"
#include "gravaudit/harness/harness.hpp"

namespace gva::harness::detail {

using json = nlohmann::ordered_json;

enum class MetricKind { Polar, Tilde, Minkowski, Schwarzschild, Other };

struct LoadedMetric {
  std::string source;
  MetricSpec spec;
  ParamMap params;
  MetricKind kind = MetricKind::Other;
};

LoadedMetric resolve(const std::string& source, const ParamMap& overrides);

/// Regular sample points for the metric: catalog samplers for the catalog
/// metrics, rejection from a bounded box for anything else.
std::vector<Point4> sample_points(const LoadedMetric& m, std::size_t count, std::uint64_t seed);

json params_json(const ParamMap& p);
json matrix_json(const geometry::Mat4& m);
json point_json(const Point4& p);

std::string read_file(const std::string& path);

}  // namespace gva::harness::detail
