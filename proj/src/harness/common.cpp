#include "common.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace gva::harness {

using namespace detail;

namespace {

void emit(std::string& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        emit(out, value, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line so matrices read as rows.
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const nlohmann::ordered_json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

MetricSpec load_metric(const std::string& source, const ParamMap& overrides, ParamMap& bound) {
  LoadedMetric m = resolve(source, overrides);
  bound = m.params;
  return m.spec;
}

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

LoadedMetric resolve(const std::string& source, const ParamMap& overrides) {
  LoadedMetric m;
  m.source = source;
  const auto names = catalog::names();
  const bool is_catalog = std::find(names.begin(), names.end(), source) != names.end();
  try {
    if (is_catalog) {
      m.spec = catalog::by_name(source, overrides);
    } else {
      if (source.size() < 5 || source.substr(source.size() - 5) != ".gmet") {
        throw ConfigError("unknown metric '" + source + "' (expected a catalog name or a .gmet path)");
      }
      m.spec = parse_metric_document(read_file(source));
    }
    m.params = m.spec.bind(overrides);
  } catch (const ParseError& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  // A document that is structurally one of the time-periodic forms is
  // audited as that form.
  const auto tp = catalog::TimePeriodicParams::from_map(m.params);
  const bool has_tp = m.params.size() == 2 && m.params.count("eps") && m.params.count("m");
  if (source == "time-periodic" || (has_tp && m.spec == catalog::time_periodic_polar(tp))) {
    m.kind = MetricKind::Polar;
    m.spec.singular_sets = catalog::time_periodic_polar(tp).singular_sets;
  } else if (source == "time-periodic-tilde" ||
             (has_tp && tp.m != 0.0 && m.spec == catalog::time_periodic_tilde(tp))) {
    m.kind = MetricKind::Tilde;
    m.spec.singular_sets = catalog::time_periodic_tilde(tp).singular_sets;
  } else if (source == "minkowski" || m.spec == catalog::minkowski()) {
    m.kind = MetricKind::Minkowski;
  } else if (source == "schwarzschild") {
    m.kind = MetricKind::Schwarzschild;
  }
  return m;
}

std::vector<Point4> sample_points(const LoadedMetric& m, std::size_t count, std::uint64_t seed) {
  using std::numbers::pi;
  const auto tp = catalog::TimePeriodicParams::from_map(m.params);
  switch (m.kind) {
    case MetricKind::Polar: return catalog::sample_polar(tp, count, seed);
    case MetricKind::Tilde: return catalog::sample_tilde(tp, count, seed);
    default: break;
  }
  catalog::Sampler s(seed);
  std::vector<Point4> out;
  if (m.kind == MetricKind::Schwarzschild) {
    const double mu = m.params.at("mu");
    while (out.size() < count) {
      out.push_back({s.uniform(0.0, 10.0), s.uniform(3.0 * mu, 20.0 * mu), s.uniform(0.05, pi - 0.05),
                     s.uniform(0.0, 2.0 * pi)});
    }
    return out;
  }
  // Box sampling: declared intervals, otherwise [-5, 5] per coordinate. Points
  // closer than 0.05 to a finite bound or where the metric is singular are
  // rejected.
  std::array<std::pair<double, double>, kDim> box{};
  for (std::size_t i = 0; i < kDim; ++i) {
    double lo = -5.0, hi = 5.0;
    if (const auto& r = m.spec.chart.ranges[i]) {
      if (r->lo) lo = eval_value(*r->lo, Point4{}, m.params) + 0.05;
      if (r->hi) hi = eval_value(*r->hi, Point4{}, m.params) - 0.05;
      if (r->lo && !r->hi) hi = lo + 10.0;
      if (r->hi && !r->lo) lo = hi - 10.0;
    }
    if (!(hi > lo)) throw ConfigError("coordinate interval of '" + m.spec.chart.names[i] + "' too narrow to sample");
    box[i] = {lo, hi};
  }
  std::size_t attempts = 0;
  std::string last;
  while (out.size() < count) {
    // Every rejection is a domain error, so running out means the metric is
    // singular on (nearly) the whole box.
    if (++attempts > 100 * count + 1000) throw DomainError("no regular sample points found: " + last);
    Point4 p;
    for (std::size_t i = 0; i < kDim; ++i) p[i] = s.uniform(box[i].first, box[i].second);
    try {
      (void)geometry::metric_at(m.spec, m.params, p);
    } catch (const DomainError& e) {
      last = e.what();
      continue;
    }
    out.push_back(p);
  }
  return out;
}

json params_json(const ParamMap& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

json matrix_json(const geometry::Mat4& m) {
  json j = json::array();
  for (const auto& row : m) j.push_back(json(std::vector<double>(row.begin(), row.end())));
  return j;
}

json point_json(const Point4& p) { return json(std::vector<double>(p.begin(), p.end())); }

}  // namespace detail
}  // namespace gva::harness
