#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "gravaudit/harness/harness.hpp"

using namespace gva;
using namespace gva::harness;
using json = nlohmann::json;

namespace {

json report(const RunResult& r) {
  REQUIRE(r.artifacts.size() == 1);
  return json::parse(r.artifacts.front().bytes);
}

AuditConfig with_metric(const std::string& m, std::size_t samples = 20) {
  AuditConfig c;
  c.metric = m;
  c.samples = samples;
  return c;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(3.0) == "3");
  nlohmann::ordered_json j;
  j["b"] = 1.5;
  j["a"] = {1.0, 2.0};
  j["n"] = std::nan("");
  CHECK(dump_json(j) == "{\n  \"b\": 1.5,\n  \"a\": [1, 2],\n  \"n\": null\n}\n");
}

TEST_CASE("verify on the baselines") {
  const auto mk = run_verify(with_metric("minkowski"));
  CHECK(mk.exit_code == kPass);
  const auto j = report(mk);
  // The pullback claim concerns the time-periodic chart change only.
  for (const auto& [k, v] : j["target"]["claims"].items()) {
    CHECK_MESSAGE(v["verdict"] == (k == "pullback" ? "NOT_APPLICABLE" : "AGREES_WITH_CLAIM"), k);
  }
  CHECK(j["asserted"]["pass"] == true);

  const auto sw = report(run_verify(with_metric("schwarzschild")));
  const auto& pts = sw["calibration"]["schwarzschild"]["points"];
  CHECK(pts[0]["r"] == 3.0);
  CHECK(pts[0]["kretschmann"].get<double>() == doctest::Approx(48.0 / 729.0).epsilon(1e-10));
  CHECK(sw["target"]["claims"]["vanishing_riemann"]["verdict"] == "NOT_APPLICABLE");
}

TEST_CASE("verify on the time-periodic charts") {
  const auto polar = run_verify(with_metric("time-periodic", 30));
  CHECK(polar.exit_code == kPass);
  const auto tilde = report(run_verify(with_metric("time-periodic-tilde", 30)));
  CHECK(tilde["asserted"]["pass"] == true);
  CHECK(tilde["target"]["oracle_agreement"]["max_relative"].get<double>() <= 1e-6);
  CHECK(tilde["target"]["claims"]["vacuum_field_equations"]["verdict"] == "DISAGREES");
  CHECK(tilde["target"]["claims"].contains("pullback"));
}

TEST_CASE("reports are byte-identical across worker counts") {
  AuditConfig a = with_metric("time-periodic", 24);
  AuditConfig b = a;
  b.jobs = 5;
  CHECK(run_verify(a).artifacts[0].bytes == run_verify(b).artifacts[0].bytes);
  a.metric = b.metric = "";
  CHECK(run_construct(a).artifacts[0].bytes == run_construct(b).artifacts[0].bytes);
  CHECK(run_horizons(a).artifacts[0].bytes == run_horizons(b).artifacts[0].bytes);
  CHECK(run_identities(a).artifacts[0].bytes == run_identities(b).artifacts[0].bytes);
}

TEST_CASE("identities") {
  AuditConfig c = with_metric("", 200);
  const auto r = run_identities(c);
  CHECK(r.exit_code == kPass);
  CHECK(report(r)["identities_passed"] == "16/16");

  c.q_scale = 1.01;
  const auto bad = run_identities(c);
  CHECK(bad.exit_code == kInvariantFailure);
  CHECK(bad.message.find("FAILED identity: dM/dtheta = Q") != std::string::npos);

  AuditConfig e = with_metric("", 500);
  e.overrides = {{"eps", 0.124}};
  const auto bound = report(run_identities(e));
  CHECK(bound["g00_bound"]["min_g00"].get<double>() >= 0.008);
  CHECK_THROWS_AS(run_identities(with_metric("minkowski")), ConfigError);
}

TEST_CASE("horizons csv") {
  AuditConfig c;
  c.overrides = {{"eps", 0.1}};
  c.samples = 5;
  c.cases = {"I"};
  c.arcs = {"principal"};
  const auto r = run_horizons(c);
  CHECK(r.exit_code == kPass);
  const std::string& csv = r.artifacts[0].bytes;
  CHECK(csv.find("I,0,principal,0,0,") != std::string::npos);
  CHECK(csv.find("I,1,principal,0,6.2831853071795862,") != std::string::npos);
  CHECK(csv.find("I,2,principal,0,12.566370614359172,") != std::string::npos);

  c.kmin = 1;
  c.kmax = 0;
  const std::string empty = run_horizons(c).artifacts[0].bytes;
  const std::string header = "case,k,arc,r,t,f_residual\n";
  CHECK(empty.size() >= header.size());
  CHECK(empty.substr(empty.size() - header.size()) == header);

  AuditConfig inf;
  inf.overrides = {{"eps", 0.1}, {"m", 1.2}};
  const auto ri = run_horizons(inf);
  CHECK(ri.exit_code == kPass);
  CHECK(ri.artifacts[0].bytes.find("# notice: case I infeasible") != std::string::npos);
  CHECK(ri.artifacts[0].bytes.find("II,0,principal") != std::string::npos);

  AuditConfig bad;
  bad.cases = {"III"};
  CHECK_THROWS_AS(run_horizons(bad), ConfigError);
  bad.cases = {"I"};
  bad.format = "svg";
  CHECK_THROWS_AS(run_horizons(bad), ConfigError);
}

TEST_CASE("horizons svg") {
  AuditConfig c;
  c.format = "svg";
  c.out = "plot.svg";
  const auto r = run_horizons(c);
  REQUIRE(r.artifacts.size() == 2);
  CHECK(r.artifacts[0].path == "plot-case-I.svg");
  CHECK(r.artifacts[1].path == "plot-case-II.svg");
  for (const auto& a : r.artifacts) {
    CHECK(a.bytes.rfind("<svg ", 0) == 0);
    CHECK(a.bytes.find("<polyline") != std::string::npos);
    CHECK(a.bytes.find("</svg>") != std::string::npos);
  }
}

TEST_CASE("construct") {
  const auto r = run_construct(AuditConfig{});
  CHECK(r.exit_code == kPass);
  const auto j = report(r);
  CHECK(j["quadrature"]["rows"].size() == 20);
  CHECK(j["cascade"]["equations"].size() == 10);
  CHECK(j["cascade"]["equations"][0]["equation"] == "G11");
  CHECK(j["cascade"]["equations"][9]["equation"] == "G00+L*g00");
  CHECK(j["cascade"]["g11_closed_form"]["pass"] == true);

  AuditConfig bad;
  bad.ansatz = "sinh(x)";
  CHECK_THROWS_AS(run_construct(bad), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "gva_constant_template.gmet";
  std::ofstream(path) << "chart t x y z\ng 0 0 = 1\ng 2 2 = -1\ng 3 3 = -1\n";
  AuditConfig tpl;
  tpl.template_path = path.string();
  CHECK_THROWS_AS(run_construct(tpl), DomainError);
  std::filesystem::remove(path);
}

TEST_CASE("metric resolution") {
  CHECK_THROWS_AS(run_verify(with_metric("nope")), ConfigError);
  CHECK_THROWS_AS(run_verify(with_metric("/no/such/file.gmet")), ConfigError);
  AuditConfig c = with_metric("schwarzschild", 5);
  c.overrides = {{"eps", 1.0}};
  CHECK_THROWS_AS(run_verify(c), ConfigError);
  ParamMap bound;
  const auto s = load_metric(GVA_DATA_DIR "/time_periodic_polar.gmet", {{"eps", 0.2}}, bound);
  CHECK(bound.at("eps") == 0.2);
  CHECK_FALSE(s.is_zero(0, 1));
}
