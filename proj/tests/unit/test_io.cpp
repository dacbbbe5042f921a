#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "doctest.h"
#include "meso/core/error.hpp"
#include "meso/core/format.hpp"
#include "meso/core/io.hpp"
#include "oracles.hpp"

using namespace meso;

namespace {

std::string minimal(const std::string& inclusions, const std::string& extra = "") {
  return R"({"domain": {"type": "ball", "radius": 7, "matrix_material": "Structural Steel"},)"
         R"("background": {"type": "radial_source", "r_f": 1.5},)" +
         extra + R"("inclusions": )" + inclusions + "}";
}

template <class F>
std::string parse_message(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("meso_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("Table 2 file contents") {
  const auto c = load_cluster(oracle::data_file("table2.json"));
  REQUIRE(c.cloud.size() == 27);
  CHECK(c.domain.bounded());
  CHECK(c.domain.radius() == 7.0);
  CHECK(c.domain.matrix_shear() == doctest::Approx(oracle::kSteel).epsilon(1e-15));
  CHECK(std::get<RadialSource>(c.background).r_f == 1.5);
  std::map<std::string, int> counts;
  for (const auto& inc : c.cloud.inclusions()) {
    ++counts[inc.material.is_void() ? "None" : inc.material.name()];
  }
  CHECK(counts == std::map<std::string, int>{{"None", 3},
                                             {"Cast Iron", 4},
                                             {"Steel AISI 4340", 3},
                                             {"Aluminum", 5},
                                             {"Copper", 5},
                                             {"Iron", 7}});
  CHECK(c.report.admissible());
}

TEST_CASE("save and load preserve metrics bit for bit") {
  const auto c = load_cluster(oracle::data_file("table2.json"));
  const auto text = serialize_cluster(c.cloud, c.domain, c.background);
  const auto back = parse_cluster(text);
  CHECK(back.cloud.epsilon() == c.cloud.epsilon());
  CHECK(back.cloud.d() == c.cloud.d());
  CHECK(back.cloud.metrics().convention == c.cloud.metrics().convention);
  for (std::size_t k = 0; k < c.cloud.size(); ++k) {
    CHECK(back.cloud[k].center == c.cloud[k].center);
    CHECK(back.cloud[k].radius == c.cloud[k].radius);
    CHECK(back.cloud[k].material.shear() == c.cloud[k].material.shear());
  }
  CHECK(serialize_cluster(back.cloud, back.domain, back.background) == text);

  const auto path = temp_file("cluster.json");
  save_cluster(path.string(), c.cloud, c.domain, c.background);
  CHECK(load_cluster(path.string()).cloud.d() == c.cloud.d());
  std::filesystem::remove(path);
}

TEST_CASE("generated full-space clusters round trip") {
  const auto dom = DomainSpec::full_space(*find_builtin_material("Structural Steel"));
  const auto g = generate_periodic_spherical_cluster(1000, 0.09, *find_builtin_material("Aluminum"), dom);
  const auto back = parse_cluster(serialize_cluster(g.cloud, dom, LinearX{}));
  CHECK(back.cloud.size() == 304);
  CHECK(back.cloud.d() == g.cloud.d());
  CHECK(back.cloud.epsilon() == g.cloud.epsilon());
  CHECK(back.cloud.metrics().convention == SeparationConvention::lattice_spacing);
  CHECK(std::holds_alternative<LinearX>(back.background));
}

TEST_CASE("syntax errors report a line") {
  const std::string text = "{\n  \"domain\": {\"type\": \"ball\",\n  \"radius\": 7,,\n}";
  try {
    parse_cluster(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.code() == ErrorCode::parse);
  }
}

TEST_CASE("field errors name the field") {
  CHECK(parse_message([] { parse_cluster(minimal("[]")); }).find("inclusions") != std::string::npos);
  CHECK_THROWS_AS(parse_cluster(minimal("[]")), ParseError);

  const auto unknown = parse_message(
      [] { parse_cluster(minimal(R"([{"center": [1,1,1], "radius": 0.1, "material": "Unobtainium"}])")); });
  CHECK(unknown.find("inclusions[0].material") != std::string::npos);
  CHECK(unknown.find("Unobtainium") != std::string::npos);

  const auto radius = parse_message(
      [] { parse_cluster(minimal(R"([{"center": [1,1,1], "radius": -1, "material": "Iron"}])")); });
  CHECK(radius.find("inclusions[0].radius") != std::string::npos);

  const auto center = parse_message(
      [] { parse_cluster(minimal(R"([{"center": [1,1], "radius": 0.1, "material": "Iron"}])")); });
  CHECK(center.find("inclusions[0].center") != std::string::npos);

  CHECK_THROWS_AS(parse_cluster("[1, 2]"), ParseError);
  CHECK_THROWS_AS(parse_cluster(minimal(R"([{"center": [1,1,1], "radius": 0.1, "material": "Iron"}])",
                                        R"("separation_convention": "nope",)")),
                  ParseError);
  CHECK_THROWS_AS(load_cluster("/nonexistent/cluster.json"), Error);
}

TEST_CASE("materials come from the file table first") {
  const auto c = parse_cluster(minimal(R"([{"center": [1,1,1], "radius": 0.1, "material": "Iron"},
      {"center": [2,2,2], "radius": 0.1, "material": "Custom"},
      {"center": [3,1,1], "radius": 0.1, "material": "None"}])",
                                       R"("materials": {"Iron": {"mu_gpa": 10}, "Custom": {"E_gpa": 90, "nu": 0.2}},)"));
  CHECK(c.cloud[0].material.shear() == 10.0);
  CHECK(c.cloud[1].material.shear() == 90 / 2.4);
  CHECK(c.cloud[2].material.is_void());
}

TEST_CASE("geometry violations") {
  const std::string dup = minimal(R"([{"center": [1,1,1], "radius": 0.1, "material": "Iron"},
      {"center": [1,1,1], "radius": 0.1, "material": "Iron"}])");
  try {
    parse_cluster(dup);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::validation);
  }
  const auto loose = parse_cluster(dup, 0.5, false);
  REQUIRE_FALSE(loose.report.violations.empty());
  CHECK(loose.report.violations[0].kind == ViolationKind::overlap);

  // A ratio breach loads with a warning.
  const auto close = parse_cluster(minimal(R"([{"center": [1,1,1], "radius": 0.3, "material": "Iron"},
      {"center": [1.4,1,1], "radius": 0.05, "material": "Iron"}])"));
  CHECK(close.report.geometry_ok());
  CHECK_FALSE(close.report.admissible());

  const auto json = validation_report_json(loose.cloud, loose.report);
  CHECK(json.find("\"overlap\"") != std::string::npos);
  CHECK(json.find("\"admissible\": false") != std::string::npos);
}

TEST_CASE("coefficients CSV round trip") {
  CoefficientSet c;
  c.method = "neumann";
  c.iterations = 9;
  c.residual = 3.25e-17;
  c.vectors = {Vec3(0.1, -1.0 / 3.0, 1e-300), Vec3(-2.5e7, 0.0, 6.02214076e23)};
  std::ostringstream os;
  write_coefficients_csv(os, c);
  std::istringstream is(os.str());
  const auto back = read_coefficients_csv(is);
  CHECK(back.method == "neumann");
  CHECK(back.residual == c.residual);
  REQUIRE(back.size() == 2);
  CHECK(back.vectors[0] == c.vectors[0]);
  CHECK(back.vectors[1] == c.vectors[1]);
  CHECK(os.str().rfind("index,cx,cy,cz,method,residual\n0,0.1,", 0) == 0);

  std::istringstream bad_header("i,x,y,z\n");
  CHECK_THROWS_AS(read_coefficients_csv(bad_header), ParseError);
  std::istringstream bad_number("index,cx,cy,cz,method,residual\n0,1,x,3,direct,0\n");
  try {
    read_coefficients_csv(bad_number);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream gap("index,cx,cy,cz,method,residual\n1,1,2,3,direct,0\n");
  CHECK_THROWS_AS(read_coefficients_csv(gap), ParseError);
  std::istringstream empty("index,cx,cy,cz,method,residual\n");
  CHECK_THROWS_AS(read_coefficients_csv(empty), ParseError);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.0225) == "-0.0225");
  CHECK(format_double(123456.0) == "123456");
  CHECK(format_double(1234567.0) == "1.234567e+06");
  CHECK(format_double(1e-6) == "1e-06");
  CHECK(format_double(1.5e-5) == "0.000015");
  CHECK(format_double(1.5e-6) == "1.5e-06");
  CHECK(format_double(std::nan("")) == "nan");
  auto g = oracle::rng(1);
  std::uniform_real_distribution<double> e(-300, 300);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, e(g)) * (i % 2 ? -1 : 1);
    REQUIRE(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("check report") {
  const auto c = load_cluster(oracle::data_file("table2.json"));
  const auto coeffs = solve_direct(assemble(c.cloud, c.domain, c.background));
  const auto report = run_check(c, coeffs, 50);
  CHECK(report.ok());
  CHECK(report.boundary.has_value());
  CHECK(report.relative_solver_residual <= kSolverResidualTolerance);
  const auto json = check_report_json(report);
  CHECK(json.find("\"ok\": true") != std::string::npos);

  auto broken = coeffs;
  broken.vectors[3] *= 2.0;
  CHECK_FALSE(run_check(c, broken, 50).ok());
}
