#include "meso/core/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "meso/core/error.hpp"
#include "meso/core/format.hpp"

namespace meso {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field " + path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) field_error(path, "not finite");
  return x;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

Vec3 point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) field_error(path, "expected [x, y, z]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

Material parse_material(const std::string& name, const json& v, const std::string& path) {
  if (!v.is_object()) field_error(path, "expected an object");
  try {
    if (v.contains("mu_gpa")) {
      const double mu = number(v["mu_gpa"], path + ".mu_gpa");
      if (mu < 0.0) field_error(path + ".mu_gpa", "must be >= 0");
      return mu == 0.0 ? Material::void_material() : Material::from_shear(name, mu);
    }
    return Material::from_elastic(name, number(require(v, "E_gpa", path), path + ".E_gpa"),
                                  number(require(v, "nu", path), path + ".nu"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    field_error(path, e.what());
  }
}

class MaterialTable {
 public:
  explicit MaterialTable(const json& doc) {
    auto it = doc.find("materials");
    if (it == doc.end()) return;
    if (!it->is_object()) field_error("materials", "expected an object");
    for (const auto& [name, value] : it->items()) {
      table_.emplace(name, parse_material(name, value, "materials." + name));
    }
  }

  Material resolve(const std::string& name, const std::string& path) const {
    if (auto it = table_.find(name); it != table_.end()) return it->second;
    if (auto builtin = find_builtin_material(name)) return *builtin;
    field_error(path, "unknown material '" + name + "'");
  }

 private:
  std::map<std::string, Material> table_;
};

std::size_t line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

ordered_json material_json(const Material& m) {
  ordered_json out;
  if (m.youngs() && m.poisson()) {
    out["E_gpa"] = *m.youngs();
    out["nu"] = *m.poisson();
  } else {
    out["mu_gpa"] = m.shear();
  }
  return out;
}

std::string material_ref(const Material& m) { return m.is_void() ? "void" : m.name(); }

double parse_csv_double(const std::string& field, std::size_t line) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("bad number '" + field + "'", line);
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

ordered_json number_or_null(double x) {
  return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "cannot read " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
}

LoadedCluster parse_cluster(const std::string& source, double ratio_threshold, bool strict) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(source, e.byte));
  }
  if (!doc.is_object()) throw ParseError("cluster document must be an object", 1);

  const MaterialTable materials(doc);

  const json& dom = require(doc, "domain", "");
  const std::string type = text(require(dom, "type", "domain"), "domain.type");
  const Material matrix =
      materials.resolve(text(require(dom, "matrix_material", "domain"), "domain.matrix_material"),
                        "domain.matrix_material");
  if (matrix.is_void()) field_error("domain.matrix_material", "matrix cannot be a void");
  std::optional<DomainSpec> domain;
  if (type == "ball") {
    const double radius = number(require(dom, "radius", "domain"), "domain.radius");
    if (!(radius > 0.0)) field_error("domain.radius", "must be positive");
    domain = DomainSpec::ball(radius, matrix);
  } else if (type == "full_space") {
    domain = DomainSpec::full_space(matrix);
  } else {
    field_error("domain.type", "expected \"ball\" or \"full_space\"");
  }

  const json& bg = require(doc, "background", "");
  const std::string bg_type = text(require(bg, "type", "background"), "background.type");
  BackgroundField background;
  if (bg_type == "radial_source") {
    background = RadialSource{number(require(bg, "r_f", "background"), "background.r_f")};
  } else if (bg_type == "linear_x") {
    background = LinearX{};
  } else {
    field_error("background.type", "expected \"radial_source\" or \"linear_x\"");
  }
  try {
    check_compatible(background, *domain);
  } catch (const Error& e) {
    field_error("background", e.what());
  }

  SeparationConvention convention = default_convention(*domain);
  if (auto it = doc.find("separation_convention"); it != doc.end()) {
    const auto name = text(*it, "separation_convention");
    const auto parsed = separation_convention_from_string(name);
    if (!parsed) field_error("separation_convention", "unknown convention '" + name + "'");
    convention = *parsed;
  }

  const json& list = require(doc, "inclusions", "");
  if (!list.is_array()) field_error("inclusions", "expected a list");
  if (list.empty()) field_error("inclusions", "empty inclusion list");
  std::vector<Inclusion> inclusions;
  inclusions.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "inclusions[" + std::to_string(i) + "]";
    const json& item = list[i];
    const Vec3 center = point(require(item, "center", path), path + ".center");
    const double radius = number(require(item, "radius", path), path + ".radius");
    if (!(radius > 0.0)) field_error(path + ".radius", "must be positive");
    const Material material =
        materials.resolve(text(require(item, "material", path), path + ".material"),
                          path + ".material");
    inclusions.push_back({center, radius, material});
  }

  Cloud cloud(std::move(inclusions), *domain, convention);
  ValidationReport report = validate_cloud(cloud, *domain, ratio_threshold);
  if (strict && !report.geometry_ok()) {
    for (const auto& v : report.violations) {
      if (v.kind != ViolationKind::ratio) throw Error(ErrorCode::validation, v.message);
    }
  }
  return {*domain, std::move(cloud), background, std::move(report)};
}

LoadedCluster load_cluster(const std::string& path, double ratio_threshold, bool strict) {
  const std::string source = read_text_file(path);
  try {
    return parse_cluster(source, ratio_threshold, strict);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::string serialize_cluster(const Cloud& cloud, const DomainSpec& domain,
                              const BackgroundField& background) {
  ordered_json doc;
  ordered_json dom;
  dom["type"] = domain.bounded() ? "ball" : "full_space";
  if (domain.bounded()) dom["radius"] = domain.radius();
  dom["matrix_material"] = domain.matrix().name();
  doc["domain"] = dom;

  ordered_json materials = ordered_json::object();
  materials[domain.matrix().name()] = material_json(domain.matrix());
  for (const auto& inc : cloud.inclusions()) {
    if (!inc.material.is_void()) materials[inc.material.name()] = material_json(inc.material);
  }
  doc["materials"] = materials;

  ordered_json bg;
  if (const auto* src = std::get_if<RadialSource>(&background)) {
    bg["type"] = "radial_source";
    bg["r_f"] = src->r_f;
  } else {
    bg["type"] = "linear_x";
  }
  doc["background"] = bg;
  doc["separation_convention"] = to_string(cloud.metrics().convention);

  ordered_json list = ordered_json::array();
  for (const auto& inc : cloud.inclusions()) {
    ordered_json item;
    item["center"] = {inc.center.x(), inc.center.y(), inc.center.z()};
    item["radius"] = inc.radius;
    item["material"] = material_ref(inc.material);
    list.push_back(std::move(item));
  }
  doc["inclusions"] = std::move(list);
  return doc.dump(2) + "\n";
}

void save_cluster(const std::string& path, const Cloud& cloud, const DomainSpec& domain,
                  const BackgroundField& background) {
  write_text_file(path, serialize_cluster(cloud, domain, background));
}

void write_coefficients_csv(std::ostream& os, const CoefficientSet& coeffs) {
  os << "index,cx,cy,cz,method,residual\n";
  const std::string residual = format_double(coeffs.residual);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Vec3& c = coeffs.vectors[j];
    os << j << ',' << format_double(c.x()) << ',' << format_double(c.y()) << ','
       << format_double(c.z()) << ',' << coeffs.method << ',' << residual << '\n';
  }
}

CoefficientSet read_coefficients_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw ParseError("empty coefficients file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,cx,cy,cz,method,residual") {
    throw ParseError("unexpected coefficients header '" + line + "'", 1);
  }
  CoefficientSet out;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw ParseError("expected 6 columns", lineno);
    if (f[0] != std::to_string(out.vectors.size())) {
      throw ParseError("index out of sequence", lineno);
    }
    out.vectors.emplace_back(parse_csv_double(f[1], lineno), parse_csv_double(f[2], lineno),
                             parse_csv_double(f[3], lineno));
    out.method = f[4];
    out.residual = parse_csv_double(f[5], lineno);
  }
  if (out.vectors.empty()) throw ParseError("no coefficient rows", lineno);
  return out;
}

CoefficientSet load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  try {
    return read_coefficients_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::string validation_report_json(const Cloud& cloud, const ValidationReport& report) {
  ordered_json doc;
  doc["count"] = cloud.size();
  doc["epsilon"] = cloud.epsilon();
  doc["d"] = number_or_null(cloud.d());
  doc["separation_convention"] = to_string(cloud.metrics().convention);
  doc["eps_over_d"] = report.eps_over_d;
  doc["ratio_threshold"] = report.ratio_threshold;
  doc["admissible"] = report.admissible();
  ordered_json list = ordered_json::array();
  for (const auto& v : report.violations) {
    ordered_json item;
    switch (v.kind) {
      case ViolationKind::overlap:
        item["kind"] = "overlap";
        item["pair"] = {v.first, v.second};
        break;
      case ViolationKind::out_of_domain:
        item["kind"] = "out_of_domain";
        item["inclusion"] = v.first;
        break;
      case ViolationKind::ratio:
        item["kind"] = "ratio";
        break;
    }
    item["message"] = v.message;
    list.push_back(std::move(item));
  }
  doc["violations"] = std::move(list);
  return doc.dump(2) + "\n";
}

CheckReport run_check(const LoadedCluster& cluster, const CoefficientSet& coeffs,
                      std::size_t samples_per_inclusion) {
  const Approximation approx(cluster.cloud, coeffs, cluster.domain, cluster.background);
  CheckReport report;
  report.interfaces = interface_residuals(approx, samples_per_inclusion);
  if (cluster.domain.bounded()) report.boundary = boundary_residual(approx);
  const auto system = assemble(cluster.cloud, cluster.domain, cluster.background);
  report.solver_residual = system.residual_norm(coeffs.stacked());
  const double bnorm = system.rhs().norm();
  report.relative_solver_residual = bnorm > 0.0 ? report.solver_residual / bnorm : report.solver_residual;
  report.continuity_ok = report.interfaces.relative_continuity() <= kContinuityTolerance;
  report.residual_ok = report.relative_solver_residual <= kSolverResidualTolerance;
  return report;
}

std::string check_report_json(const CheckReport& report) {
  ordered_json doc;
  const auto& r = report.interfaces;
  doc["ok"] = report.ok();
  doc["samples_per_inclusion"] = r.samples_per_inclusion;
  doc["continuity_sup"] = r.max_continuity();
  doc["continuity_relative"] = r.relative_continuity();
  doc["continuity_ok"] = report.continuity_ok;
  doc["flux_jump_sup"] = r.max_flux_jump();
  doc["flux_jump_relative"] = r.relative_flux_jump();
  doc["solver_residual"] = report.solver_residual;
  doc["solver_residual_relative"] = report.relative_solver_residual;
  doc["solver_residual_ok"] = report.residual_ok;
  if (report.boundary) {
    doc["boundary_sup"] = report.boundary->sup;
    doc["boundary_envelope"] = report.boundary->envelope;
    doc["boundary_samples"] = report.boundary->samples;
  } else {
    doc["boundary_sup"] = nullptr;
  }
  doc["per_inclusion"] = ordered_json::array();
  for (std::size_t j = 0; j < r.continuity_sup.size(); ++j) {
    doc["per_inclusion"].push_back(
        {{"index", j}, {"continuity_sup", r.continuity_sup[j]}, {"flux_jump_sup", r.flux_jump_sup[j]}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace meso
