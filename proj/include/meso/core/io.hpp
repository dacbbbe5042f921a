#pragma once

// Cluster files (JSON), coefficient CSV and machine-readable reports.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "meso/core/system.hpp"
#include "meso/core/validation.hpp"

namespace meso {

struct LoadedCluster {
  DomainSpec domain;
  Cloud cloud;
  BackgroundField background;
  ValidationReport report;  ///< only ratio warnings survive loading
};

/// Parses a cluster document. Material names resolve against the file's
/// `materials` table first and the built-in table second; "void" and "None"
/// denote voids. Throws ParseError for malformed text or fields and
/// Error(validation) for overlaps or inclusions outside the domain unless
/// `strict` is false, in which case every finding stays in the report.
LoadedCluster parse_cluster(const std::string& text,
                            double ratio_threshold = kDefaultRatioThreshold, bool strict = true);
LoadedCluster load_cluster(const std::string& path,
                           double ratio_threshold = kDefaultRatioThreshold, bool strict = true);

/// Writes a document that parse_cluster reads back bit-identically.
std::string serialize_cluster(const Cloud& cloud, const DomainSpec& domain,
                              const BackgroundField& background);
void save_cluster(const std::string& path, const Cloud& cloud, const DomainSpec& domain,
                  const BackgroundField& background);

/// Header index,cx,cy,cz,method,residual.
void write_coefficients_csv(std::ostream& os, const CoefficientSet& coeffs);
CoefficientSet read_coefficients_csv(std::istream& is);
CoefficientSet load_coefficients(const std::string& path);

std::string validation_report_json(const Cloud& cloud, const ValidationReport& report);

struct CheckReport {
  ResidualReport interfaces;
  std::optional<BoundaryResidual> boundary;
  double solver_residual = 0.0;          ///< recomputed ||(I + T P) C - b||
  double relative_solver_residual = 0.0; ///< divided by ||b||
  bool continuity_ok = false;
  bool residual_ok = false;
  bool ok() const noexcept { return continuity_ok && residual_ok; }
};

inline constexpr double kContinuityTolerance = 1e-12;
inline constexpr double kSolverResidualTolerance = 1e-8;

/// The hard invariants: interface continuity and the solver residual.
CheckReport run_check(const LoadedCluster& cluster, const CoefficientSet& coeffs,
                      std::size_t samples_per_inclusion = kDefaultInterfaceSamples);
std::string check_report_json(const CheckReport& report);

/// Whole-file read; throws Error(io).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace meso
