#pragma once

#include "varstab/model.hpp"
#include "varstab/pointbased.hpp"
#include "varstab/prox.hpp"
#include "varstab/pvc.hpp"
#include "varstab/solver.hpp"
#include "varstab/stability.hpp"

#include <optional>
#include <string>

namespace varstab {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Versioned JSON instance document with top-level keys `version`,
// `dims {n,l,m}`, `base {c,Q,B,D}`, `potential {kind, ...}`, and
// `reference {x,p,q,v}`. Matrices are row-major arrays of arrays; missing
// B/D default to zero; box bounds use null for +-infinity (the strings
// "inf"/"-inf" are also accepted). Schema violations name the field.
PvsInstance parse_instance(const std::string& json_text);
PvsInstance load_instance(const std::string& path);
std::string instance_to_json(const PvsInstance& inst);
void save_instance(const PvsInstance& inst, const std::string& path);

// Every report embeds its manifest; wall_clock_ms is the only field that
// varies between identical runs.
struct RunManifest {
  std::string command;
  std::string instance_path;
  std::uint64_t seed = 42;
  double eta = 1e-2;
  int samples = 1000;
  double tol = 1e-10;
  int jobs = 1;
  std::string version = kArtifactVersion;
  double wall_clock_ms = 0.0;
};

std::string report_solve(const RunManifest& m, const SolveResult& r);
std::string report_failure_probe(const RunManifest& m, const FailureProbe& r);
std::string report_certificate(const RunManifest& m, const CertificateReport& r);
std::string report_moduli(const RunManifest& m, const StabilityReport& lipschitz,
                          const std::optional<StabilityReport>& holder,
                          const std::optional<AubinReport>& aubin);
std::string report_threshold(const RunManifest& m,
                             const ThresholdEstimate& sampled,
                             const std::optional<ThresholdEstimate>& pointbased,
                             const PotentialConstants& constants);

struct ConeListing {
  PolyCone tangent;
  PolyCone normal;
  PolyCone critical;
  PolyCone difference_span;
  PolyCone limit;  // outer limit of critical cones
};
std::string report_cones(const RunManifest& m, const ConeListing& cones);

std::string report_pvi(const RunManifest& m, const PviPdReport& closure,
                       const PviPdReport& critical_span,
                       const std::optional<StabilityReport>& stability);

}  // namespace varstab
