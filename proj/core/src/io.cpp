#include "varstab/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace varstab {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError("instance field '" + field + "': " + what);
}

double parse_bound(const Json& j, const std::string& field,
                   double null_value) {
  if (j.is_null()) return null_value;  // unbounded on this side
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    fail(field, "expected a number, null, or 'inf'/'-inf'");
  }
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

Vector parse_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array");
  Vector v(int(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_number())
      v[int(i)] = j[i].get<double>();
    else
      fail(field, "expected numeric entries");
  }
  return v;
}

Vector parse_bound_vector(const Json& j, const std::string& field,
                          double null_value) {
  if (!j.is_array()) fail(field, "expected an array");
  Vector v(int(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[int(i)] = parse_bound(j[i], field, null_value);
  return v;
}

Matrix parse_matrix(const Json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of rows");
  const int rows = int(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) fail(field, "expected rows to be arrays");
  const int cols = int(j[0].size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[std::size_t(r)].is_array() || int(j[std::size_t(r)].size()) != cols)
      fail(field, "ragged rows");
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[std::size_t(r)][std::size_t(c)];
      if (!e.is_number()) fail(field, "expected numeric entries");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json bound_json(const Vector& v, double sign) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) {
    if (std::isinf(v[i]))
      out.push_back(sign > 0 ? Json("inf") : Json("-inf"));
    else
      out.push_back(v[i]);
  }
  return out;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

// Finite numbers pass through; infinities become strings so the document
// stays valid JSON.
Json num(double x) {
  if (std::isinf(x)) return x > 0 ? Json("inf") : Json("-inf");
  if (std::isnan(x)) return Json("nan");
  return Json(x);
}

PotentialSpec parse_potential(const Json& j, const Dims& dims);

std::variant<IndicatorPolyhedron, IndicatorAffineQvi, IndicatorBox>
parse_inner_indicator(const Json& j, const Dims& dims) {
  const PotentialSpec inner = parse_potential(j, dims);
  if (const auto* p = std::get_if<IndicatorPolyhedron>(&inner)) return *p;
  if (const auto* p = std::get_if<IndicatorAffineQvi>(&inner)) return *p;
  if (const auto* p = std::get_if<IndicatorBox>(&inner)) return *p;
  fail("potential.inner", "must be an indicator variant");
}

PotentialSpec parse_potential(const Json& j, const Dims& dims) {
  if (!j.is_object() || !j.contains("kind"))
    fail("potential.kind", "missing");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "indicator_polyhedron") {
    if (!j.contains("G") || !j.contains("h")) fail("potential.G/h", "missing");
    return IndicatorPolyhedron{parse_matrix(j["G"], "potential.G"),
                               parse_vector(j["h"], "potential.h")};
  }
  if (kind == "indicator_affine_qvi") {
    if (!j.contains("A")) fail("potential.A", "missing");
    return IndicatorAffineQvi{parse_matrix(j["A"], "potential.A")};
  }
  if (kind == "indicator_box") {
    if (!j.contains("lower") || !j.contains("upper"))
      fail("potential.lower/upper", "missing");
    Vector lo = parse_bound_vector(j["lower"], "potential.lower", -kInf);
    Vector hi = parse_bound_vector(j["upper"], "potential.upper", kInf);
    Matrix shift(0, 0);
    if (j.contains("shift") && !j["shift"].is_null())
      shift = parse_matrix(j["shift"], "potential.shift");
    return IndicatorBox{lo, hi, shift};
  }
  if (kind == "quadratic_plus_indicator") {
    if (!j.contains("W") || !j.contains("inner"))
      fail("potential.W/inner", "missing");
    return QuadraticPlusIndicator{parse_matrix(j["W"], "potential.W"),
                                  parse_inner_indicator(j["inner"], dims)};
  }
  if (kind == "smooth_ineq") {
    if (!j.contains("constraints")) fail("potential.constraints", "missing");
    SmoothIneq pot;
    pot.dim = dims.n;
    for (const auto& c : j["constraints"]) {
      SmoothIneqConstraint sc;
      sc.a = c.contains("A") && !c["A"].is_null()
                 ? parse_matrix(c["A"], "potential.constraints.A")
                 : Matrix(0, 0);
      if (!c.contains("b")) fail("potential.constraints.b", "missing");
      sc.b = parse_vector(c["b"], "potential.constraints.b");
      sc.g = c.contains("g") && !c["g"].is_null()
                 ? parse_vector(c["g"], "potential.constraints.g")
                 : Vector::Zero(dims.l);
      sc.d = c.contains("d") ? c["d"].get<double>() : 0.0;
      pot.constraints.push_back(std::move(sc));
    }
    return pot;
  }
  fail("potential.kind", "unknown kind '" + kind + "'");
}

Json potential_json(const PotentialSpec& pot) {
  Json j;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, IndicatorPolyhedron>) {
          j["kind"] = "indicator_polyhedron";
          j["G"] = matrix_json(g.g);
          j["h"] = vector_json(g.h);
        } else if constexpr (std::is_same_v<T, IndicatorAffineQvi>) {
          j["kind"] = "indicator_affine_qvi";
          j["A"] = matrix_json(g.a);
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          j["kind"] = "indicator_box";
          j["lower"] = bound_json(g.lower, -1.0);
          j["upper"] = bound_json(g.upper, 1.0);
          if (g.shift.size() > 0) j["shift"] = matrix_json(g.shift);
        } else if constexpr (std::is_same_v<T, QuadraticPlusIndicator>) {
          j["kind"] = "quadratic_plus_indicator";
          j["W"] = matrix_json(g.w);
          j["inner"] = std::visit(
              [&](const auto& in) { return potential_json(PotentialSpec(in)); },
              g.inner);
        } else {
          j["kind"] = "smooth_ineq";
          Json cs = Json::array();
          for (const auto& c : g.constraints) {
            Json cj;
            if (c.a.size() > 0) cj["A"] = matrix_json(c.a);
            cj["b"] = vector_json(c.b);
            cj["g"] = vector_json(c.g);
            cj["d"] = c.d;
            cs.push_back(cj);
          }
          j["constraints"] = cs;
        }
      },
      pot);
  return j;
}

Json manifest_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["instance"] = m.instance_path;
  j["seed"] = m.seed;
  j["eta"] = m.eta;
  j["samples"] = m.samples;
  j["tol"] = m.tol;
  j["jobs"] = m.jobs;
  j["version"] = m.version;
  j["wall_clock_ms"] = m.wall_clock_ms;
  return j;
}

Json cone_json(const PolyCone& k) {
  Json j;
  j["inequalities"] = matrix_json(k.m);
  j["rays"] = matrix_json(k.rays.transpose());
  j["lineality"] = matrix_json(k.lineality.transpose());
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

PvsInstance parse_instance(const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!j.contains("version")) fail("version", "missing");
  if (j["version"].get<int>() != 1) fail("version", "unsupported version");
  if (!j.contains("dims")) fail("dims", "missing");
  Dims dims;
  dims.n = j["dims"].value("n", -1);
  dims.l = j["dims"].value("l", -1);
  dims.m = j["dims"].value("m", -1);
  if (dims.n <= 0) fail("dims.n", "must be positive");
  if (dims.l < 0 || dims.m < 0) fail("dims.l/m", "must be nonnegative");

  if (!j.contains("base")) fail("base", "missing");
  const auto& jb = j["base"];
  BaseMapSpec base;
  base.c = jb.contains("c") ? parse_vector(jb["c"], "base.c")
                            : Vector(Vector::Zero(dims.n));
  if (!jb.contains("Q")) fail("base.Q", "missing");
  base.q = parse_matrix(jb["Q"], "base.Q");
  base.b = jb.contains("B") ? parse_matrix(jb["B"], "base.B")
                            : Matrix(Matrix::Zero(dims.n, dims.l));
  base.d = jb.contains("D") ? parse_matrix(jb["D"], "base.D")
                            : Matrix(Matrix::Zero(dims.n, dims.m));
  if (base.b.size() == 0) base.b = Matrix::Zero(dims.n, dims.l);
  if (base.d.size() == 0) base.d = Matrix::Zero(dims.n, dims.m);

  if (!j.contains("potential")) fail("potential", "missing");
  PotentialSpec pot = parse_potential(j["potential"], dims);

  if (!j.contains("reference")) fail("reference", "missing");
  const auto& jr = j["reference"];
  ReferencePoint ref;
  for (const char* key : {"x", "p", "q", "v"})
    if (!jr.contains(key)) fail(std::string("reference.") + key, "missing");
  ref.x = parse_vector(jr["x"], "reference.x");
  ref.p = parse_vector(jr["p"], "reference.p");
  ref.q = parse_vector(jr["q"], "reference.q");
  ref.v = parse_vector(jr["v"], "reference.v");

  return PvsInstance(dims, std::move(base), std::move(pot), std::move(ref));
}

PvsInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string instance_to_json(const PvsInstance& inst) {
  Json j;
  j["version"] = 1;
  j["dims"] = {{"n", inst.dims().n}, {"l", inst.dims().l}, {"m", inst.dims().m}};
  Json jb;
  jb["c"] = vector_json(inst.base().c);
  jb["Q"] = matrix_json(inst.base().q);
  jb["B"] = matrix_json(inst.base().b);
  jb["D"] = matrix_json(inst.base().d);
  j["base"] = jb;
  j["potential"] = potential_json(inst.potential());
  Json jr;
  jr["x"] = vector_json(inst.reference().x);
  jr["p"] = vector_json(inst.reference().p);
  jr["q"] = vector_json(inst.reference().q);
  jr["v"] = vector_json(inst.reference().v);
  j["reference"] = jr;
  return dump(j);
}

void save_instance(const PvsInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file: " + path);
  out << instance_to_json(inst);
}

std::string report_solve(const RunManifest& m, const SolveResult& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "solve";
  Json s;
  s["x"] = vector_json(r.x);
  s["converged"] = r.converged;
  s["iterations"] = r.iterations;
  s["measured_rate"] = num(r.measured_rate);
  s["alpha_theoretical"] = num(r.alpha_theoretical);
  s["fixed_point_residual"] = num(r.fixed_point_residual);
  s["inclusion_residual"] = num(r.inclusion_residual);
  s["super_contractive"] = r.super_contractive;
  s["lambda"] = num(r.lambda);
  s["r"] = num(r.r);
  s["sigma"] = num(r.sigma);
  s["L"] = num(r.big_l);
  s["kappa"] = num(r.kappa);
  s["threshold"] = num(r.threshold);
  j["result"] = s;
  return dump(j);
}

std::string report_failure_probe(const RunManifest& m, const FailureProbe& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "failure_probe";
  Json s;
  s["sigma"] = num(r.sigma);
  s["threshold"] = num(r.threshold);
  s["refused"] = r.refused;
  s["solvability_known"] = r.solvability_known;
  s["empty"] = r.empty;
  s["witness_coordinate"] = r.witness_coordinate;
  s["note"] = r.note;
  j["result"] = s;
  return dump(j);
}

std::string report_certificate(const RunManifest& m, const CertificateReport& r) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "certificate";
  Json s;
  s["fully_stable"] = r.fully_stable;
  s["mfcq"] = {{"holds", r.mfcq.holds},
               {"vacuous", r.mfcq.vacuous},
               {"margin", num(r.mfcq.margin)},
               {"witness", vector_json(r.mfcq.witness)}};
  s["licq"] = {{"holds", r.licq.holds},
               {"rank", r.licq.rank},
               {"active_count", r.licq.active_count}};
  Json crcq;
  crcq["holds"] = r.crcq.holds;
  crcq["samples"] = r.crcq.samples;
  if (!r.crcq.holds) {
    Json sub = Json::array();
    for (int i : r.crcq.failing_subset) sub.push_back(i);
    crcq["failing_subset"] = sub;
  }
  s["crcq"] = crcq;
  Json lam;
  lam["empty"] = r.lambda.empty;
  lam["bounded"] = r.lambda.bounded;
  lam["max_residual"] = num(r.lambda.max_residual);
  Json verts = Json::array();
  for (const auto& v : r.lambda.vertices) verts.push_back(vector_json(v));
  lam["vertices"] = verts;
  s["multipliers"] = lam;
  Json gs;
  gs["holds"] = r.gssosc.holds;
  gs["min_curvature"] = num(r.gssosc.min_curvature);
  gs["multipliers_checked"] = r.gssosc.multipliers_checked;
  if (!r.gssosc.holds) {
    gs["failing_lambda"] = vector_json(r.gssosc.failing_lambda);
    gs["failing_u"] = vector_json(r.gssosc.failing_u);
  }
  s["gssosc"] = gs;
  Json gu;
  gu["holds"] = r.gusosc.holds;
  gu["ell_best"] = num(r.gusosc.ell_best);
  gu["vacuous"] = r.gusosc.vacuous;
  gu["samples"] = r.gusosc.samples;
  gu["accepted"] = r.gusosc.accepted;
  s["gusosc"] = gu;
  Json scoc = Json::array();
  for (const auto& probe : r.scoc) {
    Json pj;
    pj["any_zero"] = probe.any_zero;
    Json dets = Json::array();
    for (double d : probe.determinants) dets.push_back(num(d));
    pj["determinants"] = dets;
    Json subs = Json::array();
    for (const auto& sub : probe.subsets) {
      Json sj = Json::array();
      for (int i : sub) sj.push_back(i);
      subs.push_back(sj);
    }
    pj["subsets"] = subs;
    scoc.push_back(pj);
  }
  s["scoc"] = scoc;
  s["licq_route_applicable"] = r.licq_route_applicable;
  s["licq_route_verdict"] = r.licq_route_verdict;
  s["route_disagreement"] = r.route_disagreement;
  j["result"] = s;
  return dump(j);
}

namespace {

Json stability_json(const StabilityReport& r) {
  Json s;
  s["holder"] = r.holder;
  s["kappa"] = num(r.kappa);
  s["r"] = num(r.r);
  s["ell_estimate"] = num(r.ell_estimate);
  s["canonical_worst"] = num(r.canonical_worst);
  s["canonical_pass"] = r.canonical_pass;
  s["pairs"] = r.pairs;
  s["canonical_pairs"] = r.canonical_pairs;
  s["form_disagreements"] = r.form_disagreements;
  s["backend"] = r.backend;
  s["theory_valid"] = r.theory_valid;
  if (r.theory_valid) {
    Json t;
    t["kappa0"] = num(r.theory.kappa0);
    t["kappa"] = num(r.theory.kappa);
    t["alpha"] = num(r.theory.alpha);
    t["ell1"] = num(r.theory.ell1);
    t["ell2"] = num(r.theory.ell2);
    t["gamma1_holder"] = num(r.theory.gamma1_holder);
    t["gamma2_holder"] = num(r.theory.gamma2_holder);
    t["holder_prefactor_valid"] = r.theory.holder_prefactor_valid;
    t["gamma1_lipschitz"] = num(r.theory.gamma1_lipschitz);
    t["gamma2_lipschitz"] = num(r.theory.gamma2_lipschitz);
    t["lambda"] = num(r.theory.lambda);
    t["rho"] = num(r.theory.rho);
    t["ell_p"] = num(r.theory.ell_p);
    s["theory"] = t;
    s["theory_bound_p"] = num(r.theory_bound_p);
    s["theory_bound_q"] = num(r.theory_bound_q);
  }
  return s;
}

}  // namespace

std::string report_moduli(const RunManifest& m, const StabilityReport& lipschitz,
                          const std::optional<StabilityReport>& holder,
                          const std::optional<AubinReport>& aubin) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "moduli";
  j["lipschitz"] = stability_json(lipschitz);
  if (holder) j["holder"] = stability_json(*holder);
  if (aubin) {
    Json a;
    a["ell_estimate"] = num(aubin->ell_estimate);
    a["pairs"] = aubin->pairs;
    a["max_theta"] = num(aubin->max_theta);
    j["aubin"] = a;
  }
  return dump(j);
}

namespace {

Json threshold_json(const ThresholdEstimate& t) {
  Json s;
  switch (t.method) {
    case ThresholdEstimate::Method::kHypomonotoneSampling:
      s["method"] = "hypomonotone-sampling";
      break;
    case ThresholdEstimate::Method::kPointbasedCoderivative:
      s["method"] = "pointbased-coderivative";
      break;
    case ThresholdEstimate::Method::kClosedForm:
      s["method"] = "closed-form";
      break;
  }
  s["r_est"] = num(t.r_est);
  s["eta"] = num(t.eta);
  s["samples"] = t.samples;
  s["usable_pairs"] = t.usable_pairs;
  s["tau"] = num(t.tau);
  return s;
}

}  // namespace

std::string report_threshold(const RunManifest& m,
                             const ThresholdEstimate& sampled,
                             const std::optional<ThresholdEstimate>& pointbased,
                             const PotentialConstants& constants) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "threshold";
  j["sampled"] = threshold_json(sampled);
  if (pointbased) j["pointbased"] = threshold_json(*pointbased);
  Json c;
  c["threshold"] = num(constants.threshold);
  c["r"] = num(constants.r);
  c["provenance"] =
      constants.provenance == PotentialConstants::Provenance::kClosedForm
          ? "closed-form"
          : "estimated";
  j["constants"] = c;
  return dump(j);
}

std::string report_cones(const RunManifest& m, const ConeListing& cones) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "cones";
  j["tangent"] = cone_json(cones.tangent);
  j["normal"] = cone_json(cones.normal);
  j["critical"] = cone_json(cones.critical);
  j["difference_span"] = cone_json(cones.difference_span);
  j["limit"] = cone_json(cones.limit);
  return dump(j);
}

std::string report_pvi(const RunManifest& m, const PviPdReport& closure,
                       const PviPdReport& critical_span,
                       const std::optional<StabilityReport>& stability) {
  Json j;
  j["manifest"] = manifest_json(m);
  j["kind"] = "pvi";
  auto pd = [](const PviPdReport& r) {
    Json s;
    s["holds"] = r.holds;
    s["min_eigenvalue"] = num(r.min_eigenvalue);
    s["subspace_dim"] = r.subspace_dim;
    return s;
  };
  j["closure_5_19"] = pd(closure);
  j["critical_span_5_20"] = pd(critical_span);
  // in finite dimensions over polyhedral sets the two tests and full
  // stability are claimed equivalent; disagreement between them is flagged
  j["variants_agree"] = closure.holds == critical_span.holds;
  if (stability) j["stability"] = stability_json(*stability);
  return dump(j);
}

}  // namespace varstab
