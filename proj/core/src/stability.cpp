#include "varstab/stability.hpp"

#include "varstab/prox.hpp"
#include "varstab/qp.hpp"
#include "varstab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace varstab {

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || count < 4) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  std::atomic<int> next{0};
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace

TheoreticalModuli theoretical_moduli(double sigma, double big_l, double r,
                                     double lambda, double rho, double eta,
                                     double ell_p) {
  if (!(sigma > r))
    throw ContractionRegimeError("theoretical_moduli: sigma <= r");
  TheoreticalModuli m;
  m.sigma = sigma;
  m.big_l = big_l;
  m.r = r;
  m.lambda = lambda;
  m.rho = rho;
  m.eta = eta;
  m.ell_p = ell_p;
  m.kappa0 = 1.0 - lambda * r;
  m.kappa = sigma - r;
  m.alpha = contraction_factor(lambda, sigma, big_l, r).alpha;
  m.ell1 = 3.0 + std::sqrt(9.0 + 4.0 * m.kappa0);
  m.ell2 = 2.0 * std::sqrt(2.0 * (2.0 * rho + lambda) * m.kappa0);

  const double denom = 1.0 - lambda * r;
  const double rad_lip = 1.0 + lambda * lambda * big_l * big_l - 2.0 * lambda * sigma;
  const double pref_lip = 1.0 - std::sqrt(std::max(rad_lip, 0.0)) / denom;
  if (!(pref_lip > 0))
    throw NumericsError(
        "theoretical_moduli: Lipschitz prefactor denominator <= 0 "
        "(non-contraction)");
  m.gamma1_lipschitz = (lambda * big_l / denom + ell_p) / pref_lip;
  m.gamma2_lipschitz = (lambda * big_l / denom) / pref_lip;

  const double rad_hol = 1.0 + lambda * lambda * big_l * big_l - 2.0 * lambda * m.kappa;
  const double pref_hol = 1.0 - std::sqrt(std::max(rad_hol, 0.0)) / denom;
  m.holder_prefactor_valid = pref_hol > 0;
  if (m.holder_prefactor_valid) {
    m.gamma1_holder =
        (lambda * big_l * std::sqrt(2.0 * eta) / denom + ell_p) / pref_hol;
    m.gamma2_holder = (lambda * big_l / denom) / pref_hol;
  }
  return m;
}

namespace {

StabilityReport verify_full_stability(const PvsInstance& inst, bool holder,
                                      const SampleConfig& cfg,
                                      std::optional<double> r_in,
                                      std::optional<double> kappa_override) {
  StabilityReport rep;
  rep.holder = holder;
  rep.cfg = cfg;

  const double sigma = inst.strong_monotonicity_modulus();
  const auto constants =
      potential_constants(inst.potential(), inst.reference().x,
                          inst.reference().p, inst.v_hat(), sigma);
  rep.r = r_in.value_or(constants.r);
  rep.kappa = kappa_override.value_or(sigma - rep.r);
  if (!(rep.kappa > 0))
    throw ContractionRegimeError(
        "verify_full_stability: kappa = sigma - r is not positive");

  const bool contraction_ok = sigma > rep.r;
  SolverConfig scfg;
  scfg.r = rep.r;
  const double loc_radius = std::max(10.0 * cfg.eta, 0.1);
  std::function<Vector(const Vector&, const Vector&, const Vector&)> solve_at;
  if (contraction_ok) {
    rep.backend = "contraction";
    solve_at = [&, scfg](const Vector& v, const Vector& p, const Vector& q) {
      return solve(inst, v, p, q, scfg).x;
    };
  } else if (potential_is_polyhedral(inst.potential())) {
    rep.backend = "enumeration";
    solve_at = [&, loc_radius](const Vector& v, const Vector& p, const Vector& q) {
      const auto sols =
          enumerate_solutions(inst, v, p, q, inst.reference().x, loc_radius);
      if (sols.size() != 1)
        throw NumericsError(
            "verify_full_stability: localization is not single-valued in the "
            "ball");
      return sols.front();
    };
  } else {
    throw ContractionRegimeError(
        "verify_full_stability: no applicable solve backend (sigma <= r and "
        "the potential is not polyhedral)");
  }

  if (contraction_ok) {
    const double lambda = select_lambda(
        sigma, inst.lipschitz_modulus().concatenated, rep.r);
    try {
      rep.theory =
          theoretical_moduli(sigma, inst.lipschitz_modulus().concatenated,
                             rep.r, lambda, loc_radius, cfg.eta);
      rep.theory_valid = true;
      rep.theory_bound_q = 2.0 * rep.kappa * (holder ? rep.theory.gamma2_holder
                                                     : rep.theory.gamma2_lipschitz);
      rep.theory_bound_p = 2.0 * rep.kappa * (holder ? rep.theory.gamma1_holder
                                                     : rep.theory.gamma1_lipschitz);
    } catch (const Error&) {
      rep.theory_valid = false;
    }
  }

  const auto& ref = inst.reference();
  const int n = inst.dims().n, l = inst.dims().l, m = inst.dims().m;

  struct Pair {
    Vector v1, p1, q1, v2, p2, q2;
    bool canonical;
  };
  std::vector<Pair> pairs(std::size_t(cfg.count));
  for (int i = 0; i < cfg.count; ++i) {
    Rng rng = Rng::substream(cfg.seed, std::uint64_t(i));
    Pair pr;
    pr.v1 = ref.v + rng.ball(n, cfg.eta);
    pr.p1 = ref.p + rng.ball(l, cfg.eta);
    pr.q1 = ref.q + rng.ball(m, cfg.eta);
    pr.v2 = ref.v + rng.ball(n, cfg.eta);
    pr.canonical = (i % 5 == 4);
    if (pr.canonical) {
      pr.p2 = pr.p1;
      pr.q2 = pr.q1;
    } else {
      pr.p2 = ref.p + rng.ball(l, cfg.eta);
      pr.q2 = ref.q + rng.ball(m, cfg.eta);
    }
    pairs[std::size_t(i)] = std::move(pr);
  }

  struct Eval {
    double ell_pair = 0.0;
    double canonical_excess = -kInf;
    bool canonical = false;
    bool norm_ok = false, inner_ok = false;
  };
  std::vector<Eval> evals(pairs.size());
  parallel_for(int(pairs.size()), cfg.jobs, [&](int i) {
    const auto& pr = pairs[std::size_t(i)];
    const Vector x1 = solve_at(pr.v1, pr.p1, pr.q1);
    const Vector x2 = solve_at(pr.v2, pr.p2, pr.q2);
    const Vector dv = pr.v1 - pr.v2;
    const Vector dx = x1 - x2;
    const double dp = (pr.p1 - pr.p2).norm();
    const double dq = (pr.q1 - pr.q2).norm();
    const double metric = holder ? std::sqrt(dp) + dq : dp + dq;
    const double lhs = (dv - 2.0 * rep.kappa * dx).norm();
    Eval e;
    e.canonical = pr.canonical || metric <= 1e-12;
    if (e.canonical) {
      e.canonical_excess = lhs - dv.norm();
      e.norm_ok = lhs <= dv.norm() + 1e-7;
      e.inner_ok =
          dv.dot(dx) >= rep.kappa * dx.squaredNorm() - 1e-7 * std::max(1.0, dv.norm());
    } else {
      e.ell_pair = std::max(0.0, (lhs - dv.norm()) / metric);
    }
    evals[std::size_t(i)] = e;
  });

  for (const auto& e : evals) {
    if (e.canonical) {
      ++rep.canonical_pairs;
      rep.canonical_worst = std::max(rep.canonical_worst, e.canonical_excess);
      if (e.norm_ok != e.inner_ok) ++rep.form_disagreements;
    } else {
      rep.ell_estimate = std::max(rep.ell_estimate, e.ell_pair);
    }
    ++rep.pairs;
  }
  rep.canonical_pass = rep.canonical_worst <= 1e-7;
  return rep;
}

}  // namespace

StabilityReport verify_lipschitz_full_stability(const PvsInstance& inst,
                                                const SampleConfig& cfg,
                                                std::optional<double> r_in,
                                                std::optional<double> kappa_override) {
  return verify_full_stability(inst, false, cfg, r_in, kappa_override);
}

StabilityReport verify_holder_full_stability(const PvsInstance& inst,
                                             const SampleConfig& cfg,
                                             std::optional<double> r_in,
                                             std::optional<double> kappa_override) {
  return verify_full_stability(inst, true, cfg, r_in, kappa_override);
}

ProxHausdorffReport verify_prox_hausdorff_estimate(const PvsInstance& inst,
                                                   const SampleConfig& cfg) {
  if (!potential_is_polyhedral(inst.potential()) ||
      std::holds_alternative<QuadraticPlusIndicator>(inst.potential()))
    throw ValidationError(
        "verify_prox_hausdorff_estimate: requires an indicator-class "
        "potential");
  if (!potential_depends_on_p(inst.potential()))
    throw ValidationError(
        "verify_prox_hausdorff_estimate: the set does not move with p");

  ProxHausdorffReport rep;
  rep.cfg = cfg;
  rep.lambda = 1.0;  // projector case
  rep.r = 0.0;       // convex indicator: threshold zero
  rep.kappa0 = 1.0 - rep.lambda * rep.r;

  const auto& ref = inst.reference();
  const Vector v_tilde = rep.lambda * inst.v_hat() + ref.x;
  const int n = inst.dims().n, l = inst.dims().l;

  struct Sample {
    Vector v, p1, p2, x1, x2;
    double theta;
  };
  std::vector<Sample> samples(std::size_t(cfg.count));
  const double window =
      std::max(1.0, 2.0 * ref.x.lpNorm<Eigen::Infinity>()) + 10.0 * cfg.eta;
  parallel_for(cfg.count, cfg.jobs, [&](int i) {
    Rng rng = Rng::substream(cfg.seed, std::uint64_t(i));
    Sample s;
    s.v = v_tilde + rng.ball(n, cfg.eta);
    s.p1 = ref.p + rng.ball(l, cfg.eta);
    s.p2 = ref.p + rng.ball(l, cfg.eta);
    s.x1 = prox_map(inst.potential(), {rep.lambda, s.v, s.p1});
    s.x2 = prox_map(inst.potential(), {rep.lambda, s.v, s.p2});
    const auto h =
        hausdorff_local(potential_domain(inst.potential(), s.p1),
                        potential_domain(inst.potential(), s.p2), ref.x, window);
    s.theta = h.theta;
    samples[std::size_t(i)] = std::move(s);
  });

  // measured localization radius feeds ell2
  for (const auto& s : samples) {
    rep.rho = std::max({rep.rho, (s.v - v_tilde).norm(), (s.x1 - ref.x).norm(),
                        (s.x2 - ref.x).norm()});
    rep.max_theta = std::max(rep.max_theta, s.theta);
  }
  rep.ell1 = 3.0 + std::sqrt(9.0 + 4.0 * rep.kappa0);
  rep.ell2 = 2.0 * std::sqrt(2.0 * (2.0 * rep.rho + rep.lambda) * rep.kappa0);

  for (const auto& s : samples) {
    const double bound = (rep.ell1 * s.theta + rep.ell2 * std::sqrt(s.theta)) /
                         (2.0 * rep.kappa0);
    const double margin = bound - (s.x1 - s.x2).norm();
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-9) ++rep.violations;
    ++rep.samples;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

UsogcReport verify_usogc(const PotentialSpec& g, const Vector& x_bar,
                         const Vector& p_bar, const Vector& v_hat, double ell,
                         const SampleConfig& cfg) {
  UsogcReport rep;
  rep.pass = true;
  rep.worst_violation = 0.0;
  const auto graph = sample_subdifferential_graph(
      g, x_bar, p_bar, v_hat, cfg.eta, cfg.count, cfg.seed,
      potential_depends_on_p(g));
  const int n = int(x_bar.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& s = graph[i];
    Rng rng = Rng::substream(cfg.seed ^ 0x517cc1b727220a95ULL, std::uint64_t(i));
    const Vector x_raw = x_bar + rng.ball(n, cfg.eta);
    const double hu = potential_value(g, s.x, s.p);
    if (!std::isfinite(hu)) continue;
    const double hx = potential_value(g, x_raw, s.p);
    if (!std::isfinite(hx)) continue;  // inequality holds trivially off-domain
    const double growth = hu + s.v.dot(x_raw - s.x) +
                          0.5 * ell * (x_raw - s.x).squaredNorm();
    const double violation = growth - hx;
    ++rep.checks;
    if (violation > tol::kResidual && violation > rep.worst_violation) {
      rep.worst_violation = violation;
      rep.pass = false;
      rep.witness_x = x_raw;
      rep.witness_u = s.x;
      rep.witness_v = s.v;
    }
  }
  return rep;
}

AubinReport aubin_modulus_estimate(const PotentialSpec& g, const Vector& x_bar,
                                   const Vector& p_bar, const SampleConfig& cfg) {
  AubinReport rep;
  if (!potential_depends_on_p(g)) {
    rep.pairs = cfg.count;
    return rep;  // constant mapping: modulus zero
  }
  const double window =
      std::max(1.0, 2.0 * x_bar.lpNorm<Eigen::Infinity>()) + 10.0 * cfg.eta;
  const int l = int(p_bar.size());
  std::vector<double> ratios(std::size_t(cfg.count), 0.0);
  std::vector<double> thetas(std::size_t(cfg.count), 0.0);
  parallel_for(cfg.count, cfg.jobs, [&](int i) {
    Rng rng = Rng::substream(cfg.seed, std::uint64_t(i));
    const Vector p1 = p_bar + rng.ball(l, cfg.eta);
    const Vector p2 = p_bar + rng.ball(l, cfg.eta);
    const double d = (p1 - p2).norm();
    if (d < 1e-9) return;
    const auto h = hausdorff_local(potential_domain(g, p1),
                                   potential_domain(g, p2), x_bar, window);
    ratios[std::size_t(i)] = h.theta / d;
    thetas[std::size_t(i)] = h.theta;
  });
  for (int i = 0; i < cfg.count; ++i) {
    rep.ell_estimate = std::max(rep.ell_estimate, ratios[std::size_t(i)]);
    rep.max_theta = std::max(rep.max_theta, thetas[std::size_t(i)]);
    ++rep.pairs;
  }
  return rep;
}

AubinReport aubin_graph_modulus_estimate(const PotentialSpec& g,
                                         const Vector& x_bar,
                                         const Vector& p_bar,
                                         const Vector& v_hat,
                                         const SampleConfig& cfg) {
  AubinReport rep;
  if (!potential_depends_on_p(g)) {
    rep.pairs = cfg.count;
    return rep;
  }
  const int l = int(p_bar.size());
  for (int i = 0; i < cfg.count; ++i) {
    Rng rng = Rng::substream(cfg.seed, std::uint64_t(i));
    const Vector p1 = p_bar + rng.ball(l, cfg.eta);
    const Vector p2 = p_bar + rng.ball(l, cfg.eta);
    const double d = (p1 - p2).norm();
    if (d < 1e-9) continue;
    // recenter the reference onto the graph at p1 before sampling there
    const Polyhedron dom1 = potential_domain(g, p1);
    const Vector x1 =
        project_polyhedron(x_bar, dom1.g(), dom1.h(), dom1.feasible_point()).x;
    const auto active1 = dom1.active_rows(x1, 1e-6);
    Matrix gens1(x1.size(), int(active1.size()));
    for (std::size_t k = 0; k < active1.size(); ++k)
      gens1.col(int(k)) = dom1.g().row(active1[k]).transpose();
    const Vector v1 = gens1.cols() > 0
                          ? Vector(gens1 * nnls(gens1, v_hat).z)
                          : Vector(Vector::Zero(x1.size()));
    const auto graph1 = sample_subdifferential_graph(
        g, x1, p1, v1, cfg.eta, 4, cfg.seed ^ std::uint64_t(i));
    const Polyhedron dom2 = potential_domain(g, p2);
    for (const auto& s : graph1) {
      const Vector x2 =
          project_polyhedron(s.x, dom2.g(), dom2.h(), dom2.feasible_point()).x;
      // nearest normal at the projected point bounds the graph distance
      const auto active = dom2.active_rows(x2, 1e-6);
      Matrix gens(x2.size(), int(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k)
        gens.col(int(k)) = dom2.g().row(active[k]).transpose();
      const auto fit = nnls(gens, s.v);
      const Vector v2 = gens.cols() > 0 ? Vector(gens * fit.z)
                                        : Vector(Vector::Zero(x2.size()));
      const double dist = std::hypot((s.x - x2).norm(), (s.v - v2).norm());
      rep.ell_estimate = std::max(rep.ell_estimate, dist / d);
    }
    ++rep.pairs;
  }
  return rep;
}

}  // namespace varstab
