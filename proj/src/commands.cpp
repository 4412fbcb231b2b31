#include "tfe/commands.hpp"

#include <exception>
#include <filesystem>
#include <limits>
#include <ostream>

#include "tfe/branching.hpp"

namespace tfe {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

KernelTable build_table(const RunConfig& cfg) { return eval_kernel(cfg.N, cfg.grid(), table_order(cfg), cfg.quad()); }

std::vector<std::string> axis_names(int N) {
  return N == 1 ? std::vector<std::string>{"y"} : std::vector<std::string>{"y1", "y2"};
}

std::string tag(double n) {
  std::string s = fmt(n);
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

Json certificate_json(const RootCertificate& c) {
  return {{"cond_a", c.cond_a},
          {"cond_b", c.cond_b},
          {"cond_b_as_printed", c.cond_b_literal},
          {"cond_c", c.cond_c},
          {"control_holds", c.control_holds},
          {"enclosure", {c.lo, c.hi}},
          {"enclosure_certified", c.enclosure_certified}};
}

Json log_json(const LogIntegral& l) {
  return {{"direct", l.direct},
          {"ibp", l.ibp},
          {"discrepancy", l.discrepancy},
          {"excluded_measure", l.excluded_measure},
          {"near_zero_fraction", l.near_zero_fraction},
          {"zeros", l.zeros}};
}

Json conic_json(const Conic& q) {
  return {{"A", q.a}, {"B", q.b}, {"C", q.c}, {"D", q.d}, {"E", q.e}, {"F", q.f}};
}

// x from E_p = 0 with the perturbation dropped
double solve_x(const ConicSystem& sys, const std::vector<double>& c, int p) {
  double u = 0, v = 0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    u += sys.U(p, m) * c[m];
    v += sys.V(p, m) * c[m];
  }
  return u != 0 ? -v / u : std::nan("");
}

void branch_semisimple(const RunConfig& cfg, bool strict, Kind kind, std::ostream& log, Json& j) {
  KernelTable table = build_table(cfg);
  ConicSystem sys = assemble_semisimple_system(cfg.branch.k, kind, table, cfg.branch.eta, cfg.branch.lattice);
  j["unknowns"] = sys.labels;
  j["coef_floor"] = sys.coef_floor;
  j["degenerate_samples"] = sys.degenerate_samples;
  j["perturbation_norms"] = sys.omega_norm;
  Json forms = Json::array();
  for (const auto& f : sys.forms) forms.push_back(conic_json(f));
  j["coefficients"] = {{"forms", forms}};
  Json roots = Json::array();
  const std::string xname = kind == Kind::Global ? "gamma" : "mu";
  if (sys.k == 1) {
    const Conic& F = sys.forms[0];
    Quadratic q{F.a, F.d, F.f};
    double om = sys.omega_norm[0];
    QuadraticReport rep = solve_quadratic_branch(q, om, sys.coef_floor, strict);
    ScanResult scan = dense_scan_quadratic(sys, cfg.branch.scan_points);
    j["coefficients"]["quadratic"] = {{"A", q.A}, {"B", q.B}, {"C", q.C}};
    j["coefficients"]["x_quadratic"] = {{"A", sys.scalar.A}, {"B", sys.scalar.B}, {"C", sys.scalar.C}};
    QuadraticReport xr = solve_quadratic_branch(sys.scalar, 0, sys.coef_floor);
    j["x_roots"] = xr.real_roots;
    j["status"] = quad_status_name(rep.status);
    j["critical_point"] = rep.critical_point;
    j["critical_value"] = rep.critical_value;
    for (const auto& r : rep.roots) {
      std::vector<double> c{1 - r.root, r.root};
      roots.push_back({{"c", c}, {"gamma_or_mu", solve_x(sys, c, 0)}, {"certificates", certificate_json(r)}});
    }
    j["scan"] = {{"points", cfg.branch.scan_points}, {"count", scan.count}, {"continuum", scan.continuum},
                 {"max_abs", scan.max_abs}};
    log << "k=1 " << kind_name(kind) << ": quadratic " << quad_status_name(rep.status) << ", " << rep.roots.size()
        << " root(s) in [0,1]; scan count " << scan.count << (scan.continuum ? " (continuum)" : "") << "\n";
    CsvWriter csv(out_path(cfg, "branch_simplex.csv"), {"c2", "F", "omega"});
    for (std::size_t s = 0; s < sys.lattice.size(); ++s) {
      double t = sys.lattice[s][0];
      csv << t << F.eval(t, 0) << sys.omega[0][s];
      csv.end_row();
    }
  } else {
    bool continuum = false;
    IntersectionReport ir;
    try {
      ir = intersect_conics(sys.forms[0], sys.forms[1], sys.coef_floor);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContinuumDetected || strict) throw;
      continuum = true;
    }
    ScanResult scan = dense_scan_conics(sys);
    j["status"] = continuum ? "continuum" : "isolated";
    j["classification"] = Json::array();
    for (const auto& f : sys.forms) {
      ConicClass cc = conic_classify(f);
      j["classification"].push_back({{"type", conic_type_name(cc.type)},
                                     {"circle", cc.circle},
                                     {"rectangular", cc.rectangular},
                                     {"degenerate", cc.degenerate},
                                     {"line", cc.line}});
    }
    for (const auto& p : ir.points) {
      if (!p.in_simplex) continue;
      std::vector<double> c{1 - p.x - p.y, p.x, p.y};
      roots.push_back({{"c", c}, {"gamma_or_mu", solve_x(sys, c, 0)}, {"certificates", {{"condition", p.condition}}}});
    }
    j["ill_conditioned"] = ir.ill_conditioned;
    j["resultant"] = ir.resultant;
    j["scan"] = {{"count", scan.count}, {"continuum", scan.continuum}, {"max_abs", scan.max_abs}};
    log << "k=2 " << kind_name(kind) << ": " << (continuum ? "continuum" : std::to_string(roots.size()) + " intersection(s)")
        << "; scan count " << scan.count << (scan.continuum ? " (continuum)" : "") << "\n";
    CsvWriter csv(out_path(cfg, "branch_simplex.csv"), {"c2", "c3", "F1", "omega1", "F2", "omega2"});
    for (std::size_t s = 0; s < sys.lattice.size(); ++s) {
      double x = sys.lattice[s][0], y = sys.lattice[s][1];
      csv << x << y << sys.forms[0].eval(x, y) << sys.omega[0][s] << sys.forms[1].eval(x, y) << sys.omega[1][s];
      csv.end_row();
    }
  }
  j["roots"] = roots;
  j["variable"] = xname;
}

}  // namespace

int table_order(const RunConfig& cfg) { return std::min(cfg.kmax + 4, 12); }

int exit_code(const std::exception& e) {
  if (auto* te = dynamic_cast<const Error*>(&e)) return te->is_config() ? 3 : 2;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 3;
  return 2;
}

void cmd_kernel(const RunConfig& cfg, std::ostream& log) {
  KernelTable t = build_table(cfg);
  write_json(out_path(cfg, "kernel.json"), table_to_json(t));
  for (const auto& [b, v] : t.values) {
    auto head = axis_names(cfg.N);
    head.push_back("value");
    CsvWriter csv(out_path(cfg, "kernel_" + b.label() + ".csv"), head);
    double y[2];
    for (std::size_t i = 0; i < v.size(); ++i) {
      t.grid.node(i, y);
      for (int a = 0; a < cfg.N; ++a) csv << y[a];
      csv << v[i];
      csv.end_row();
    }
  }
  DecayFit fit = check_decay(t);
  double mass = kernel_mass(t);
  Json rep = {{"dimension", cfg.N},
              {"K", t.K},
              {"mass", mass},
              {"mass_error", std::abs(mass - 1)},
              {"imag_residue", t.imag_residue},
              {"tail_estimate", t.tail_estimate},
              {"decay", {{"D", fit.D}, {"d", fit.d}, {"d_asymptotic", asymptotic_decay_constant()},
                         {"p_free", fit.p_free}, {"fit_range", {fit.y_lo, fit.y_hi}}}}};
  write_json(out_path(cfg, "kernel_report.json"), rep);
  log << "kernel N=" << cfg.N << " K=" << t.K << " mass " << fmt(mass) << " d " << fmt(fit.d) << "\n";
}

void cmd_spectrum(const RunConfig& cfg, bool strict, std::ostream& log) {
  KernelTable t = build_table(cfg);
  GramReport gr = orthogonality_matrix(cfg.kmax, t);
  {
    std::vector<std::string> head{"beta"};
    for (const auto& b : gr.betas) head.push_back(b.label());
    CsvWriter csv(out_path(cfg, "gram.csv"), head);
    for (std::size_t i = 0; i < gr.betas.size(); ++i) {
      csv << gr.betas[i].label();
      for (std::size_t k = 0; k < gr.betas.size(); ++k) csv << gr.G(i, k);
      csv.end_row();
    }
  }
  double gdev = (gr.G - Eigen::MatrixXd::Identity(gr.G.rows(), gr.G.cols())).cwiseAbs().maxCoeff();
  double worst = 0;
  Json adj = Json::array();
  {
    CsvWriter csv(out_path(cfg, "eigen_residuals.csv"), {"beta", "order", "lambda", "residual"});
    for (const auto& b : gr.betas) {
      double r = b.order() + 4 <= t.K ? eigen_residual(b, t) : eigen_residual(b, t, 0.8, true);
      worst = std::max(worst, r);
      csv << b.label() << b.order() << -b.order() / 4.0 << r;
      csv.end_row();
      Json pj = polynomial_to_json(adjoint_polynomial(b));
      pj["beta"] = b.c;
      adj.push_back(pj);
    }
  }
  write_json(out_path(cfg, "adjoints.json"), adj);
  std::vector<int> sizes;
  for (int k = 0; k <= cfg.kmax; ++k) sizes.push_back(static_cast<int>(multi_indices(cfg.N, k).size()));
  Json rep = {{"dimension", cfg.N},
              {"kmax", cfg.kmax},
              {"eigenspace_sizes", sizes},
              {"gram_max_deviation", gdev},
              {"max_eigen_residual", worst},
              {"resid_tol", cfg.resid_tol}};
  write_json(out_path(cfg, "spectrum_report.json"), rep);
  log << "spectrum kmax=" << cfg.kmax << " |G-I|max " << fmt(gdev) << " residual " << fmt(worst) << "\n";
  if (strict && worst > cfg.resid_tol)
    throw Error(ErrorKind::FitFailure, "eigen-residual " + fmt(worst) + " above resid_tol " + fmt(cfg.resid_tol));
}

void cmd_evolve(const RunConfig& cfg, std::ostream& log) {
  KernelTable t = build_table(cfg);
  SampledFunction u0 = decay_test_data(cfg.evolve.k, t, cfg.evolve.sigma);
  DecayFitResult fit = decay_rate_fit(u0, cfg.evolve.taus, t);
  {
    CsvWriter csv(out_path(cfg, "evolve_norms.csv"), {"tau", "norm", "lambda"});
    for (std::size_t i = 0; i < fit.taus.size(); ++i) {
      csv << fit.taus[i] << fit.norms[i] << fit.lambda;
      csv.end_row();
    }
  }
  for (double tau : cfg.evolve.taus) {
    EvolutionState w = convolution_solution(u0, tau, t);
    auto head = axis_names(cfg.N);
    head.push_back("w");
    CsvWriter csv(out_path(cfg, "evolve_tau_" + tag(tau) + ".csv"), head);
    double y[2];
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      w.grid.node(i, y);
      for (int a = 0; a < cfg.N; ++a) csv << y[a];
      csv << w.values[i];
      csv.end_row();
    }
  }
  log << "evolve k=" << cfg.evolve.k << " fitted rate " << fmt(fit.lambda) << " (expected " << fmt(-cfg.evolve.k / 4.0)
      << ")\n";
}

void cmd_branch(const RunConfig& cfg, bool strict, std::ostream& log) {
  const Kind kind = parse_kind(cfg.branch.kind);
  const int k = cfg.branch.k;
  Json j = {{"k", k}, {"kind", kind_name(kind)}, {"dimension", cfg.N}};
  if (cfg.N == 2 && k >= 1) {
    branch_semisimple(cfg, strict, kind, log, j);
  } else {
    KernelTable t = build_table(cfg);
    SimpleSolvability s = assemble_simple_solvability(k, kind, cfg.branch.eta, t);
    double c = s.coefficient;
    j["coefficients"] = {{kind == Kind::Global ? "gamma" : "mu", c},
                         {"eta", cfg.branch.eta},
                         {"pairing", s.pairing},
                         {"transport", s.transport},
                         {"solvability_residual", s.residual},
                         {"log_term", log_json(s.log_term)}};
    if (k == 0 && kind == Kind::Global) {
      Gamma01 g = gamma01(cfg.branch.eta, t);
      j["coefficients"]["denominator"] = g.denominator;
      j["mass_pairing"] = mass_pairing(t);
    }
    j["roots"] = Json::array({{{"c", {1.0}}, {"gamma_or_mu", c}, {"certificates", Json::object()}}});
    j["perturbation_norms"] = Json::array();
    j["alpha_expansion"] = {{"alpha0", alpha_expansion(k, 0, kind, cfg.N, c)},
                            {"slope", kind == Kind::Blowup ? c : std::nan("")}};
    log << "k=" << k << " " << kind_name(kind) << ": " << (kind == Kind::Global ? "gamma" : "mu") << " = " << fmt(c)
        << "\n";
    CsvWriter csv(out_path(cfg, "branch_simplex.csv"), {"c1", "value"});
    csv << 1.0 << c;
    csv.end_row();
  }
  write_json(out_path(cfg, "branch.json"), j);
}

void cmd_continue(const RunConfig& cfg, std::ostream& log) {
  const Kind kind = parse_kind(cfg.cont.kind);
  const int k = cfg.cont.k;
  if (kind == Kind::Blowup && cfg.N != 1) throw Error(ErrorKind::ConfigError, "continue: blow-up profiles are 1D");
  std::function<double(double)> ref;
  double mu1 = 0;
  if (kind == Kind::Global) {
    KernelEvaluator ev(cfg.N, cfg.cont.radius + 1, cfg.quad());
    ref = [ev, N = cfg.N](double r) {
      double y[2] = {r, 0};
      return ev.eval(MultiIndex(std::vector<int>(N, 0)), y);
    };
  } else {
    if (k >= 1) {
      RunConfig c1 = cfg;
      c1.N = 1;
      c1.kmax = std::max(k, 1);
      mu1 = mu1k(k, eval_kernel(1, default_grid(1), table_order(c1)));
    }
    // psi*_k rescaled to a monic leading term
    SparsePolynomial p = adjoint_polynomial(MultiIndex{k});
    double lead = p.terms.rbegin()->second.convert_to<double>() / std::sqrt(static_cast<double>(p.normalizer));
    ref = [p, lead](double y) { return p.eval(&y) / lead; };
  }
  CsvWriter sum(out_path(cfg, "continue_summary.csv"), {"n", "seed", "alpha", "interface_radius", "zero_count",
                                                        "growth_exponent", "distance", "mass_error"});
  // targets are shot in parallel; output is written afterwards in list order
  struct Target {
    std::vector<SimilarityProfile> found;
    std::vector<double> seeds;
    std::string notes;
    std::exception_ptr error;
  };
  std::vector<Target> targets(cfg.n_list.size());
  parallel_for(targets.size(), [&](std::size_t t) {
    const double n = cfg.n_list[t];
    Target& tg = targets[t];
    try {
      // blow-up profiles need not be unique for k >= 1: several alpha seeds, distinct converged profiles kept
      std::vector<double> seeds{alpha_expansion(k, n, Kind::Blowup, 1, mu1)};
      if (kind == Kind::Blowup && k >= 1) {
        seeds.push_back(-k / 4.0);
        seeds.push_back(-k / 4.0 * (1 + n));
      }
      for (double seed : seeds) {
        SimilarityProfile p;
        if (kind == Kind::Global) {
          p = shoot_global_profile(n, k, cfg.N, cfg.profile);
        } else {
          try {
            p = shoot_blowup_profile(n, k, 1, seed, cfg.profile);
          } catch (const Error& e) {
            tg.notes += "blowup k=" + std::to_string(k) + " n=" + fmt(n) + " seed " + fmt(seed) + ": " + e.what() + "\n";
            continue;
          }
        }
        bool dup = false;
        for (const auto& q : tg.found) dup = dup || std::abs(q.alpha - p.alpha) <= 1e3 * cfg.profile.alpha_tol;
        if (dup) continue;
        tg.found.push_back(std::move(p));
        tg.seeds.push_back(seed);
        if (kind == Kind::Global) break;
      }
      if (tg.found.empty()) throw Error(ErrorKind::ShootingNoConvergence, "no seed converged at n = " + fmt(n));
    } catch (...) {
      tg.error = std::current_exception();
    }
  });
  double prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double n = cfg.n_list[t];
    const Target& tg = targets[t];
    log << tg.notes;
    if (tg.error) std::rethrow_exception(tg.error);
    for (std::size_t b = 0; b < tg.found.size(); ++b) {
      const SimilarityProfile& p = tg.found[b];
      double dist = sup_distance(p, ref, cfg.cont.radius);
      double merr = kind == Kind::Global ? mass_conservation_check(p).mass_error : std::nan("");
      if (b == 0) {
        monotone = monotone && dist <= prev;
        prev = dist;
      }
      sum << n << (kind == Kind::Global ? std::nan("") : tg.seeds[b]) << p.alpha
          << (p.interface_radius ? *p.interface_radius : std::nan("")) << p.zero_count
          << (p.growth_exponent ? *p.growth_exponent : std::nan("")) << dist << merr;
      sum.end_row();
      std::string name = std::string("profile_") + kind_name(kind) + "_k" + std::to_string(k) + "_n" + tag(n) +
                         (b ? "_b" + std::to_string(b) : "") + ".csv";
      CsvWriter csv(out_path(cfg, name), {"y", "f"});
      for (std::size_t i = 0; i < p.f.size(); ++i) {
        csv << p.grid.coord(static_cast<int>(i)) << p.f[i];
        csv.end_row();
      }
      log << kind_name(kind) << " k=" << k << " n=" << fmt(n) << " alpha " << fmt(p.alpha) << " distance " << fmt(dist)
          << "\n";
    }
  }
  log << "distance monotone: " << (monotone ? "yes" : "no") << "\n";
}

void cmd_diagnose(const RunConfig& cfg, std::ostream& log) {
  KernelTable t = eval_kernel(1, cfg.N == 1 ? cfg.grid() : default_grid(1), 0, default_config(1).quad());
  auto rows = expansion_diagnostic(t.grid, t.at(MultiIndex{0}), cfg.n_list, 1);
  CsvWriter csv(out_path(cfg, "expansion_diagnostic.csv"),
                {"n", "l1_error", "l1_error_common", "second_order", "ratio", "excluded_measure", "l8_bound"});
  for (const auto& r : rows) {
    csv << r.n << r.l1_error << r.l1_error_common << r.second_order << r.ratio << r.excluded_measure << r.l8_bound;
    csv.end_row();
    log << "n=" << fmt(r.n) << " L1 " << fmt(r.l1_error_common) << " ratio " << fmt(r.ratio) << "\n";
  }
}

}  // namespace tfe
