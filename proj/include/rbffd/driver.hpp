#pragma once

#include <filesystem>

#include "rbffd/config.hpp"

namespace rbffd {

namespace detail {

inline std::ofstream open_artifact(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw InvalidInputError("cannot write artifact: " + (dir / name).string());
  return os;
}

inline void write_field(std::ostream& os, const Discretization& disc, const Eigen::VectorXd& u,
                        const StateField& state) {
  os << "# x y u1 u2 s11 s22 s33 s12 epbar\n";
  char buf[320];
  const NodeCloud& cloud = disc.cloud();
  for (int l = 0; l < cloud.size(); ++l) {
    const Voigt4& s = state.node[l].sigma;
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  cloud.pos[l].x(), cloud.pos[l].y(), u(2 * l), u(2 * l + 1), s(0), s(1), s(2),
                  s(3), state.node[l].ep_bar);
    os << buf;
  }
}

}  // namespace detail

/// `solve` verb: nodes.txt, one field_%04d.txt per committed load step,
/// report.csv, effective_config.txt. Exit 0 on full convergence; 2 when the
/// solve stalls (partial artifacts retained).
inline int run_solve(const RunConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  BenchmarkCase bc = cfg.make_configured_case();
  NodeCloud cloud = generate_nodes(bc.domain, cfg.seed);
  for (const auto& w : cloud.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

  Discretization disc(std::move(cloud), bc.domain, cfg.approach_config(), bc.material,
                      cfg.threads);
  {
    auto os = detail::open_artifact(out_dir, "nodes.txt");
    write_nodes(os, disc.cloud());
  }
  {
    auto os = detail::open_artifact(out_dir, "effective_config.txt");
    echo_config(os, cfg);
  }

  auto report = detail::open_artifact(out_dir, "report.csv");
  report << "step,load,iter,rel_residual\n";
  char buf[96];

  SolveReport rep = run_load_program(
      disc, bind_bc(disc, bc.bc), bc.loads, cfg.newton(),
      [&](int step, const StepRecord& rec, const Eigen::VectorXd& u, const StateField& state) {
        std::snprintf(buf, sizeof buf, "field_%04d.txt", step + 1);
        auto os = detail::open_artifact(out_dir, buf);
        detail::write_field(os, disc, u, state);
      });

  for (std::size_t s = 0; s < rep.steps.size(); ++s) {
    const StepRecord& rec = rep.steps[s];
    for (std::size_t i = 0; i < rec.rel_residual.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%.17g\n", s + 1, rec.load, i + 1,
                    rec.rel_residual[i]);
      report << buf;
    }
    report << "# step " << s + 1 << (rec.converged ? " converged" : " FAILED") << " iters="
           << rec.iters << (rec.plastic ? " plastic" : " elastic") << '\n';
  }
  if (!rep.success) {
    std::cerr << "error: " << rep.message << '\n';
    return 2;
  }
  return 0;
}

/// `gen-nodes` verb: node generation only.
inline int run_gen_nodes(const RunConfig& cfg, const std::string& out_dir) {
  BenchmarkCase bc = cfg.make_configured_case();
  NodeCloud cloud = generate_nodes(bc.domain, cfg.seed);
  for (const auto& w : cloud.warnings) std::cerr << "warning: " << w << '\n';
  auto os = detail::open_artifact(out_dir, "nodes.txt");
  write_nodes(os, cloud);
  auto ec = detail::open_artifact(out_dir, "effective_config.txt");
  echo_config(ec, cfg);
  return 0;
}

/// `sweep` verb: cartesian product of the sweep grids; one CSV with all
/// metrics plus fitted slopes.
inline int run_sweep_cmd(const RunConfig& cfg, const std::string& out_dir) {
  SweepSpec spec;
  spec.case_id = cfg.case_id;
  spec.h_list = cfg.sweep_h.empty() ? std::vector<double>{cfg.h} : cfg.sweep_h;
  spec.p_list = cfg.sweep_p.empty() ? std::vector<int>{cfg.p} : cfg.sweep_p;
  spec.approaches =
      cfg.sweep_approach.empty() ? std::vector<Approach>{cfg.approach} : cfg.sweep_approach;
  spec.alpha_d_list =
      cfg.sweep_alpha_d.empty() ? std::vector<double>{cfg.alpha_d} : cfg.sweep_alpha_d;
  spec.alpha_s_list =
      cfg.sweep_alpha_s.empty() ? std::vector<double>{cfg.alpha_s} : cfg.sweep_alpha_s;
  spec.m = cfg.m;
  spec.p_fd = cfg.p_fd;
  spec.seed = cfg.seed;
  spec.newton = cfg.newton();
  spec.with_kappa = cfg.with_kappa;
  spec.threads = cfg.threads;

  SweepResult res = run_sweep(spec);
  auto os = detail::open_artifact(out_dir, "sweep.csv");
  write_sweep_csv(os, res);
  auto ec = detail::open_artifact(out_dir, "effective_config.txt");
  echo_config(ec, cfg);
  return 0;
}

/// `check` verb: fast self-contained invariant suite.
inline int run_check(unsigned long long seed) {
  int failures = 0;
  auto check = [&failures](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
    if (!ok) ++failures;
  };

  // Operator weights reproduce monomials up to the augmentation degree.
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    NodeCloud cloud;
    for (int i = 0; i < 300; ++i)
      cloud.push({u01(rng), u01(rng)}, NodeKind::interior, Vec2::Zero(), BcTag::none, 0.06);
    CellGrid grid(cloud.pos, 0.06);
    ApproachConfig cfg;
    cfg.p = 3;
    auto basis = AugmentationBasis::make(cfg.p);
    double worst = 0.0;
    for (int l : {17, 101, 250}) {
      Stencil st(cloud, build_support(cloud, grid, l, cfg.support_size()), basis, cfg.m);
      Vec2 x = cloud.pos[l] + Vec2(0.01, -0.012);
      Eigen::VectorXd wx = st.weights(DiffOp::ddx(), x);
      for (auto [e1, e2] : basis.exponents) {
        double num = 0.0;
        for (std::size_t j = 0; j < st.support().nodes.size(); ++j) {
          const Vec2& pj = cloud.pos[st.support().nodes[j]];
          num += wx(j) * std::pow(pj.x(), e1) * std::pow(pj.y(), e2);
        }
        double ref = e1 * std::pow(x.x(), e1 - 1 < 0 ? 0 : e1 - 1) * std::pow(x.y(), e2);
        if (e1 == 0) ref = 0.0;
        worst = std::max(worst, std::abs(num - ref));
      }
    }
    check(worst < 1e-9, "monomial reproduction of d/dx weights (worst " +
                            std::to_string(worst) + ")");
  }

  // Return mapping satisfies the loading/unloading conditions.
  {
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MaterialModel mat;
    mat.E = 1.0;
    mat.nu = 0.3;
    mat.curve = HardeningCurve::linear(0.5, 0.1);
    bool ok = true;
    for (int i = 0; i < 2000 && ok; ++i) {
      MaterialState s0;
      Voigt4 deps{u(rng), u(rng), 0.0, u(rng)};
      auto rm = return_map(s0, deps, mat);
      double phi = yield_function(rm.state.sigma, rm.state.ep_bar, mat);
      ok = phi <= 1e-9 * mat.sigma_y0() && rm.dgamma >= 0.0 &&
           std::abs(rm.state.eps_p(0) + rm.state.eps_p(1) + rm.state.eps_p(2)) <= 1e-12;
    }
    check(ok, "return mapping Kuhn-Tucker conditions");
  }

  // Config echo round-trips.
  {
    RunConfig c;
    c.case_id = "annulus_plastic";
    c.approach = Approach::hybrid;
    c.alpha_s = 0.5;
    std::stringstream ss;
    echo_config(ss, c);
    bool ok = true;
    try {
      RunConfig back = parse_config(ss);
      ok = back.case_id == c.case_id && back.approach == c.approach &&
           back.alpha_s == c.alpha_s;
    } catch (const std::exception&) {
      ok = false;
    }
    check(ok, "effective-config round trip");
  }

  std::cout << (failures == 0 ? "all checks passed\n" : "checks FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace rbffd
