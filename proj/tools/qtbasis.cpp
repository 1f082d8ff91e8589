#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qtbasis/study.hpp"

namespace fs = std::filesystem;
using namespace qtb;

namespace {

struct RunConfig {
  std::vector<std::string> methods{"expl1", "expl2", "alge1", "alge2"};
  int dmin = 2;
  int dmax = 4;
  int test_case = 1;
  std::string provider_file;
  int mesh_n = 4;
  std::vector<double> rect;  // x0 x1 y0 y1 nx ny
  std::string out_dir = "out";
  unsigned seed = 1;
  double rank_tol = -1.0;
  int jobs = 1;

  void validate() const {
    if (dmin < 2 || dmax > 12 || dmin > dmax)
      throw CLI::ValidationError("degree range must satisfy 2 <= dmin <= dmax <= 12");
    for (const auto& m : methods) method_from_name(m);
  }

  CoeffSetup setup() const {
    if (!provider_file.empty()) {
      std::ifstream in(provider_file);
      if (!in) throw std::runtime_error("cannot open provider file " + provider_file);
      return coeff_setup_from_json(json::parse(in));
    }
    return preset_setup(test_case);
  }

  TriMesh mesh() const {
    if (rect.size() == 6)
      return structured_rect(rect[0], rect[1], rect[2], rect[3],
                             static_cast<int>(rect[4]), static_cast<int>(rect[5]));
    return structured_square(mesh_n);
  }
};

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& config_file) {
  cmd->add_option("--config", config_file, "JSON file with option defaults");
  cmd->add_option("--method", cfg.methods,
                  "methods to run (expl1 expl2 alge1 alge2)");
  cmd->add_option("--dmin", cfg.dmin, "smallest degree");
  cmd->add_option("--dmax", cfg.dmax, "largest degree");
  cmd->add_option("--d", [&cfg](const std::vector<std::string>& v) {
    cfg.dmin = cfg.dmax = std::stoi(v.at(0));
    return true;
  }, "single degree (sets dmin = dmax)");
  cmd->add_option("--case", cfg.test_case, "built-in test case preset (1 or 2)");
  cmd->add_option("--provider", cfg.provider_file, "coefficient setup JSON file");
  cmd->add_option("--mesh", cfg.mesh_n, "n for the n x n structured unit-square mesh");
  cmd->add_option("--mesh-rect", cfg.rect,
                  "x0 x1 y0 y1 nx ny for a structured rectangle mesh")
      ->expected(6);
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "seed for randomized checks");
  cmd->add_option("--rank-tol", cfg.rank_tol, "SVD rank tolerance override");
  cmd->add_option("--jobs", cfg.jobs, "worker threads for element loops");
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Runs fn(e) for e in [0, n) on cfg.jobs threads; any exception rethrows.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  if (jobs <= 1) {
    for (std::size_t e = 0; e < n; ++e) fn(e);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t e = next++; e < n; e = next++) fn(e);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

int cmd_build(const RunConfig& cfg) {
  const CoeffSetup setup = cfg.setup();
  const TriMesh mesh = cfg.mesh();
  const auto centers = mesh.centroids();
  json summary = json::array();
  for (const auto& mname : cfg.methods) {
    const Method method = method_from_name(mname);
    for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<json> elements(centers.size());
      parallel_for(centers.size(), cfg.jobs, [&](std::size_t e) {
        const GradedPoly2 jet = setup.provider.taylor(centers[e], d - 2, setup.params);
        const auto basis =
            construct_basis(method, d, jet, setup.params, centers[e], cfg.rank_tol);
        json funcs = json::array();
        for (const auto& f : basis) funcs.push_back(qtfunction_to_json(f));
        elements[e] = json{{"element", e},
                           {"center", json::array({centers[e][0], centers[e][1]})},
                           {"functions", std::move(funcs)}};
      });
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      json dump = json::array();
      for (auto& e : elements) dump.push_back(std::move(e));
      const fs::path path = fs::path(cfg.out_dir) /
                            ("basis_" + mname + "_d" + std::to_string(d) + ".json");
      write_file(path, dump.dump(1) + "\n");
      const ComplexityRow cf = closed_forms(d);
      const std::int64_t flops =
          method == Method::Expl1   ? cf.expl1_basis
          : method == Method::Expl2 ? cf.expl2_basis
          : method == Method::Alge1
              ? cf.alge1_svd_model
              : cf.alge2_svd_model + cf.alge2_multiply_model;
      summary.push_back(json{{"method", mname},
                             {"d", d},
                             {"elements", centers.size()},
                             {"functions_per_element", 2 * d + 1},
                             {"wall_time_s", secs},
                             {"flops_per_element", flops},
                             {"file", path.string()}});
      std::cout << mname << " d=" << d << ": " << centers.size() << " elements, "
                << (2 * d + 1) << " functions each, " << secs << " s\n";
    }
  }
  write_file(fs::path(cfg.out_dir) / "build_summary.json", summary.dump(1) + "\n");
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const CoeffSetup setup = cfg.setup();
  const TriMesh mesh = cfg.mesh();
  const auto centers = mesh.centroids();
  const auto radii = default_radii(mesh.hmax());
  BasisCache cache;
  bool ok = true;
  auto fail = [&ok](const std::string& msg) {
    std::cerr << "FAIL: " << msg << "\n";
    ok = false;
  };

  std::vector<Method> methods;
  for (const auto& m : cfg.methods) methods.push_back(method_from_name(m));

  const auto rows = identity_table(centers, setup, methods, cfg.dmin, cfg.dmax, cache);
  write_file(fs::path(cfg.out_dir) / "identities.csv", identity_csv(rows));
  for (const auto& r : rows) {
    const bool exact = r.method == Method::Expl2 || r.method == Method::Alge2;
    if (exact && r.max_linf != 0.0)
      fail("identity table: " + std::string(method_name(r.method)) + " d=" +
           std::to_string(r.d) + " expected exact 0, got " + std::to_string(r.max_linf));
    if (!exact && r.max_linf > 1e-12)
      fail("identity table: " + std::string(method_name(r.method)) + " d=" +
           std::to_string(r.d) + " exceeds 1e-12");
  }

  std::ostringstream slopes;
  slopes << slopes_csv_header();
  slopes.precision(17);
  std::string decay_all = "method,d,r,value\n";
  for (Method m : methods)
    for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
      const DecayResult dec = decay_study(centers, setup, m, d, radii, cache);
      const std::string csv = decay_csv(m, d, dec);
      decay_all += csv.substr(csv.find('\n') + 1);
      append_slope_row(slopes, m, d, "residual", dec.fit);
      if (d <= 6 && (dec.fit.slope < d - 1.3 || dec.fit.slope > d - 0.5))
        fail("residual slope: " + std::string(method_name(m)) + " d=" +
             std::to_string(d) + " slope=" + std::to_string(dec.fit.slope));
      if (dec.fit.plateau_detected && dec.fit.plateau_level > 1e-10)
        fail("residual plateau above 1e-10: " + std::string(method_name(m)) + " d=" +
             std::to_string(d));

      const BestApproxSummary ba = best_approx_mesh(centers, setup, m, d, radii, cache);
      append_slope_row(slopes, m, d, "bestapprox_p", ba.p_fit);
      append_slope_row(slopes, m, d, "bestapprox_v", ba.v_fit);
      if (d <= 6) {
        if (ba.p_fit.slope < d + 0.7 || ba.p_fit.slope > d + 1.5)
          fail("bestapprox pressure slope: " + std::string(method_name(m)) + " d=" +
               std::to_string(d) + " slope=" + std::to_string(ba.p_fit.slope));
        if (ba.v_fit.slope < d - 0.3 || ba.v_fit.slope > d + 0.5)
          fail("bestapprox velocity slope: " + std::string(method_name(m)) + " d=" +
               std::to_string(d) + " slope=" + std::to_string(ba.v_fit.slope));
      }
    }
  write_file(fs::path(cfg.out_dir) / "decay.csv", decay_all);
  write_file(fs::path(cfg.out_dir) / "slopes.csv", slopes.str());
  write_file(fs::path(cfg.out_dir) / "decay.gnuplot",
             decay_gnuplot("decay.csv", "residual decay"));
  return ok ? 0 : 1;
}

int cmd_flops(const RunConfig& cfg) {
  const std::string csv = flops_csv(cfg.dmax);
  write_file(fs::path(cfg.out_dir) / "flops.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_time(const RunConfig& cfg) {
  const CoeffSetup setup = cfg.setup();
  const auto centers = cfg.mesh().centroids();
  std::ostringstream csv;
  csv << "method,d,mean_element_time_s\n";
  std::cout << "note: timings are order-of-magnitude estimates only\n";
  for (const auto& mname : cfg.methods) {
    const Method m = method_from_name(mname);
    for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
      const double t = time_per_element(m, d, setup, centers, 3, cfg.rank_tol);
      csv << mname << ',' << d << ',' << t << '\n';
      std::cout << mname << " d=" << d << ": " << t << " s/element\n";
    }
  }
  write_file(fs::path(cfg.out_dir) / "timing.csv", csv.str());
  return 0;
}

int cmd_kernel_dims(const RunConfig& cfg) {
  const CoeffSetup setup = cfg.setup();
  const auto centers = cfg.mesh().centroids();
  bool ok = true;
  std::cout << "d,qf_min,qf_max,qs_min,qs_max,expected\n";
  for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
    const KernelDimRow row = kernel_dim_row(centers, setup, d, cfg.rank_tol);
    std::cout << d << ',' << row.qf_min << ',' << row.qf_max << ',' << row.qs_min << ','
              << row.qs_max << ',' << 2 * d + 1 << '\n';
    if (!row.ok(2 * d + 1)) {
      std::cerr << "FAIL: kernel dimension != " << 2 * d + 1 << " at d=" << d << "\n";
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

int cmd_sparsity(const RunConfig& cfg) {
  const CoeffSetup setup = cfg.setup();
  const auto centers = cfg.mesh().centroids();
  const Point c = centers.at(0);
  for (int d = cfg.dmin; d <= cfg.dmax; ++d) {
    const GradedPoly2 jet = setup.provider.taylor(c, d - 2, setup.params);
    const OpMatrix qf = assemble_QF(d, jet, setup.params);
    const OpMatrix qs = assemble_QS(d, jet, setup.params);
    const OpMatrix g = assemble_G(d, setup.params);
    const std::string stem = "_d" + std::to_string(d);
    write_file(fs::path(cfg.out_dir) / ("QF" + stem + ".pbm"), sparsity_pbm(qf));
    write_file(fs::path(cfg.out_dir) / ("QS" + stem + ".pbm"), sparsity_pbm(qs));
    write_file(fs::path(cfg.out_dir) / ("G" + stem + ".pbm"), sparsity_pbm(g));
    write_file(fs::path(cfg.out_dir) / ("QF" + stem + ".txt"), triplet_dump(qf));
    write_file(fs::path(cfg.out_dir) / ("QS" + stem + ".txt"), triplet_dump(qs));
    write_file(fs::path(cfg.out_dir) / ("G" + stem + ".txt"), triplet_dump(g));
  }
  std::cout << "wrote sparsity patterns to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-Trefftz basis construction and verification"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_file;

  auto* build = app.add_subcommand("build", "construct and dump bases");
  auto* verify = app.add_subcommand("verify", "run identity/decay/approximation studies");
  auto* flops = app.add_subcommand("flops", "closed-form complexity table");
  auto* time_cmd = app.add_subcommand("time", "per-element build timings");
  auto* kdims = app.add_subcommand("kernel-dims", "kernel dimensions of Q^F and Q^S");
  auto* sparsity = app.add_subcommand("sparsity", "PBM/triplet export of the operators");
  for (auto* cmd : {build, verify, flops, time_cmd, kdims, sparsity})
    add_common(cmd, cfg, config_file);

  app.callback([&] {
    if (config_file.empty()) return;
    std::ifstream in(config_file);
    if (!in) throw CLI::ValidationError("cannot open config file " + config_file);
    const json j = json::parse(in);
    // config supplies defaults; explicitly passed flags keep priority
    CLI::App* sub = app.get_subcommands().at(0);
    auto apply = [&](const char* flag, auto& field) {
      using T = std::decay_t<decltype(field)>;
      if (j.contains(flag) && sub->count(std::string("--") + flag) == 0)
        field = j.at(flag).get<T>();
    };
    apply("method", cfg.methods);
    apply("dmin", cfg.dmin);
    apply("dmax", cfg.dmax);
    apply("case", cfg.test_case);
    apply("provider", cfg.provider_file);
    apply("mesh", cfg.mesh_n);
    apply("out", cfg.out_dir);
    apply("seed", cfg.seed);
    apply("rank-tol", cfg.rank_tol);
    apply("jobs", cfg.jobs);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    cfg.validate();
    if (build->parsed()) return cmd_build(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (flops->parsed()) return cmd_flops(cfg);
    if (time_cmd->parsed()) return cmd_time(cfg);
    if (kdims->parsed()) return cmd_kernel_dims(cfg);
    if (sparsity->parsed()) return cmd_sparsity(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
