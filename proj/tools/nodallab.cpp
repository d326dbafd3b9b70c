// nodallab: experiments on nodal sets of Laplace eigenfunctions.
//
// Subcommands: modes, cover, goodballs, nodal, lp, local, mesh-eig, sweep,
// plot. Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "nodal/harness.hpp"
#include "nodal/plot.hpp"

namespace fs = std::filesystem;
using namespace nodal;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  int resolution = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int index = 0;
  bool index_set = false;
};

ExperimentConfig load_config(const GlobalOpts& g) {
  if (g.config_path.empty()) throw config_error("--config is required");
  ExperimentConfig c = parse_config_file(g.config_path);
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (g.resolution > 0) c.resolution = g.resolution;
  if (g.seed_set) c.seed = g.seed;
  validate_config(c);
  return c;
}

// Build the family restricted to one index (default: the first).
std::pair<Family, int> single_member(const ExperimentConfig& base,
                                     const GlobalOpts& g) {
  ExperimentConfig c = base;
  int idx = g.index_set ? g.index : c.indices.front();
  c.indices = {idx};
  return {build_family(c), idx};
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir + "/" + name);
  if (!out) throw config_error("cannot write " + dir + "/" + name);
  return out;
}

int cmd_modes(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  auto [fam, idx] = single_member(c, g);
  auto out = open_out(c.out_dir, "field_" + std::to_string(idx) + ".csv");
  write_field_csv(fam.fields[0], out);
  std::cout << "field index " << idx << ": lambda = " << fam.fields[0].lambda
            << ", points = " << fam.fields[0].values.size() << "\n";
  return 0;
}

double calibrated_a(const ExperimentConfig& c, const Family& fam) {
  if (c.a_policy == "explicit") return c.a_value;
  double zmax = 0.0;
  for (const auto& f : fam.fields)
    zmax = std::max(zmax, zero_spacing_scale(f));
  return 1.1 * zmax;
}

int cmd_cover(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  auto [fam, idx] = single_member(c, g);
  const SampledField& f = fam.fields[0];
  double a = calibrated_a(c, fam);
  double r = wavelength_radius(a, f.lambda);
  BallCover cover = build_cover(*fam.manifold, *fam.quad, r);
  overlap_multiplicity(*fam.manifold, *fam.quad, cover);
  auto out = open_out(c.out_dir, "cover_" + std::to_string(idx) + ".csv");
  write_cover_csv(cover, out);
  auto hist = open_out(c.out_dir,
                       "multiplicity_" + std::to_string(idx) + ".csv");
  write_multiplicity_csv(cover, hist);
  std::cout << "a = " << a << ", r = " << r << ", centers = "
            << cover.centers.size()
            << ", max multiplicity = " << cover.max_multiplicity
            << ", covering = "
            << (covering_certificate(*fam.manifold, *fam.quad, cover) ? "ok"
                                                                      : "FAIL")
            << "\n";
  return 0;
}

int cmd_goodballs(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  auto [fam, idx] = single_member(c, g);
  const SampledField& f = fam.fields[0];
  double a = calibrated_a(c, fam);
  double r = wavelength_radius(a, f.lambda);
  BallCover cover = build_cover(*fam.manifold, *fam.quad, r);
  int cm = overlap_multiplicity(*fam.manifold, *fam.quad, cover);
  double d = (c.d_policy == "explicit") ? c.d_value : choose_d(cm);
  GoodBallReport rep = classify(f, cover, d);
  rep.c_m = cm;
  auto out = open_out(c.out_dir, "goodballs_" + std::to_string(idx) + ".csv");
  write_goodball_csv(cover, rep, out);
  std::cout << "d = " << d << ", N_good = " << rep.n_good << "/"
            << cover.centers.size() << ", mass_good = " << rep.mass_good
            << ", vol_Gd = " << rep.vol_good << "\n";
  return 0;
}

int cmd_nodal(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  auto [fam, idx] = single_member(c, g);
  const SampledField& f = fam.fields[0];
  int res = c.extraction_resolution ? c.extraction_resolution : c.resolution;
  NodalEstimate est = extract_nodal(f, res);
  auto out = open_out(c.out_dir, "nodal_" + std::to_string(idx) + ".csv");
  write_nodal_csv(est, out);
  std::cout << "nodal pieces = " << est.pieces.size()
            << ", total H^(n-1) = " << est.total << "\n";
  if (est.empty_warning)
    std::cerr << "warning: no sign change found; empty estimate\n";
  return 0;
}

int cmd_lp(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  Family fam = build_family(c);
  const double ps[] = {2.0, 4.0, 6.0, 8.0,
                       std::numeric_limits<double>::infinity()};
  auto out = open_out(c.out_dir, "lp_norms.csv");
  auto fmt = [](double v) { return nodal::detail::fmt(v); };
  out << "lambda,p,norm\n";
  std::map<double, std::vector<std::pair<double, double>>> samples;
  for (const auto& f : fam.fields)
    for (double p : ps) {
      double v = lp_norm(f, p);
      out << fmt(f.lambda) << ',' << (std::isinf(p) ? "inf" : fmt(p)) << ','
          << fmt(v) << '\n';
      samples[p].emplace_back(f.lambda, v);
    }
  auto fitout = open_out(c.out_dir, "lp_fits.csv");
  fitout << "family,p,slope,intercept,r2\n";
  for (auto& kv : samples) {
    if (kv.second.size() < 3) continue;
    ScalingFit fit = loglog_fit(kv.second);
    fitout << c.family << ',' << (std::isinf(kv.first) ? "inf" : fmt(kv.first))
           << ',' << fmt(fit.slope) << ',' << fmt(fit.intercept) << ','
           << fmt(fit.r2) << '\n';
  }
  std::cout << "wrote lp_norms.csv and lp_fits.csv for " << fam.fields.size()
            << " fields\n";
  return 0;
}

int cmd_local(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  auto [fam, idx] = single_member(c, g);
  const SampledField& f = fam.fields[0];
  ZeroSet zeros = build_zero_set(f);
  if (zeros.points.empty()) throw no_nodal_set_error("field has no zeros");
  Vec3 p = polish_zero(f, zeros.points.front());
  double rbar = c.rbar_factor * fam.manifold->injectivity_scale();
  double smin = std::max(4.0 * f.quad->spacing, rbar / 12.0);
  std::vector<double> radii;
  for (int i = 0; i < 12; ++i)
    radii.push_back(smin + (rbar - smin) * i / 11.0);
  SphereAverageProfile prof = average_growth_residual(f, p, radii);
  auto out = open_out(c.out_dir, "profile_" + std::to_string(idx) + ".csv");
  write_profile_csv(prof, out);
  double r = wavelength_radius(calibrated_a(c, fam), f.lambda);
  double ratio = average_ratio(f, p, std::min(4.0 * r / 3.0, rbar));
  std::cout << "zero at (" << p.x << ", " << p.y << ", " << p.z
            << "), average ratio = " << ratio << ", profile radii = "
            << radii.size() << "\n";
  return 0;
}

int cmd_mesh_eig(const GlobalOpts& g, const std::string& mesh_arg, int count) {
  std::string mesh_spec = mesh_arg;
  ExperimentConfig c;
  if (!g.config_path.empty()) {
    c = parse_config_file(g.config_path);
    if (mesh_spec.empty()) mesh_spec = c.mesh_path;
    if (count == 0) count = c.eig_count;
  }
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (mesh_spec.empty()) throw config_error("--mesh or config mesh_path required");
  if (count == 0) count = 16;
  TriMesh mesh = load_mesh(mesh_spec);
  DiscreteOperator op = assemble(mesh);
  auto pairs = lowest_eigenpairs(op, count, c.eig_tol,
                                 g.seed_set ? g.seed : c.seed);
  auto out = open_out(c.out_dir.empty() ? "out" : c.out_dir, "eigenpairs.csv");
  write_eigenpairs_csv(pairs, out);
  std::cout << "mesh: " << mesh.vertices.size() << " vertices, "
            << mesh.faces.size() << " faces\n";
  for (std::size_t i = 0; i < pairs.size(); ++i)
    std::cout << "  " << i << ": lambda = " << pairs[i].lambda
              << "  residual = " << pairs[i].residual << "\n";
  return 0;
}

int cmd_sweep(const GlobalOpts& g) {
  ExperimentConfig c = load_config(g);
  SweepReport rep = run_sweep(c);
  write_sweep_outputs(rep, c.out_dir);
  std::cout << "a = " << rep.a_used << "\n";
  for (const auto& row : rep.rows) {
    if (row.ok)
      std::cout << "  index " << row.index << ": lambda = " << row.lambda
                << ", balls = " << row.num_balls << ", C_M = " << row.c_m
                << ", N_good = " << row.n_good << ", mass_good = "
                << row.mass_good << ", nodal = " << row.nodal_total << "\n";
    else
      std::cout << "  index " << row.index << ": FAILED (" << row.fail_reason
                << ")\n";
  }
  for (const auto& kv : rep.fits)
    std::cout << "  fit " << kv.first << ": slope = " << kv.second.slope
              << " (R2 = " << kv.second.r2 << ")\n";
  int n = (c.manifold == "torus") ? c.dimension : 2;
  TheoremCheck tc = theorem_check(rep, n);
  std::cout << "theorem check: c_min = " << tc.c_min
            << (tc.pass ? " (pass)" : " (FAIL)") << "\n";
  return 0;
}

int cmd_plot(const GlobalOpts& g) {
  std::string dir = g.out_dir.empty() ? "out" : g.out_dir;
  CsvTable rows = read_csv_file(dir + "/sweep_rows.csv");
  int cl = rows.column("lambda");
  auto series_of = [&](const std::string& col) {
    PlotSeries s;
    s.name = col;
    int ci = rows.column(col);
    int cok = rows.column("ok");
    for (const auto& r : rows.rows) {
      if (r[cok] != "1") continue;
      double x = std::stod(r[cl]);
      double y = std::stod(r[ci]);
      if (x > 0 && y > 0) s.points.emplace_back(x, y);
    }
    return s;
  };
  struct Chart {
    std::string file, title;
    std::vector<std::string> cols;
  };
  const Chart charts[] = {
      {"plot_nodal.svg", "total nodal measure vs lambda", {"nodal_total"}},
      {"plot_goodballs.svg", "good balls vs lambda", {"N_good", "num_balls"}},
      {"plot_volume.svg", "Vol(G_d) vs lambda", {"vol_Gd"}},
  };
  for (const auto& ch : charts) {
    std::vector<PlotSeries> series;
    for (const auto& col : ch.cols) {
      PlotSeries s = series_of(col);
      if (!s.points.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) continue;
    std::ofstream out(dir + "/" + ch.file);
    write_loglog_svg(out, ch.title, series);
    std::cout << "wrote " << dir << "/" << ch.file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical experiments on nodal sets of eigenfunctions"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--config", g.config_path, "experiment config file");
  app.add_option("--out", g.out_dir, "output directory override");
  app.add_option("--resolution", g.resolution, "resolution override");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed override");
  auto* index_opt =
      app.add_option("--index", g.index, "family index (single-field cmds)");

  std::string mesh_arg;
  int count_arg = 0;
  auto* modes = app.add_subcommand("modes", "dump one field as CSV");
  auto* cover = app.add_subcommand("cover", "build a wavelength cover");
  auto* goodballs = app.add_subcommand("goodballs", "d-good classification");
  auto* nodalc = app.add_subcommand("nodal", "extract the nodal set");
  auto* lp = app.add_subcommand("lp", "L^p norms over the family");
  auto* local = app.add_subcommand("local", "spherical-average profile");
  auto* mesheig = app.add_subcommand("mesh-eig", "discrete mesh spectrum");
  mesheig->add_option("--mesh", mesh_arg, "OFF path or icosphere:<subdiv>");
  mesheig->add_option("--count", count_arg, "number of eigenpairs");
  auto* sweep = app.add_subcommand("sweep", "full experiment sweep");
  auto* plot = app.add_subcommand("plot", "SVG charts from sweep CSVs");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;
  g.index_set = index_opt->count() > 0;

  try {
    if (modes->parsed()) return cmd_modes(g);
    if (cover->parsed()) return cmd_cover(g);
    if (goodballs->parsed()) return cmd_goodballs(g);
    if (nodalc->parsed()) return cmd_nodal(g);
    if (lp->parsed()) return cmd_lp(g);
    if (local->parsed()) return cmd_local(g);
    if (mesheig->parsed()) return cmd_mesh_eig(g, mesh_arg, count_arg);
    if (sweep->parsed()) return cmd_sweep(g);
    if (plot->parsed()) return cmd_plot(g);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
