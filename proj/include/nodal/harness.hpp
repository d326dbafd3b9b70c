#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "nodal/good_balls.hpp"
#include "nodal/local_estimates.hpp"
#include "nodal/mesh_spectrum.hpp"
#include "nodal/nodal_measure.hpp"

namespace nodal {

// ===========================================================================
// Experiment configuration: flat key = value text, '#' comments, unknown
// keys rejected. Documented defaults: periods 2*pi per axis, extraction
// resolution = resolution, d and a policies auto, rbar_factor 0.2,
// torus_mode_kind axis (n=2) / diagonal (n=3), eig_count 30, eig_tol 1e-8.
// ===========================================================================
struct ExperimentConfig {
  std::string manifold;  // torus | sphere | mesh
  int dimension = 2;     // torus only
  std::vector<double> periods;
  std::string mesh_path;  // OFF file, or builtin "icosphere:<subdiv>"
  std::string family;     // torus-mode | zonal | beam | mesh-eig
  std::vector<int> indices;
  int resolution = 0;
  int extraction_resolution = 0;
  std::string d_policy = "auto";
  double d_value = 0.0;
  std::string a_policy = "auto";
  double a_value = 0.0;
  std::string torus_mode_kind;  // axis | diagonal
  std::uint64_t seed = 12345;
  std::string out_dir = "out";
  double rbar_factor = 0.2;
  int eig_count = 30;
  double eig_tol = 1e-8;
};

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r\n");
      auto e = s.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "manifold")
        c.manifold = val;
      else if (key == "dimension")
        c.dimension = std::stoi(val);
      else if (key == "periods") {
        c.periods.clear();
        for (auto& s : split_list(val)) c.periods.push_back(std::stod(s));
      } else if (key == "mesh_path")
        c.mesh_path = val;
      else if (key == "family")
        c.family = val;
      else if (key == "indices") {
        c.indices.clear();
        for (auto& s : split_list(val)) c.indices.push_back(std::stoi(s));
      } else if (key == "resolution")
        c.resolution = std::stoi(val);
      else if (key == "extraction_resolution")
        c.extraction_resolution = std::stoi(val);
      else if (key == "d_policy")
        c.d_policy = val;
      else if (key == "d_value")
        c.d_value = std::stod(val);
      else if (key == "a_policy")
        c.a_policy = val;
      else if (key == "a_value")
        c.a_value = std::stod(val);
      else if (key == "torus_mode_kind")
        c.torus_mode_kind = val;
      else if (key == "seed")
        c.seed = std::stoull(val);
      else if (key == "out_dir")
        c.out_dir = val;
      else if (key == "rbar_factor")
        c.rbar_factor = std::stod(val);
      else if (key == "eig_count")
        c.eig_count = std::stoi(val);
      else if (key == "eig_tol")
        c.eig_tol = std::stod(val);
      else
        throw config_error("unknown config key: " + key);
    } catch (const config_error&) {
      throw;
    } catch (const std::exception&) {
      throw config_error("config line " + std::to_string(lineno) +
                         ": cannot parse value for " + key);
    }
  }
  return c;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return parse_config(in);
}

inline void validate_config(const ExperimentConfig& c) {
  if (c.manifold != "torus" && c.manifold != "sphere" && c.manifold != "mesh")
    throw config_error("manifold must be torus, sphere or mesh");
  if (c.family != "torus-mode" && c.family != "zonal" && c.family != "beam" &&
      c.family != "mesh-eig")
    throw config_error("family must be torus-mode, zonal, beam or mesh-eig");
  if (c.indices.empty()) throw config_error("indices must be nonempty");
  if (c.manifold != "mesh" && c.resolution < 64)
    throw config_error("resolution must be >= 64");
  if (c.manifold == "mesh" && c.mesh_path.empty())
    throw config_error("mesh manifold requires mesh_path");
  if (c.d_policy != "auto" && c.d_policy != "explicit")
    throw config_error("d_policy must be auto or explicit");
  if (c.a_policy != "auto" && c.a_policy != "explicit")
    throw config_error("a_policy must be auto or explicit");
  if (c.d_policy == "explicit" && !(c.d_value > 1.0))
    throw config_error("explicit d_value must be > 1");
  if (c.a_policy == "explicit" && !(c.a_value > 0.0))
    throw config_error("explicit a_value must be > 0");
}

inline TriMesh load_mesh(const std::string& spec) {
  if (spec.rfind("icosphere:", 0) == 0) {
    int subdiv = std::stoi(spec.substr(10));
    if (subdiv < 0 || subdiv > 7) throw config_error("icosphere subdiv 0..7");
    return icosphere(subdiv);
  }
  return read_off_file(spec);
}

// ===========================================================================
// Family construction: manifold, quadrature, one field per index.
// ===========================================================================
struct Family {
  std::shared_ptr<const ManifoldModel> manifold;
  std::shared_ptr<const Quadrature> quad;
  std::vector<SampledField> fields;
  std::vector<int> indices;
};

inline Family build_family(const ExperimentConfig& c) {
  validate_config(c);
  Family fam;
  fam.indices = c.indices;
  if (c.manifold == "torus") {
    std::vector<double> periods = c.periods;
    if (periods.empty()) periods.assign(c.dimension, kTwoPi);
    auto man =
        std::make_shared<const ManifoldModel>(ManifoldModel::flat_torus(periods));
    auto quad = std::make_shared<const Quadrature>(
        build_quadrature(*man, c.resolution));
    std::string kind = c.torus_mode_kind.empty()
                           ? (c.dimension == 2 ? "axis" : "diagonal")
                           : c.torus_mode_kind;
    for (int idx : c.indices) {
      std::vector<int> k(c.dimension, 0);
      if (kind == "axis")
        k[0] = idx;
      else
        k.assign(c.dimension, idx);
      std::vector<Phase> ph(c.dimension, Phase::Sin);
      fam.fields.push_back(torus_mode(man, quad, k, ph));
    }
    fam.manifold = man;
    fam.quad = quad;
  } else if (c.manifold == "sphere") {
    auto man = std::make_shared<const ManifoldModel>(ManifoldModel::round_sphere());
    auto quad = std::make_shared<const Quadrature>(
        build_quadrature(*man, c.resolution));
    HarmonicKind kind =
        (c.family == "zonal") ? HarmonicKind::Zonal : HarmonicKind::Beam;
    for (int idx : c.indices)
      fam.fields.push_back(sphere_harmonic(man, quad, idx, kind));
    fam.manifold = man;
    fam.quad = quad;
  } else {
    auto man = std::make_shared<const ManifoldModel>(
        ManifoldModel::mesh_surface(load_mesh(c.mesh_path)));
    auto quad = std::make_shared<const Quadrature>(build_quadrature(*man, 8));
    DiscreteOperator op = assemble(man->mesh());
    int needed = 1 + *std::max_element(c.indices.begin(), c.indices.end());
    int count = std::max(c.eig_count, needed);
    auto pairs = lowest_eigenpairs(op, count, c.eig_tol, c.seed);
    for (int idx : c.indices) {
      if (idx < 1 || idx >= count)
        throw config_error("mesh eigenpair index out of range");
      fam.fields.push_back(to_field(pairs[idx], man, quad));
    }
    fam.manifold = man;
    fam.quad = quad;
  }
  return fam;
}

// ===========================================================================
// Sweep: per family member, calibrate/apply a, cover at r = a/sqrt(lambda),
// multiplicity, choose d, classify, nodal extraction, per-ball local
// estimates; then log-log fits over the rows.
// ===========================================================================
struct PerBallLocal {
  std::uint32_t ball = 0;
  bool good = false;
  bool skipped = false;  // no usable zero / one-signed / degenerate
  double nodal = 0.0;    // H^{n-1}(B_r(p) cap {u=0})
  double vol_plus = 0.0, vol_minus = 0.0;
  double int_plus = 0.0, int_minus = 0.0, int_abs = 0.0;
  double avg_ratio = 0.0;
  double mv_c0 = 0.0;
  double rev_holder = 0.0;
};

struct SweepRow {
  int index = 0;
  bool ok = false;
  std::string fail_reason;
  double lambda = 0.0, r = 0.0;
  int num_balls = 0, c_m = 0;
  double d = 0.0;
  int n_good = 0;
  double mass_good = 0.0, vol_gd = 0.0, nodal_total = 0.0;
  double min_nodal_floor = 0.0;
  double min_sign_volume_ratio = 0.0;
  double mean_value_c0 = 0.0;
  double reverse_holder = 0.0;
  // extended per-ball detail (kept in memory, dumped via the per-ball CSV)
  double max_avg_ratio = 0.0;
  double min_sign_mass_ratio = 0.0;
  std::vector<PerBallLocal> ball_table;
};

struct SweepReport {
  ExperimentConfig config;
  double a_used = 0.0;
  std::vector<SweepRow> rows;
  std::map<std::string, ScalingFit> fits;
};

inline SweepReport run_sweep(const ExperimentConfig& c) {
  Family fam = build_family(c);
  SweepReport rep;
  rep.config = c;

  double a = 0.0;
  if (c.a_policy == "explicit") {
    a = c.a_value;
  } else {
    double zmax = 0.0;
    for (const auto& f : fam.fields)
      zmax = std::max(zmax, zero_spacing_scale(f));
    a = 1.1 * zmax;  // 10% margin absorbs discretization error
  }
  rep.a_used = a;

  const ManifoldModel& man = *fam.manifold;
  int n = man.dimension();
  int ext_res = c.extraction_resolution ? c.extraction_resolution : c.resolution;

  for (std::size_t fi = 0; fi < fam.fields.size(); ++fi) {
    SweepRow row;
    row.index = fam.indices[fi];
    const SampledField& f = fam.fields[fi];
    row.lambda = f.lambda;
    try {
      row.r = wavelength_radius(a, f.lambda);
      BallCover cover = build_cover(man, *f.quad, row.r);
      row.num_balls = static_cast<int>(cover.centers.size());
      row.c_m = overlap_multiplicity(man, *f.quad, cover);
      row.d = (c.d_policy == "explicit") ? c.d_value : choose_d(row.c_m);
      GoodBallReport gb = classify(f, cover, row.d);
      gb.c_m = row.c_m;
      row.n_good = gb.n_good;
      row.mass_good = gb.mass_good;
      row.vol_gd = gb.vol_good;

      NodalEstimate est = extract_nodal(f, ext_res);
      row.nodal_total = est.total;

      ZeroSet zeros = build_zero_set(f);
      double rn = std::pow(row.r, n);
      double rn1 = std::pow(row.r, n - 1);
      row.min_nodal_floor = std::numeric_limits<double>::infinity();
      row.min_sign_volume_ratio = std::numeric_limits<double>::infinity();
      row.min_sign_mass_ratio = std::numeric_limits<double>::infinity();
      int processed = 0;
      for (std::size_t b = 0; b < cover.centers.size(); ++b) {
        if (!gb.balls[b].good) continue;
        PerBallLocal loc;
        loc.ball = static_cast<std::uint32_t>(b);
        loc.good = true;
        const Vec3& center = cover.centers[b];
        loc.nodal = nodal_in_ball(est, man, center, row.r);
        row.min_nodal_floor = std::min(row.min_nodal_floor, loc.nodal / rn1);
        auto [zdist, zid] = zeros.nearest(center);
        if (zdist > row.r / 3.0) {
          loc.skipped = true;
          row.ball_table.push_back(loc);
          continue;
        }
        Vec3 q = polish_zero(f, zeros.points[zid]);
        double r43 = 4.0 * row.r / 3.0;
        SignVolumes sv = sign_volumes(f, q, r43);
        SignMasses sm = sign_masses(f, q, r43);
        loc.vol_plus = sv.vol_plus;
        loc.vol_minus = sv.vol_minus;
        loc.int_plus = sm.int_plus;
        loc.int_minus = sm.int_minus;
        loc.int_abs = sm.int_abs;
        if (!(sm.int_abs > 0.0) ||
            std::min(sv.vol_plus, sv.vol_minus) <= 0.0) {
          loc.skipped = true;
          row.ball_table.push_back(loc);
          continue;
        }
        loc.avg_ratio = std::abs(sm.int_plus - sm.int_minus) / sm.int_abs;
        double sup2 = 0.0;
        ball_visit(man, *f.quad, q, r43, [&](std::size_t i) {
          sup2 = std::max(sup2, f.values[i] * f.values[i]);
        });
        double m2r = ball_mass(f, center, 2.0 * row.r);
        double m43 = ball_mass(f, q, r43);
        loc.mv_c0 = sup2 * rn / m2r;
        loc.rev_holder = m43 * rn / (sm.int_abs * sm.int_abs);
        row.ball_table.push_back(loc);
        ++processed;

        row.min_sign_volume_ratio =
            std::min(row.min_sign_volume_ratio,
                     std::min(sv.vol_plus, sv.vol_minus) / rn);
        row.min_sign_mass_ratio =
            std::min(row.min_sign_mass_ratio,
                     std::min(sm.int_plus, sm.int_minus) / sm.int_abs);
        row.max_avg_ratio = std::max(row.max_avg_ratio, loc.avg_ratio);
        row.mean_value_c0 = std::max(row.mean_value_c0, loc.mv_c0);
        row.reverse_holder = std::max(row.reverse_holder, loc.rev_holder);
      }
      if (processed == 0) {
        // no usable zero-anchored ball; report honest zeros, not infinities
        row.min_sign_volume_ratio = 0.0;
        row.min_sign_mass_ratio = 0.0;
      }
      if (!std::isfinite(row.min_nodal_floor)) row.min_nodal_floor = 0.0;
      row.ok = true;
    } catch (const error& e) {
      row.ok = false;
      row.fail_reason = e.what();
    }
    rep.rows.push_back(std::move(row));
  }

  std::vector<std::pair<double, double>> nod, ng, vg;
  for (const auto& row : rep.rows) {
    if (!row.ok) continue;
    if (row.nodal_total > 0) nod.emplace_back(row.lambda, row.nodal_total);
    if (row.n_good > 0) ng.emplace_back(row.lambda, row.n_good);
    if (row.vol_gd > 0) vg.emplace_back(row.lambda, row.vol_gd);
  }
  if (nod.size() < 3)
    throw insufficient_sweep_error("sweep produced fewer than 3 usable rows");
  rep.fits["nodal_total"] = loglog_fit(nod);
  rep.fits["n_good"] = loglog_fit(ng);
  rep.fits["vol_gd"] = loglog_fit(vg);
  return rep;
}

// c_min = min over rows of nodal_total / lambda^{(3-n)/4}; passes when it is
// positive and every row's per-good-ball nodal floor is positive.
struct TheoremCheck {
  double c_min = 0.0;
  bool pass = false;
};

inline TheoremCheck theorem_check(const SweepReport& rep, int n) {
  TheoremCheck out;
  out.c_min = std::numeric_limits<double>::infinity();
  bool any = false;
  bool floors = true;
  for (const auto& row : rep.rows) {
    if (!row.ok) continue;
    any = true;
    out.c_min = std::min(out.c_min,
                         row.nodal_total / std::pow(row.lambda, (3.0 - n) / 4.0));
    if (!(row.min_nodal_floor > 0.0)) floors = false;
  }
  if (!any) throw domain_error("theorem_check on an empty report");
  out.pass = out.c_min > 0.0 && floors;
  return out;
}

// ===========================================================================
// CSV emission. All doubles are printed with %.17g so identical configs
// produce byte-identical artifacts and fits regenerate exactly.
// ===========================================================================
namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_sweep_rows_csv(const SweepReport& rep, std::ostream& out) {
  out << "index,lambda,r,num_balls,C_M,d,N_good,mass_good,vol_Gd,nodal_total,"
         "min_nodal_floor,min_sign_volume_ratio,mean_value_C0,reverse_holder,"
         "ok,fail_reason\n";
  for (const auto& r : rep.rows) {
    out << r.index << ',' << detail::fmt(r.lambda) << ',' << detail::fmt(r.r)
        << ',' << r.num_balls << ',' << r.c_m << ',' << detail::fmt(r.d) << ','
        << r.n_good << ',' << detail::fmt(r.mass_good) << ','
        << detail::fmt(r.vol_gd) << ',' << detail::fmt(r.nodal_total) << ','
        << detail::fmt(r.min_nodal_floor) << ','
        << detail::fmt(r.min_sign_volume_ratio) << ','
        << detail::fmt(r.mean_value_c0) << ',' << detail::fmt(r.reverse_holder)
        << ',' << (r.ok ? 1 : 0) << ',' << r.fail_reason << '\n';
  }
}

inline void write_sweep_fits_csv(const SweepReport& rep, std::ostream& out) {
  out << "quantity,slope,intercept,r2,n_samples\n";
  for (const auto& kv : rep.fits)
    out << kv.first << ',' << detail::fmt(kv.second.slope) << ','
        << detail::fmt(kv.second.intercept) << ',' << detail::fmt(kv.second.r2)
        << ',' << kv.second.samples.size() << '\n';
}

inline void write_ball_table_csv(const SweepRow& row, std::ostream& out) {
  out << "ball,nodal,volPlus,volMinus,intPlus,intMinus,good,skipped\n";
  for (const auto& b : row.ball_table)
    out << b.ball << ',' << detail::fmt(b.nodal) << ','
        << detail::fmt(b.vol_plus) << ',' << detail::fmt(b.vol_minus) << ','
        << detail::fmt(b.int_plus) << ',' << detail::fmt(b.int_minus) << ','
        << (b.good ? 1 : 0) << ',' << (b.skipped ? 1 : 0) << '\n';
}

inline void write_field_csv(const SampledField& f, std::ostream& out) {
  int dims = (f.manifold->kind() == ManifoldKind::FlatTorus)
                 ? f.manifold->dimension()
                 : 3;
  out << (dims == 2 ? "x,y" : "x,y,z") << ",weight,value\n";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const Vec3& p = f.quad->points[i];
    out << detail::fmt(p.x) << ',' << detail::fmt(p.y);
    if (dims == 3) out << ',' << detail::fmt(p.z);
    out << ',' << detail::fmt(f.quad->weights[i]) << ','
        << detail::fmt(f.values[i]) << '\n';
  }
}

inline void write_cover_csv(const BallCover& cover, std::ostream& out) {
  out << "center_index,x,y,z\n";
  for (std::size_t i = 0; i < cover.centers.size(); ++i) {
    const Vec3& p = cover.centers[i];
    out << cover.center_ids[i] << ',' << detail::fmt(p.x) << ','
        << detail::fmt(p.y) << ',' << detail::fmt(p.z) << '\n';
  }
}

inline void write_multiplicity_csv(const BallCover& cover, std::ostream& out) {
  out << "multiplicity,count\n";
  for (std::size_t m = 0; m < cover.multiplicity_histogram.size(); ++m)
    out << m << ',' << cover.multiplicity_histogram[m] << '\n';
}

inline void write_goodball_csv(const BallCover& cover,
                               const GoodBallReport& rep, std::ostream& out) {
  out << "ball,center_x,center_y,center_z,mass_B,mass_2B,ratio,good\n";
  for (std::size_t b = 0; b < rep.balls.size(); ++b) {
    const auto& st = rep.balls[b];
    const Vec3& p = cover.centers[b];
    double ratio = st.mass_ball > 0 ? st.mass_double / st.mass_ball : 0.0;
    out << b << ',' << detail::fmt(p.x) << ',' << detail::fmt(p.y) << ','
        << detail::fmt(p.z) << ',' << detail::fmt(st.mass_ball) << ','
        << detail::fmt(st.mass_double) << ',' << detail::fmt(ratio) << ','
        << (st.good ? 1 : 0) << '\n';
  }
  out << "summary," << rep.n_good << ',' << detail::fmt(rep.mass_good) << ','
      << detail::fmt(rep.vol_good) << ',' << detail::fmt(rep.d) << ','
      << rep.c_m << ",,\n";
}

inline void write_nodal_csv(const NodalEstimate& est, std::ostream& out) {
  out << "piece,ax,ay,az,bx,by,bz,cx,cy,cz,measure\n";
  for (std::size_t i = 0; i < est.pieces.size(); ++i) {
    const auto& p = est.pieces[i];
    out << i << ',' << detail::fmt(p.a.x) << ',' << detail::fmt(p.a.y) << ','
        << detail::fmt(p.a.z) << ',' << detail::fmt(p.b.x) << ','
        << detail::fmt(p.b.y) << ',' << detail::fmt(p.b.z) << ','
        << detail::fmt(p.c.x) << ',' << detail::fmt(p.c.y) << ','
        << detail::fmt(p.c.z) << ',' << detail::fmt(p.measure) << '\n';
  }
}

inline void write_eigenpairs_csv(const std::vector<EigenPair>& pairs,
                                 std::ostream& out) {
  out << "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out << i << ',' << detail::fmt(pairs[i].lambda) << ','
        << detail::fmt(pairs[i].residual) << '\n';
}

inline void write_profile_csv(const SphereAverageProfile& prof,
                              std::ostream& out) {
  out << "s,I_u,I_abs_u,dI_u,bound_rhs\n";
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    out << detail::fmt(prof.radii[i]) << ',' << detail::fmt(prof.i_u[i]) << ','
        << detail::fmt(prof.i_abs[i]) << ',' << detail::fmt(prof.di_u[i])
        << ',' << detail::fmt(prof.bound_rhs[i]) << '\n';
}

// Minimal CSV reader (no quoting; our writers never emit quotes).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw domain_error("csv column not found: " + name);
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open csv: " + path);
  return read_csv(in);
}

inline void write_sweep_outputs(const SweepReport& rep,
                                const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/sweep_rows.csv");
    write_sweep_rows_csv(rep, out);
  }
  {
    std::ofstream out(dir + "/sweep_fits.csv");
    write_sweep_fits_csv(rep, out);
  }
  for (const auto& row : rep.rows) {
    if (!row.ok) continue;
    std::ofstream out(dir + "/ball_table_" + std::to_string(row.index) +
                      ".csv");
    write_ball_table_csv(row, out);
  }
}

}  // namespace nodal
