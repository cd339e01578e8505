#include "formspace/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "formspace/field_space.hpp"
#include "formspace/io.hpp"

namespace formspace::cli {

namespace {

using nlohmann::ordered_json;

// Report numbers carry 12 significant digits.
ordered_json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

ordered_json numbers(const Matrix& a) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) arr.push_back(number(a(i, j)));
  }
  return arr;
}

struct Globals {
  SolverOptions solver;
  bool timing = false;
};

class Report {
 public:
  Report(std::ostream& out, const Globals& g) : out_(out), globals_(g) {}

  ordered_json record(const std::string& query, double value, double lower, std::string_view method,
                      int iters) const {
    ordered_json r;
    r["query"] = query;
    r["value"] = number(value);
    r["lower_bound"] = number(lower);
    r["method"] = std::string(method);
    r["iters"] = iters;
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    r["elapsed_ms"] = globals_.timing ? number(ms) : ordered_json(0);
    return r;
  }

  void emit(const ordered_json& r) const { out_ << r.dump() << '\n'; }

  void restart_clock() { start_ = Clock::now(); }

 private:
  using Clock = std::chrono::steady_clock;
  std::ostream& out_;
  const Globals& globals_;
  Clock::time_point start_ = Clock::now();
};

double lower_bound_field(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                         const std::vector<double>& w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double lb = lower_bound(a[k], b[k]);
    sum += w[k] * lb * lb;
  }
  return std::sqrt(sum);
}

FullRankMatrix full_rank_input(const Matrix& a, const std::string& name, double rank_tol) {
  try {
    return FullRankMatrix(a, rank_tol);
  } catch (const Error& e) {
    throw io::ParseError(name + ": " + e.what());
  }
}

OneFormField one_form_input(const io::FieldFile& f, const std::string& name, double rank_tol) {
  if (f.kind != io::FieldKind::one_form) throw io::ParseError(name + ": kind must be \"one-form\"");
  try {
    return make_one_form_field(f.manifold(), f.matrices, rank_tol);
  } catch (const PointwiseFailure& e) {
    throw io::ParseError(name + ": records[" + std::to_string(e.index()) + "] (point_id '" +
                         f.point_ids[e.index()] + "'): " + e.what());
  }
}

void same_points(const io::FieldFile& a, const io::FieldFile& b) {
  if (a.n != b.n || a.m != b.m) throw io::ParseError("n, m: the two field files differ in shape");
  if (a.point_ids != b.point_ids) throw io::ParseError("records.point_id: the two field files list different points");
  if (a.weights != b.weights) throw io::ParseError("records.weight: the two field files use different weights");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometry of full-rank matrices and one-form fields"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--rank-tol", g.solver.rank_tol, "Relative rank tolerance")->capture_default_str();
  app.add_option("--endpoint-tol", g.solver.endpoint_tol, "Shooting endpoint tolerance (Frobenius)")
      ->capture_default_str();
  app.add_option("--pl-segments", g.solver.pl_segments, "Segments of the PL route")->capture_default_str();
  app.add_option("--pl-iters", g.solver.pl_iters, "PL sweeps per refinement level")->capture_default_str();
  app.add_option("--restarts", g.solver.restarts, "PL restarts")->capture_default_str();
  app.add_option("--seed", g.solver.seed, "Seed for randomized restarts")->capture_default_str();
  app.add_flag("--timing", g.timing, "Report measured elapsed_ms instead of 0");

  std::string file_a;
  std::string file_b;
  std::string out_path;
  int t_samples = 11;
  double t_max = 1.0;
  double t_interp = 0.5;
  bool completion = false;
  double align_tol = 1e-8;
  int lift_n = 0;

  std::function<int(Report&)> action;

  auto* fiber_dist = app.add_subcommand("fiber-dist", "Distance between two full-rank matrices");
  fiber_dist->add_option("A", file_a, "Matrix file")->required();
  fiber_dist->add_option("B", file_b, "Matrix file")->required();
  fiber_dist->callback([&] {
    action = [&](Report& rep) {
      const FullRankMatrix a = full_rank_input(io::read_matrix_file(file_a), "A", g.solver.rank_tol);
      const FullRankMatrix b = full_rank_input(io::read_matrix_file(file_b), "B", g.solver.rank_tol);
      if (a.n() != b.n() || a.m() != b.m()) throw io::ParseError("B: shape differs from A");
      const DistanceResult d = distance(a, b, g.solver);
      auto r = rep.record("fiber-dist", d.value, d.lower, to_string(d.method), d.iterations);
      r["shooting_value"] = d.shooting_value ? number(*d.shooting_value) : ordered_json(nullptr);
      r["pl_value"] = d.pl_value ? number(*d.pl_value) : ordered_json(nullptr);
      r["singular_value"] = number(d.singular_value);
      rep.emit(r);
      return kExitOk;
    };
  });

  auto* geodesic = app.add_subcommand("fiber-geodesic", "Sample the geodesic exp_A(t zeta)");
  geodesic->add_option("A", file_a, "Base point matrix file")->required();
  geodesic->add_option("ZETA", file_b, "Initial velocity matrix file")->required();
  geodesic->add_option("--t-samples", t_samples, "Number of samples in [0, t-max]")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  geodesic->add_option("--t-max", t_max, "Last sampled parameter")->check(CLI::PositiveNumber)->capture_default_str();
  geodesic->callback([&] {
    action = [&](Report& rep) {
      const FullRankMatrix a = full_rank_input(io::read_matrix_file(file_a), "A", g.solver.rank_tol);
      const Matrix zeta = io::read_matrix_file(file_b);
      if (zeta.rows() != a.n() || zeta.cols() != a.m()) throw io::ParseError("ZETA: shape differs from A");
      const GeodesicData gd = geodesic_data(a, zeta);
      if (t_max >= gd.blowup) {
        throw io::ParseError("ZETA: geodesic reaches the singular stratum at t = " + std::to_string(gd.blowup) +
                             " <= t-max");
      }
      const double speed = norm(a, zeta);
      for (int i = 0; i < t_samples; ++i) {
        const double t = t_max * i / (t_samples - 1);
        const Matrix x = exp_map(gd, t, g.solver.rank_tol);
        auto r = rep.record("fiber-geodesic", speed * t, lower_bound(a.matrix(), x), "closed_form", 0);
        r["t"] = number(t);
        r["matrix"] = numbers(x);
        rep.emit(r);
      }
      return kExitOk;
    };
  });

  auto* field_dist = app.add_subcommand("field-dist", "L2 distance between two one-form fields");
  field_dist->add_option("F1", file_a, "Field file")->required();
  field_dist->add_option("F2", file_b, "Field file")->required();
  field_dist->add_flag("--completion", completion, "Compare in the metric completion");
  field_dist->callback([&] {
    action = [&](Report& rep) {
      const io::FieldFile f1 = io::read_field_file(file_a);
      const io::FieldFile f2 = io::read_field_file(file_b);
      same_points(f1, f2);
      const double lower = lower_bound_field(f1.matrices, f2.matrices, f1.weights);
      if (completion) {
        const CompletionField a = canonicalize(f1.matrices, f1.manifold(), g.solver.rank_tol);
        const CompletionField b = canonicalize(f2.matrices, a.manifold, g.solver.rank_tol);
        auto r = rep.record("field-dist", field_distance(a, b, g.solver), lower, "completion", 0);
        r["points"] = a.size();
        rep.emit(r);
        return kExitOk;
      }
      const OneFormField a = one_form_input(f1, "F1", g.solver.rank_tol);
      const OneFormField b = one_form_input(f2, "F2", g.solver.rank_tol);
      const auto d = pointwise_distances(a, b, g.solver);
      double sum = 0.0;
      int iters = 0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        sum += f1.weights[k] * d[k].value * d[k].value;
        iters += d[k].iterations;
      }
      auto r = rep.record("field-dist", std::sqrt(sum), lower, "pointwise", iters);
      r["points"] = d.size();
      rep.emit(r);
      return kExitOk;
    };
  });

  auto* interp = app.add_subcommand("field-interp", "Pointwise geodesic interpolation of two fields");
  interp->add_option("F1", file_a, "Field file")->required();
  interp->add_option("F2", file_b, "Field file")->required();
  interp->add_option("--t", t_interp, "Interpolation parameter in [0, 1]")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  interp->add_option("--out", out_path, "Output field file")->required();
  interp->callback([&] {
    action = [&](Report& rep) {
      const io::FieldFile f1 = io::read_field_file(file_a);
      const io::FieldFile f2 = io::read_field_file(file_b);
      same_points(f1, f2);
      const OneFormField a = one_form_input(f1, "F1", g.solver.rank_tol);
      const OneFormField b = one_form_input(f2, "F2", g.solver.rank_tol);
      const double lower = lower_bound_field(f1.matrices, f2.matrices, f1.weights);
      try {
        const FieldGeodesic geo(a, b, g.solver);
        io::FieldFile result = io::make_field_file(geo.at(t_interp));
        result.metadata = f1.metadata;
        result.metadata["interpolation_t"] = t_interp;
        io::write_field_file(out_path, result);
        auto r = rep.record("field-interp", geo.length(), lower, "shooting", 0);
        r["t"] = number(t_interp);
        r["out"] = out_path;
        rep.emit(r);
        return kExitOk;
      } catch (const PointwiseFailure& e) {
        auto r = rep.record("field-interp", kInfinity, lower, "shooting", 0);
        r["status"] = "no_convergence";
        r["failed_point"] = f1.point_ids[e.index()];
        r["converged_points"] = e.index();
        rep.emit(r);
        err << "field-interp: " << e.what() << '\n';
        return kExitNoConvergence;
      }
    };
  });

  auto* align_cmd = app.add_subcommand("align", "Rotation field O with F1 = O F2");
  align_cmd->add_option("F1", file_a, "Field file")->required();
  align_cmd->add_option("F2", file_b, "Field file")->required();
  align_cmd->add_option("--out", out_path, "Output rotation field file")->required();
  align_cmd->add_option("--tol", align_tol, "Relative Gram mismatch tolerance")->capture_default_str();
  align_cmd->callback([&] {
    action = [&](Report& rep) {
      const io::FieldFile f1 = io::read_field_file(file_a);
      const io::FieldFile f2 = io::read_field_file(file_b);
      same_points(f1, f2);
      const OneFormField a = one_form_input(f1, "F1", g.solver.rank_tol);
      const OneFormField b = one_form_input(f2, "F2", g.solver.rank_tol);
      RotationField o;
      try {
        o = field_align(a, b, align_tol);
      } catch (const GramMismatch& e) {
        std::string ids;
        for (std::size_t k : e.indices()) ids += (ids.empty() ? "" : ", ") + f1.point_ids[k];
        throw io::ParseError("records.matrix: Gram matrices differ at point_ids " + ids);
      }
      double worst = 0.0;
      for (std::size_t k = 0; k < o.size(); ++k) {
        worst = std::max(worst, (a.values[k].matrix() - o.values[k].matrix() * b.values[k].matrix()).norm());
      }
      io::write_field_file(out_path, io::make_field_file(o));
      auto r = rep.record("align", worst, 0.0, "polar", 0);
      r["out"] = out_path;
      rep.emit(r);
      return kExitOk;
    };
  });

  auto* project_cmd = app.add_subcommand("project-metric", "Induced metric field A^T A");
  project_cmd->add_option("F", file_a, "Field file")->required();
  project_cmd->add_option("--out", out_path, "Output metric field file")->required();
  project_cmd->callback([&] {
    action = [&](Report& rep) {
      const io::FieldFile f = io::read_field_file(file_a);
      const OneFormField a = one_form_input(f, "F", g.solver.rank_tol);
      io::FieldFile result = io::make_field_file(metric_field(a));
      result.metadata = f.metadata;
      io::write_field_file(out_path, result);
      auto r = rep.record("project-metric", field_volume(a), 0.0, "project", 0);
      r["out"] = out_path;
      rep.emit(r);
      return kExitOk;
    };
  });

  auto* sym = app.add_subcommand("sym-dist", "Quotient distance between SPD matrices or metric fields");
  sym->add_option("G1", file_a, "Metric field or SPD matrix file")->required();
  sym->add_option("G2", file_b, "Metric field or SPD matrix file")->required();
  sym->add_option("--n", lift_n, "Dimension n of the lifting space (defaults to the field's n)");
  sym->callback([&] {
    action = [&](Report& rep) {
      const auto j1 = io::read_json(file_a);
      const auto j2 = io::read_json(file_b);
      auto spd = [&](const Matrix& x, const std::string& name) {
        try {
          return SPDMatrix(x, g.solver.rank_tol);
        } catch (const Error& e) {
          throw io::ParseError(name + ": " + e.what());
        }
      };
      if (j1.contains("records") && j2.contains("records")) {
        const io::FieldFile f1 = io::parse_field(j1);
        const io::FieldFile f2 = io::parse_field(j2);
        if (f1.kind != io::FieldKind::metric || f2.kind != io::FieldKind::metric) {
          throw io::ParseError("kind: sym-dist fields must have kind \"metric\"");
        }
        same_points(f1, f2);
        const Eigen::Index n = lift_n > 0 ? lift_n : f1.n;
        if (n <= f1.m) throw io::ParseError("--n: must exceed m");
        MetricField a{f1.manifold(), {}};
        MetricField b{a.manifold, {}};
        double lower = 0.0;
        for (std::size_t k = 0; k < f1.matrices.size(); ++k) {
          a.values.push_back(spd(f1.matrices[k], "G1.records[" + std::to_string(k) + "].matrix"));
          b.values.push_back(spd(f2.matrices[k], "G2.records[" + std::to_string(k) + "].matrix"));
          const double lb = 2.0 / std::sqrt(static_cast<double>(f1.m)) *
                            std::abs(std::pow(a.values[k].matrix().determinant(), 0.25) -
                                     std::pow(b.values[k].matrix().determinant(), 0.25));
          lower += f1.weights[k] * lb * lb;
        }
        auto r = rep.record("sym-dist", ebin_field_distance(a, b, n, g.solver), std::sqrt(lower), "pointwise", 0);
        r["points"] = a.size();
        rep.emit(r);
        return kExitOk;
      }
      const SPDMatrix a = spd(io::parse_matrix(j1), "G1");
      const SPDMatrix b = spd(io::parse_matrix(j2), "G2");
      if (a.m() != b.m()) throw io::ParseError("G2: shape differs from G1");
      if (lift_n <= a.m()) throw io::ParseError("--n: required and must exceed m");
      const SymDistanceResult d = sym_distance(a, b, lift_n, g.solver);
      const double lower = 2.0 / std::sqrt(static_cast<double>(a.m())) *
                           std::abs(std::pow(a.matrix().determinant(), 0.25) - std::pow(b.matrix().determinant(), 0.25));
      auto r = rep.record("sym-dist", d.value, lower, to_string(d.method), d.iterations);
      r["rotation"] = numbers(d.rotation);
      rep.emit(r);
      return kExitOk;
    };
  });

  auto* singular = app.add_subcommand("dist-to-singular", "Distance to the singular stratum");
  singular->add_option("A", file_a, "Matrix file")->required();
  singular->callback([&] {
    action = [&](Report& rep) {
      const FullRankMatrix a = full_rank_input(io::read_matrix_file(file_a), "A", g.solver.rank_tol);
      const double d = dist_to_singular(a.matrix());
      rep.emit(rep.record("dist-to-singular", d, d, "closed_form", 0));
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (g.solver.pl_segments < 1 || g.solver.pl_iters < 0 || g.solver.restarts < 1 ||
      !(g.solver.rank_tol > 0.0) || !(g.solver.endpoint_tol > 0.0)) {
    err << "error: global solver flags out of range\n";
    return kExitBadInput;
  }

  Report report(out, g);
  try {
    return action(report);
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ManifoldMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

}  // namespace formspace::cli
