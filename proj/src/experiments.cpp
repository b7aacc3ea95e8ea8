#include "gaflab/experiments.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <ostream>
#include <sstream>

#include "gaflab/convergence.hpp"
#include "gaflab/csv.hpp"
#include "gaflab/error.hpp"
#include "gaflab/gaf.hpp"
#include "gaflab/hyperparam.hpp"
#include "gaflab/surface.hpp"
#include "gaflab/version.hpp"
#include "json.hpp"

namespace gaflab {

bool ExperimentResult::passed() const noexcept {
  for (const Assertion& a : assertions) {
    if (!a.ok) return false;
  }
  return true;
}

namespace {

std::string fmt(double x) { return format_double(x); }

// File-name-safe form of a label.
std::string slug(std::string_view label) {
  std::string out;
  for (char c : label) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

class Builder {
 public:
  explicit Builder(const ExperimentConfig& c) { r_.config = c; }

  void note(const std::string& key, const std::string& value) {
    r_.notes.push_back(key + ": " + value);
  }
  void check(const std::string& name, bool ok, const std::string& detail) {
    r_.assertions.push_back({name, ok, detail});
  }
  void artifact(std::string name, std::string contents) {
    r_.artifacts.push_back({std::move(name), std::move(contents)});
  }
  ExperimentResult take() { return std::move(r_); }

 private:
  ExperimentResult r_;
};

OptimizerSpec baseline_spec(const ExperimentConfig& c) {
  OptimizerSpec s = c.optimizer;
  s.transform = c.baseline;
  return s;
}

RegionSpec region_for(const ExperimentConfig& c, const Problem& p) {
  RegionSpec r = c.region;
  if (r.box.empty()) r.box.assign(p.dim, {-1.0, 1.0});
  if (r.box.size() != p.dim) {
    throw ConfigError("region.box: expected " + std::to_string(p.dim) + " intervals, got " +
                      std::to_string(r.box.size()));
  }
  r.validate();
  return r;
}

GradientField field_of(const Problem& p, const GradientTransform& t) {
  return [p, t](std::span<const double> w) { return apply_transform(t, p.grad(w)); };
}

template <class F>
void for_each_seed(std::size_t n, int jobs, F&& body) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  bool failed = false;
  std::exception_ptr first;
#pragma omp parallel for num_threads(std::max(1, jobs)) schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(gaflab_seed_error)
      {
        if (!failed) {
          failed = true;
          first = std::current_exception();
        }
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

void run_validate(const ExperimentConfig& c, Builder& b) {
  const GafSpec* spec = c.optimizer.transform.gaf_spec();
  if (!spec) throw ConfigError("transform.kind: validate needs arctan, tanh or log");
  const std::vector<double> grid = symmetric_grid(c.validate.half_width, c.validate.points);
  const GafValidationReport rep = validate_gaf(*spec, grid);
  const Epsilon3Result e3 = solve_epsilon3(*spec);

  b.note("gaf", spec->label());
  b.note("grid", std::to_string(grid.size()) + " points over [-" + fmt(c.validate.half_width) +
                     ", " + fmt(c.validate.half_width) + "]");
  b.note("gain", fmt(spec->gain()));
  b.note("ceiling", fmt(spec->ceiling()));
  b.note("epsilon3", e3.value ? fmt(*e3.value) : "none (alpha*beta <= 1)");
  if (!rep.excluded.empty()) b.note("curvature check excluded", std::to_string(rep.excluded.size()) + " point(s) at 0");

  auto first_failure = [&](std::string_view cond) {
    for (const GafViolation& v : rep.failures) {
      if (v.condition.find(cond) != std::string::npos) return "first violation at " + fmt(v.point);
    }
    return std::string("holds on every grid point");
  };
  b.check("monotone", rep.monotone_ok, first_failure("monotone"));
  b.check("odd", rep.odd_ok, first_failure("odd"));
  b.check("dominated by identity", rep.dominated_beyond_epsilon.has_value(),
          rep.dominated_beyond_epsilon ? "|g(x)| <= |x| for |x| >= " + fmt(*rep.dominated_beyond_epsilon)
                                       : first_failure("domin"));
  b.check("curvature sign", rep.curvature_sign_ok, first_failure("curvature"));
  if (e3.value) {
    b.check("epsilon3 residual", e3.residual <= kEpsilon3Tolerance,
            "|g(e) - e| = " + fmt(e3.residual));
  }

  CsvTable t({"g", "value", "deriv", "second_deriv"});
  for (double g : grid) {
    std::string second;
    try {
      second = csv_field(gaf_second_deriv(*spec, g));
    } catch (const UndefinedPointError&) {
      second = "";
    }
    t.row({csv_field(g), csv_field(gaf_eval(*spec, g)), csv_field(gaf_deriv(*spec, g)), second});
  }
  b.artifact("validate_" + slug(spec->label()) + ".csv", t.text());

  CsvTable s({"key", "value"});
  s.row({"gaf", spec->label()});
  s.row({"epsilon3", e3.value ? csv_field(*e3.value) : ""});
  s.row({"epsilon3_residual", csv_field(e3.residual)});
  s.row({"monotone", csv_field(rep.monotone_ok)});
  s.row({"odd", csv_field(rep.odd_ok)});
  s.row({"dominated", csv_field(rep.dominated_beyond_epsilon.has_value())});
  s.row({"curvature_sign", csv_field(rep.curvature_sign_ok)});
  b.artifact("validate_summary.csv", s.text());
}

std::string arm_text(const ArmOutcome& a) {
  std::string s(to_string(a.status));
  if (a.status == ArmStatus::converged) s += " in " + std::to_string(a.iterations) + " iterations";
  return s + ", final loss " + fmt(a.final_loss);
}

void run_race(const ExperimentConfig& c, int jobs, Builder& b) {
  const Problem p = make_problem(c.problem);
  const Vector w0 = start_point(c.problem, p);
  const OptimizerSpec base = baseline_spec(c);
  std::vector<RaceResult> results(c.seeds.size());
  for_each_seed(c.seeds.size(), jobs, [&](std::size_t i) {
    results[i] = race(p, base, c.optimizer, w0, c.race.target_loss, c.race.max_iters, c.seeds[i]);
  });

  b.note("problem", p.name);
  b.note("baseline", base.label());
  b.note("treatment", c.optimizer.label());
  b.note("target loss", fmt(c.race.target_loss));
  CsvTable t({"problem", "seed", "arm", "transform", "eta", "status", "iterations", "final_loss"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const RaceResult& r = results[i];
    const std::string seed = std::to_string(c.seeds[i]);
    b.note("seed " + seed + " baseline", arm_text(r.baseline));
    b.note("seed " + seed + " treatment", arm_text(r.treatment));
    for (const auto& [arm, out, spec] :
         {std::tuple{"baseline", r.baseline, base}, std::tuple{"treatment", r.treatment, c.optimizer}}) {
      t.row({p.name, csv_field(c.seeds[i]), arm, spec.transform.label(), csv_field(spec.eta),
             std::string(to_string(out.status)), csv_field(out.iterations), csv_field(out.final_loss)});
    }
    const std::string verdict = std::to_string(r.treatment.iterations) +
                                (r.treatment_faster() ? " < " : (r.tie() ? " == " : " >= ")) +
                                std::to_string(r.baseline.iterations);
    b.note("seed " + seed + " verdict", r.treatment_faster() ? "treatment strictly faster (" + verdict + ")"
                                        : r.tie()            ? "tie (" + verdict + ")"
                                                             : "treatment not faster (" + verdict + ")");
    switch (c.race.expect) {
      case RaceExpectation::faster:
        b.check("seed " + seed + " treatment strictly faster", r.treatment_faster(), verdict);
        break;
      case RaceExpectation::tie:
        b.check("seed " + seed + " arms tie", r.tie(), verdict);
        break;
      case RaceExpectation::none: break;
    }
  }
  b.artifact("race.csv", t.text());
  for (const auto& [arm, spec] : {std::pair{"baseline", base}, std::pair{"treatment", c.optimizer}}) {
    const Trajectory tr = run(p, spec, w0, c.race.max_iters, c.race.target_loss, c.seeds.front());
    b.artifact(std::string("race_trajectory_") + arm + ".csv", trajectory_csv(tr));
  }
}

void run_saddle(const ExperimentConfig& c, int jobs, Builder& b) {
  const Problem p = make_problem(c.problem);
  const Vector w0 = start_point(c.problem, p);
  const OptimizerSpec base = baseline_spec(c);
  std::vector<std::pair<EscapeResult, EscapeResult>> out(c.seeds.size());
  for_each_seed(c.seeds.size(), jobs, [&](std::size_t i) {
    out[i] = {saddle_escape(p, base, w0, c.saddle.delta, c.seeds[i]),
              saddle_escape(p, c.optimizer, w0, c.saddle.delta, c.seeds[i])};
  });

  b.note("problem", p.name);
  b.note("baseline", base.label());
  b.note("treatment", c.optimizer.label());
  b.note("delta", std::to_string(c.saddle.delta));
  // Plain GD from (0, x) on w1^2 - w2^2 multiplies w2 by 1 + 2 eta per step.
  const bool closed_form = p.name == "saddle" && base.transform.kind() == TransformKind::identity &&
                           base.kind == OptimizerKind::gd && w0[0] == 0.0;
  const double expected =
      (std::pow(1.0 + 2.0 * base.eta, static_cast<double>(c.saddle.delta)) - 1.0) * std::abs(w0[1]);
  CsvTable t({"problem", "seed", "arm", "transform", "eta", "displacement", "steps", "diverged"});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& [eb, et] = out[i];
    const std::string seed = std::to_string(c.seeds[i]);
    t.row({p.name, csv_field(c.seeds[i]), "baseline", base.transform.label(), csv_field(base.eta),
           csv_field(eb.displacement), csv_field(eb.steps), csv_field(eb.diverged)});
    t.row({p.name, csv_field(c.seeds[i]), "treatment", c.optimizer.transform.label(),
           csv_field(c.optimizer.eta), csv_field(et.displacement), csv_field(et.steps),
           csv_field(et.diverged)});
    b.note("seed " + seed + " displacement", "baseline " + fmt(eb.displacement) + ", treatment " +
                                                 fmt(et.displacement));
    b.check("seed " + seed + " treatment escapes further", et.displacement > eb.displacement,
            fmt(et.displacement) + (et.displacement > eb.displacement ? " > " : " <= ") +
                fmt(eb.displacement));
    if (closed_form) {
      const double err = std::abs(eb.displacement - expected);
      b.check("seed " + seed + " baseline matches closed form", err <= 1e-9,
              "expected " + fmt(expected) + ", |error| = " + fmt(err));
    }
  }
  b.artifact("saddle.csv", t.text());
  for (const auto& [arm, spec] : {std::pair{"baseline", base}, std::pair{"treatment", c.optimizer}}) {
    const Trajectory tr = run(p, spec, w0, c.saddle.delta, std::nullopt, c.seeds.front());
    b.artifact(std::string("saddle_trajectory_") + arm + ".csv", trajectory_csv(tr));
  }
}

void run_curvature(const ExperimentConfig& c, Builder& b) {
  const Problem p = make_problem(c.problem);
  const RegionSpec region = region_for(c, p);
  const GradientTransform& t = c.optimizer.transform;
  b.note("problem", p.name);
  b.note("transform", t.label());
  b.note("region", region.canonical());

  CurvatureEstimate orig, trans;
  if (t.kind() == TransformKind::gaf && region.epsilon0 && region.epsilon2) {
    const ConditionReport rep = check_condition_reduction(p, t, region);
    orig = rep.original;
    trans = rep.transformed;
    b.note("epsilon1", rep.epsilon1 ? fmt(*rep.epsilon1) : "not found");
    for (const PremiseCheck& pc : rep.premises) {
      b.note("premise " + pc.name, std::string(pc.ok ? "holds" : "fails") +
                                       (pc.detail.empty() ? "" : " (" + pc.detail + ")"));
    }
    b.check("low-segment secants expand", rep.low_expansion_holds(),
            std::to_string(rep.low_violations) + " violations in " +
                std::to_string(rep.low_pairs_checked) + " pairs");
    b.check("high-segment secants contract", rep.high_contraction_holds(),
            std::to_string(rep.high_violations) + " violations in " +
                std::to_string(rep.high_pairs_checked) + " pairs");
  } else {
    orig = estimate_curvature(p.grad, region);
    const GradientField f = field_of(p, t);
    trans = estimate_curvature(f, region);
  }
  b.check("original field has finite positive curvature",
          std::isfinite(orig.zeta) && orig.c > 0.0, "zeta " + fmt(orig.zeta));
  b.note("original", "ell " + fmt(orig.ell) + ", c " + fmt(orig.c) + ", zeta " + fmt(orig.zeta));
  b.note("transformed", "ell " + fmt(trans.ell) + ", c " + fmt(trans.c) + ", zeta " + fmt(trans.zeta));
  const std::string cmp = fmt(trans.zeta) + " vs " + fmt(orig.zeta);
  switch (c.curvature.expect) {
    case CurvatureExpectation::reduced:
      b.check("condition number reduced", trans.zeta < orig.zeta, cmp);
      break;
    case CurvatureExpectation::increased:
      b.check("condition number increased", trans.zeta > orig.zeta, cmp);
      break;
    case CurvatureExpectation::none: break;
  }
  CsvTable tab(curvature_csv_header());
  tab.row(curvature_csv_row(p.name, "identity", region, orig));
  tab.row(curvature_csv_row(p.name, t.label(), region, trans));
  b.artifact("curvature_" + p.name + "_" + slug(t.label()) + "_" + region.hash() + ".csv", tab.text());
}

void run_surface(const ExperimentConfig& c, Builder& b) {
  const Problem p = make_problem(c.problem);
  std::vector<Vector> axes(p.dim, axis_with_origin(c.surface.lo, c.surface.hi, c.surface.points));
  const GradientTransform& t = c.optimizer.transform;
  b.note("problem", p.name);
  b.note("transform", t.label());
  b.note("axis", std::to_string(axes[0].size()) + " points over [" + fmt(c.surface.lo) + ", " +
                     fmt(c.surface.hi) + "]");

  const SurfaceGrid orig = equivalent_surface(p, GradientTransform::identity(), axes);
  const SurfaceGrid trans = equivalent_surface(p, t, axes);
  b.note("path", std::string(to_string(trans.path)) +
                     (trans.path == SurfacePath::ray ? " (straight ray from the origin)" : ""));

  std::vector<std::size_t> zero(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) {
    zero[k] = static_cast<std::size_t>(std::find(axes[k].begin(), axes[k].end(), 0.0) - axes[k].begin());
  }
  b.check("potential vanishes at the origin", trans.at(zero) == 0.0 && orig.at(zero) == 0.0,
          "Phi(0) = " + fmt(trans.at(zero)));
  // Integrating the raw gradient must give back the loss.
  double worst = 0.0;
  const double l0 = p.loss(Vector(p.dim, 0.0));
  for (std::size_t i = 0; i < orig.values.size(); ++i) {
    Vector w(p.dim);
    std::size_t rest = i;
    for (std::size_t k = p.dim; k-- > 0;) {
      w[k] = axes[k][rest % axes[k].size()];
      rest /= axes[k].size();
    }
    worst = std::max(worst, std::abs(orig.values[i] - (p.loss(w) - l0)));
  }
  b.check("identity surface reproduces the loss", worst < 1e-8, "max |error| = " + fmt(worst));

  if (p.dim == 2) {
    const double r0 = flatness_ratio(orig, c.surface.offset);
    const double r1 = flatness_ratio(trans, c.surface.offset);
    b.note("flatness ratio original", fmt(r0));
    b.note("flatness ratio transformed", fmt(r1));
    if (c.surface.ratio_min) {
      b.check("flatness ratio above " + fmt(*c.surface.ratio_min), r1 > *c.surface.ratio_min, fmt(r1));
    }
    if (c.surface.ratio_max) {
      b.check("flatness ratio below " + fmt(*c.surface.ratio_max), r1 < *c.surface.ratio_max, fmt(r1));
    }
  }
  b.artifact(surface_file_name(orig), surface_csv(orig));
  b.artifact(surface_file_name(trans), surface_csv(trans));
}

void run_bound(const ExperimentConfig& c, int jobs, Builder& b) {
  const Problem p = make_problem(c.problem);
  const Vector w0 = start_point(c.problem, p);
  const SgdNoiseModel noise(c.bound.mu, c.bound.mu_g, c.bound.m, c.bound.m_v);
  double ell = 0.0, cc = 0.0;
  if (c.bound.ell && c.bound.c) {
    ell = *c.bound.ell;
    cc = *c.bound.c;
    b.note("constants", "given: ell " + fmt(ell) + ", c " + fmt(cc));
  } else {
    const RegionSpec region = region_for(c, p);
    const CurvatureEstimate e = estimate_curvature(field_of(p, c.optimizer.transform), region);
    ell = c.bound.ell.value_or(e.ell);
    cc = c.bound.c.value_or(e.c);
    b.note("constants", "ell " + fmt(ell) + ", c " + fmt(cc) + " over " + region.canonical());
  }
  OptimizerSpec spec = c.optimizer;
  spec.eta = noise.learning_rate(ell);
  b.note("problem", p.name);
  b.note("optimizer", spec.label());
  b.note("step size", fmt(spec.eta) + " (mu / (ell * M_G))");

  const std::size_t steps = c.bound.steps;
  std::vector<Trajectory> runs(c.seeds.size());
  for_each_seed(c.seeds.size(), jobs, [&](std::size_t i) {
    runs[i] = run(p, spec, w0, steps - 1, std::nullopt, c.seeds[i]);
  });
  // gap_k = L(w_{k-1}) - L*, averaged over seeds.
  std::vector<double> gap(steps, 0.0);
  for (const Trajectory& tr : runs) {
    if (tr.diverged() || tr.losses.size() < steps) {
      b.check("runs stay finite", false, "seed " + std::to_string(tr.seed) + " diverged");
      return;
    }
    for (std::size_t k = 0; k < steps; ++k) gap[k] += (tr.losses[k] - c.bound.loss_star) / runs.size();
  }
  CsvTable t({"k", "gap", "bound"});
  std::size_t violations = 0, first_bad = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double bound = sgd_gap_bound(k, ell, cc, noise, gap[0]);
    t.row({csv_field(k), csv_field(gap[k - 1]), csv_field(bound)});
    if (gap[k - 1] > bound) {
      if (violations++ == 0) first_bad = k;
    }
  }
  const double b1 = sgd_gap_bound(1, ell, cc, noise, gap[0]);
  b.note("contraction", fmt(gap_contraction(ell, cc, noise)));
  b.check("bound equals the gap at k = 1", b1 == gap[0], fmt(b1) + " vs " + fmt(gap[0]));
  b.check("gap within bound for k <= " + std::to_string(steps), violations == 0,
          violations == 0 ? "all " + std::to_string(steps) + " iterates"
                          : std::to_string(violations) + " violations, first at k = " +
                                std::to_string(first_bad));
  b.artifact("bound.csv", t.text());
}

void run_train(const ExperimentConfig& c, int jobs, Builder& b) {
  if (c.problem.name != "mlp") throw ConfigError("problem.name: train needs the mlp problem");
  const SyntheticDataset data = make_dataset(c.problem.data_seed, c.problem.samples);
  const Problem p = mlp_problem(data, c.problem.hidden);
  const OptimizerSpec base = baseline_spec(c);
  const std::size_t per_epoch = (data.size() + base.batch_size - 1) / base.batch_size;
  const std::size_t steps = c.train.epochs * per_epoch;

  struct Arm {
    Trajectory traj;
    double accuracy = 0.0;
  };
  std::vector<std::pair<Arm, Arm>> out(c.seeds.size());
  for_each_seed(c.seeds.size(), jobs, [&](std::size_t i) {
    const Vector w0 = c.problem.start ? start_point(c.problem, p)
                                      : mlp_initial_weights(c.problem.hidden, c.seeds[i]);
    for (auto [arm, spec] : {std::pair{&out[i].first, &base}, std::pair{&out[i].second, &c.optimizer}}) {
      arm->traj = run(p, *spec, w0, steps, std::nullopt, c.seeds[i]);
      arm->accuracy = arm->traj.diverged() ? 0.0 : mlp_accuracy(data, c.problem.hidden, arm->traj.final_iterate());
    }
  });

  b.note("dataset", std::to_string(data.size()) + " points, seed " + std::to_string(data.seed));
  b.note("network", "2-" + std::to_string(c.problem.hidden) + "-1, " + std::to_string(p.dim) + " parameters");
  b.note("baseline", base.label());
  b.note("treatment", c.optimizer.label());
  b.note("steps", std::to_string(steps) + " (" + std::to_string(c.train.epochs) + " epochs)");
  CsvTable t({"seed", "arm", "transform", "final_loss", "accuracy", "steps", "diverged"});
  double mean_base = 0.0, mean_treat = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::string seed = std::to_string(c.seeds[i]);
    for (const auto& [name, arm, spec] : {std::tuple{"baseline", &out[i].first, &base},
                                          std::tuple{"treatment", &out[i].second, &c.optimizer}}) {
      t.row({csv_field(c.seeds[i]), name, spec->transform.label(), csv_field(arm->traj.final_loss()),
             csv_field(arm->accuracy), csv_field(arm->traj.steps()), csv_field(arm->traj.diverged())});
      b.check("seed " + seed + " " + name + " accuracy above " + fmt(c.train.accuracy),
              arm->accuracy > c.train.accuracy, fmt(arm->accuracy));
      b.artifact("train_trajectory_" + std::string(name) + "_seed" + seed + ".csv",
                 trajectory_csv(arm->traj));
    }
    mean_base += out[i].first.traj.final_loss() / out.size();
    mean_treat += out[i].second.traj.final_loss() / out.size();
  }
  b.note("mean final loss baseline", fmt(mean_base));
  b.note("mean final loss treatment", fmt(mean_treat));
  b.note("mean final loss comparison (not asserted)",
         mean_treat < mean_base ? "treatment lower" : (mean_treat == mean_base ? "equal" : "baseline lower"));
  b.artifact("train.csv", t.text());
  b.artifact("train_dataset.csv", dataset_csv(data));
}

void run_suggest(const ExperimentConfig& c, Builder& b) {
  const Problem p = make_problem(c.problem);
  const Vector w0 = start_point(c.problem, p);
  const std::uint64_t seed = c.seeds.front();
  const Trajectory tr = run(p, c.optimizer, w0, c.suggest.steps, std::nullopt, seed);
  if (tr.diverged()) {
    b.check("training run stays finite", false, "diverged after " + std::to_string(tr.steps()) + " steps");
    return;
  }
  std::size_t epoch = c.suggest.epoch_length;
  if (epoch == 0) {
    epoch = p.stochastic() && c.optimizer.stochastic()
                ? (p.samples + c.optimizer.batch_size - 1) / c.optimizer.batch_size
                : 1;
  }
  const GradStats stats = record_grad_stats(tr, epoch);
  const Vector dir = random_unit_direction(p.dim, seed);
  const std::vector<SlicePoint> slice =
      loss_slice(p, tr.final_iterate(), dir, c.suggest.slice_half_width, c.suggest.slice_points);

  b.note("problem", p.name);
  b.note("optimizer", c.optimizer.label());
  b.note("epochs recorded", std::to_string(stats.epochs) + " (" + std::to_string(epoch) + " steps each)");
  b.note("global max |g|", fmt(stats.global_max_abs));
  b.artifact("suggest_grad_stats.csv", grad_stats_csv(stats));
  b.artifact("suggest_slice.csv", slice_csv(slice));

  CurveClass curve;
  try {
    curve = classify_curve(slice);
  } catch (const ClassificationError& e) {
    b.check("loss slice classifiable", false, e.what());
    return;
  }
  b.note("curve", std::string(to_string(curve.label)) + " (evidence " + fmt(curve.evidence) +
                      ", quadric if |evidence| <= " + fmt(kCurveTolerance) + ")");
  const std::vector<GafSpec> s = suggest_params(stats, curve);
  for (std::size_t i = 0; i < s.size(); ++i) {
    b.note("suggestion " + std::to_string(i + 1), s[i].label() + ", alpha*beta " + fmt(s[i].gain()));
  }
  b.check("robust defaults first", s[0] == GafSpec(GafKind::arctan, 0.1, 20.0) &&
                                       s[1] == GafSpec(GafKind::arctan, 0.2, 10.0),
          s[0].label() + ", " + s[1].label());
  if (curve.label == CurveLabel::type1_flat) {
    b.check("flat curve gets alpha*beta > 1", s[2].gain() > 1.0, fmt(s[2].gain()));
  } else if (curve.label == CurveLabel::type2_sharp) {
    b.check("sharp curve gets alpha*beta < 1", s[2].gain() < 1.0, fmt(s[2].gain()));
  }
  b.artifact("suggestions.csv", suggestions_csv(s));
}

}  // namespace

ExperimentResult execute(const ExperimentConfig& c, int jobs) {
  Builder b(c);
  switch (c.kind) {
    case ExperimentKind::validate: run_validate(c, b); break;
    case ExperimentKind::race: run_race(c, jobs, b); break;
    case ExperimentKind::saddle: run_saddle(c, jobs, b); break;
    case ExperimentKind::curvature: run_curvature(c, b); break;
    case ExperimentKind::surface: run_surface(c, b); break;
    case ExperimentKind::bound: run_bound(c, jobs, b); break;
    case ExperimentKind::train: run_train(c, jobs, b); break;
    case ExperimentKind::suggest: run_suggest(c, b); break;
  }
  return b.take();
}

std::string report_text(const ExperimentResult& r) {
  std::ostringstream os;
  os << "gaflab " << to_string(r.config.kind) << " report\n\n";
  os << "config:\n" << config_json(r.config) << "\n";
  os << "results:\n";
  for (const std::string& n : r.notes) os << "  " << n << "\n";
  os << "\nchecks:\n";
  for (const Assertion& a : r.assertions) {
    os << "  " << (a.ok ? "PASS" : "FAIL") << " " << a.name << ": " << a.detail << "\n";
  }
  os << "\nartifacts:\n";
  for (const Artifact& a : r.artifacts) os << "  " << a.name << " " << hex64(fnv1a64(a.contents)) << "\n";
  os << "\nresult: " << (r.passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::filesystem::path resolve_output_root(const std::optional<std::string>& flag,
                                          const ExperimentConfig& config) {
  if (flag && !flag->empty()) return *flag;
  if (config.output_dir) return *config.output_dir;
  if (const char* env = std::getenv("GAFLAB_OUT"); env && *env) return env;
  return "gaflab_out";
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir =
      resolve_output_root(options.out, config) / std::string(to_string(config.kind));
  ExperimentResult result;
  int status = kExitPass;
  try {
    result = execute(config, options.jobs);
    status = result.passed() ? kExitPass : kExitAssertion;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedError& e) {
    log << "unsupported configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    log << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    log << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    // Estimation or classification breakdowns count as failed checks.
    result.config = config;
    result.assertions.push_back({"experiment completes", false, e.what()});
    status = kExitAssertion;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    for (const Artifact& a : result.artifacts) write_file_atomic(dir / a.name, a.contents);
    const std::string report = report_text(result);
    write_file_atomic(dir / "report.txt", report);

    nlohmann::ordered_json m;
    m["experiment"] = std::string(to_string(config.kind));
    m["config"] = nlohmann::json::parse(config_json(config));
    m["seeds"] = config.seeds;
    m["versions"] = {{"gaflab", kVersion},
                     {"compiler", __VERSION__},
                     {"cplusplus", __cplusplus},
                     {"openmp", _OPENMP}};
    m["jobs"] = options.jobs;
    m["wall_time_seconds"] = wall;
    m["timestamp_utc"] = utc_timestamp();
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const Artifact& a : result.artifacts) {
      files.push_back({{"name", a.name}, {"fnv1a64", hex64(fnv1a64(a.contents))}});
    }
    m["artifacts"] = files;
    m["passed"] = result.passed();
    m["exit_status"] = status;
    write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");

    if (!options.quiet) {
      log << report;
      log << "wrote " << result.artifacts.size() + 2 << " files to " << dir.string() << "\n";
    } else {
      for (const Assertion& a : result.assertions) {
        if (!a.ok) log << "FAIL " << a.name << ": " << a.detail << "\n";
      }
    }
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return status;
}

}  // namespace gaflab
