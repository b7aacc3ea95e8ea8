#include "gaflab/config.hpp"

#include <cmath>
#include <limits>

#include "gaflab/error.hpp"
#include "json.hpp"

namespace gaflab {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::validate: return "validate";
    case ExperimentKind::race: return "race";
    case ExperimentKind::saddle: return "saddle";
    case ExperimentKind::curvature: return "curvature";
    case ExperimentKind::surface: return "surface";
    case ExperimentKind::bound: return "bound";
    case ExperimentKind::train: return "train";
    case ExperimentKind::suggest: return "suggest";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds{
      ExperimentKind::validate,  ExperimentKind::race,    ExperimentKind::saddle,
      ExperimentKind::curvature, ExperimentKind::surface, ExperimentKind::bound,
      ExperimentKind::train,     ExperimentKind::suggest};
  return kinds;
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (ExperimentKind k : all_experiment_kinds()) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("kind: unknown experiment kind \"" + std::string(name) + "\"");
}

namespace {

std::string_view to_string(RaceExpectation e) {
  switch (e) {
    case RaceExpectation::faster: return "faster";
    case RaceExpectation::tie: return "tie";
    case RaceExpectation::none: return "none";
  }
  return "?";
}

std::string_view to_string(CurvatureExpectation e) {
  switch (e) {
    case CurvatureExpectation::reduced: return "reduced";
    case CurvatureExpectation::increased: return "increased";
    case CurvatureExpectation::none: return "none";
  }
  return "?";
}

GafSpec arctan(double a, double b) { return GafSpec(GafKind::arctan, a, b); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json transform_json(const GradientTransform& t) {
  json j;
  switch (t.kind()) {
    case TransformKind::identity: j["kind"] = "identity"; break;
    case TransformKind::gaf: {
      const GafSpec& g = *t.gaf_spec();
      j["kind"] = "gaf";
      j["gaf"] = {{"kind", std::string(to_string(g.kind()))}, {"alpha", g.alpha()}, {"beta", g.beta()}};
      break;
    }
    case TransformKind::clip_value:
      j["kind"] = "clip_value";
      j["threshold"] = t.threshold();
      break;
    case TransformKind::clip_norm:
      j["kind"] = "clip_norm";
      j["threshold"] = t.threshold();
      break;
  }
  return j;
}

// Collects every field-level problem before throwing.
class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& what) { issues.push_back(path + ": " + what); }

  // Returns the section (object) or nullptr, flagging unknown keys.
  const json* section(const char* name, std::initializer_list<std::string_view> keys) {
    if (!doc_.contains(name)) return nullptr;
    const json& s = doc_.at(name);
    if (!s.is_object()) {
      fail(name, "expected an object");
      return nullptr;
    }
    check_keys(s, name, keys);
    return &s;
  }

  void check_keys(const json& obj, const std::string& prefix,
                  std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (std::string_view allowed : keys) known = known || k == allowed;
      if (!known) fail(prefix + "." + k, "unknown key");
    }
  }

  static std::string path(const std::string& sec, const char* key) { return sec + "." + key; }

  void number(const json* s, const std::string& sec, const char* key, double& out) {
    if (!s || !s->contains(key)) return;
    const json& v = s->at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(path(sec, key), "expected a finite number");
      return;
    }
    out = v.get<double>();
  }

  void number(const json* s, const std::string& sec, const char* key, std::optional<double>& out) {
    if (!s || !s->contains(key)) return;
    if (s->at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    number(s, sec, key, v);
    out = v;
  }

  template <class Int>
  void integer(const json* s, const std::string& sec, const char* key, Int& out) {
    if (!s || !s->contains(key)) return;
    const json& v = s->at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      const auto u = v.get<std::uint64_t>();
      if (u > std::numeric_limits<Int>::max()) {
        fail(path(sec, key), "value too large");
        return;
      }
      out = static_cast<Int>(u);
      return;
    }
    fail(path(sec, key), "expected a non-negative integer");
  }

  void string(const json* s, const std::string& sec, const char* key, std::string& out) {
    if (!s || !s->contains(key)) return;
    const json& v = s->at(key);
    if (!v.is_string()) {
      fail(path(sec, key), "expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void vector(const json* s, const std::string& sec, const char* key, std::optional<Vector>& out) {
    if (!s || !s->contains(key)) return;
    const json& v = s->at(key);
    if (v.is_null()) {
      out.reset();
      return;
    }
    if (!v.is_array()) {
      fail(path(sec, key), "expected an array of numbers");
      return;
    }
    Vector x;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail(path(sec, key), "expected an array of finite numbers");
        return;
      }
      x.push_back(e.get<double>());
    }
    out = std::move(x);
  }

  // Runs f, turning ConfigError into recorded issues.
  template <class F>
  void guard(const std::string& where, F&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      for (const std::string& i : e.issues()) fail(where, i);
    } catch (const Error& e) {
      fail(where, e.what());
    }
  }

  GradientTransform transform(const char* name, const GradientTransform& fallback) {
    const json* s = section(name, {"kind", "gaf", "threshold"});
    if (!s) return fallback;
    const std::string sec = name;
    if (!s->contains("kind")) {
      fail(sec + ".kind", "required");
      return fallback;
    }
    std::string kind;
    string(s, sec, "kind", kind);
    GradientTransform out = fallback;
    auto unused = [&](std::initializer_list<const char*> keys) {
      for (const char* k : keys) {
        if (s->contains(k)) fail(path(sec, k), "not used by " + kind);
      }
    };
    if (kind == "identity") {
      unused({"gaf", "threshold"});
      return GradientTransform::identity();
    }
    if (kind == "clip_value" || kind == "clip_norm") {
      unused({"gaf"});
      if (!s->contains("threshold")) {
        fail(sec + ".threshold", "required for " + kind);
        return fallback;
      }
      double tau = 0.0;
      number(s, sec, "threshold", tau);
      guard(sec, [&] {
        out = kind == "clip_value" ? GradientTransform::clip_value(tau)
                                   : GradientTransform::clip_norm(tau);
      });
      return out;
    }
    if (kind == "gaf") {
      unused({"threshold"});
      if (!s->contains("gaf") || !s->at("gaf").is_object()) {
        fail(sec + ".gaf", "required object {kind, alpha, beta} for gaf");
        return fallback;
      }
      const json& g = s->at("gaf");
      const std::string gsec = sec + ".gaf";
      check_keys(g, gsec, {"kind", "alpha", "beta"});
      bool complete = true;
      for (const char* k : {"kind", "alpha", "beta"}) {
        if (!g.contains(k)) {
          fail(path(gsec, k), "required");
          complete = false;
        }
      }
      if (!complete) return fallback;
      std::string gkind;
      string(&g, gsec, "kind", gkind);
      double alpha = std::numeric_limits<double>::quiet_NaN();
      double beta = alpha;
      // Non-numbers fall through as NaN and are rejected by GafSpec.
      if (g.at("alpha").is_number()) alpha = g.at("alpha").get<double>();
      if (g.at("beta").is_number()) beta = g.at("beta").get<double>();
      guard(sec, [&] { out = GradientTransform::gaf(GafSpec(parse_gaf_kind(gkind), alpha, beta)); });
      return out;
    }
    fail(sec + ".kind", "unknown transform \"" + kind + "\" (identity, gaf, clip_value, clip_norm)");
    return fallback;
  }

 private:
  const json& doc_;
};

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

// Applies "a.b.c=value" to doc. Setting transform.kind or baseline.kind clears
// that section so fields of the previous kind do not linger.
void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override \"" + item + "\": expected key=value");
  }
  const std::string key = item.substr(0, eq);
  const std::string raw = item.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  std::vector<std::string> parts;
  for (std::size_t start = 0;;) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (parts.back().empty()) throw ConfigError("override \"" + item + "\": empty key segment");
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (parts.size() == 2 && parts[1] == "kind" && (parts[0] == "transform" || parts[0] == "baseline")) {
    doc[parts[0]] = json::object();
  }
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (!next.is_object()) next = json::object();
    node = &next;
  }
  (*node)[parts.back()] = value;
}

}  // namespace

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.optimizer.transform = GradientTransform::gaf(arctan(0.1, 20.0));
  c.region.points_per_dim = 21;
  switch (kind) {
    case ExperimentKind::validate:
      break;
    case ExperimentKind::race:
      c.problem.start = Vector{0.05, 0.05};
      c.optimizer.eta = 0.1;
      break;
    case ExperimentKind::saddle:
      c.problem.name = "saddle";
      c.problem.start = Vector{0.0, 1e-3};
      c.optimizer.eta = 0.01;
      break;
    case ExperimentKind::curvature:
      c.problem.name = "quartic_well";
      c.region.box = {{-1.5, 1.5}};
      c.region.points_per_dim = 301;
      c.region.epsilon0 = 0.05;
      c.region.epsilon2 = 0.5;
      c.curvature.expect = CurvatureExpectation::reduced;
      break;
    case ExperimentKind::surface:
      break;
    case ExperimentKind::bound:
      c.problem.start = Vector{1.0, 1.0};
      c.optimizer.transform = GradientTransform::identity();
      break;
    case ExperimentKind::train:
      c.problem.name = "mlp";
      c.seeds = {0, 1, 2, 3, 4};
      c.optimizer.kind = OptimizerKind::sgdm;
      c.optimizer.momentum = 0.9;
      c.optimizer.eta = 0.05;
      c.optimizer.batch_size = 20;
      c.optimizer.placement = Placement::on_velocity;
      break;
    case ExperimentKind::suggest:
      c.problem.name = "mlp";
      c.optimizer.kind = OptimizerKind::sgdm;
      c.optimizer.momentum = 0.9;
      c.optimizer.eta = 0.05;
      c.optimizer.batch_size = 20;
      c.optimizer.transform = GradientTransform::identity();
      break;
  }
  return c;
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  j["seeds"] = c.seeds;
  json p;
  p["name"] = c.problem.name;
  p["lambda1"] = c.problem.params.lambda1;
  p["lambda2"] = c.problem.params.lambda2;
  p["start"] = c.problem.start ? json(*c.problem.start) : json(nullptr);
  p["depth"] = c.problem.depth;
  p["activation"] = std::string(to_string(c.problem.activation));
  p["chain_weight"] = c.problem.chain_weight;
  p["chain_input"] = c.problem.chain_input;
  p["chain_target"] = c.problem.chain_target;
  p["samples"] = c.problem.samples;
  p["hidden"] = c.problem.hidden;
  p["data_seed"] = c.problem.data_seed;
  j["problem"] = p;
  json o;
  o["kind"] = std::string(to_string(c.optimizer.kind));
  o["eta"] = c.optimizer.eta;
  o["momentum"] = c.optimizer.momentum;
  o["adam_beta1"] = c.optimizer.adam_beta1;
  o["adam_beta2"] = c.optimizer.adam_beta2;
  o["adam_eps"] = c.optimizer.adam_eps;
  o["batch_size"] = c.optimizer.batch_size;
  o["placement"] = std::string(to_string(c.optimizer.placement));
  j["optimizer"] = o;
  j["transform"] = transform_json(c.optimizer.transform);
  j["baseline"] = transform_json(c.baseline);
  json r;
  if (c.region.box.empty()) {
    r["box"] = nullptr;
  } else {
    json box = json::array();
    for (const auto& [lo, hi] : c.region.box) box.push_back({lo, hi});
    r["box"] = box;
  }
  r["points_per_dim"] = c.region.points_per_dim;
  r["epsilon0"] = opt_json(c.region.epsilon0);
  r["epsilon2"] = opt_json(c.region.epsilon2);
  j["region"] = r;
  j["validate"] = {{"half_width", c.validate.half_width}, {"points", c.validate.points}};
  j["race"] = {{"target_loss", c.race.target_loss},
               {"max_iters", c.race.max_iters},
               {"expect", std::string(to_string(c.race.expect))}};
  j["saddle"] = {{"delta", c.saddle.delta}};
  j["curvature"] = {{"expect", std::string(to_string(c.curvature.expect))}};
  j["bound"] = {{"mu", c.bound.mu},         {"mu_g", c.bound.mu_g},
                {"m", c.bound.m},           {"m_v", c.bound.m_v},
                {"steps", c.bound.steps},   {"loss_star", c.bound.loss_star},
                {"ell", opt_json(c.bound.ell)}, {"c", opt_json(c.bound.c)}};
  j["surface"] = {{"lo", c.surface.lo},
                  {"hi", c.surface.hi},
                  {"points", c.surface.points},
                  {"offset", c.surface.offset},
                  {"ratio_min", opt_json(c.surface.ratio_min)},
                  {"ratio_max", opt_json(c.surface.ratio_max)}};
  j["train"] = {{"epochs", c.train.epochs}, {"accuracy", c.train.accuracy}};
  j["suggest"] = {{"epoch_length", c.suggest.epoch_length},
                  {"steps", c.suggest.steps},
                  {"slice_half_width", c.suggest.slice_half_width},
                  {"slice_points", c.suggest.slice_points}};
  j["output"] = {{"dir", c.output_dir ? json(*c.output_dir) : json(nullptr)}};
  return j.dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> fallback_kind,
                              const std::vector<std::string>& overrides) {
  json file = text.find_first_not_of(" \t\r\n") == std::string_view::npos
                  ? json::object()
                  : parse_json(text, "config");
  if (!file.is_object()) throw ConfigError("config: top level must be an object");

  // The file may name the kind; it has to agree with the subcommand.
  std::optional<ExperimentKind> kind = fallback_kind;
  if (file.contains("kind")) {
    if (!file["kind"].is_string()) throw ConfigError("kind: expected a string");
    const ExperimentKind from_file = parse_experiment_kind(file["kind"].get<std::string>());
    if (fallback_kind && *fallback_kind != from_file) {
      throw ConfigError("kind: config says \"" + std::string(to_string(from_file)) +
                        "\" but the subcommand is \"" + std::string(to_string(*fallback_kind)) +
                        "\"");
    }
    kind = from_file;
  }
  if (!kind) throw ConfigError("kind: required");

  json doc = parse_json(config_json(default_config(*kind)), "defaults");
  for (const auto& [key, value] : file.items()) {
    if (key == "transform" || key == "baseline" || !value.is_object() || !doc.contains(key) ||
        !doc[key].is_object()) {
      doc[key] = value;
    } else {
      for (const auto& [k, v] : value.items()) doc[key][k] = v;
    }
  }
  for (const std::string& o : overrides) apply_override(doc, o);
  if (doc.contains("kind") && doc["kind"] != std::string(to_string(*kind))) {
    throw ConfigError("kind: overrides may not change the experiment kind");
  }

  ExperimentConfig c = default_config(*kind);
  Reader rd(doc);
  rd.check_keys(doc, "config",
                {"kind", "seeds", "problem", "optimizer", "transform", "baseline", "region",
                 "validate", "race", "saddle", "curvature", "bound", "surface", "train",
                 "suggest", "output"});

  if (doc.contains("seeds")) {
    const json& s = doc["seeds"];
    if (!s.is_array()) {
      rd.fail("seeds", "expected an array of non-negative integers");
    } else {
      c.seeds.clear();
      for (const json& e : s) {
        if (e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
          c.seeds.push_back(e.get<std::uint64_t>());
        } else {
          rd.fail("seeds", "expected an array of non-negative integers");
          break;
        }
      }
      if (c.seeds.empty()) rd.fail("seeds", "must not be empty");
    }
  }

  if (const json* s = rd.section("problem", {"name", "lambda1", "lambda2", "start", "depth",
                                             "activation", "chain_weight", "chain_input",
                                             "chain_target", "samples", "hidden", "data_seed"})) {
    ProblemConfig& p = c.problem;
    rd.string(s, "problem", "name", p.name);
    if (p.name != "deep_chain" && p.name != "mlp") {
      rd.guard("problem", [&] { parse_builtin(p.name); });
    }
    rd.number(s, "problem", "lambda1", p.params.lambda1);
    rd.number(s, "problem", "lambda2", p.params.lambda2);
    rd.vector(s, "problem", "start", p.start);
    rd.integer(s, "problem", "depth", p.depth);
    std::string act(to_string(p.activation));
    rd.string(s, "problem", "activation", act);
    rd.guard("problem", [&] { p.activation = parse_chain_activation(act); });
    rd.number(s, "problem", "chain_weight", p.chain_weight);
    rd.number(s, "problem", "chain_input", p.chain_input);
    rd.number(s, "problem", "chain_target", p.chain_target);
    rd.integer(s, "problem", "samples", p.samples);
    rd.integer(s, "problem", "hidden", p.hidden);
    rd.integer(s, "problem", "data_seed", p.data_seed);
    if (p.name == "deep_chain" && p.depth == 0) rd.fail("problem.depth", "must be >= 1");
    if (p.name == "mlp") {
      if (p.hidden == 0 || p.hidden > kMaxHiddenWidth) {
        rd.fail("problem.hidden", "must be in [1, " + std::to_string(kMaxHiddenWidth) + "]");
      }
      if (p.samples < 8 || p.samples % 2 != 0) rd.fail("problem.samples", "must be even and >= 8");
    }
  }

  if (const json* s = rd.section("optimizer", {"kind", "eta", "momentum", "adam_beta1",
                                               "adam_beta2", "adam_eps", "batch_size",
                                               "placement"})) {
    OptimizerSpec& o = c.optimizer;
    std::string kind_name(to_string(o.kind));
    std::string placement(to_string(o.placement));
    rd.string(s, "optimizer", "kind", kind_name);
    rd.string(s, "optimizer", "placement", placement);
    rd.guard("optimizer", [&] { o.kind = parse_optimizer_kind(kind_name); });
    rd.guard("optimizer", [&] { o.placement = parse_placement(placement); });
    rd.number(s, "optimizer", "eta", o.eta);
    rd.number(s, "optimizer", "momentum", o.momentum);
    rd.number(s, "optimizer", "adam_beta1", o.adam_beta1);
    rd.number(s, "optimizer", "adam_beta2", o.adam_beta2);
    rd.number(s, "optimizer", "adam_eps", o.adam_eps);
    rd.integer(s, "optimizer", "batch_size", o.batch_size);
  }
  c.optimizer.transform = rd.transform("transform", c.optimizer.transform);
  c.baseline = rd.transform("baseline", c.baseline);
  if (rd.issues.empty()) {
    rd.guard("optimizer", [&] { c.optimizer.validate(); });
    OptimizerSpec base = c.optimizer;
    base.transform = c.baseline;
    rd.guard("baseline", [&] { base.validate(); });
  }

  if (const json* s = rd.section("region", {"box", "points_per_dim", "epsilon0", "epsilon2"})) {
    if (s->contains("box") && !s->at("box").is_null()) {
      const json& box = s->at("box");
      c.region.box.clear();
      bool ok = box.is_array();
      if (ok) {
        for (const json& e : box) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            ok = false;
            break;
          }
          c.region.box.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
      }
      if (!ok) rd.fail("region.box", "expected an array of [lo, hi] pairs");
    }
    rd.integer(s, "region", "points_per_dim", c.region.points_per_dim);
    rd.number(s, "region", "epsilon0", c.region.epsilon0);
    rd.number(s, "region", "epsilon2", c.region.epsilon2);
    if (!c.region.box.empty() && rd.issues.empty()) rd.guard("region", [&] { c.region.validate(); });
  }

  if (const json* s = rd.section("validate", {"half_width", "points"})) {
    rd.number(s, "validate", "half_width", c.validate.half_width);
    rd.integer(s, "validate", "points", c.validate.points);
    if (!(c.validate.half_width > 0)) rd.fail("validate.half_width", "must be positive");
    if (c.validate.points < 101) rd.fail("validate.points", "must be >= 101");
  }
  if (const json* s = rd.section("race", {"target_loss", "max_iters", "expect"})) {
    rd.number(s, "race", "target_loss", c.race.target_loss);
    rd.integer(s, "race", "max_iters", c.race.max_iters);
    std::string e(to_string(c.race.expect));
    rd.string(s, "race", "expect", e);
    if (e == "faster") c.race.expect = RaceExpectation::faster;
    else if (e == "tie") c.race.expect = RaceExpectation::tie;
    else if (e == "none") c.race.expect = RaceExpectation::none;
    else rd.fail("race.expect", "expected faster, tie or none");
    if (c.race.max_iters == 0) rd.fail("race.max_iters", "must be >= 1");
  }
  if (const json* s = rd.section("saddle", {"delta"})) {
    rd.integer(s, "saddle", "delta", c.saddle.delta);
  }
  if (const json* s = rd.section("curvature", {"expect"})) {
    std::string e(to_string(c.curvature.expect));
    rd.string(s, "curvature", "expect", e);
    if (e == "reduced") c.curvature.expect = CurvatureExpectation::reduced;
    else if (e == "increased") c.curvature.expect = CurvatureExpectation::increased;
    else if (e == "none") c.curvature.expect = CurvatureExpectation::none;
    else rd.fail("curvature.expect", "expected reduced, increased or none");
  }
  if (const json* s = rd.section("bound", {"mu", "mu_g", "m", "m_v", "steps", "loss_star",
                                           "ell", "c"})) {
    rd.number(s, "bound", "mu", c.bound.mu);
    rd.number(s, "bound", "mu_g", c.bound.mu_g);
    rd.number(s, "bound", "m", c.bound.m);
    rd.number(s, "bound", "m_v", c.bound.m_v);
    rd.integer(s, "bound", "steps", c.bound.steps);
    rd.number(s, "bound", "loss_star", c.bound.loss_star);
    rd.number(s, "bound", "ell", c.bound.ell);
    rd.number(s, "bound", "c", c.bound.c);
    if (c.bound.steps == 0) rd.fail("bound.steps", "must be >= 1");
  }
  if (const json* s = rd.section("surface", {"lo", "hi", "points", "offset", "ratio_min",
                                             "ratio_max"})) {
    rd.number(s, "surface", "lo", c.surface.lo);
    rd.number(s, "surface", "hi", c.surface.hi);
    rd.integer(s, "surface", "points", c.surface.points);
    rd.number(s, "surface", "offset", c.surface.offset);
    rd.number(s, "surface", "ratio_min", c.surface.ratio_min);
    rd.number(s, "surface", "ratio_max", c.surface.ratio_max);
    if (!(c.surface.lo <= 0.0 && c.surface.hi >= 0.0 && c.surface.lo < c.surface.hi)) {
      rd.fail("surface.lo/hi", "range must contain 0");
    }
    if (c.surface.points < 2) rd.fail("surface.points", "must be >= 2");
    if (!(c.surface.offset > 0.0 && c.surface.offset <= c.surface.hi)) {
      rd.fail("surface.offset", "must be in (0, hi]");
    }
  }
  if (const json* s = rd.section("train", {"epochs", "accuracy"})) {
    rd.integer(s, "train", "epochs", c.train.epochs);
    rd.number(s, "train", "accuracy", c.train.accuracy);
    if (c.train.epochs == 0) rd.fail("train.epochs", "must be >= 1");
  }
  if (const json* s = rd.section("suggest", {"epoch_length", "steps", "slice_half_width",
                                             "slice_points"})) {
    rd.integer(s, "suggest", "epoch_length", c.suggest.epoch_length);
    rd.integer(s, "suggest", "steps", c.suggest.steps);
    rd.number(s, "suggest", "slice_half_width", c.suggest.slice_half_width);
    rd.integer(s, "suggest", "slice_points", c.suggest.slice_points);
    if (c.suggest.steps == 0) rd.fail("suggest.steps", "must be >= 1");
    if (c.suggest.slice_points < 21u) {
      rd.fail("suggest.slice_points", "must be >= 21");
    }
    if (!(c.suggest.slice_half_width > 0)) rd.fail("suggest.slice_half_width", "must be positive");
  }
  if (const json* s = rd.section("output", {"dir"})) {
    if (s->contains("dir") && !s->at("dir").is_null()) {
      std::string dir;
      rd.string(s, "output", "dir", dir);
      if (!dir.empty()) c.output_dir = dir;
    }
  }

  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  return c;
}

Problem make_problem(const ProblemConfig& cfg) {
  if (cfg.name == "deep_chain") {
    return deep_chain_problem(DeepChainNet::uniform(cfg.depth, cfg.activation, cfg.chain_weight,
                                                    cfg.chain_input, cfg.chain_target));
  }
  if (cfg.name == "mlp") return mlp_problem(make_dataset(cfg.data_seed, cfg.samples), cfg.hidden);
  return builtin_problem(cfg.name, cfg.params);
}

Vector start_point(const ProblemConfig& cfg, const Problem& problem) {
  if (cfg.start) {
    if (cfg.start->size() != problem.dim) {
      throw ConfigError("problem.start: expected " + std::to_string(problem.dim) +
                        " values, got " + std::to_string(cfg.start->size()));
    }
    return *cfg.start;
  }
  if (cfg.name == "mlp") return mlp_initial_weights(cfg.hidden, cfg.data_seed);
  if (cfg.name == "deep_chain") return Vector(problem.dim, cfg.chain_weight);
  return Vector(problem.dim, 1.0);
}

}  // namespace gaflab
