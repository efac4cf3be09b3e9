#include "adsplit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adsplit/errors.hpp"

namespace adsplit {

using nlohmann::json;

const char* to_string(ModelId id) {
  switch (id) {
    case ModelId::Kpp: return "kpp";
    case ModelId::Bz: return "bz";
    case ModelId::Discharge: return "discharge";
  }
  return "?";
}

namespace {

const char* policy_name(ProbePolicy p) {
  switch (p) {
    case ProbePolicy::EveryN: return "every-n";
    case ProbePolicy::AtSteps: return "at-steps";
    case ProbePolicy::Never: return "never";
  }
  return "?";
}

// Reads typed values out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    const json& v = root.at(name_);
    if (!v.is_object()) throw ConfigError(name_ + ": expected an object");
    obj_ = &v;
  }
  const json* find(const std::string& key) {
    known_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        fail(key, "expected a non-negative integer");
      }
      out = v->get<std::size_t>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) fail(key, "expected a number or null");
      out = v->get<double>();
    }
  }
  template <class T>
  void get(const std::string& key, std::vector<T>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array");
      std::vector<T> tmp;
      for (const json& e : *v) {
        if constexpr (std::is_same_v<T, std::string>) {
          if (!e.is_string()) fail(key, "expected an array of strings");
        } else if constexpr (std::is_integral_v<T>) {
          if (!e.is_number_integer() || e.get<long long>() < 0) {
            fail(key, "expected an array of non-negative integers");
          }
        } else {
          if (!e.is_number()) fail(key, "expected an array of numbers");
        }
        tmp.push_back(e.get<T>());
      }
      out = std::move(tmp);
    }
  }
  template <std::size_t N>
  void get(const std::string& key, std::array<double, N>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != N) {
        fail(key, "expected an array of " + std::to_string(N) + " numbers");
      }
      for (std::size_t i = 0; i < N; ++i) {
        if (!(*v)[i].is_number()) fail(key, "expected numbers");
        out[i] = (*v)[i].get<double>();
      }
    }
  }
  void get(const std::string& key, ProbeSet& out) {
    std::array<double, 3> v{out.a, out.b, out.c};
    get(key, v);
    out = {v[0], v[1], v[2]};
  }

  /// Throws on any key that was never looked up.
  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!known_.count(it.key())) {
        throw ConfigError(name_ + "." + it.key() + ": unknown key");
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(name_ + "." + key + ": " + msg);
  }

 private:
  const json* obj_ = nullptr;
  std::string name_;
  std::set<std::string> known_;
};

void read_model(const json& root, RunConfig& cfg) {
  Section s(root, "model");
  std::string id = to_string(cfg.model);
  s.get("id", id);
  if (id == "kpp") {
    cfg.model = ModelId::Kpp;
  } else if (id == "bz") {
    cfg.model = ModelId::Bz;
  } else if (id == "discharge") {
    cfg.model = ModelId::Discharge;
  } else {
    s.fail("id", "unknown model '" + id + "' (kpp, bz, discharge)");
  }
  s.get("monitored", cfg.monitored);
  switch (cfg.model) {
    case ModelId::Kpp:
      s.get("k", cfg.kpp.k);
      s.get("diffusion", cfg.kpp.diffusion);
      break;
    case ModelId::Bz:
      s.get("eps", cfg.bz.eps);
      s.get("mu", cfg.bz.mu);
      s.get("f", cfg.bz.f);
      s.get("q", cfg.bz.q);
      s.get("diffusion", cfg.bz.diffusion);
      s.get("excited_fraction", cfg.bz.excited_fraction);
      s.get("excited_b", cfg.bz.excited_b);
      s.get("excited_c", cfg.bz.excited_c);
      break;
    case ModelId::Discharge: {
      DischargeParams& d = cfg.discharge;
      s.get("seed_begin", d.seed_begin);
      s.get("seed_end", d.seed_end);
      s.get("field_pulse", d.field_pulse);
      s.get("pulse_duration", d.pulse_duration);
      s.get("period", d.period);
      s.get("diffusion", d.diffusion);
      s.get("ionization_prefactor", d.ionization_prefactor);
      s.get("ionization_field", d.ionization_field);
      s.get("attachment_rate", d.attachment_rate);
      s.get("beta_ep", d.beta_ep);
      s.get("beta_np", d.beta_np);
      s.get("seed_density", d.seed_density);
      s.get("seed_width", d.seed_width);
      s.get("background_density", d.background_density);
      std::string sign = d.recombination == RecombinationSign::Physical ? "physical" : "as-printed";
      s.get("recombination_sign", sign);
      if (sign == "physical") {
        d.recombination = RecombinationSign::Physical;
      } else if (sign == "as-printed") {
        d.recombination = RecombinationSign::AsPrinted;
      } else {
        s.fail("recombination_sign", "expected 'physical' or 'as-printed'");
      }
      break;
    }
  }
  s.finish();
}

void read_grid(const json& root, RunConfig& cfg) {
  Section s(root, "grid");
  switch (cfg.model) {
    case ModelId::Kpp:
      s.get("n", cfg.kpp.n);
      s.get("x_min", cfg.kpp.x_min);
      s.get("x_max", cfg.kpp.x_max);
      break;
    case ModelId::Bz:
      s.get("n", cfg.bz.n);
      s.get("x_min", cfg.bz.x_min);
      s.get("x_max", cfg.bz.x_max);
      break;
    case ModelId::Discharge: {
      s.get("n", cfg.discharge.n);
      double x_min = 0.0;
      s.get("x_min", x_min);
      if (x_min != 0.0) s.fail("x_min", "the discharge gap starts at 0");
      s.get("x_max", cfg.discharge.gap);
      break;
    }
  }
  s.finish();
}

void read_controller(const json& root, RunConfig& cfg) {
  Section s(root, "controller");
  ControllerConfig& c = cfg.controller;
  s.get("eta", c.eta);
  s.get("dt0", c.dt0);
  s.get("eps0", c.eps0);
  s.get("eps_max", c.eps_max);
  s.get("probe_big", c.big);
  s.get("probe_small", c.small);
  s.get("zeta", c.zeta);
  s.get("beta", c.beta);
  s.get("gamma", c.gamma);
  s.get("theta", c.theta);
  s.get("rejection_offset", c.rejection_offset);
  s.get("upsilon", c.upsilon);
  s.get("probe_period", c.probe_period);
  std::string policy = policy_name(c.probe_policy);
  s.get("probe_policy", policy);
  if (policy == "every-n") {
    c.probe_policy = ProbePolicy::EveryN;
  } else if (policy == "at-steps") {
    c.probe_policy = ProbePolicy::AtSteps;
  } else if (policy == "never") {
    c.probe_policy = ProbePolicy::Never;
  } else {
    s.fail("probe_policy", "expected 'every-n', 'at-steps' or 'never'");
  }
  s.get("probe_steps", c.probe_steps);
  s.get("max_rejections", c.max_rejections);
  s.get("restart_at_events", c.restart_at_events);
  s.finish();
}

void read_solver(const json& root, RunConfig& cfg) {
  Section s(root, "solver");
  s.get("reaction_rtol", cfg.reaction.rtol);
  s.get("reaction_atol", cfg.reaction.atol);
  s.get("reaction_max_substeps", cfg.reaction.max_substeps);
  s.get("reference_rtol", cfg.reference.rtol);
  s.get("reference_atol", cfg.reference.atol);
  s.get("reference_max_steps", cfg.reference.max_steps);
  s.get("reference_initial_step", cfg.reference.initial_step);
  s.get("norm_floor", cfg.norm.floor);
  s.finish();
}

void read_time(const json& root, RunConfig& cfg) {
  Section s(root, "time");
  s.get("t0", cfg.t0);
  s.get("t_end", cfg.t_end);
  s.get("snapshots", cfg.snapshot_times);
  s.finish();
}

void read_output(const json& root, RunConfig& cfg) {
  Section s(root, "output");
  s.get("dir", cfg.out_dir);
  s.get("compare_reference", cfg.compare_reference);
  s.finish();
}

void read_study(const json& root, RunConfig& cfg) {
  Section s(root, "study");
  StudyConfig& st = cfg.study;
  s.get("k", st.k);
  s.get("eps", st.eps);
  s.get("dts", st.dts);
  s.get("dt_min", st.dt_min);
  s.get("dt_max", st.dt_max);
  s.get("points", st.points);
  s.get("bracket_below", st.bracket_below);
  s.get("bracket_above", st.bracket_above);
  s.get("profile_time", st.profile_time);
  s.get("tolerance", st.tolerance);
  s.finish();
}

// Byte offset to "line L, column C" (both 1-based).
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

}  // namespace

ModelSpec RunConfig::make_model() const {
  ModelSpec spec;
  switch (model) {
    case ModelId::Kpp: spec = make_kpp_model(kpp); break;
    case ModelId::Bz: spec = make_bz_model(bz); break;
    case ModelId::Discharge: spec = make_discharge_model(discharge, t_end); break;
  }
  if (!monitored.empty()) {
    spec.monitored.clear();
    for (const std::string& name : monitored) {
      auto it = std::find(spec.names.begin(), spec.names.end(), name);
      if (it == spec.names.end()) throw ConfigError("model.monitored: unknown species '" + name + "'");
      spec.monitored.push_back(static_cast<std::size_t>(it - spec.names.begin()));
    }
  }
  spec.validate();
  return spec;
}

FieldState RunConfig::initial_state() const {
  FieldState s = [&] {
    switch (model) {
      case ModelId::Kpp: return kpp_initial_state(kpp, t0);
      case ModelId::Bz: return bz_initial_state(bz);
      case ModelId::Discharge: return discharge_initial_state(discharge);
    }
    throw ConfigError("unknown model");
  }();
  s.set_time(t0);
  return s;
}

void RunConfig::validate() {
  switch (model) {
    case ModelId::Kpp: kpp.validate(); break;
    case ModelId::Bz: bz.validate(); break;
    case ModelId::Discharge: discharge.validate(); break;
  }
  if (!std::isfinite(t0) || !std::isfinite(t_end)) throw ConfigError("time: t0 and t_end must be finite");
  if (t_end < t0) throw ConfigError("time: t_end must not precede t0");
  for (double s : snapshot_times) {
    if (!(s > t0 && s <= t_end)) throw ConfigError("time.snapshots: every time must lie in (t0, t_end]");
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()) ||
      std::adjacent_find(snapshot_times.begin(), snapshot_times.end()) != snapshot_times.end()) {
    throw ConfigError("time.snapshots: times must be strictly increasing");
  }
  if (model == ModelId::Discharge && t0 != 0.0) {
    throw ConfigError("time.t0: the discharge pulse train starts at t0 = 0");
  }
  reaction.validate();
  if (!(reference.rtol > 0.0) || !(reference.atol > 0.0)) {
    throw ConfigError("solver: reference tolerances must be positive");
  }
  if (reference.max_steps < 1) throw ConfigError("solver.reference_max_steps: must be >= 1");
  if (!(reference.initial_step >= 0.0)) throw ConfigError("solver.reference_initial_step: must be >= 0");
  if (!(norm.floor > 0.0)) throw ConfigError("solver.norm_floor: must be positive");

  if (!all_positive(study.k)) throw ConfigError("study.k: values must be positive");
  if (!all_positive(study.eps)) throw ConfigError("study.eps: values must be positive");
  for (double e : study.eps) {
    if (!(e < 0.5)) throw ConfigError("study.eps: values must be below 1/2");
  }
  if (!all_positive(study.dts)) throw ConfigError("study.dts: values must be positive");
  if (!std::is_sorted(study.dts.begin(), study.dts.end())) {
    throw ConfigError("study.dts: values must be increasing");
  }
  if (!(study.dt_min > 0.0 && study.dt_max > study.dt_min)) {
    throw ConfigError("study: need 0 < dt_min < dt_max");
  }
  if (study.points < 2) throw ConfigError("study.points: need at least 2");
  if (!(study.bracket_below >= 1.0 && study.bracket_above >= 1.0)) {
    throw ConfigError("study: bracket factors must be >= 1");
  }
  if (!(study.profile_time > 0.0)) throw ConfigError("study.profile_time: must be positive");
  if (!(study.tolerance > 0.0)) throw ConfigError("study.tolerance: must be positive");

  warnings = controller.validate();
  (void)make_model();
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    root = json::object();
  } else {
    try {
      root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
      std::string msg = e.what();
      throw ConfigError("config parse error at " + locate(text, e.byte > 0 ? e.byte - 1 : 0) +
                        ": " + msg);
    }
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> sections{"model",  "grid",   "controller", "solver",
                                              "time",   "output", "study"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (!sections.count(it.key())) throw ConfigError(it.key() + ": unknown section");
  }
  RunConfig cfg;
  read_model(root, cfg);
  read_grid(root, cfg);
  read_controller(root, cfg);
  read_solver(root, cfg);
  read_time(root, cfg);
  read_output(root, cfg);
  read_study(root, cfg);
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json config_to_json(const RunConfig& cfg) {
  json model{{"id", to_string(cfg.model)}, {"monitored", cfg.monitored}};
  json grid;
  switch (cfg.model) {
    case ModelId::Kpp:
      model["k"] = cfg.kpp.k;
      model["diffusion"] = cfg.kpp.diffusion;
      grid = {{"n", cfg.kpp.n}, {"x_min", cfg.kpp.x_min}, {"x_max", cfg.kpp.x_max}};
      break;
    case ModelId::Bz:
      model["eps"] = cfg.bz.eps;
      model["mu"] = cfg.bz.mu;
      model["f"] = cfg.bz.f;
      model["q"] = cfg.bz.q;
      model["diffusion"] = cfg.bz.diffusion;
      model["excited_fraction"] = cfg.bz.excited_fraction;
      model["excited_b"] = cfg.bz.excited_b;
      model["excited_c"] = cfg.bz.excited_c ? json(*cfg.bz.excited_c) : json(nullptr);
      grid = {{"n", cfg.bz.n}, {"x_min", cfg.bz.x_min}, {"x_max", cfg.bz.x_max}};
      break;
    case ModelId::Discharge: {
      const DischargeParams& d = cfg.discharge;
      model["seed_begin"] = d.seed_begin;
      model["seed_end"] = d.seed_end;
      model["field_pulse"] = d.field_pulse;
      model["pulse_duration"] = d.pulse_duration;
      model["period"] = d.period;
      model["diffusion"] = d.diffusion;
      model["ionization_prefactor"] = d.ionization_prefactor;
      model["ionization_field"] = d.ionization_field;
      model["attachment_rate"] = d.attachment_rate;
      model["beta_ep"] = d.beta_ep;
      model["beta_np"] = d.beta_np;
      model["seed_density"] = d.seed_density;
      model["seed_width"] = d.seed_width;
      model["background_density"] = d.background_density;
      model["recombination_sign"] =
          d.recombination == RecombinationSign::Physical ? "physical" : "as-printed";
      grid = {{"n", d.n}, {"x_min", 0.0}, {"x_max", d.gap}};
      break;
    }
  }
  const ControllerConfig& c = cfg.controller;
  json controller{{"eta", c.eta},
                  {"dt0", c.dt0},
                  {"eps0", c.eps0},
                  {"eps_max", c.eps_max},
                  {"probe_big", {c.big.a, c.big.b, c.big.c}},
                  {"probe_small", {c.small.a, c.small.b, c.small.c}},
                  {"zeta", c.zeta},
                  {"beta", c.beta},
                  {"gamma", c.gamma},
                  {"theta", c.theta},
                  {"rejection_offset", c.rejection_offset},
                  {"upsilon", c.upsilon},
                  {"probe_period", c.probe_period},
                  {"probe_policy", policy_name(c.probe_policy)},
                  {"probe_steps", c.probe_steps},
                  {"max_rejections", c.max_rejections},
                  {"restart_at_events", c.restart_at_events}};
  json solver{{"reaction_rtol", cfg.reaction.rtol},
              {"reaction_atol", cfg.reaction.atol},
              {"reaction_max_substeps", cfg.reaction.max_substeps},
              {"reference_rtol", cfg.reference.rtol},
              {"reference_atol", cfg.reference.atol},
              {"reference_max_steps", cfg.reference.max_steps},
              {"reference_initial_step", cfg.reference.initial_step},
              {"norm_floor", cfg.norm.floor}};
  json time{{"t0", cfg.t0}, {"t_end", cfg.t_end}, {"snapshots", cfg.snapshot_times}};
  json output{{"dir", cfg.out_dir}, {"compare_reference", cfg.compare_reference}};
  const StudyConfig& st = cfg.study;
  json study{{"k", st.k},
             {"eps", st.eps},
             {"dts", st.dts},
             {"dt_min", st.dt_min},
             {"dt_max", st.dt_max},
             {"points", st.points},
             {"bracket_below", st.bracket_below},
             {"bracket_above", st.bracket_above},
             {"profile_time", st.profile_time},
             {"tolerance", st.tolerance}};
  json root = json::object();
  root["model"] = model;
  root["grid"] = grid;
  root["controller"] = controller;
  root["solver"] = solver;
  root["time"] = time;
  root["output"] = output;
  root["study"] = study;
  return root;
}

}  // namespace adsplit
