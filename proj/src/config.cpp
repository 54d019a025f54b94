#include "qmem/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps JSON paths back to text positions for diagnostics.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    throw ValidationError(location(section, key) + msg);
  }

  std::string location(const std::string& section, const std::string& key) const {
    std::size_t pos = std::string::npos;
    if (!section.empty()) {
      pos = text_.find("\"" + section + "\"");
      if (pos != std::string::npos && !key.empty()) {
        const std::size_t k = text_.find("\"" + key + "\"", pos);
        if (k != std::string::npos) pos = k;
      }
    } else if (!key.empty()) {
      pos = text_.find("\"" + key + "\"");
    }
    if (pos == std::string::npos) return source_ + ": ";
    return position(pos) + ": ";
  }

  std::string position(std::size_t byte) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return source_ + ":" + std::to_string(line) + ":" + std::to_string(col);
  }

  const json& section(const json& doc, const std::string& name, bool required) const {
    static const json empty = json::object();
    if (!doc.contains(name)) {
      if (required) throw ValidationError(source_ + ": missing required section \"" + name + "\"");
      return empty;
    }
    const json& s = doc.at(name);
    if (!s.is_object()) fail(name, "", "section \"" + name + "\" must be an object");
    return s;
  }

  void allow(const json& obj, const std::string& section, std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.count(k)) fail(section, k, "unknown key \"" + k + "\" in section \"" + section + "\"");
    }
  }

  double number(const json& obj, const std::string& section, const std::string& key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    return required_number(obj, section, key);
  }

  double required_number(const json& obj, const std::string& section, const std::string& key) const {
    if (!obj.contains(key)) fail(section, "", "missing required key \"" + key + "\" in section \"" + section + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(section, key, "\"" + key + "\" must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(section, key, "\"" + key + "\" must be finite");
    return d;
  }

  std::uint64_t count(const json& obj, const std::string& section, const std::string& key,
                      std::uint64_t fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail(section, key, "\"" + key + "\" must be a nonnegative integer");
  }

  int integer(const json& obj, const std::string& section, const std::string& key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number()) {
      const double d = v.get<double>();
      if (d == std::floor(d) && std::abs(d) < 2e9) return static_cast<int>(d);
    }
    fail(section, key, "\"" + key + "\" must be an integer");
  }

  bool boolean(const json& obj, const std::string& section, const std::string& key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(section, key, "\"" + key + "\" must be true or false");
    return obj.at(key).get<bool>();
  }

  std::string string(const json& obj, const std::string& section, const std::string& key,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) fail(section, key, "\"" + key + "\" must be a string");
    return obj.at(key).get<std::string>();
  }

  // Exactly one of two alternative keys.
  std::string one_of(const json& obj, const std::string& section, const std::string& a, const std::string& b) const {
    const bool ha = obj.contains(a), hb = obj.contains(b);
    if (ha && hb) fail(section, b, "give only one of \"" + a + "\" and \"" + b + "\"");
    if (!ha && !hb) {
      fail(section, "", "missing required key: one of \"" + a + "\" or \"" + b + "\" in section \"" + section + "\"");
    }
    return ha ? a : b;
  }

  template <class F>
  void guard(const std::string& section, const std::string& key, F&& f) const {
    try {
      f();
    } catch (const ValidationError& e) {
      fail(section, key, e.what());
    }
  }

 private:
  const std::string& text_;
  std::string source_;
};

Gate read_gate(const Reader& rd, const json& obj, const std::string& key, Gate fallback) {
  if (!obj.contains(key)) return fallback;
  const json& g = obj.at(key);
  if (!g.is_object()) rd.fail("counting", key, "gate \"" + key + "\" must be an object");
  rd.allow(g, key, {"t0_ns", "width_ns"});
  Gate out;
  out.t0_ns = rd.number(g, key, "t0_ns", fallback.t0_ns);
  out.width_ns = rd.number(g, key, "width_ns", fallback.width_ns);
  return out;
}

std::vector<double> read_number_list(const Reader& rd, const json& obj, const std::string& section,
                                     const std::string& key, const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) rd.fail(section, key, "\"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) rd.fail(section, key, "\"" + key + "\" must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ZeemanConfig ExperimentConfig::zeeman_config() const {
  return zeeman_frequencies(scheme, polarization, B_z(), zeeman.mu_B_over_hbar);
}

double ExperimentConfig::B_z() const {
  if (zeeman.input == ZeemanSection::Input::FieldGauss) return zeeman.value;
  return field_for_ground_splitting(scheme, kTwoPi * zeeman.value, zeeman.mu_B_over_hbar);
}

double ExperimentConfig::Delta_ab() const { return zeeman_config().Delta_ab; }

MediumProfile ExperimentConfig::medium_profile() const {
  return medium_with_depth(scheme, polarization.beta, medium.shape, medium.length, medium.points,
                           medium.optical_depth, medium.gaussian_sigma);
}

FrequencyGrid ExperimentConfig::frequency_grid() const {
  return FrequencyGrid::from_time_window(grid.n_f, grid.t_start, grid.duration);
}

void ExperimentConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ValidationError("schema_version " + std::to_string(schema_version) + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
  }
  scheme.validate();
  polarization.validate();
  if (!(medium.optical_depth >= 0.0)) throw ValidationError("medium: optical_depth must be >= 0");
  medium_profile();
  if (!(control.Omega >= 0.0)) throw ValidationError("control: Omega must be >= 0");
  if (!(control.edge > 0.0)) throw ValidationError("control: edge_s must be > 0");
  if (!std::isfinite(zeeman.value)) throw ValidationError("zeeman: field must be finite");
  if (!(zeeman.mu_B_over_hbar > 0.0)) throw ValidationError("zeeman: mu_B_over_hbar must be > 0");
  zeeman_config();
  frequency_grid();
  if (!(grid.gamma0_over_gamma_cb > 0.0)) throw ValidationError("grid: gamma0_over_gamma_cb must be > 0");
  if (grid.z_steps < 1) throw ValidationError("grid: z_steps must be >= 1");
  if (!(signal.fwhm > 0.0)) throw ValidationError("signal: fwhm_s must be > 0");
  if (!(spectrum.delta_max_over_gamma > spectrum.delta_min_over_gamma) || spectrum.points < 2) {
    throw ValidationError("spectrum: need delta_max > delta_min and >= 2 points");
  }
  if (!(store.short_storage > 0.0) || !(store.long_storage >= store.short_storage)) {
    throw ValidationError("store: need 0 < short_storage_s <= long_storage_s");
  }
  if (!(larmor.t_max > 0.0) || larmor.points < 3 || !(larmor.fit_max_time > 0.0)) {
    throw ValidationError("larmor: need t_max_s > 0, points >= 3, fit_max_time_s > 0");
  }
  if (!(larmor.B0 >= 0.0)) throw ValidationError("larmor: B0 must be >= 0");
  counting.source.validate();
  for (double s : counting.sweep_s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("counting: sweep_s entries must be > 0");
  }
  if (!(counting.storage_efficiency >= 0.0 && counting.storage_efficiency <= 1.0)) {
    throw ValidationError("counting: storage_efficiency must lie in [0, 1]");
  }
  if (!(counting.retrieved_background >= 0.0)) throw ValidationError("counting: retrieved_background must be >= 0");
  static const std::set<std::string> known{"spectrum", "store", "larmor", "counting"};
  for (const auto& p : pipelines) {
    if (!known.count(p)) throw ValidationError("pipelines: unknown pipeline \"" + p + "\"");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  Reader rd(text, source_name);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto p = what.find("parse error");
    throw ValidationError(rd.position(e.byte > 0 ? e.byte - 1 : 0) + ": " +
                          (p != std::string::npos ? what.substr(p) : what));
  }
  if (!doc.is_object()) throw ValidationError(source_name + ": config must be a JSON object");
  rd.allow(doc, "", {"schema_version", "scheme", "polarization", "medium", "control", "zeeman", "grid", "signal",
                     "spectrum", "store", "larmor", "counting", "pipelines"});

  ExperimentConfig cfg;
  if (!doc.contains("schema_version")) throw ValidationError(source_name + ": missing \"schema_version\"");
  cfg.schema_version = rd.integer(doc, "", "schema_version", 0);
  if (cfg.schema_version != kSchemaVersion) {
    rd.fail("", "schema_version",
            "schema_version " + std::to_string(cfg.schema_version) + " is not supported (expected " +
                std::to_string(kSchemaVersion) + ")");
  }

  {
    const json& s = rd.section(doc, "scheme", false);
    rd.allow(s, "scheme", {"preset", "F_a", "F_b", "F_c", "g_a", "g_b", "g_c", "Gamma_c", "omega_c", "f_cb", "label_a",
                           "label_b", "label_c"});
    cfg.scheme_preset = rd.string(s, "scheme", "preset", "rb85_d1");
    LevelScheme base;
    if (cfg.scheme_preset == "rb85_d1") {
      base = LevelScheme::rb85_d1();
    } else if (cfg.scheme_preset == "custom") {
      for (const char* k : {"F_a", "F_b", "F_c", "g_a", "g_b", "g_c", "Gamma_c", "omega_c", "f_cb"}) {
        if (!s.contains(k)) rd.fail("scheme", "", std::string("custom scheme needs \"") + k + "\"");
      }
    } else {
      rd.fail("scheme", "preset", "unknown scheme preset \"" + cfg.scheme_preset + "\" (rb85_d1 or custom)");
    }
    cfg.scheme = base;
    cfg.scheme.F_a = rd.integer(s, "scheme", "F_a", base.F_a);
    cfg.scheme.F_b = rd.integer(s, "scheme", "F_b", base.F_b);
    cfg.scheme.F_c = rd.integer(s, "scheme", "F_c", base.F_c);
    cfg.scheme.g_a = rd.number(s, "scheme", "g_a", base.g_a);
    cfg.scheme.g_b = rd.number(s, "scheme", "g_b", base.g_b);
    cfg.scheme.g_c = rd.number(s, "scheme", "g_c", base.g_c);
    cfg.scheme.Gamma_c = rd.number(s, "scheme", "Gamma_c", base.Gamma_c);
    cfg.scheme.omega_c = rd.number(s, "scheme", "omega_c", base.omega_c);
    cfg.scheme.f_cb = rd.number(s, "scheme", "f_cb", base.f_cb);
    cfg.scheme.label_a = rd.string(s, "scheme", "label_a", base.label_a);
    cfg.scheme.label_b = rd.string(s, "scheme", "label_b", base.label_b);
    cfg.scheme.label_c = rd.string(s, "scheme", "label_c", base.label_c);
    rd.guard("scheme", "", [&] { cfg.scheme.validate(); });
  }
  {
    const json& s = rd.section(doc, "polarization", false);
    rd.allow(s, "polarization", {"beta", "r"});
    cfg.polarization.beta = rd.integer(s, "polarization", "beta", 1);
    cfg.polarization.r = rd.integer(s, "polarization", "r", 1);
    rd.guard("polarization", "", [&] { cfg.polarization.validate(); });
  }
  {
    const json& s = rd.section(doc, "medium", true);
    rd.allow(s, "medium", {"optical_depth", "length_m", "points", "shape", "gaussian_sigma_m"});
    cfg.medium.optical_depth = rd.required_number(s, "medium", "optical_depth");
    if (cfg.medium.optical_depth < 0.0) rd.fail("medium", "optical_depth", "optical_depth must be >= 0");
    cfg.medium.length = rd.number(s, "medium", "length_m", cfg.medium.length);
    cfg.medium.points = rd.count(s, "medium", "points", cfg.medium.points);
    const std::string shape = rd.string(s, "medium", "shape", "uniform");
    if (shape == "uniform") {
      cfg.medium.shape = DensityShape::Uniform;
    } else if (shape == "gaussian") {
      cfg.medium.shape = DensityShape::Gaussian;
    } else {
      rd.fail("medium", "shape", "shape must be \"uniform\" or \"gaussian\"");
    }
    cfg.medium.gaussian_sigma = rd.number(s, "medium", "gaussian_sigma_m", cfg.medium.gaussian_sigma);
    rd.guard("medium", "", [&] { cfg.medium_profile(); });
  }
  {
    const json& s = rd.section(doc, "control", true);
    rd.allow(s, "control", {"omega_over_gamma_c", "omega_rad_s", "t_off_s", "edge_s"});
    const std::string key = rd.one_of(s, "control", "omega_over_gamma_c", "omega_rad_s");
    cfg.control.given_in_gamma = key == "omega_over_gamma_c";
    const double v = rd.required_number(s, "control", key);
    if (v < 0.0) rd.fail("control", key, "Rabi frequency must be >= 0");
    cfg.control.Omega = cfg.control.given_in_gamma ? v * cfg.scheme.Gamma_c : v;
    cfg.control.t_off = rd.number(s, "control", "t_off_s", cfg.control.t_off);
    cfg.control.edge = rd.number(s, "control", "edge_s", cfg.control.edge);
    if (!(cfg.control.edge > 0.0)) rd.fail("control", "edge_s", "edge_s must be > 0");
  }
  {
    const json& s = rd.section(doc, "zeeman", true);
    rd.allow(s, "zeeman", {"B_z_gauss", "Delta_ab_over_2pi_hz", "mu_B_over_hbar"});
    const std::string key = rd.one_of(s, "zeeman", "B_z_gauss", "Delta_ab_over_2pi_hz");
    cfg.zeeman.input = key == "B_z_gauss" ? ZeemanSection::Input::FieldGauss : ZeemanSection::Input::SplittingHz;
    cfg.zeeman.value = rd.required_number(s, "zeeman", key);
    cfg.zeeman.mu_B_over_hbar = rd.number(s, "zeeman", "mu_B_over_hbar", cfg.zeeman.mu_B_over_hbar);
    rd.guard("zeeman", key, [&] { cfg.zeeman_config(); });
  }
  {
    const json& s = rd.section(doc, "grid", false);
    rd.allow(s, "grid", {"n_f", "t_start_s", "duration_s", "gamma0_over_gamma_cb", "z_steps"});
    cfg.grid.n_f = rd.count(s, "grid", "n_f", cfg.grid.n_f);
    cfg.grid.t_start = rd.number(s, "grid", "t_start_s", cfg.grid.t_start);
    cfg.grid.duration = rd.number(s, "grid", "duration_s", cfg.grid.duration);
    cfg.grid.gamma0_over_gamma_cb = rd.number(s, "grid", "gamma0_over_gamma_cb", cfg.grid.gamma0_over_gamma_cb);
    cfg.grid.z_steps = rd.integer(s, "grid", "z_steps", cfg.grid.z_steps);
    rd.guard("grid", "", [&] { cfg.frequency_grid(); });
  }
  {
    const json& s = rd.section(doc, "signal", false);
    rd.allow(s, "signal", {"fwhm_s", "t_center_s"});
    cfg.signal.fwhm = rd.number(s, "signal", "fwhm_s", cfg.signal.fwhm);
    cfg.signal.t_center = rd.number(s, "signal", "t_center_s", cfg.signal.t_center);
  }
  {
    const json& s = rd.section(doc, "spectrum", false);
    rd.allow(s, "spectrum", {"delta_min_over_gamma", "delta_max_over_gamma", "points"});
    cfg.spectrum.delta_min_over_gamma = rd.number(s, "spectrum", "delta_min_over_gamma", cfg.spectrum.delta_min_over_gamma);
    cfg.spectrum.delta_max_over_gamma = rd.number(s, "spectrum", "delta_max_over_gamma", cfg.spectrum.delta_max_over_gamma);
    cfg.spectrum.points = rd.count(s, "spectrum", "points", cfg.spectrum.points);
  }
  {
    const json& s = rd.section(doc, "store", false);
    rd.allow(s, "store", {"short_storage_s", "long_storage_s"});
    cfg.store.short_storage = rd.number(s, "store", "short_storage_s", cfg.store.short_storage);
    cfg.store.long_storage = rd.number(s, "store", "long_storage_s", cfg.store.long_storage);
  }
  {
    const json& s = rd.section(doc, "larmor", false);
    rd.allow(s, "larmor", {"B0", "t_max_s", "points", "fit_max_time_s"});
    cfg.larmor.B0 = rd.number(s, "larmor", "B0", cfg.larmor.B0);
    cfg.larmor.t_max = rd.number(s, "larmor", "t_max_s", cfg.larmor.t_max);
    cfg.larmor.points = rd.count(s, "larmor", "points", cfg.larmor.points);
    cfg.larmor.fit_max_time = rd.number(s, "larmor", "fit_max_time_s", cfg.larmor.fit_max_time);
  }
  {
    const json& s = rd.section(doc, "counting", true);
    rd.allow(s, "counting",
             {"s", "raman_gain", "B_s", "epsilon_1", "epsilon_2", "epsilon_3", "T2", "w_i", "w_s", "gate_d1", "gate_d2",
              "gate_d3", "gate_da", "trials", "seed", "detector", "source", "auxiliary_idler", "idler_T2", "epsilon_a",
              "dark_count_probability", "sweep_s", "storage_efficiency", "retrieved_background"});
    CountingConfig& c = cfg.counting.source;
    const std::string key = rd.one_of(s, "counting", "s", "raman_gain");
    cfg.counting.s_given_as_gain = key == "raman_gain";
    const double v = rd.required_number(s, "counting", key);
    if (v < 0.0) rd.fail("counting", key, "\"" + key + "\" must be >= 0");
    c.s = cfg.counting.s_given_as_gain ? CountingConfig::s_from_raman_gain(v) : v;
    c.B_s = rd.number(s, "counting", "B_s", 0.0);
    c.epsilon_1 = rd.number(s, "counting", "epsilon_1", 0.039);
    c.epsilon_2 = rd.number(s, "counting", "epsilon_2", 0.15);
    c.epsilon_3 = rd.number(s, "counting", "epsilon_3", 0.15);
    c.T2 = rd.number(s, "counting", "T2", 0.5);
    c.w_i = rd.number(s, "counting", "w_i", 0.25);
    c.w_s = rd.number(s, "counting", "w_s", 0.15);
    c.gates[kD1] = read_gate(rd, s, "gate_d1", Gate{0, 140});
    c.gates[kD2] = read_gate(rd, s, "gate_d2", Gate{0, 240});
    c.gates[kD3] = read_gate(rd, s, "gate_d3", Gate{0, 240});
    c.gates[kDa] = read_gate(rd, s, "gate_da", Gate{0, 140});
    c.trials = rd.count(s, "counting", "trials", 1000000);
    c.seed = rd.count(s, "counting", "seed", 1);
    const std::string det = rd.string(s, "counting", "detector", "photon_counting");
    if (det == "photon_counting") {
      c.detector = DetectorModel::PhotonCounting;
    } else if (det == "threshold") {
      c.detector = DetectorModel::Threshold;
    } else {
      rd.fail("counting", "detector", "detector must be \"photon_counting\" or \"threshold\"");
    }
    const std::string src = rd.string(s, "counting", "source", "pair");
    if (src == "pair") {
      c.source = SourceModel::PairSource;
    } else if (src == "coherent") {
      c.source = SourceModel::Coherent;
    } else {
      rd.fail("counting", "source", "source must be \"pair\" or \"coherent\"");
    }
    c.auxiliary_idler = rd.boolean(s, "counting", "auxiliary_idler", false);
    c.idler_T2 = rd.number(s, "counting", "idler_T2", 0.5);
    c.epsilon_a = rd.number(s, "counting", "epsilon_a", c.epsilon_1);
    c.dark_count_probability = rd.number(s, "counting", "dark_count_probability", 0.0);
    cfg.counting.sweep_s = read_number_list(rd, s, "counting", "sweep_s", cfg.counting.sweep_s);
    cfg.counting.storage_efficiency = rd.number(s, "counting", "storage_efficiency", cfg.counting.storage_efficiency);
    cfg.counting.retrieved_background =
        rd.number(s, "counting", "retrieved_background", cfg.counting.retrieved_background);
    rd.guard("counting", "", [&] { c.validate(); });
  }
  if (doc.contains("pipelines")) {
    const json& p = doc.at("pipelines");
    if (!p.is_array()) rd.fail("", "pipelines", "\"pipelines\" must be an array of names");
    cfg.pipelines.clear();
    for (const auto& e : p) {
      if (!e.is_string()) rd.fail("", "pipelines", "\"pipelines\" must contain only strings");
      cfg.pipelines.push_back(e.get<std::string>());
    }
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source_name + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

ojson to_json(const ExperimentConfig& c) {
  ojson j;
  j["schema_version"] = c.schema_version;
  const LevelScheme& s = c.scheme;
  j["scheme"] = {{"preset", c.scheme_preset}, {"F_a", s.F_a},         {"F_b", s.F_b},         {"F_c", s.F_c},
                 {"g_a", s.g_a},              {"g_b", s.g_b},         {"g_c", s.g_c},         {"Gamma_c", s.Gamma_c},
                 {"omega_c", s.omega_c},      {"f_cb", s.f_cb},       {"label_a", s.label_a}, {"label_b", s.label_b},
                 {"label_c", s.label_c}};
  j["polarization"] = {{"beta", c.polarization.beta}, {"r", c.polarization.r}};
  j["medium"] = {{"optical_depth", c.medium.optical_depth},
                 {"length_m", c.medium.length},
                 {"points", c.medium.points},
                 {"shape", c.medium.shape == DensityShape::Uniform ? "uniform" : "gaussian"},
                 {"gaussian_sigma_m", c.medium.gaussian_sigma}};
  ojson control;
  if (c.control.given_in_gamma) {
    control["omega_over_gamma_c"] = c.control.Omega / s.Gamma_c;
  } else {
    control["omega_rad_s"] = c.control.Omega;
  }
  control["t_off_s"] = c.control.t_off;
  control["edge_s"] = c.control.edge;
  j["control"] = control;
  ojson z;
  z[c.zeeman.input == ZeemanSection::Input::FieldGauss ? "B_z_gauss" : "Delta_ab_over_2pi_hz"] = c.zeeman.value;
  z["mu_B_over_hbar"] = c.zeeman.mu_B_over_hbar;
  j["zeeman"] = z;
  j["grid"] = {{"n_f", c.grid.n_f},
               {"t_start_s", c.grid.t_start},
               {"duration_s", c.grid.duration},
               {"gamma0_over_gamma_cb", c.grid.gamma0_over_gamma_cb},
               {"z_steps", c.grid.z_steps}};
  j["signal"] = {{"fwhm_s", c.signal.fwhm}, {"t_center_s", c.signal.t_center}};
  j["spectrum"] = {{"delta_min_over_gamma", c.spectrum.delta_min_over_gamma},
                   {"delta_max_over_gamma", c.spectrum.delta_max_over_gamma},
                   {"points", c.spectrum.points}};
  j["store"] = {{"short_storage_s", c.store.short_storage}, {"long_storage_s", c.store.long_storage}};
  j["larmor"] = {{"B0", c.larmor.B0},
                 {"t_max_s", c.larmor.t_max},
                 {"points", c.larmor.points},
                 {"fit_max_time_s", c.larmor.fit_max_time}};
  const CountingConfig& k = c.counting.source;
  ojson cnt;
  if (c.counting.s_given_as_gain) {
    cnt["raman_gain"] = k.raman_gain();
  } else {
    cnt["s"] = k.s;
  }
  cnt["B_s"] = k.B_s;
  cnt["epsilon_1"] = k.epsilon_1;
  cnt["epsilon_2"] = k.epsilon_2;
  cnt["epsilon_3"] = k.epsilon_3;
  cnt["T2"] = k.T2;
  cnt["w_i"] = k.w_i;
  cnt["w_s"] = k.w_s;
  auto gate = [](const Gate& g) { return ojson{{"t0_ns", g.t0_ns}, {"width_ns", g.width_ns}}; };
  cnt["gate_d1"] = gate(k.gates[kD1]);
  cnt["gate_d2"] = gate(k.gates[kD2]);
  cnt["gate_d3"] = gate(k.gates[kD3]);
  cnt["gate_da"] = gate(k.gates[kDa]);
  cnt["trials"] = k.trials;
  cnt["seed"] = k.seed;
  cnt["detector"] = k.detector == DetectorModel::PhotonCounting ? "photon_counting" : "threshold";
  cnt["source"] = k.source == SourceModel::PairSource ? "pair" : "coherent";
  cnt["auxiliary_idler"] = k.auxiliary_idler;
  cnt["idler_T2"] = k.idler_T2;
  cnt["epsilon_a"] = k.epsilon_a;
  cnt["dark_count_probability"] = k.dark_count_probability;
  cnt["sweep_s"] = c.counting.sweep_s;
  cnt["storage_efficiency"] = c.counting.storage_efficiency;
  cnt["retrieved_background"] = c.counting.retrieved_background;
  j["counting"] = cnt;
  j["pipelines"] = c.pipelines;
  return j;
}

}  // namespace qmem
