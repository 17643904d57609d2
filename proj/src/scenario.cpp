#include "pma/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <vector>

namespace pma {

namespace {

namespace fs = std::filesystem;

struct Entry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

struct KvFile {
  fs::path path;
  // section -> key -> entry; the top level lives under "".
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::vector<std::pair<std::string, int>> section_order;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ScenarioError(path.string() + ":" + std::to_string(line) + ": " +
                        msg);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ScenarioError(path.string() + ": " + msg);
  }
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

KvFile parse_kv_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario file " + path.string());
  }
  KvFile file;
  file.path = path;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        file.fail(line_no, "malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        file.fail(line_no, "empty section name");
      }
      file.section_order.emplace_back(section, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      file.fail(line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      file.fail(line_no, "empty key");
    }
    if (value.empty()) {
      file.fail(line_no, "empty value for '" + key + "'");
    }
    auto [it, inserted] =
        file.sections[section].emplace(key, Entry{value, line_no});
    if (!inserted) {
      file.fail(line_no, "duplicate key '" + key + "' (first on line " +
                             std::to_string(it->second.line) + ")");
    }
  }
  return file;
}

/// Typed access to one section, with consumption tracking so leftovers can
/// be reported as unknown keys.
class Block {
 public:
  Block(KvFile& file, std::string section)
      : file_(file), section_(std::move(section)) {}

  bool present() const { return file_.sections.count(section_) > 0; }

  Entry* find(const std::string& key) const {
    auto sec = file_.sections.find(section_);
    if (sec == file_.sections.end()) {
      return nullptr;
    }
    auto it = sec->second.find(key);
    if (it == sec->second.end()) {
      return nullptr;
    }
    it->second.consumed = true;
    return &it->second;
  }

  std::optional<std::string> text(const std::string& key) const {
    Entry* e = find(key);
    if (!e) {
      return std::nullopt;
    }
    return e->value;
  }

  double number(const std::string& key, double fallback) const {
    Entry* e = find(key);
    return e ? parse_number(*e, key) : fallback;
  }

  double required_number(const std::string& key) const {
    Entry* e = find(key);
    if (!e) {
      file_.fail("missing required key '" + key + "' in [" + section_ + "]");
    }
    return parse_number(*e, key);
  }

  long integer(const std::string& key, long fallback) const {
    Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    long v = 0;
    if (!parse_integral(e->value, v)) {
      file_.fail(e->line, "key '" + key + "' must be an integer, got '" +
                              e->value + "'");
    }
    return v;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    std::uint64_t v = 0;
    if (!parse_integral(e->value, v)) {
      file_.fail(e->line, "key '" + key +
                              "' must be a non-negative integer, got '" +
                              e->value + "'");
    }
    return v;
  }

  /// Checked variants attribute violations to the key's line.
  double checked(const std::string& key, double fallback, bool ok(double),
                 const char* what) const {
    Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    const double v = parse_number(*e, key);
    if (!ok(v)) {
      file_.fail(e->line,
                 "key '" + key + "' " + what + ", got " + e->value);
    }
    return v;
  }

  const KvFile& file() const { return file_; }
  const std::string& section() const { return section_; }

 private:
  template <typename T>
  static bool parse_integral(const std::string& s, T& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  }

  double parse_number(const Entry& e, const std::string& key) const {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      file_.fail(e.line, "key '" + key + "' must be a finite number, got '" +
                             e.value + "'");
    }
    return v;
  }

  KvFile& file_;
  std::string section_;
};

bool is_positive(double v) { return v > 0.0; }
bool is_non_negative(double v) { return v >= 0.0; }

PlantParams read_plant(const Block& b, const PlantParams& base) {
  PlantParams p = base;
  p.M = b.checked("M_kg", p.M, is_non_negative, "must be >= 0");
  p.m = b.checked("m_kg", p.m, is_positive, "must be > 0");
  p.K_e = b.checked("K_e_N_per_m", p.K_e, is_positive, "must be > 0");
  p.d = b.checked("d_N_s_per_m", p.d, is_non_negative, "must be >= 0");
  p.g_signed = b.number("g_signed_m_per_s2", p.g_signed);
  p.A = b.checked("A_m2", p.A, is_positive, "must be > 0");
  p.p_dz = b.checked("p_dz_Pa", p.p_dz, is_non_negative, "must be >= 0");
  p.p_max = b.checked("p_max_Pa", p.p_max, is_positive, "must be > 0");
  p.alpha = b.checked("alpha_N_per_m", p.alpha, is_positive, "must be > 0");
  p.beta = b.checked("beta_per_m", p.beta, is_positive, "must be > 0");
  p.gamma = b.number("gamma_per_m", p.gamma);
  try {
    p.validate();
  } catch (const std::invalid_argument& err) {
    b.file().fail("[" + b.section() + "]: " + err.what());
  }
  return p;
}

PressureSignal read_signal(const Block& b) {
  PressureSignal sig;
  const std::optional<std::string> kind = b.text("kind");
  if (!kind) {
    b.file().fail("missing required key 'kind' in [" + b.section() + "]");
  }
  if (*kind == "constant") {
    sig.kind = SignalKind::constant;
  } else if (*kind == "step") {
    sig.kind = SignalKind::step;
  } else if (*kind == "chirp") {
    sig.kind = SignalKind::chirp;
  } else if (*kind == "sine") {
    sig.kind = SignalKind::sine;
  } else {
    b.file().fail("unknown signal kind '" + *kind + "'");
  }
  sig.offset = b.number("offset_Pa", 0.0);
  sig.amplitude = b.number("amplitude_Pa", 0.0);
  sig.f0 = b.number("f0_Hz", 0.0);
  sig.f1 = b.number("f1_Hz", 0.0);
  sig.duration = b.number("duration_s", 0.0);
  sig.step_time = b.number("step_time_s", 0.0);
  try {
    sig.validate();
  } catch (const std::invalid_argument& err) {
    b.file().fail("[" + b.section() + "]: " + err.what());
  }
  return sig;
}

ReferenceSignal read_reference(const Block& b) {
  ReferenceSignal ref;
  ref.bias = b.number("bias_m", ref.bias);
  ref.amplitude = b.number("amplitude_m", ref.amplitude);
  ref.f = b.checked("f_Hz", ref.f, is_positive, "must be > 0");
  try {
    ref.validate();
  } catch (const std::invalid_argument& err) {
    b.file().fail("[" + b.section() + "]: " + err.what());
  }
  return ref;
}

ControllerConfig read_controller(const Block& b, double sim_rate) {
  ControllerConfig cfg;
  const std::optional<std::string> mode = b.text("mode");
  if (!mode) {
    b.file().fail("missing required key 'mode' in [" + b.section() + "]");
  }
  if (*mode == "pid") {
    cfg.mode = ControlMode::pid;
    cfg.Kp = b.number("Kp_Pa_per_m", 0.0);
    cfg.Ki = b.number("Ki_Pa_per_m_s", 0.0);
    cfg.Kd = b.number("Kd_Pa_s_per_m", 0.0);
  } else if (*mode == "computed_torque") {
    cfg.mode = ControlMode::computed_torque;
    cfg.Kp = b.number("Kp_per_s2", 0.0);
    cfg.Ki = b.number("Ki_per_s3", 0.0);
    cfg.Kd = b.number("Kd_per_s", 0.0);
  } else {
    b.file().fail("unknown controller mode '" + *mode + "'");
  }
  cfg.inner_rate = b.checked("inner_rate_Hz", cfg.inner_rate, is_positive,
                             "must be > 0");
  cfg.command_rate = b.checked("command_rate_Hz", cfg.command_rate,
                               is_positive, "must be > 0");
  cfg.integral_limit =
      b.checked("integral_limit_m_s", cfg.integral_limit, is_positive,
                "must be > 0");
  cfg.velocity_filter_cutoff =
      b.checked("velocity_filter_cutoff_Hz", cfg.velocity_filter_cutoff,
                is_non_negative, "must be >= 0");
  try {
    cfg.validate(sim_rate);
  } catch (const std::invalid_argument& err) {
    b.file().fail("[" + b.section() + "]: " + err.what());
  }
  return cfg;
}

IdentificationSpec read_identification(const Block& b) {
  IdentificationSpec spec;
  spec.data_csv = b.text("data_csv").value_or("");
  spec.synthetic_runs =
      int(b.integer("synthetic_runs", spec.synthetic_runs));
  spec.noise_sigma = b.checked("noise_sigma_m", spec.noise_sigma,
                               is_non_negative, "must be >= 0");
  spec.n_starts = int(b.integer("n_starts", spec.n_starts));
  spec.sim_dt = b.checked("sim_dt_s", spec.sim_dt, is_non_negative,
                          "must be >= 0");
  if (spec.n_starts < 1) {
    b.file().fail("[" + b.section() + "]: n_starts must be >= 1");
  }
  if (spec.data_csv.empty() && spec.synthetic_runs < 1) {
    b.file().fail("[" + b.section() +
                  "]: need data_csv or synthetic_runs >= 1");
  }

  static constexpr std::array<const char*, kNumFreeParams> kLo = {
      "alpha_lo_N_per_m", "beta_lo_per_m", "gamma_lo_per_m",
      "d_lo_N_s_per_m",   "K_e_lo_N_per_m", "p_dz_lo_Pa"};
  static constexpr std::array<const char*, kNumFreeParams> kHi = {
      "alpha_hi_N_per_m", "beta_hi_per_m", "gamma_hi_per_m",
      "d_hi_N_s_per_m",   "K_e_hi_N_per_m", "p_dz_hi_Pa"};
  for (int i = 0; i < kNumFreeParams; ++i) {
    spec.bounds.lo[i] = b.number(kLo[size_t(i)], spec.bounds.lo[i]);
    spec.bounds.hi[i] = b.number(kHi[size_t(i)], spec.bounds.hi[i]);
  }
  try {
    spec.bounds.validate();
  } catch (const std::invalid_argument& err) {
    b.file().fail("[" + b.section() + "]: " + err.what());
  }
  return spec;
}

const std::array<const char*, 11> kKnownSections = {
    "",        "plant",     "model", "signal",  "reference",      "controller",
    "sensor",  "regulator", "clock", "initial", "identification"};

}  // namespace

Scenario load_scenario(const fs::path& path) {
  KvFile file = parse_kv_file(path);

  for (const auto& [section, line] : file.section_order) {
    if (std::find(kKnownSections.begin(), kKnownSections.end(), section) ==
        kKnownSections.end()) {
      file.fail(line, "unknown section [" + section + "]");
    }
  }

  Scenario scenario;
  Block top(file, "");
  const std::optional<std::string> name = top.text("name");
  if (!name) {
    file.fail("missing required key 'name'");
  }
  scenario.name = *name;
  const bool name_ok =
      !scenario.name.empty() &&
      std::all_of(scenario.name.begin(), scenario.name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == '-' || c == '.';
      });
  if (!name_ok) {
    file.fail("name '" + scenario.name + "' is not a valid filename stem");
  }
  scenario.rng_seed = top.unsigned64("rng_seed", 0);

  Block clock(file, "clock");
  scenario.clock.dt = clock.checked("dt_s", scenario.clock.dt, is_positive,
                                    "must be > 0");
  scenario.clock.t_end = clock.checked("t_end_s", scenario.clock.t_end,
                                       is_positive, "must be > 0");

  scenario.plant = read_plant(Block(file, "plant"), PlantParams{});
  Block model(file, "model");
  if (model.present()) {
    scenario.model = read_plant(model, scenario.plant);
  }

  Block signal(file, "signal");
  if (signal.present()) {
    scenario.signal = read_signal(signal);
  }
  Block reference(file, "reference");
  if (reference.present()) {
    scenario.reference = read_reference(reference);
  }
  Block controller(file, "controller");
  if (controller.present()) {
    if (!(scenario.clock.t_end > 0.0)) {
      file.fail("[controller] requires a [clock] block with t_end_s");
    }
    scenario.controller =
        read_controller(controller, 1.0 / scenario.clock.dt);
  }

  Block sensor(file, "sensor");
  scenario.sensor.resolution = sensor.checked(
      "resolution_m", scenario.sensor.resolution, is_non_negative,
      "must be >= 0");
  scenario.sensor.latency =
      int(sensor.integer("latency_ticks", scenario.sensor.latency));
  try {
    scenario.sensor.validate();
  } catch (const std::invalid_argument& err) {
    file.fail(std::string("[sensor]: ") + err.what());
  }

  Block regulator(file, "regulator");
  scenario.regulator.tau = regulator.checked("tau_s", scenario.regulator.tau,
                                             is_non_negative, "must be >= 0");
  scenario.regulator.p_min =
      regulator.number("p_min_Pa", scenario.regulator.p_min);
  scenario.regulator.p_max =
      regulator.number("p_max_Pa", scenario.regulator.p_max);
  try {
    scenario.regulator.validate();
  } catch (const std::invalid_argument& err) {
    file.fail(std::string("[regulator]: ") + err.what());
  }

  Block initial(file, "initial");
  scenario.initial.x = initial.number("x_m", 0.0);
  scenario.initial.v = initial.number("v_m_per_s", 0.0);
  scenario.initial.z = initial.number("z_N", 0.0);
  if (!scenario.initial.all_finite()) {
    file.fail("[initial]: state must be finite");
  }

  Block identification(file, "identification");
  if (identification.present()) {
    scenario.identification = read_identification(identification);
  }

  // Anything not consumed by a reader above is not part of the format.
  for (const auto& [section, entries] : file.sections) {
    for (const auto& [key, entry] : entries) {
      if (!entry.consumed) {
        file.fail(entry.line, "unknown key '" + key + "' in [" +
                                  (section.empty() ? "top level" : section) +
                                  "]");
      }
    }
  }
  return scenario;
}

}  // namespace pma
