#include "cqed/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cqed::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_numeric_key(const std::string& key) {
  return key != "wait_mode" && key != "protocol";
}

} // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> keys = {
      {"Q", "", "cavity quality factor"},
      {"lambda_nm", "nm", "cavity resonance wavelength"},
      {"gamma0_kHz", "kHz", "radiative linewidth Gamma0/2pi"},
      {"gamma_GHz", "GHz", "total optical linewidth Gamma/2pi"},
      {"r_g", "", "coupling ratio g_par / g_perp"},
      {"g_sim_MHz", "MHz", "simulated single-photon coupling g_sim/2pi"},
      {"eta_QE", "", "emitter quantum efficiency"},
      {"eta_cav", "", "cavity outcoupling efficiency"},
      {"eta_det", "", "detection efficiency"},
      {"delta_g_GHz", "GHz", "half ground-state Zeeman splitting"},
      {"delta_e_GHz", "GHz", "half excited-state Zeeman splitting"},
      {"phi_rad", "rad", "phase of the spin-flip coupling"},
      {"P_in_pW", "pW", "input laser power"},
      {"delta_a_GHz", "GHz", "atomic detuning omega_a - omega_L"},
      {"delta_c_GHz", "GHz", "cavity detuning omega_c - omega_L"},
      {"t_pulse_ns", "ns", "laser pulse width"},
      {"wait_mode", "", "fluorescence collection window: off or on (7 tau)"},
      {"fock_dim", "", "photon-number truncation"},
      {"protocol", "", "diffusion protocol: fluorescence or reflection"},
      {"gamma_sd_GHz", "GHz", "spectral-diffusion half width Gamma_sd/2pi"},
  };
  return keys;
}

bool is_known_key(const std::string& key) {
  const auto& s = config_schema();
  return std::any_of(s.begin(), s.end(), [&](const ConfigKey& k) { return key == k.name; });
}

std::string flag_name(const std::string& key) {
  std::string f;
  for (char c : key) f.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(c)));
  return f;
}

std::string ConfigIssue::describe() const {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  if (!key.empty()) os << ": " << key;
  os << ": " << message;
  return os.str();
}

ConfigValues parse_config(std::istream& in, const std::string& source) {
  ConfigValues cv;
  cv.source = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      cv.issues.push_back({source, line, "", "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!is_known_key(key)) {
      cv.issues.push_back({source, line, key, "unknown key"});
      continue;
    }
    if (cv.values.count(key)) {
      cv.issues.push_back({source, line, key,
                           "duplicate key (first set on line " + std::to_string(cv.lines[key]) + ")"});
      continue;
    }
    if (value.empty()) {
      cv.issues.push_back({source, line, key, "missing value"});
      continue;
    }
    cv.values[key] = value;
    cv.lines[key] = line;
  }
  return cv;
}

ConfigValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigValues cv;
    cv.issues.push_back({path.string(), 0, "", "cannot open config file"});
    return cv;
  }
  return parse_config(in, path.string());
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"table3", "fig2ab", "fig2c", "fig2d"};
  return names;
}

std::optional<SystemParams> preset(const std::string& name) {
  SystemParams p = SystemParams::table3();
  if (name == "table3" || name == "fig2d") return p;
  if (name == "fig2ab") {
    p.Q = 1e5;
    p.Gamma = ghz(1.0);
    return p;
  }
  if (name == "fig2c") {
    p.Q = 1e5;
    return p;
  }
  return std::nullopt;
}

std::optional<Range> parse_range(const std::string& arg, std::string* error) {
  auto fail = [&](const std::string& m) -> std::optional<Range> {
    if (error) *error = m;
    return std::nullopt;
  };
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return fail("sweep '" + arg + "': expected key=values");
  Range r;
  r.key = trim(arg.substr(0, eq));
  if (!is_known_key(r.key) || !is_numeric_key(r.key)) {
    return fail("sweep '" + arg + "': unknown or non-numeric key '" + r.key + "'");
  }
  const std::string body = trim(arg.substr(eq + 1));
  if (body.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(body);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(trim(item));
    if (parts.size() < 3 || parts.size() > 4) return fail("sweep '" + arg + "': expected start:stop:count[:log]");
    const auto a = parse_double(parts[0]), b = parse_double(parts[1]), n = parse_double(parts[2]);
    const bool log = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && !log) return fail("sweep '" + arg + "': fourth field must be 'log'");
    if (!a || !b || !n || *n < 1 || std::floor(*n) != *n) return fail("sweep '" + arg + "': bad number");
    if (!(*b > *a)) return fail("sweep '" + arg + "': range must have positive length");
    if (log && !(*a > 0)) return fail("sweep '" + arg + "': log range needs positive bounds");
    const int count = static_cast<int>(*n);
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      r.values.push_back(log ? *a * std::pow(*b / *a, f) : *a + (*b - *a) * f);
    }
  } else {
    std::stringstream ss(body);
    for (std::string item; std::getline(ss, item, ',');) {
      const auto v = parse_double(trim(item));
      if (!v) return fail("sweep '" + arg + "': bad number '" + trim(item) + "'");
      r.values.push_back(*v);
    }
    if (r.values.empty()) return fail("sweep '" + arg + "': no values");
  }
  return r;
}

void apply_value(ResolvedConfig& c, const std::string& key, double v) {
  SystemParams& p = c.system;
  if (key == "Q") p.Q = v;
  else if (key == "lambda_nm") p.lambda_0 = v * 1e-9;
  else if (key == "gamma0_kHz") p.Gamma0 = khz(v);
  else if (key == "gamma_GHz") p.Gamma = ghz(v);
  else if (key == "r_g") p.r_g = v;
  else if (key == "g_sim_MHz") p.g_sim = mhz(v);
  else if (key == "eta_QE") p.eta_QE = v;
  else if (key == "eta_cav") p.eta_cav = v;
  else if (key == "eta_det") p.eta_det = v;
  else if (key == "delta_g_GHz") p.delta_g = ghz(v);
  else if (key == "delta_e_GHz") p.delta_e = ghz(v);
  else if (key == "phi_rad") p.phi = v;
  else if (key == "P_in_pW") c.P_in = picowatt(v);
  else if (key == "t_pulse_ns") c.t_pulse = nanosecond(v);
  else if (key == "delta_a_GHz" || key == "delta_c_GHz") {
    Detunings d = c.detunings.value_or(Detunings{});
    (key == "delta_a_GHz" ? d.delta_a : d.delta_c) = ghz(v);
    c.detunings = d;
  } else if (key == "fock_dim") {
    if (!(v >= 2) || std::floor(v) != v) throw InvalidArgument("fock_dim must be an integer >= 2");
    c.fock_dim = static_cast<Index>(v);
  } else if (key == "gamma_sd_GHz") {
    if (!(v >= 0)) throw InvalidArgument("gamma_sd_GHz must be >= 0");
    c.gamma_sd = ghz(v);
  } else {
    throw InvalidArgument("key '" + key + "' is not numeric");
  }
}

FluorescenceScenario ResolvedConfig::fluorescence() const {
  FluorescenceScenario s;
  s.system = system;
  s.P_in = P_in;
  s.t_pulse = t_pulse;
  s.wait_mode = wait_mode;
  if (fock_dim) s.fock_dim = *fock_dim;
  return s;
}

ReflectionScenario ResolvedConfig::reflection() const {
  ReflectionScenario s;
  s.system = system;
  s.P_in = P_in;
  s.t_pulse = t_pulse;
  s.detunings = detunings;
  if (fock_dim) s.fock_dim = *fock_dim;
  return s;
}

Resolution resolve(const RunConfig& rc) {
  Resolution res;
  ResolvedConfig& c = res.config;
  const auto base = preset(rc.preset);
  if (!base) {
    res.issues.push_back({"flag", 0, "preset", "unknown preset '" + rc.preset + "'"});
    return res;
  }
  c.system = *base;
  auto given = [&](const std::string& key) -> std::string {
    if (rc.flags.count(key)) return rc.flags.at(key);
    return rc.file.values.count(key) ? rc.file.values.at(key) : "";
  };
  const bool reflection_like =
      rc.command == "reflection" || (rc.command == "diffusion" && given("protocol") == "reflection");
  c.P_in = reflection_like ? picowatt(3.8) : picowatt(100);
  c.t_pulse = reflection_like ? microsecond(47) : nanosecond(10);

  res.issues = rc.file.issues;
  std::map<std::string, std::pair<std::string, ConfigIssue>> merged;
  for (const auto& [k, v] : rc.file.values) {
    merged[k] = {v, ConfigIssue{rc.file.source, rc.file.lines.count(k) ? rc.file.lines.at(k) : 0, k, ""}};
  }
  for (const auto& [k, v] : rc.flags) {
    if (!is_known_key(k)) {
      res.issues.push_back({"flag", 0, k, "unknown key"});
      continue;
    }
    merged[k] = {v, ConfigIssue{"flag", 0, k, ""}};
  }
  for (const auto& [k, entry] : merged) {
    const auto& [value, where] = entry;
    c.merged[k] = value;
    ConfigIssue issue = where;
    if (k == "wait_mode") {
      if (value == "off") c.wait_mode = WaitMode::seven_tau_off;
      else if (value == "on") c.wait_mode = WaitMode::seven_tau_on;
      else { issue.message = "expected 'off' or 'on', got '" + value + "'"; res.issues.push_back(issue); }
      continue;
    }
    if (k == "protocol") {
      if (value == "fluorescence") c.protocol = Protocol::fluorescence;
      else if (value == "reflection") c.protocol = Protocol::reflection;
      else { issue.message = "expected 'fluorescence' or 'reflection', got '" + value + "'"; res.issues.push_back(issue); }
      continue;
    }
    const auto v = parse_double(value);
    if (!v) {
      issue.message = "not a number: '" + value + "'";
      res.issues.push_back(issue);
      continue;
    }
    try {
      apply_value(c, k, *v);
    } catch (const InvalidArgument& e) {
      issue.message = e.what();
      res.issues.push_back(issue);
    }
  }
  if (c.detunings && (!merged.count("delta_a_GHz") || !merged.count("delta_c_GHz"))) {
    res.issues.push_back({"config", 0, "delta_a_GHz", "delta_a_GHz and delta_c_GHz must be given together"});
  }
  for (const auto& arg : rc.sweep_specs) {
    std::string err;
    if (auto r = parse_range(arg, &err)) c.sweeps.push_back(std::move(*r));
    else res.issues.push_back({"flag", 0, "sweep", err});
  }

  // Physical-range violations point at the key (and file line) that set them.
  static const std::vector<std::pair<std::string, std::string>> owners{
      {"Gamma0", "gamma0_kHz"}, {"Gamma", "gamma_GHz"},   {"lambda_0", "lambda_nm"},
      {"g_sim", "g_sim_MHz"},   {"P_in", "P_in_pW"},      {"t_pulse", "t_pulse_ns"},
      {"eta_cav", "eta_cav"},   {"eta_QE", "eta_QE"},     {"eta_det", "eta_det"},
      {"r_g", "r_g"},           {"Q", "Q"}};
  auto physical = [&](const std::string& m) {
    ConfigIssue issue{"params", 0, "", m};
    for (const auto& [field, key] : owners) {
      if (m.rfind(field + " ", 0) != 0) continue;
      issue.key = key;
      if (merged.count(key)) {
        issue.source = merged.at(key).second.source;
        issue.line = merged.at(key).second.line;
      }
      break;
    }
    res.issues.push_back(issue);
  };
  for (const auto& m : validate(c.system)) physical(m);
  DriveParams d;
  d.P_in = c.P_in;
  d.t_pulse = c.t_pulse;
  for (const auto& m : validate(d)) physical(m);
  return res;
}

std::string canonical_text(const ResolvedConfig& c, const std::string& command) {
  std::ostringstream os;
  os.precision(17);
  const SystemParams& p = c.system;
  os << "command=" << command << "\nQ=" << p.Q << "\nlambda_0=" << p.lambda_0
     << "\nGamma0=" << p.Gamma0 << "\nGamma=" << p.Gamma << "\nr_g=" << p.r_g
     << "\ng_sim=" << p.g_sim << "\neta_QE=" << p.eta_QE << "\neta_cav=" << p.eta_cav
     << "\neta_det=" << p.eta_det << "\ndelta_g=" << p.delta_g << "\ndelta_e=" << p.delta_e
     << "\nphi=" << p.phi << "\nP_in=" << c.P_in << "\nt_pulse=" << c.t_pulse;
  if (c.detunings) os << "\ndelta_a=" << c.detunings->delta_a << "\ndelta_c=" << c.detunings->delta_c;
  os << "\nwait_mode=" << (c.wait_mode == WaitMode::seven_tau_off ? "off" : "on");
  if (c.fock_dim) os << "\nfock_dim=" << *c.fock_dim;
  os << "\nprotocol=" << to_string(c.protocol) << "\ngamma_sd=" << c.gamma_sd << "\n";
  return os.str();
}

} // namespace cqed::harness
