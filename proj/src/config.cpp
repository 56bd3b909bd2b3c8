#include "frsm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace frsm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

TemporalLaw to_law(const std::string& key, std::string_view v) {
  if (v == "constant") return TemporalLaw::constant;
  if (v == "cosine") return TemporalLaw::cosine;
  if (v == "ramp") return TemporalLaw::ramp;
  throw ConfigError(key, "unknown temporal law '" + std::string(v) + "'");
}

std::string_view law_name(TemporalLaw law) {
  switch (law) {
    case TemporalLaw::constant:
      return "constant";
    case TemporalLaw::cosine:
      return "cosine";
    case TemporalLaw::ramp:
      return "ramp";
  }
  return "?";
}

ForcingMode to_mode(const std::string& key, std::string_view v) {
  std::istringstream is{std::string(v)};
  std::vector<std::string> tok;
  for (std::string t; is >> t;) tok.push_back(t);
  if (tok.size() != 5 && tok.size() != 6) {
    throw ConfigError(key, "expected 'm1 m2 re im law [rate]'");
  }
  ForcingMode m;
  m.m1 = to_int<int>(key, tok[0]);
  m.m2 = to_int<int>(key, tok[1]);
  m.amplitude = {to_double(key, tok[2]), to_double(key, tok[3])};
  m.law = to_law(key, tok[4]);
  if (tok.size() == 6) m.rate = to_double(key, tok[5]);
  if (m.law != TemporalLaw::constant && tok.size() != 6) throw ConfigError(key, "this law needs a rate");
  return m;
}

// forcing.modes[i] -> i, or -1 when the key has another shape.
long mode_index(const std::string& key) {
  static constexpr std::string_view prefix = "forcing.modes[";
  if (key.rfind(prefix, 0) != 0 || key.back() != ']') return -1;
  const std::string_view digits(key.data() + prefix.size(), key.size() - prefix.size() - 1);
  long i = -1;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || i < 0) return -1;
  return i;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::vector<std::string>* notes) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::map<long, ForcingMode> modes;

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(key, "key given more than once");
    if (value.empty()) throw ConfigError(key, "missing value");

    if (key == "grid.n") {
      cfg.n = to_int<int>(key, value);
    } else if (key == "grid.l") {
      cfg.length = to_double(key, value);
    } else if (key.rfind("params.", 0) == 0) {
      const std::string name = key.substr(7);
      bool known = false;
      for (auto n : Params::names) known = known || n == name;
      if (!known) throw ConfigError(key, "unknown key");
      const double v = to_double(key, value);
      if (!(v > 0.0)) throw ConfigError(key, "physical constants must be positive");
      cfg.params.at(name) = v;
      if (name == "lambda_p" && notes) {
        notes->push_back("params.lambda_p is recorded but does not enter the planar equations");
      }
    } else if (key == "ic.kind") {
      try {
        cfg.ic.kind = parse_ic_kind(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "ic.seed") {
      cfg.ic.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "ic.kmax") {
      cfg.ic.kmax = to_double(key, value);
    } else if (key == "ic.amplitude") {
      cfg.ic.amplitude = to_double(key, value);
    } else if (key == "ic.decay") {
      cfg.ic.decay = to_double(key, value);
    } else if (key == "ic.path") {
      cfg.ic.path = std::string(value);
    } else if (const long idx = mode_index(key); idx >= 0) {
      modes[idx] = to_mode(key, value);
    } else if (key == "stepper.dt") {
      cfg.stepper.dt = to_double(key, value);
      if (!(cfg.stepper.dt > 0.0)) throw ConfigError(key, "must be positive");
    } else if (key == "stepper.t_end") {
      cfg.stepper.t_end = to_double(key, value);
      if (cfg.stepper.t_end < 0.0) throw ConfigError(key, "must be non-negative");
    } else if (key == "stepper.cfl") {
      cfg.stepper.cfl = to_double(key, value);
      if (!(cfg.stepper.cfl > 0.0)) throw ConfigError(key, "must be positive");
    } else if (key == "stepper.adapt") {
      cfg.stepper.adapt = to_bool(key, value);
    } else if (key == "stepper.kmax") {
      cfg.stepper.kmax = to_double(key, value);
      if (cfg.stepper.kmax < 0.0) throw ConfigError(key, "must be non-negative");
    } else if (key == "output.every") {
      cfg.output_every = to_int<int>(key, value);
      if (cfg.output_every < 1) throw ConfigError(key, "must be at least 1");
    } else if (key == "output.dir") {
      cfg.output_dir = std::string(value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  try {
    (void)cfg.grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(seen.count("grid.n") ? "grid.n" : "grid.l", e.what());
  }
  if (cfg.stepper.kmax > cfg.grid().dealias_cutoff() * (1.0 + 1e-12)) {
    throw ConfigError("stepper.kmax", "exceeds the 2/3 cutoff of the grid");
  }
  if (cfg.ic.kind == IcKind::file && cfg.ic.path.empty()) throw ConfigError("ic.path", "required for ic.kind = file");
  for (const auto& [idx, m] : modes) {
    const std::string key = "forcing.modes[" + std::to_string(idx) + "]";
    try {
      cfg.forcing.add(m);
      (void)cfg.forcing.evaluate(cfg.grid(), 0.0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>* notes) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str(), notes);
}

std::string format_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "grid.n = " << cfg.n << "\n";
  os << "grid.l = " << cfg.length << "\n";
  const auto values = cfg.params.to_array();
  for (std::size_t i = 0; i < values.size(); ++i) os << "params." << Params::names[i] << " = " << values[i] << "\n";
  os << "ic.kind = " << to_string(cfg.ic.kind) << "\n";
  os << "ic.seed = " << cfg.ic.seed << "\n";
  os << "ic.kmax = " << cfg.ic.kmax << "\n";
  os << "ic.amplitude = " << cfg.ic.amplitude << "\n";
  os << "ic.decay = " << cfg.ic.decay << "\n";
  if (!cfg.ic.path.empty()) os << "ic.path = " << cfg.ic.path << "\n";
  for (std::size_t i = 0; i < cfg.forcing.modes().size(); ++i) {
    const ForcingMode& m = cfg.forcing.modes()[i];
    os << "forcing.modes[" << i << "] = " << m.m1 << ' ' << m.m2 << ' ' << m.amplitude.real() << ' '
       << m.amplitude.imag() << ' ' << law_name(m.law);
    if (m.law != TemporalLaw::constant) os << ' ' << m.rate;
    os << "\n";
  }
  os << "stepper.dt = " << cfg.stepper.dt << "\n";
  os << "stepper.t_end = " << cfg.stepper.t_end << "\n";
  os << "stepper.cfl = " << cfg.stepper.cfl << "\n";
  os << "stepper.adapt = " << (cfg.stepper.adapt ? "true" : "false") << "\n";
  os << "stepper.kmax = " << cfg.stepper.kmax << "\n";
  os << "output.every = " << cfg.output_every << "\n";
  if (!cfg.output_dir.empty()) os << "output.dir = " << cfg.output_dir << "\n";
  return os.str();
}

}  // namespace frsm
