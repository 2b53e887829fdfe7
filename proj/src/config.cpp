#include "pinn/config.hpp"

#include <charconv>
#include <type_traits>
#include <cstdlib>
#include <sstream>

#include "pinn/io.hpp"

namespace pinn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> default_times(ProblemId id) {
  switch (id) {
    case ProblemId::kEx1:
    case ProblemId::kEx2: return {0.5, 1.0, 5.0, 10.0};
    case ProblemId::kEx3: return {0.1, 0.3, 0.5, 0.7, 1.0};
    case ProblemId::kEx4: return {0.0, 1.0};
    case ProblemId::kEx5: return {2.0, 8.0};
    case ProblemId::kGeneralized: return {0.5, 1.0};
  }
  return {};
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
  auto& t = c.train;
  if (key == "problem") {
    c.problem = v;
  } else if (key == "layers") {
    t.layers = to_int<int>(key, v);
  } else if (key == "width") {
    t.width = to_int<int>(key, v);
  } else if (key == "epochs") {
    t.epochs = to_int<int>(key, v);
  } else if (key == "n_interior") {
    t.counts.interior = to_int<int>(key, v);
  } else if (key == "n_initial") {
    t.counts.initial = to_int<int>(key, v);
  } else if (key == "n_boundary") {
    t.counts.boundary = to_int<int>(key, v);
  } else if (key == "seed") {
    t.seed = to_int<std::uint64_t>(key, v);
  } else if (key == "resample") {
    t.resample = to_bool(key, v);
  } else if (key == "lambda_ic") {
    t.lambda_ic = to_double(key, v);
  } else if (key == "lambda_bc") {
    t.lambda_bc = to_double(key, v);
  } else if (key == "learning_rate") {
    t.learning_rate = to_double(key, v);
  } else if (key == "workers") {
    t.workers = to_int<int>(key, v);
  } else if (key == "log_every") {
    t.log_every = to_int<int>(key, v);
  } else if (key == "max_seconds") {
    t.max_seconds = to_double(key, v);
  } else if (key == "R") {
    c.reynolds = to_double(key, v);
  } else if (key == "epsilon") {
    c.epsilon = to_double(key, v);
  } else if (key == "times") {
    c.times.clear();
    for (const auto& s : split_list(v)) c.times.push_back(to_double(key, s));
  } else if (key == "grid_n") {
    c.grid_n = to_int<int>(key, v);
  } else if (key == "spacetime_n") {
    c.spacetime_n = to_int<int>(key, v);
  } else if (key == "l2_norm") {
    try {
      c.l2_norm = l2_norm_from_name(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else if (key == "formats") {
    c.write_csv = c.write_json = false;
    for (const auto& f : split_list(v)) {
      if (f == "csv") {
        c.write_csv = true;
      } else if (f == "json") {
        c.write_json = true;
      } else {
        throw ConfigError("config key 'formats': unknown format '" + f + "'");
      }
    }
  } else if (key == "checkpoint") {
    c.checkpoint = v;
  } else if (key == "sweep_layers") {
    c.sweep_layers.clear();
    for (const auto& s : split_list(v)) c.sweep_layers.push_back(to_int<int>(key, s));
  } else if (key == "sweep_widths") {
    c.sweep_widths.clear();
    for (const auto& s : split_list(v)) c.sweep_widths.push_back(to_int<int>(key, s));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_roundtrip(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

}  // namespace

RunConfig RunConfig::defaults_for(const std::string& problem) {
  const ProblemId id = problem_id_from_name(problem);
  const ProblemSpec spec = pinn::make_problem(id);
  RunConfig c;
  c.problem = problem;
  c.train = TrainConfig::defaults_for(spec);
  c.times = default_times(id);
  c.grid_n = default_grid_n(spec);
  c.spacetime_n = spec.n_space == 1 ? 101 : 11;
  if (const char* env = std::getenv("PINN_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    c.output_dir = env;
  }
  return c;
}

ProblemSpec RunConfig::make_problem() const {
  ProblemOverrides o;
  o.R = reynolds;
  o.epsilon = epsilon;
  try {
    return pinn::make_problem(problem, o);
  } catch (const UnknownProblemError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig build_run_config(const KeyValues& file, const KeyValues& overrides) {
  std::string problem = "ex1";
  if (auto it = file.find("problem"); it != file.end()) problem = it->second;
  if (auto it = overrides.find("problem"); it != overrides.end()) problem = it->second;
  RunConfig c = RunConfig::defaults_for(problem);
  for (const auto& [k, v] : file) apply(c, k, v);
  for (const auto& [k, v] : overrides) apply(c, k, v);
  try {
    c.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.times.empty()) throw ConfigError("at least one evaluation time is required");
  if (c.grid_n < 2) throw ConfigError("grid_n must be at least 2");
  if (c.spacetime_n < 2) throw ConfigError("spacetime_n must be at least 2");
  return c;
}

RunConfig parse_run_config(const std::string& text) { return build_run_config(parse_key_values(text), {}); }

std::string serialize_run_config(const RunConfig& c) {
  const auto& t = c.train;
  std::ostringstream out;
  out << "problem = " << c.problem << '\n';
  out << "layers = " << t.layers << '\n';
  out << "width = " << t.width << '\n';
  out << "epochs = " << t.epochs << '\n';
  out << "n_interior = " << t.counts.interior << '\n';
  out << "n_initial = " << t.counts.initial << '\n';
  out << "n_boundary = " << t.counts.boundary << '\n';
  out << "seed = " << t.seed << '\n';
  out << "resample = " << (t.resample ? "true" : "false") << '\n';
  out << "lambda_ic = " << format_roundtrip(t.lambda_ic) << '\n';
  out << "lambda_bc = " << format_roundtrip(t.lambda_bc) << '\n';
  out << "learning_rate = " << format_roundtrip(t.learning_rate) << '\n';
  out << "workers = " << t.workers << '\n';
  out << "log_every = " << t.log_every << '\n';
  out << "max_seconds = " << format_roundtrip(t.max_seconds) << '\n';
  if (c.reynolds) out << "R = " << format_roundtrip(*c.reynolds) << '\n';
  if (c.epsilon) out << "epsilon = " << format_roundtrip(*c.epsilon) << '\n';
  out << "times = " << join(c.times) << '\n';
  out << "grid_n = " << c.grid_n << '\n';
  out << "spacetime_n = " << c.spacetime_n << '\n';
  out << "l2_norm = " << l2_norm_name(c.l2_norm) << '\n';
  out << "output_dir = " << c.output_dir << '\n';
  std::vector<std::string> formats;
  if (c.write_csv) formats.push_back("csv");
  if (c.write_json) formats.push_back("json");
  out << "formats = ";
  for (std::size_t i = 0; i < formats.size(); ++i) out << (i ? "," : "") << formats[i];
  out << '\n';
  if (!c.checkpoint.empty()) out << "checkpoint = " << c.checkpoint << '\n';
  out << "sweep_layers = " << join(c.sweep_layers) << '\n';
  out << "sweep_widths = " << join(c.sweep_widths) << '\n';
  return out.str();
}

nlohmann::json config_snapshot(const RunConfig& c) {
  const auto& t = c.train;
  const ProblemSpec p = c.make_problem();
  nlohmann::json j;
  j["problem"] = c.problem;
  j["layers"] = t.layers;
  j["width"] = t.width;
  j["epochs"] = t.epochs;
  j["n_interior"] = t.counts.interior;
  j["n_initial"] = t.counts.initial;
  j["n_boundary"] = t.counts.boundary;
  j["seed"] = t.seed;
  j["resample"] = t.resample;
  j["lambda_ic"] = t.lambda_ic;
  j["lambda_bc"] = t.lambda_bc;
  j["learning_rate"] = t.learning_rate;
  j["max_seconds"] = t.max_seconds;
  j["R"] = p.coeffs.R;
  j["epsilon"] = p.coeffs.epsilon;
  j["times"] = c.times;
  j["grid_n"] = c.grid_n;
  j["l2_norm"] = std::string(l2_norm_name(c.l2_norm));
  return j;
}

}  // namespace pinn
