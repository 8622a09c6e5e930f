#include "carrots/config.hpp"

#include "carrots/report.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace carrots {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return value;
}

}  // namespace

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key), value = trim(raw_value);
  if (key == "precision") {
    try {
      precision = parse_precision(value);
    } catch (const std::exception&) {
      throw ConfigError("bad value for precision: '" + value + "'");
    }
  } else if (key == "max_iterations") {
    max_iterations = parse_number<int>(key, value);
  } else if (key == "escape_radius") {
    escape_radius = parse_number<double>(key, value);
  } else if (key == "tolerance") {
    tolerance = parse_number<double>(key, value);
  } else if (key == "h0") {
    h0 = parse_number<double>(key, value);
  } else if (key == "h_min") {
    h_min = parse_number<double>(key, value);
  } else if (key == "steps_per_halving") {
    steps_per_halving = parse_number<int>(key, value);
  } else if (key == "tip_floor") {
    tip_floor = parse_number<double>(key, value);
  } else if (key == "stick") {
    stick = parse_number<double>(key, value);
  } else if (key == "density") {
    density = parse_number<int>(key, value);
  } else if (key == "levels") {
    const auto dots = value.find("..");
    if (dots == std::string::npos) {
      level_first = level_last = parse_number<int>(key, value);
    } else {
      level_first = parse_number<int>(key, value.substr(0, dots));
      level_last = parse_number<int>(key, value.substr(dots + 2));
    }
  } else if (key == "h_probe") {
    h_probe = parse_number<double>(key, value);
  } else if (key == "q_max") {
    q_max = parse_number<int>(key, value);
  } else if (key == "samples") {
    samples = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "parallelism") {
    parallelism = parse_number<int>(key, value);
  } else if (key == "out_dir") {
    out_dir = value;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(escape_radius, "escape_radius");
  positive(tolerance, "tolerance");
  positive(h0, "h0");
  positive(h_min, "h_min");
  positive(tip_floor, "tip_floor");
  positive(stick, "stick");
  positive(h_probe, "h_probe");
  if (h_min >= h0) throw ConfigError("h_min must be below h0");
  if (max_iterations < 16) throw ConfigError("max_iterations must be at least 16");
  if (steps_per_halving < 1) throw ConfigError("steps_per_halving must be positive");
  if (density != 0 && density < 3) throw ConfigError("density must be 0 (default) or at least 3");
  if (level_first < 1 || level_last < level_first || level_last > 60) throw ConfigError("levels must be a nonempty range in 1..60");
  if (q_max < 2) throw ConfigError("q_max must be at least 2");
  if (samples < 1) throw ConfigError("samples must be positive");
  if (parallelism < 1) throw ConfigError("parallelism must be positive");
}

std::map<std::string, std::string> ExperimentConfig::entries() const {
  return {
      {"density", std::to_string(density)},
      {"escape_radius", format_number(escape_radius)},
      {"h0", format_number(h0)},
      {"h_min", format_number(h_min)},
      {"h_probe", format_number(h_probe)},
      {"levels", std::to_string(level_first) + ".." + std::to_string(level_last)},
      {"max_iterations", std::to_string(max_iterations)},
      {"out_dir", out_dir},
      {"parallelism", std::to_string(parallelism)},
      {"precision", std::string(to_string(precision))},
      {"q_max", std::to_string(q_max)},
      {"samples", std::to_string(samples)},
      {"seed", std::to_string(seed)},
      {"steps_per_halving", std::to_string(steps_per_halving)},
      {"stick", format_number(stick)},
      {"tip_floor", format_number(tip_floor)},
      {"tolerance", format_number(tolerance)},
  };
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries()) out << k << " = " << v << '\n';
  return out.str();
}

TraceOptions ExperimentConfig::trace_options() const {
  TraceOptions t;
  t.h0 = h0;
  t.h_min = h_min;
  t.steps_per_halving = steps_per_halving;
  t.tolerance = tolerance;
  t.precision = precision;
  t.potential.escape_radius = escape_radius;
  t.potential.max_iterations = max_iterations;
  return t;
}

CarrotOptions ExperimentConfig::carrot_options() const {
  CarrotOptions c;
  c.trace = trace_options();
  c.tip_floor = tip_floor;
  return c;
}

int ExperimentConfig::effective_density() const {
  return density > 0 ? density : default_density(ModelTriangle::stick(stick));
}

std::string ExperimentConfig::resolved_out_dir() const {
  if (!out_dir.empty()) return out_dir;
  if (const char* env = std::getenv(out_dir_env); env && *env) return env;
  return "carrots-out";
}

}  // namespace carrots
