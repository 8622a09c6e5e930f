#include "carrots/cli.hpp"

#include "carrots/config.hpp"
#include "carrots/pool.hpp"
#include "carrots/report.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <optional>
#include <sstream>

namespace carrots::cli {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_double(std::string_view s, std::string_view whole) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("bad complex number '" + std::string(whole) + "'");
  return v;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ComponentDescriptor parse_component(const std::string& text) {
  if (text == "main") return ComponentDescriptor::main_cardioid();
  if (text == "basilica") return ComponentDescriptor::basilica();
  if (text.rfind("sat:", 0) == 0) {
    auto [p, q] = parse_fraction(text.substr(4));
    return ComponentDescriptor::satellite(ComponentDescriptor::main_cardioid(), p, q);
  }
  if (text.rfind("words:", 0) == 0) {
    const std::string rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw UsageError("component words need the form words:W0,W1");
    return ComponentDescriptor::from_words(TuningWords(rest.substr(0, comma), rest.substr(comma + 1)));
  }
  throw UsageError("unknown component '" + text + "' (main, basilica, sat:p/q, words:W0,W1)");
}

struct Context {
  ExperimentConfig config;
  std::ostream& out;
  std::ostream& err;
  std::string command;

  RunManifest manifest(const std::filesystem::path& dir) const {
    RunManifest m(dir);
    m.set_command(command);
    m.set_config(config.entries());
    return m;
  }
  std::filesystem::path out_dir() const { return config.resolved_out_dir(); }
};

std::string csv_text(auto writer, const auto& data) {
  std::ostringstream s;
  writer(s, data);
  return s.str();
}

// ---- angles ----------------------------------------------------------------

int cmd_wake(Context& ctx, const std::string& pq) {
  auto [p, q] = parse_fraction(pq);
  auto [a, b] = wake_angles(p, q);
  ctx.out << a.str() << ' ' << b.str() << '\n';
  return ok;
}

int cmd_tune(Context& ctx, const std::string& w0, const std::string& w1, const std::string& address) {
  ctx.out << tune(TuningWords(w0, w1), BinaryItinerary::parse(address)).str() << '\n';
  return ok;
}

int cmd_dyadic(Context& ctx, long long p, int n) {
  auto [upper, lower] = dyadic_representations(p, n);
  ctx.out << upper.str() << ' ' << lower.str() << '\n';
  return ok;
}

int cmd_avoid(Context& ctx, const std::string& a, const std::string& b) {
  ctx.out << (orbit_avoids_interval(Angle::parse(a), Angle::parse(b)) ? "true" : "false") << '\n';
  return ok;
}

int cmd_proposition(Context& ctx, int k, int m_prime, const std::string& pq, const std::string& component) {
  ComponentDescriptor h;
  if (!component.empty()) {
    h = parse_component(component);
  } else if (k == 1) {
    h = ComponentDescriptor::main_cardioid();
  } else if (k == 2) {
    h = ComponentDescriptor::basilica();
  } else {
    throw UsageError("period " + std::to_string(k) + " needs --component");
  }
  if (h.period != k || h.m_prime != m_prime)
    throw UsageError("component has k = " + std::to_string(h.period) + ", m' = " + std::to_string(h.m_prime));
  auto [p, q] = parse_fraction(pq);
  WakePropositionReport r = check_wake_proposition(h, p, q);
  ctx.out << "eta_minus " << r.eta_minus.str() << '\n'
          << "eta_plus " << r.eta_plus.str() << '\n'
          << "gap " << r.gap.str() << '\n'
          << "lower_bound " << r.lower_bound.str() << '\n'
          << "m " << r.m << '\n'
          << "expected_m " << r.expected_m << '\n'
          << (r.pass() ? "pass" : "fail") << '\n';
  return r.pass() ? ok : numeric_failure;
}

// ---- trace -----------------------------------------------------------------

int cmd_trace(Context& ctx, Plane plane, const std::string& c_text, const std::string& angle_text) {
  const Angle theta = Angle::parse(angle_text);
  const Complex c = plane == Plane::dynamical ? parse_complex(c_text) : Complex(0.0, 0.0);
  Stopwatch watch;
  RayTrace t = plane == Plane::parameter ? trace_param_ray(theta, ctx.config.trace_options())
                                         : trace_dynamic_ray(c, theta, ctx.config.trace_options());
  const bool failed = !t.landing || t.truncated() || (t.flags & trace_flags::no_landing);
  std::string name = std::string("trace_") + (plane == Plane::parameter ? "param_" : "dyn_") +
                     theta.numerator().str() + "_" + theta.denominator().str() + ".json";
  RunManifest m = ctx.manifest(ctx.out_dir());
  const auto path = m.write(name, to_json(t).dump(2) + "\n");
  m.task("trace " + theta.str(), failed ? "failed" : "ok", watch.seconds());
  m.save();
  if (t.landing) {
    ctx.out << "landing " << format_complex(t.landing->point) << '\n';
    ctx.out << "error " << format_number(t.landing->error) << '\n';
  }
  ctx.out << "samples " << t.samples.size() << '\n';
  ctx.out << "flags " << describe_flags(t.flags) << '\n';
  ctx.out << "file " << path.string() << '\n';
  if (failed) {
    ctx.err << "trace did not reach a landing point\n";
    return numeric_failure;
  }
  return ok;
}

// ---- carrots ---------------------------------------------------------------

int cmd_shrink(Context& ctx, const std::string& toward, const std::vector<long long>& labels, const std::string& name) {
  const ExperimentConfig& cfg = ctx.config;
  LabelFilter filter = LabelFilter::every();
  if (!toward.empty() && !labels.empty()) throw UsageError("--toward and --labels exclude each other");
  if (!toward.empty()) filter = LabelFilter::nearest_to(Angle::parse(toward));
  if (!labels.empty()) filter = LabelFilter::only(labels);

  Stopwatch watch;
  ShrinkTable table = shrink_experiment(ModelTriangle::stick(cfg.stick), cfg.level_first, cfg.level_last, filter,
                                        cfg.effective_density(), cfg.carrot_options(), cfg.parallelism);
  bool fatal = false;
  for (const ShrinkRow& r : table.rows)
    if (r.flags & (carrot_flags::no_landing | carrot_flags::truncated)) fatal = true;

  RunManifest m = ctx.manifest(ctx.out_dir());
  m.write(name + ".csv", csv_text(write_shrink_csv, table));
  m.write(name + "_levels.csv", csv_text(write_level_csv, table));
  m.write(name + ".json", to_json(table).dump(2) + "\n");
  m.task("shrink", fatal ? "failed rows" : "ok", watch.seconds());
  m.save();

  ctx.out << "rows " << table.rows.size() << '\n';
  ctx.out << "n,count,max_diameter,argmax_p,flags\n";
  for (const LevelSummary& l : table.levels)
    ctx.out << l.n << ',' << l.count << ',' << format_number(l.max_diameter) << ',' << l.argmax_p << ','
            << describe_flags(l.flags) << '\n';
  if (fatal) {
    ctx.err << "some carrots have no landing tip\n";
    return numeric_failure;
  }
  return ok;
}

int cmd_render(Context& ctx, int level, const std::string& out_name) {
  if (level < 1 || level > 12) throw UsageError("render level must be in 1..12");
  std::filesystem::path target = out_name;
  if (target.is_relative()) target = ctx.out_dir() / target;
  Stopwatch watch;
  FieldPicture pic = carrot_field_picture(ModelTriangle::stick(ctx.config.stick), level,
                                          ctx.config.effective_density(), ctx.config.carrot_options(),
                                          ctx.config.parallelism);
  RunManifest m = ctx.manifest(target.parent_path());
  m.write(target.filename().string(), render_svg(pic));
  m.task("render", "ok", watch.seconds());
  const auto manifest_path = m.save();
  ctx.out << "file " << target.string() << '\n';
  ctx.out << "sha256 " << m.digests().begin()->second << '\n';
  ctx.out << "manifest " << manifest_path.string() << '\n';
  return ok;
}

// ---- yoccoz ----------------------------------------------------------------

InequalityOptions inequality_options(const ExperimentConfig& cfg, bool classical) {
  InequalityOptions o;
  o.trace = cfg.trace_options();
  o.classical = classical;
  return o;
}

int cmd_yoccoz(Context& ctx, const std::string& c_text, const std::string& pq, const std::string& component,
               bool classical) {
  if (c_text.empty() || pq.empty()) throw UsageError("yoccoz needs --c and --pq (or a subcommand)");
  const Complex c = parse_complex(c_text);
  auto [p, q] = parse_fraction(pq);
  const ComponentDescriptor h = parse_component(component);
  Stopwatch watch;
  InequalityReport r = yoccoz_levin_check(c, h, p, q, inequality_options(ctx.config, classical));

  RunManifest m = ctx.manifest(ctx.out_dir());
  const std::vector<InequalityReport> one{r};
  m.write("yoccoz.csv", csv_text(write_inequality_csv, one));
  m.write("yoccoz.json", to_json(one).dump(2) + "\n");
  m.task("yoccoz", r.pass ? "pass" : "fail", watch.seconds());
  m.save();

  ctx.out << "lhs " << format_number(r.lhs) << " rhs " << format_number(r.rhs) << ' '
          << (r.pass ? "pass" : "fail") << '\n';
  ctx.out << "margin " << format_number(r.margin()) << '\n';
  ctx.out << "omega " << format_number(r.omega) << '\n';
  ctx.out << "lambda " << format_complex(r.lambda) << '\n';
  ctx.out << "Lambda " << format_complex(r.Lambda) << '\n';
  ctx.out << "mod_T_gamma " << format_number(r.moduli.mod_T_gamma) << " mod_A_o " << format_number(r.moduli.mod_A_o)
          << '\n';
  if (!r.repelling) ctx.out << "boundary case: multiplier is not repelling\n";
  return r.violation() ? violation : ok;
}

int cmd_limbs(Context& ctx, const std::string& component) {
  const ComponentDescriptor h = parse_component(component);
  LimbOptions opt;
  opt.trace = ctx.config.trace_options();
  opt.h_probe = ctx.config.h_probe;
  Stopwatch watch;
  LimbTable t = limb_scaling_experiment(h, ctx.config.q_max, opt, ctx.config.parallelism);

  RunManifest m = ctx.manifest(ctx.out_dir());
  m.write("limbs.csv", csv_text(write_limb_csv, t));
  m.write("limbs.json", to_json(t).dump(2) + "\n");
  m.task("limbs", "ok", watch.seconds());
  m.save();

  ctx.out << "p/q,extent,extent_q\n";
  for (const LimbRow& r : t.rows)
    ctx.out << r.p << '/' << r.q << ',' << format_number(r.extent) << ',' << format_number(r.scaled) << '\n';
  ctx.out << "empirical_C " << format_number(t.empirical_c) << '\n';
  ctx.out << "spread " << format_number(t.spread) << '\n';
  return std::isfinite(t.empirical_c) ? ok : numeric_failure;
}

int cmd_suite(Context& ctx, bool classical) {
  const ExperimentConfig& cfg = ctx.config;
  const std::pair<int, int> wakes[] = {{1, 2}, {1, 3}, {2, 5}};
  Stopwatch watch;
  std::vector<WakeSample> samples;
  for (int w = 0; w < 3; ++w) {
    const int count = cfg.samples / 3 + (w < cfg.samples % 3 ? 1 : 0);
    if (count == 0) continue;
    auto s = sample_wake(wakes[w].first, wakes[w].second, count, cfg.seed + static_cast<std::uint64_t>(w));
    samples.insert(samples.end(), s.begin(), s.end());
  }
  const ComponentDescriptor h0 = ComponentDescriptor::main_cardioid();
  std::vector<std::optional<InequalityReport>> results(samples.size());
  std::vector<std::string> errors(samples.size());
  parallel_for(samples.size(), cfg.parallelism, [&](std::size_t i) {
    try {
      results[i] = yoccoz_levin_check(samples[i].c, h0, samples[i].p, samples[i].q, inequality_options(cfg, classical));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<InequalityReport> reports;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  int violations = 0, grotzsch_checked = 0, grotzsch_failed = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!results[i]) {
      failures.push_back({{"c", {samples[i].c.real(), samples[i].c.imag()}},
                          {"kind", to_string(samples[i].kind)},
                          {"error", errors[i]}});
      continue;
    }
    const InequalityReport& r = *results[i];
    violations += r.violation();
    if (samples[i].kind != WakeSample::Kind::stick && r.repelling) {
      ++grotzsch_checked;
      grotzsch_failed += !grotzsch_holds(r.moduli);
    }
    reports.push_back(r);
  }
  nlohmann::ordered_json j = to_json(reports);
  j["kind"] = "inequality_suite";
  nlohmann::ordered_json kinds = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (results[i]) kinds.push_back(to_string(samples[i].kind));
  j["sample_kinds"] = kinds;
  j["failures"] = failures;
  j["grotzsch"] = {{"checked", grotzsch_checked}, {"failed", grotzsch_failed}};

  RunManifest m = ctx.manifest(ctx.out_dir());
  m.write("yoccoz_suite.csv", csv_text(write_inequality_csv, reports));
  m.write("yoccoz_suite.json", j.dump(2) + "\n");
  m.task("suite", violations ? "violations" : "ok", watch.seconds());
  m.save();

  ctx.out << "samples " << samples.size() << '\n'
          << "checked " << reports.size() << '\n'
          << "violations " << violations << '\n'
          << "errors " << failures.size() << '\n'
          << "grotzsch " << grotzsch_checked - grotzsch_failed << '/' << grotzsch_checked << '\n';
  if (violations) return violation;
  return failures.empty() && grotzsch_failed == 0 ? ok : numeric_failure;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw UsageError("empty complex number");
  if (s.back() != 'i') return {parse_double(s, text), 0.0};
  s.remove_suffix(1);
  // split at the last sign that is not an exponent sign or the leading one
  std::size_t split = std::string_view::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto coefficient = [&](std::string_view part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_double(part, text);
  };
  if (split == std::string_view::npos) return {0.0, coefficient(s)};
  return {parse_double(s.substr(0, split), text), coefficient(s.substr(split))};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dyadic carrot fields, external rays and Yoccoz inequalities", "carrots"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_file, out_dir, precision;
  std::vector<std::string> overrides;
  int parallelism = 0;
  app.add_option("--config", config_file, "flat key = value config file");
  app.add_option("--set", overrides, "config override key=value (repeatable)");
  app.add_option("--out-dir", out_dir, std::string("output directory (default $") + out_dir_env + ")");
  app.add_option("--precision", precision, "standard | extended");
  app.add_option("--parallelism", parallelism, "worker threads");

  Context ctx{ExperimentConfig{}, out, err, {}};
  std::function<int()> action;

  // angles
  auto* angles = app.add_subcommand("angles", "exact angle combinatorics");
  angles->require_subcommand(1);
  std::string pq, a_text, b_text, w0, w1, address, component = "main";
  long long dy_p = 0;
  int dy_n = 0, prop_k = 0, prop_m = 0;
  auto* wake = angles->add_subcommand("wake", "wake angles of the p/q limb");
  wake->add_option("pq", pq)->required();
  wake->callback([&] { action = [&] { return cmd_wake(ctx, pq); }; });
  auto* tune_cmd = angles->add_subcommand("tune", "tune a binary address by a pair of words");
  tune_cmd->add_option("word0", w0)->required();
  tune_cmd->add_option("word1", w1)->required();
  tune_cmd->add_option("address", address)->required();
  tune_cmd->callback([&] { action = [&] { return cmd_tune(ctx, w0, w1, address); }; });
  auto* dyadic = angles->add_subcommand("dyadic", "the two binary representations of p/2^n");
  dyadic->add_option("p", dy_p)->required();
  dyadic->add_option("n", dy_n)->required();
  dyadic->callback([&] { action = [&] { return cmd_dyadic(ctx, dy_p, dy_n); }; });
  auto* avoid = angles->add_subcommand("avoid", "do the orbits of a and b avoid ]a, b[");
  avoid->add_option("a", a_text)->required();
  avoid->add_option("b", b_text)->required();
  avoid->callback([&] { action = [&] { return cmd_avoid(ctx, a_text, b_text); }; });
  auto* prop = angles->add_subcommand("proposition", "check m = m' + k(q-2) and the gap bound");
  std::string prop_component;
  prop->add_option("k", prop_k)->required();
  prop->add_option("m_prime", prop_m)->required();
  prop->add_option("pq", pq)->required();
  prop->add_option("--component", prop_component, "main, basilica, sat:p/q or words:W0,W1");
  prop->callback([&] { action = [&] { return cmd_proposition(ctx, prop_k, prop_m, pq, prop_component); }; });

  // trace
  auto* trace = app.add_subcommand("trace", "trace an external ray and write it as JSON");
  trace->require_subcommand(1);
  std::string c_text, angle_text;
  double h_min = 0.0;
  auto* tparam = trace->add_subcommand("param", "parameter ray");
  tparam->add_option("angle", angle_text)->required();
  tparam->add_option("--h-min", h_min, "lowest potential");
  tparam->callback([&] { action = [&] { return cmd_trace(ctx, Plane::parameter, "", angle_text); }; });
  auto* tdyn = trace->add_subcommand("dyn", "dynamical ray of z^2 + c");
  tdyn->add_option("--c", c_text, "parameter, e.g. -0.1+0.7i")->required();
  tdyn->add_option("angle", angle_text)->required();
  tdyn->add_option("--h-min", h_min, "lowest potential");
  tdyn->callback([&] { action = [&] { return cmd_trace(ctx, Plane::dynamical, c_text, angle_text); }; });

  // carrots
  auto* carrots_cmd = app.add_subcommand("carrots", "carrot field experiments");
  carrots_cmd->require_subcommand(1);
  std::string levels, toward, name = "shrink", svg_out = "field.svg";
  std::vector<long long> labels;
  double stick = 0.0;
  int density = -1, level = 6;
  auto* shrink = carrots_cmd->add_subcommand("shrink", "diameters of the stick carrots per level");
  shrink->add_option("--levels", levels, "a..b");
  shrink->add_option("--stick", stick, "stick log-length");
  shrink->add_option("--toward", toward, "one label per level, nearest to this angle");
  shrink->add_option("--labels", labels, "explicit odd numerators")->delimiter(',');
  shrink->add_option("--density", density, "points per edge (0: default)");
  shrink->add_option("--name", name, "output file stem");
  shrink->callback([&] { action = [&] { return cmd_shrink(ctx, toward, labels, name); }; });
  auto* render = carrots_cmd->add_subcommand("render", "SVG of the stick field");
  render->add_option("--level", level, "deepest level drawn");
  render->add_option("--out", svg_out, "SVG file, relative to the output directory");
  render->add_option("--stick", stick, "stick log-length");
  render->add_option("--density", density, "points per edge (0: default)");
  render->callback([&] { action = [&] { return cmd_render(ctx, level, svg_out); }; });

  // yoccoz
  auto* yoccoz = app.add_subcommand("yoccoz", "Yoccoz / Levin-Yoccoz inequality checks");
  bool classical = false;
  int q_max = 0, samples = 0;
  double h_probe = 0.0;
  long long seed = -1;
  yoccoz->add_option("--c", c_text, "parameter");
  yoccoz->add_option("--pq", pq, "rotation number p/q");
  yoccoz->add_option("--component", component, "main, basilica, sat:p/q or words:W0,W1");
  yoccoz->add_flag("--classical", classical, "use omega = pi even outside M");
  auto* limbs = yoccoz->add_subcommand("limbs", "limb scaling table");
  limbs->add_option("--qmax", q_max, "largest denominator");
  limbs->add_option("--h-probe", h_probe, "potential below which ray samples count");
  limbs->callback([&] { action = [&] { return cmd_limbs(ctx, component); }; });
  auto* suite = yoccoz->add_subcommand("suite", "sampled checks across the 1/2, 1/3 and 2/5 wakes");
  suite->add_option("--samples", samples, "number of parameters");
  suite->add_option("--seed", seed, "sampling seed");
  suite->callback([&] { action = [&] { return cmd_suite(ctx, classical); }; });
  yoccoz->callback([&] {
    if (!action) action = [&] { return cmd_yoccoz(ctx, c_text, pq, component, classical); };
  });

  std::vector<const char*> argv{"carrots"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    for (const auto& sub : app.get_subcommands()) {
      ctx.command = sub->get_name();
      for (const auto* s = sub; !s->get_subcommands().empty(); s = s->get_subcommands().front())
        ctx.command += " " + s->get_subcommands().front()->get_name();
    }
    if (!config_file.empty()) ctx.config.load(config_file);
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("--set needs key=value, got '" + o + "'");
      ctx.config.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (!out_dir.empty()) ctx.config.out_dir = out_dir;
    if (!precision.empty()) ctx.config.set("precision", precision);
    if (parallelism) ctx.config.parallelism = parallelism;
    if (h_min > 0) ctx.config.h_min = h_min;
    if (!levels.empty()) ctx.config.set("levels", levels);
    if (stick > 0) ctx.config.stick = stick;
    if (density >= 0) ctx.config.density = density;
    if (q_max) ctx.config.q_max = q_max;
    if (h_probe > 0) ctx.config.h_probe = h_probe;
    if (samples) ctx.config.samples = samples;
    if (seed >= 0) ctx.config.seed = static_cast<std::uint64_t>(seed);
    ctx.config.validate();
    return action();
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return usage;
  } catch (const ConfigError& e) {
    err << "config: " << e.what() << '\n';
    return usage;
  } catch (const CombinatoricsError& e) {
    err << "usage: " << e.what() << '\n';
    return usage;
  } catch (const CarrotError& e) {
    err << "usage: " << e.what() << '\n';
    return usage;
  } catch (const ColandingFailure& e) {
    err << "numeric: " << e.what() << " (landings " << format_complex(e.landing_minus) << " / "
        << format_complex(e.landing_plus) << ")\n";
    return numeric_failure;
  } catch (const InequalityError& e) {
    err << "usage: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "numeric: " << e.what() << '\n';
    return numeric_failure;
  }
}

}  // namespace carrots::cli
