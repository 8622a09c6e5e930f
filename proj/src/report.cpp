#include "carrots/report.hpp"

#include "carrots/pool.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace carrots {

using nlohmann::ordered_json;

namespace {

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json component_json(const ComponentDescriptor& h) {
  return {{"period", h.period},
          {"word0", h.words.word0},
          {"word1", h.words.word1},
          {"theta_minus", h.theta_minus.str()},
          {"theta_plus", h.theta_plus.str()},
          {"m_prime", h.m_prime}};
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(Complex z) { return format_number(z.real()) + " " + format_number(z.imag()); }

void write_shrink_csv(std::ostream& out, const ShrinkTable& table) {
  out << "p,n,tip_re,tip_im,diameter,flags\n";
  for (const ShrinkRow& r : table.rows)
    out << r.p << ',' << r.n << ',' << format_number(r.tip.real()) << ',' << format_number(r.tip.imag()) << ','
        << format_number(r.diameter) << ',' << describe_flags(r.flags) << '\n';
}

void write_level_csv(std::ostream& out, const ShrinkTable& table) {
  out << "n,count,max_diameter,argmax_p,flags\n";
  for (const LevelSummary& l : table.levels)
    out << l.n << ',' << l.count << ',' << format_number(l.max_diameter) << ',' << l.argmax_p << ','
        << describe_flags(l.flags) << '\n';
}

void write_inequality_csv(std::ostream& out, const std::vector<InequalityReport>& reports) {
  out << "c_re,c_im,p,q,lhs,rhs,omega,pass\n";
  for (const InequalityReport& r : reports)
    out << format_number(r.c.real()) << ',' << format_number(r.c.imag()) << ',' << r.p << ',' << r.q << ','
        << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.omega) << ','
        << bool_text(r.pass) << '\n';
}

void write_limb_csv(std::ostream& out, const LimbTable& table) {
  out << "p,q,eta_minus,eta_plus,root_re,root_im,extent,extent_q,tips,flags\n";
  for (const LimbRow& r : table.rows)
    out << r.p << ',' << r.q << ',' << r.eta_minus.str() << ',' << r.eta_plus.str() << ','
        << format_number(r.root.real()) << ',' << format_number(r.root.imag()) << ',' << format_number(r.extent)
        << ',' << format_number(r.scaled) << ',' << r.tips << ',' << describe_flags(r.flags) << '\n';
}

ordered_json to_json(const RayTrace& trace) {
  ordered_json j = {{"schema", json_schema},
                    {"kind", "ray_trace"},
                    {"plane", std::string(to_string(trace.plane))},
                    {"c", complex_json(trace.c)},
                    {"angle", trace.angle.str()},
                    {"steps_per_halving", trace.steps_per_halving},
                    {"flags", describe_flags(trace.flags)}};
  ordered_json samples = ordered_json::array();
  for (const RaySample& s : trace.samples) samples.push_back({s.h, s.point.real(), s.point.imag()});
  j["samples"] = std::move(samples);
  if (trace.landing) {
    const Landing& l = *trace.landing;
    j["landing"] = {{"point", complex_json(l.point)},
                    {"error", l.error},
                    {"detected", l.detected},
                    {"refined", l.refined}};
  } else {
    j["landing"] = nullptr;
  }
  return j;
}

ordered_json to_json(const ShrinkTable& table) {
  ordered_json rows = ordered_json::array();
  for (const ShrinkRow& r : table.rows)
    rows.push_back({{"p", r.p},
                    {"n", r.n},
                    {"tip", complex_json(r.tip)},
                    {"diameter", r.diameter},
                    {"flags", describe_flags(r.flags)}});
  ordered_json levels = ordered_json::array();
  for (const LevelSummary& l : table.levels)
    levels.push_back({{"n", l.n},
                      {"count", l.count},
                      {"max_diameter", l.max_diameter},
                      {"argmax_p", l.argmax_p},
                      {"flags", describe_flags(l.flags)}});
  return {{"schema", json_schema}, {"kind", "shrink"}, {"rows", rows}, {"levels", levels}};
}

ordered_json to_json(const InequalityReport& r) {
  return {{"c", complex_json(r.c)},
          {"component", component_json(r.component)},
          {"p", r.p},
          {"q", r.q},
          {"eta_minus", r.eta_minus.str()},
          {"eta_plus", r.eta_plus.str()},
          {"alpha_prime", complex_json(r.alpha_prime)},
          {"lambda", complex_json(r.lambda)},
          {"Lambda", complex_json(r.Lambda)},
          {"theta", r.theta},
          {"omega", r.omega},
          {"outside_m", r.outside_m},
          {"log_phi", r.outside_m ? complex_json(r.log_phi) : ordered_json(nullptr)},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"slack", r.slack},
          {"margin", r.margin()},
          {"pass", r.pass},
          {"repelling", r.repelling},
          {"mod_T_gamma", r.moduli.mod_T_gamma},
          {"mod_A_o", r.moduli.mod_A_o},
          {"colanding_residual", r.colanding_residual}};
}

ordered_json to_json(const std::vector<InequalityReport>& reports) {
  ordered_json list = ordered_json::array();
  for (const InequalityReport& r : reports) list.push_back(to_json(r));
  return {{"schema", json_schema}, {"kind", "inequality"}, {"reports", list}};
}

ordered_json to_json(const LimbTable& table) {
  ordered_json rows = ordered_json::array();
  for (const LimbRow& r : table.rows)
    rows.push_back({{"p", r.p},
                    {"q", r.q},
                    {"eta_minus", r.eta_minus.str()},
                    {"eta_plus", r.eta_plus.str()},
                    {"root", complex_json(r.root)},
                    {"extent", r.extent},
                    {"extent_q", r.scaled},
                    {"tips", r.tips},
                    {"flags", describe_flags(r.flags)}});
  return {{"schema", json_schema},
          {"kind", "limb_scaling"},
          {"rows", rows},
          {"empirical_c", table.empirical_c},
          {"spread", table.spread}};
}

FieldPicture carrot_field_picture(const ModelTriangle& t, int level, int density, const CarrotOptions& opt,
                                  int parallelism) {
  FieldPicture pic;
  for (double h : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
    EquipotentialArc arc = equipotential(Plane::parameter, 0.0, h, 256, opt.trace);
    std::vector<Complex> line;
    for (std::size_t i = 0; i < arc.points.size(); ++i)
      if (arc.ok[i]) line.push_back(arc.points[i]);
    if (!line.empty()) line.push_back(line.front());
    pic.equipotentials.push_back(std::move(line));
  }
  for (int n = 1; n <= std::min(level, 3); ++n)
    for (long long p = 1; p < (1LL << n); p += 2) {
      RayTrace r = trace_param_ray(Angle(p, 1LL << n), opt.trace);
      std::vector<Complex> line;
      for (const RaySample& s : r.samples) line.push_back(s.point);
      pic.rays.push_back(std::move(line));
    }
  std::vector<std::pair<long long, int>> labels;
  for (int n = 1; n <= level; ++n)
    for (long long p = 1; p < (1LL << n); p += 2) labels.push_back({p, n});
  std::vector<CarrotSample> samples(labels.size());
  parallel_for(labels.size(), parallelism, [&](std::size_t i) {
    samples[i] = map_carrot_param(t, labels[i].first, labels[i].second, density, opt);
  });
  for (CarrotSample& s : samples) {
    s.boundary_points.push_back(s.tip);
    pic.carrots.push_back(std::move(s.boundary_points));
    pic.tips.push_back(s.tip);
  }
  return pic;
}

std::string render_svg(const FieldPicture& pic) {
  std::ostringstream out;
  // complex plane, imaginary axis up
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-2.6 -1.6 3.4 3.2\" width=\"1020\" height=\"960\">\n";
  out << "<rect x=\"-2.6\" y=\"-1.6\" width=\"3.4\" height=\"3.2\" fill=\"white\"/>\n";
  auto polyline = [&](const std::vector<Complex>& pts, const char* style) {
    if (pts.size() < 2) return;
    out << "<polyline " << style << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      out << (i ? " " : "") << format_number(pts[i].real()) << ',' << format_number(-pts[i].imag());
    out << "\"/>\n";
  };
  out << "<g id=\"equipotentials\">\n";
  for (const auto& line : pic.equipotentials) polyline(line, "fill=\"none\" stroke=\"#9db4d0\" stroke-width=\"0.004\"");
  out << "</g>\n<g id=\"rays\">\n";
  for (const auto& line : pic.rays) polyline(line, "fill=\"none\" stroke=\"#b0b0b0\" stroke-width=\"0.003\"");
  out << "</g>\n<g id=\"carrots\">\n";
  for (const auto& line : pic.carrots) polyline(line, "fill=\"none\" stroke=\"#d2691e\" stroke-width=\"0.006\"");
  out << "</g>\n<g id=\"boundary\">\n";
  for (Complex z : pic.tips)
    out << "<circle cx=\"" << format_number(z.real()) << "\" cy=\"" << format_number(-z.imag())
        << "\" r=\"0.006\" fill=\"black\"/>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::filesystem::path RunManifest::write(const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files_[name] = sha256_hex(content);
  return path;
}

void RunManifest::task(const std::string& name, const std::string& status, double seconds) {
  tasks_.push_back({{"name", name}, {"status", status}, {"seconds", seconds}});
}

std::filesystem::path RunManifest::save() const {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / "manifest.json";
  std::map<std::string, std::string> files;
  if (std::ifstream in(path); in) {
    try {
      const auto old = nlohmann::json::parse(in);
      for (auto& [name, entry] : old.at("files").items()) {
        // keep earlier entries only while the file is unchanged on disk
        if (std::filesystem::exists(dir_ / name) && sha256_file(dir_ / name) == entry.at("sha256"))
          files[name] = entry.at("sha256");
      }
    } catch (const std::exception&) {
      files.clear();
    }
  }
  for (const auto& [name, digest] : files_) files[name] = digest;

  ordered_json j = {{"schema", json_schema}, {"kind", "manifest"}, {"command", command_}};
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config_) cfg[k] = v;
  j["config"] = cfg;
  j["tasks"] = tasks_;
  ordered_json list = ordered_json::object();
  for (const auto& [name, digest] : files)
    list[name] = {{"sha256", digest}, {"bytes", std::filesystem::file_size(dir_ / name)}};
  j["files"] = list;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace carrots
