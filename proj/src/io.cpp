#include "isoflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace isoflow {

namespace {

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

ConvexBody body_from_json(const nlohmann::json& j) {
  const std::string shape = j.at("shape").get<std::string>();
  if (shape == "circle") return ConvexBody::circle(j.at("radius").get<double>());
  if (shape == "ellipse")
    return ConvexBody::ellipse(j.at("a").get<double>(), j.at("b").get<double>());
  if (shape == "fourier") {
    // coeffs = [a0, a1, b1, a2, b2, ...]
    const auto coeffs = j.at("coeffs").get<std::vector<double>>();
    std::vector<double> ac, as;
    ac.push_back(coeffs.empty() ? 0.0 : coeffs[0]);
    as.push_back(0.0);
    for (size_t i = 1; i + 1 < coeffs.size() + 1; i += 2) {
      if (i < coeffs.size()) ac.push_back(coeffs[i]);
      if (i + 1 < coeffs.size()) as.push_back(coeffs[i + 1]);
    }
    as.resize(ac.size(), 0.0);
    return ConvexBody::fourier(std::move(ac), std::move(as));
  }
  throw ConfigError("unknown body shape: " + shape);
}

}  // namespace

ConvexBody body_from_spec(const std::string& spec) {
  if (spec.empty()) throw ConfigError("empty body spec");
  if (spec.front() == '{') {
    return body_from_json(nlohmann::json::parse(spec));
  }
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open body file: " + spec);
    nlohmann::json j;
    in >> j;
    return body_from_json(j);
  }
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const std::vector<double> vals = parse_number_list(args);
  if (kind == "circle") {
    if (vals.size() != 1) throw ConfigError("circle spec needs one radius");
    return ConvexBody::circle(vals[0]);
  }
  if (kind == "ellipse") {
    if (vals.size() != 2) throw ConfigError("ellipse spec needs two semi-axes");
    return ConvexBody::ellipse(vals[0], vals[1]);
  }
  if (kind == "fourier") {
    if (vals.empty()) throw ConfigError("fourier spec needs coefficients");
    std::vector<double> ac = {vals[0]}, as = {0.0};
    for (size_t i = 1; i < vals.size(); i += 2) {
      ac.push_back(vals[i]);
      as.push_back(i + 1 < vals.size() ? vals[i + 1] : 0.0);
    }
    return ConvexBody::fourier(std::move(ac), std::move(as));
  }
  throw ConfigError("unknown body spec: " + spec);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer shorter representations that still round-trip
  for (int prec = 15; prec <= 16; ++prec) {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  for (const auto& c : comments) out << "# " << c << "\n";
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

Polyline read_curve_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open curve file: " + path);
  nlohmann::json j;
  in >> j;
  Polyline nodes;
  for (const auto& pair : j.at("nodes"))
    nodes.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  if (nodes.size() < 2) throw ConfigError("curve json has fewer than two nodes: " + path);
  return nodes;
}

Polyline read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open curve file: " + path);
  Polyline nodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_of("0123456789-+.") != 0 &&
        line.find_first_of("0123456789-+.") == std::string::npos)
      continue;  // header row
    std::stringstream ss(line);
    std::string sx, sy;
    if (!std::getline(ss, sx, ',') || !std::getline(ss, sy, ',')) continue;
    try {
      nodes.emplace_back(std::stod(sx), std::stod(sy));
    } catch (const std::exception&) {
      // header or malformed line: skip
    }
  }
  if (nodes.size() < 2) throw ConfigError("curve file has fewer than two nodes: " + path);
  return nodes;
}

void write_curve_csv(const std::string& path, const Polyline& nodes,
                     const std::vector<std::string>& comments) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(nodes.size());
  for (const Vec2& p : nodes) rows.push_back({format_double(p.x()), format_double(p.y())});
  write_csv(path, comments, {"x", "y"}, rows);
}

void render_svg(const std::string& path, const ConvexBody& body,
                const std::vector<SvgCurve>& curves, const std::string& comment) {
  // viewport: body bounding box plus a margin wide enough for nearby arcs
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  const int m = 256;
  for (int i = 0; i < m; ++i) {
    const Vec2 p = boundary_at(body, kTwoPi * i / m).position;
    minx = std::min(minx, p.x());
    maxx = std::max(maxx, p.x());
    miny = std::min(miny, p.y());
    maxy = std::max(maxy, p.y());
  }
  const double margin = 0.8 * std::max(maxx - minx, maxy - miny);
  minx -= margin;
  maxx += margin;
  miny -= margin;
  maxy += margin;
  const double w = maxx - minx, h = maxy - miny;

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  char buf[256];
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!comment.empty()) out << "<!-- " << comment << " -->\n";
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                minx, -maxy, w, h);
  out << buf;
  auto polyline = [&](const Polyline& nodes, const std::string& color, double width,
                      bool closed) {
    out << "  <path d=\"";
    for (size_t i = 0; i < nodes.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%c%.6f %.6f", i == 0 ? 'M' : 'L', nodes[i].x(),
                    -nodes[i].y());
      out << buf;
    }
    if (closed) out << "Z";
    std::snprintf(buf, sizeof(buf),
                  "\" fill=\"none\" stroke=\"%s\" stroke-width=\"%.6f\"/>\n", color.c_str(),
                  width);
    out << buf;
  };
  Polyline sigma;
  for (int i = 0; i <= 512; ++i)
    sigma.push_back(boundary_at(body, kTwoPi * i / 512).position);
  polyline(sigma, "#333333", 0.003 * w, true);
  for (const SvgCurve& c : curves) polyline(c.nodes, c.color, c.width_frac * w, false);
  out << "</svg>\n";
}

std::string error_json(const std::string& stage, const std::string& message) {
  nlohmann::json j;
  j["error"]["stage"] = stage;
  j["error"]["message"] = message;
  return j.dump();
}

std::vector<double> parse_amplitudes(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    auto vals = parse_number_list(text);
    if (vals.empty()) throw ConfigError("empty amplitude list");
    return vals;
  }
  const double lo = std::stod(text.substr(0, dots));
  std::string rest = text.substr(dots + 2);
  int count = 9;
  const auto colon = rest.find(':');
  if (colon != std::string::npos) {
    count = std::stoi(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double hi = std::stod(rest);
  if (!(lo > 0) || !(hi > lo) || count < 2)
    throw ConfigError("bad amplitude range: " + text);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace isoflow
