#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isoflow/stability.hpp"

namespace isoflow {

/// Parses a body description: compact form ("circle:1", "ellipse:2,1",
/// "fourier:a0,a1,b1,a2,b2,..."), inline JSON ({"shape":"circle","radius":1.0}
/// or {"shape":"fourier","coeffs":[...]}), or a path to a JSON file.
ConvexBody body_from_spec(const std::string& spec);

std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

/// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

/// CSV with '# key=value' comment lines, a header row, then data rows.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

/// Curve I/O: CSV with columns x,y in node order, or the JSON wrapper
/// {"nodes": [[x, y], ...]}.
Polyline read_curve_csv(const std::string& path);
Polyline read_curve_json(const std::string& path);
void write_curve_csv(const std::string& path, const Polyline& nodes,
                     const std::vector<std::string>& comments);

struct SvgCurve {
  Polyline nodes;
  std::string color = "#1f6fb2";
  double width_frac = 0.004;  // stroke width as a fraction of the viewport
};

/// Deterministic SVG: Sigma plus the given polylines, fixed viewport from the
/// body bounding box plus margin. Byte-identical for identical inputs; the
/// comment (config hash, seed) is embedded verbatim when given.
void render_svg(const std::string& path, const ConvexBody& body,
                const std::vector<SvgCurve>& curves, const std::string& comment = "");

std::string error_json(const std::string& stage, const std::string& message);

/// "1e-3..1e-1:5" (geometric), or a comma list "0.01,0.02,0.04".
std::vector<double> parse_amplitudes(const std::string& text);

}  // namespace isoflow
