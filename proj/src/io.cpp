#include "corner/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "corner/errors.hpp"

namespace corner {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

SvgCanvas::SvgCanvas(double xmin, double xmax, double ymin, double ymax, int width, int height)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), width_(width), height_(height) {}

double SvgCanvas::sx(double x) const { return (x - xmin_) / (xmax_ - xmin_) * width_; }
double SvgCanvas::sy(double y) const { return (ymax_ - y) / (ymax_ - ymin_) * height_; }

namespace {

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void SvgCanvas::polyline(const std::vector<PlanarPoint>& pts, std::string_view colour, double stroke) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"" + px(stroke) +
             "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!is_finite(pts[i])) continue;
        if (i) body_ += ' ';
        body_ += px(sx(pts[i].x)) + ',' + px(sy(pts[i].y));
    }
    body_ += "\"/>\n";
}

void SvgCanvas::dots(const std::vector<PlanarPoint>& pts, std::string_view colour, double radius) {
    for (const auto& p : pts) {
        if (!is_finite(p) || p.x < xmin_ || p.x > xmax_ || p.y < ymin_ || p.y > ymax_) continue;
        body_ += "<circle cx=\"" + px(sx(p.x)) + "\" cy=\"" + px(sy(p.y)) + "\" r=\"" + px(radius) + "\" fill=\"" +
                 std::string(colour) + "\"/>\n";
    }
}

void SvgCanvas::rect(double x0, double y0, double x1, double y1, std::string_view colour) {
    const double left = std::min(sx(x0), sx(x1));
    const double top = std::min(sy(y0), sy(y1));
    pixel_rect(left, top, std::abs(sx(x1) - sx(x0)), std::abs(sy(y1) - sy(y0)), colour);
}

void SvgCanvas::pixel_rect(double x, double y, double w, double h, std::string_view colour) {
    body_ += "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) + "\" height=\"" + px(h) +
             "\" fill=\"" + std::string(colour) + "\"/>\n";
}

void SvgCanvas::label(double x, double y, std::string_view text, std::string_view colour, int size) {
    body_ += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + std::to_string(size) + "\" fill=\"" +
             std::string(colour) + "\">" + std::string(text) + "</text>\n";
}

std::string SvgCanvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) +
                      "\" height=\"" + std::to_string(height_) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

std::string period_colour(std::size_t period, std::size_t cap) {
    if (period == 0) return "white";
    const double span = cap > 1 ? static_cast<double>(cap - 1) : 1.0;
    const double h = 300.0 * static_cast<double>(period - 1) / span;
    // HSV with s = 0.85, v = 0.9.
    const double c = 0.9 * 0.85;
    const double hp = h / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else { r = c; b = x; }
    const double m = 0.9 - c;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround((r + m) * 255)),
                  static_cast<int>(std::lround((g + m) * 255)), static_cast<int>(std::lround((b + m) * 255)));
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool RunManifest::all_ok() const {
    for (const auto& t : tasks) {
        if (t.status != "ok") return false;
    }
    return true;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["wall_seconds"] = wall_seconds;
    j["workers"] = workers;
    j["artifacts"] = nlohmann::ordered_json::array();
    for (const auto& a : artifacts) {
        j["artifacts"].push_back({{"path", a.path}, {"bytes", a.bytes}, {"fnv1a64", a.checksum}});
    }
    j["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : tasks) {
        j["tasks"].push_back({{"name", t.name}, {"status", t.status}, {"detail", t.detail}});
    }
    return j.dump(2) + "\n";
}

void write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& content,
                    RunManifest& manifest) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing " + path.string());
    manifest.artifacts.push_back({name, content.size(), hex64(fnv1a64(content))});
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace corner
