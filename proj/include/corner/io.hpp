#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "corner/geometry.hpp"

namespace corner {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest round-trip-safe text: 17 significant digits, '.' decimal.
std::string format_real(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    template <class... Ts>
    void row(const Ts&... cells) {
        std::string line;
        bool first = true;
        ((append(line, first, cell_text(cells))), ...);
        text_ += line;
        text_ += '\n';
        ++rows_;
    }

    std::size_t rows() const { return rows_; }
    const std::string& str() const { return text_; }

private:
    static void append(std::string& line, bool& first, const std::string& cell) {
        if (!first) line += ',';
        line += cell;
        first = false;
    }
    template <class T>
    static std::string cell_text(const T& v) {
        if constexpr (std::is_same_v<T, bool>) {
            return v ? "1" : "0";
        } else if constexpr (std::is_floating_point_v<T>) {
            return format_real(static_cast<double>(v));
        } else if constexpr (std::is_integral_v<T>) {
            return std::to_string(v);
        } else {
            return std::string(v);
        }
    }

    std::string text_;
    std::size_t rows_ = 0;
};

/// A deliberately small SVG writer: polylines, dots, filled rectangles and
/// text, in world coordinates mapped onto a fixed canvas (y up).
class SvgCanvas {
public:
    SvgCanvas(double xmin, double xmax, double ymin, double ymax, int width = 800, int height = 600);

    void polyline(const std::vector<PlanarPoint>& pts, std::string_view colour, double stroke = 1.0);
    void dots(const std::vector<PlanarPoint>& pts, std::string_view colour, double radius = 0.6);
    /// Rectangle given by world-space corners.
    void rect(double x0, double y0, double x1, double y1, std::string_view colour);
    /// Text in canvas pixels, for legends.
    void label(double px, double py, std::string_view text, std::string_view colour = "black", int size = 11);
    void pixel_rect(double px, double py, double w, double h, std::string_view colour);

    std::string str() const;

private:
    double sx(double x) const;
    double sy(double y) const;

    double xmin_, xmax_, ymin_, ymax_;
    int width_, height_;
    std::string body_;
};

/// Colour for period p on a fixed hue wheel over 1..cap.
std::string period_colour(std::size_t period, std::size_t cap);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

struct ArtifactRecord {
    std::string path;  ///< relative to the output directory
    std::size_t bytes = 0;
    std::string checksum;  ///< FNV-1a 64, hex
};

struct TaskRecord {
    std::string name;
    std::string status;  ///< ok | escaped | failed | skipped
    std::string detail;
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string tool_version{kToolVersion};
    double wall_seconds = 0.0;
    std::size_t workers = 1;
    std::vector<ArtifactRecord> artifacts;
    std::vector<TaskRecord> tasks;

    bool all_ok() const;
    std::string to_json() const;
};

/// Writes `content` under `dir` (creating it) and records it in the manifest.
void write_artifact(const std::filesystem::path& dir, const std::string& name, const std::string& content,
                    RunManifest& manifest);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace corner
