#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "classimap/error.hpp"
#include "classimap/geometry.hpp"
#include "classimap/metrics.hpp"
#include "classimap/optimizer.hpp"

namespace classimap {

enum class SourceKind { FeatureTable, DistanceMatrix };
enum class Metric { Euclidean, Manhattan };

/// Where a dataset comes from. FeatureTable reads a header CSV whose numeric
/// columns become coordinates and whose `label_column` holds the class;
/// DistanceMatrix reads a square matrix plus a companion labels file (one
/// label per line, row order).
struct DatasetSource {
    SourceKind kind = SourceKind::FeatureTable;
    std::string path;
    std::string labels_path;
    std::string label_column;
    Metric metric = Metric::Euclidean;
};

struct Dataset {
    DissimilarityMatrix d;
    Labels labels;
};

struct PlotSpec {
    int width = 800;
    int height = 600;
    double point_radius = 3.0;
    std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
};

namespace detail {

inline std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return buf;
}

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

// Splits one CSV line. Fields may be surrounded by double quotes (doubled
// quote escapes a quote); outside quotes a comma ends the field.
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && trim(cur).empty()) {
            quoted = true;
            cur.clear();
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_number(const std::string& raw, const std::string& context) {
    const std::string token = trim(raw);
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end)
        throw ParseError("non-numeric cell '" + raw + "' in " + context);
    return value;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos && s == trim(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline double feature_distance(const std::vector<double>& a, const std::vector<double>& b, Metric m) {
    double acc = 0.0;
    if (m == Metric::Euclidean) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    }
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

inline Dataset load_feature_table(const DatasetSource& src) {
    const auto lines = read_lines(src.path);
    if (lines.empty()) throw ParseError(src.path + " is empty");
    const auto header = split_csv(lines[0]);
    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == src.label_column) label_idx = i;
    if (label_idx == header.size())
        throw ParseError("label column '" + src.label_column + "' not in header of " + src.path);

    Labels labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (trim(lines[r]).empty()) continue;
        const auto fields = split_csv(lines[r]);
        if (fields.size() != header.size())
            throw ParseError("row " + std::to_string(r) + " of " + src.path + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        std::vector<double> feat;
        feat.reserve(header.size() - 1);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) continue;
            feat.push_back(parse_number(fields[c], src.path + " row " + std::to_string(r)));
        }
        labels.push_back(trim(fields[label_idx]));
        rows.push_back(std::move(feat));
    }

    const std::size_t n = rows.size();
    if (n < 2) throw DegenerateInput("need at least 2 data rows in " + src.path);
    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = feature_distance(rows[i], rows[j], src.metric);
            values[i * n + j] = dist;
            values[j * n + i] = dist;
        }
    return {DissimilarityMatrix::from_dense(n, std::move(values)), std::move(labels)};
}

inline Dataset load_distance_matrix(const DatasetSource& src) {
    const auto lines = read_lines(src.path);
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const std::string line = trim(lines[r]);
        if (line.empty()) continue;
        std::vector<std::string> tokens;
        if (line.find(',') != std::string::npos) {
            tokens = split_csv(line);
        } else {
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) tokens.push_back(tok);
        }
        std::vector<double> row;
        row.reserve(tokens.size());
        for (const auto& tok : tokens)
            row.push_back(parse_number(tok, src.path + " line " + std::to_string(r + 1)));
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n < 2) throw DegenerateInput("matrix in " + src.path + " has fewer than 2 rows");
    for (const auto& row : rows)
        if (row.size() != n)
            throw ParseError("matrix in " + src.path + " is not square (" + std::to_string(n) +
                             " rows, a row has " + std::to_string(row.size()) + " columns)");

    // Tolerate (and average away) relative asymmetry up to 1e-9 — text
    // round-trips wobble in the last digits; anything larger is an error.
    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j <= i) continue;
            const double a = rows[i][j], b = rows[j][i];
            if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)))
                throw AsymmetricMatrix("entries (" + std::to_string(i) + "," + std::to_string(j) +
                                       ") and (" + std::to_string(j) + "," + std::to_string(i) +
                                       ") differ beyond tolerance");
            const double avg = 0.5 * (a + b);
            values[i * n + j] = avg;
            values[j * n + i] = avg;
        }
    for (std::size_t i = 0; i < n; ++i) values[i * n + i] = rows[i][i];

    Labels labels;
    for (const auto& raw : read_lines(src.labels_path)) {
        const std::string t = trim(raw);
        if (t.empty()) continue;
        auto fields = split_csv(t);
        labels.push_back(trim(fields.empty() ? t : fields[0]));
    }
    if (labels.size() != n)
        throw SizeMismatch("labels file has " + std::to_string(labels.size()) + " entries, matrix has " +
                           std::to_string(n) + " rows");
    return {DissimilarityMatrix::from_dense(n, std::move(values)), std::move(labels)};
}

} // namespace detail

inline Dataset load_dataset(const DatasetSource& src) {
    if (src.kind == SourceKind::FeatureTable) return detail::load_feature_table(src);
    return detail::load_distance_matrix(src);
}

/// Divides all distances by their mean; returns the factor applied (1 when
/// the mean is zero). Leaves the rank structure untouched.
inline double normalize_by_mean(DissimilarityMatrix& d) {
    const double mean = pairwise_stats(d).mean;
    if (!(mean > 0.0)) return 1.0;
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, d(i, j) / mean);
    return 1.0 / mean;
}

/// Coordinates CSV: header `index,x,y,label`, 9 significant digits, one row
/// per point in input order.
inline void write_embedding(const Embedding& e, const Labels& labels, const std::string& path) {
    if (e.size() != labels.size()) throw DimensionMismatch("embedding and labels disagree on size");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "index,x,y,label\n";
    for (std::size_t i = 0; i < e.size(); ++i)
        out << i << ',' << detail::format_g9(e[i][0]) << ',' << detail::format_g9(e[i][1]) << ','
            << detail::csv_quote(labels[i]) << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

/// Reads a coordinates CSV produced by write_embedding.
inline std::pair<Embedding, Labels> read_embedding(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty() || detail::trim(lines[0]) != "index,x,y,label")
        throw ParseError(path + " does not start with the header index,x,y,label");
    std::vector<Vec2> points;
    Labels labels;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (detail::trim(lines[r]).empty()) continue;
        const auto fields = detail::split_csv(lines[r]);
        if (fields.size() != 4)
            throw ParseError(path + " row " + std::to_string(r) + " does not have 4 fields");
        const auto idx =
            static_cast<std::size_t>(detail::parse_number(fields[0], path + " index column"));
        if (idx != points.size())
            throw ParseError(path + " indices are not consecutive from 0");
        const double x = detail::parse_number(fields[1], path + " x column");
        const double y = detail::parse_number(fields[2], path + " y column");
        if (!std::isfinite(x) || !std::isfinite(y))
            throw ParseError(path + " row " + std::to_string(r) + " has a non-finite coordinate");
        points.push_back({x, y});
        labels.push_back(detail::trim(fields[3]));
    }
    if (points.empty()) throw ParseError(path + " contains no data rows");
    return {Embedding(std::move(points)), std::move(labels)};
}

/// Trace file: '#' comment header echoing the run setup, then one
/// tab-separated record per epoch: epoch, lambda, learning_rate, total_stress.
inline void write_trace(const RunTrace& trace, const std::string& path,
                        const std::vector<std::pair<std::string, std::string>>& annotations = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [key, value] : annotations) out << "# " << key << ": " << value << '\n';
    out << "# columns: epoch\tlambda\tlearning_rate\ttotal_stress\n";
    for (const auto& rec : trace.records)
        out << rec.epoch << '\t' << detail::format_g17(rec.lambda) << '\t'
            << detail::format_g17(rec.learning_rate) << '\t' << detail::format_g17(rec.total_stress)
            << '\n';
    if (!out) throw IoError("failed while writing " + path);
}

/// key=value block, fixed key order.
inline std::string report_to_kv(const MapQualityReport& r) {
    std::ostringstream out;
    out << "k=" << r.k << '\n'
        << "trustworthiness=" << detail::format_g9(r.trustworthiness) << '\n'
        << "continuity=" << detail::format_g9(r.continuity) << '\n'
        << "knn_accuracy=" << detail::format_g9(r.knn_accuracy) << '\n'
        << "fn_within=" << r.fn_within << '\n'
        << "fn_between=" << r.fn_between << '\n'
        << "tear_within=" << r.tear_within << '\n'
        << "tear_between=" << r.tear_between << '\n';
    return out.str();
}

inline std::string report_csv_header() {
    return "k,trustworthiness,continuity,knn_accuracy,fn_within,fn_between,tear_within,tear_between";
}

inline std::string report_to_csv_row(const MapQualityReport& r) {
    std::ostringstream out;
    out << r.k << ',' << detail::format_g9(r.trustworthiness) << ',' << detail::format_g9(r.continuity)
        << ',' << detail::format_g9(r.knn_accuracy) << ',' << r.fn_within << ',' << r.fn_between << ','
        << r.tear_within << ',' << r.tear_between;
    return out.str();
}

inline void write_report(const MapQualityReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << report_to_kv(r);
    if (!out) throw IoError("failed while writing " + path);
}

namespace detail {

inline std::string format_px(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

/// Standalone SVG scatter plot: one circle per point, one fill color per
/// class (classes sorted lexicographically, palette cycled), 5% margin
/// autoscale with preserved aspect ratio, legend mapping class to color.
/// Deterministic bytes for fixed inputs.
inline void render_svg(const Embedding& e, const Labels& labels, const PlotSpec& spec,
                       const std::string& path) {
    if (e.size() == 0) throw InvalidArgument("cannot plot an empty embedding");
    if (e.size() != labels.size()) throw DimensionMismatch("embedding and labels disagree on size");
    if (spec.width <= 0 || spec.height <= 0) throw InvalidArgument("plot dimensions must be positive");
    if (spec.palette.empty()) throw InvalidArgument("palette must not be empty");

    const std::set<std::string> class_set(labels.begin(), labels.end());
    const std::vector<std::string> classes(class_set.begin(), class_set.end());
    auto color_of = [&](const std::string& label) {
        const auto it = std::lower_bound(classes.begin(), classes.end(), label);
        const auto idx = static_cast<std::size_t>(it - classes.begin());
        return spec.palette[idx % spec.palette.size()];
    };

    double min_x = e[0][0], max_x = e[0][0], min_y = e[0][1], max_y = e[0][1];
    for (const auto& p : e.points) {
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    }
    // Degenerate extents fall back to a unit box around the data.
    if (!(max_x - min_x > 0.0)) {
        min_x -= 0.5;
        max_x += 0.5;
    }
    if (!(max_y - min_y > 0.0)) {
        min_y -= 0.5;
        max_y += 0.5;
    }
    const double margin_x = 0.05 * spec.width;
    const double margin_y = 0.05 * spec.height;
    const double scale = std::min((spec.width - 2.0 * margin_x) / (max_x - min_x),
                                  (spec.height - 2.0 * margin_y) / (max_y - min_y));
    const double offset_x = 0.5 * (spec.width - scale * (max_x - min_x));
    const double offset_y = 0.5 * (spec.height - scale * (max_y - min_y));
    auto px = [&](double x) { return offset_x + scale * (x - min_x); };
    auto py = [&](double y) { return offset_y + scale * (max_y - y); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
    out << "  <rect width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t i = 0; i < e.size(); ++i)
        out << "  <circle cx=\"" << detail::format_px(px(e[i][0])) << "\" cy=\""
            << detail::format_px(py(e[i][1])) << "\" r=\"" << detail::format_px(spec.point_radius)
            << "\" fill=\"" << color_of(labels[i]) << "\" fill-opacity=\"0.85\"/>\n";
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const double ly = 16.0 + 20.0 * static_cast<double>(c);
        out << "  <rect x=\"12\" y=\"" << detail::format_px(ly) << "\" width=\"12\" height=\"12\" fill=\""
            << spec.palette[c % spec.palette.size()] << "\"/>\n";
        out << "  <text x=\"30\" y=\"" << detail::format_px(ly + 10.0)
            << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#000000\">"
            << detail::xml_escape(classes[c]) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("failed while writing " + path);
}

} // namespace classimap
