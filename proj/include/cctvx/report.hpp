#pragma once

// Per-segment JSON reports. Values are kept at full precision inside the
// ledger and rounded half-up to two decimals only while rendering.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <cctvx/cameras.hpp>
#include <cctvx/errors.hpp>
#include <cctvx/exposure.hpp>

namespace cctvx {

inline double round2(double v) {
    double r = std::round(v * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

enum class ReportFormat { array, jsonl, geojson };

inline ReportFormat parse_report_format(const std::string& name) {
    if (name == "array") return ReportFormat::array;
    if (name == "jsonl") return ReportFormat::jsonl;
    if (name == "geojson") return ReportFormat::geojson;
    throw ConfigError("unknown output format \"" + name + "\"");
}

namespace report_detail {

// Numeric ids sort by value, everything else lexically afterwards.
inline bool id_less(const std::string& a, const std::string& b) {
    auto numeric = [](const std::string& s) -> std::optional<unsigned long long> {
        if (s.empty()) return std::nullopt;
        unsigned long long v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            return std::nullopt;
        return v;
    };
    auto na = numeric(a), nb = numeric(b);
    if (na && nb) return *na != *nb ? *na < *nb : a < b;
    if (na.has_value() != nb.has_value()) return na.has_value();
    return a < b;
}

inline double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace report_detail

inline ordered_json build_report(const SegmentAnalysis& a,
                                 const CameraDatabase& db,
                                 const std::string& file) {
    const ExposureLedger& ledger = a.ledger;
    double total_distance = a.baseline.total_distance;

    ordered_json report = ordered_json::object();
    report["file"] = file;
    report["track"] = a.track_index;
    report["segment"] = a.segment_index;
    report["total_distance"] = round2(total_distance);
    report["number_of_unique_cams"] = ledger.unique_camera_ids.size();
    report["exposure_distance"] = round2(ledger.union_distance);
    report["dist_percentage"] =
        a.degenerate ? 0.0
                     : round2(100.0 * ledger.union_distance / total_distance);
    report["camera_distance_avg"] =
        round2(report_detail::mean(ledger.per_point_nearest));
    report["camera_distance_median"] =
        round2(report_detail::median(ledger.per_point_nearest));

    if (a.time_known) {
        double total_time = a.total_time.value_or(0.0);
        double union_time = ledger.union_time.value_or(0.0);
        report["avg_speed"] =
            total_time > 0.0 ? round2(total_distance / total_time * 3.6)
                             : 0.0;
        report["time_percentage"] =
            total_time > 0.0 ? round2(100.0 * union_time / total_time) : 0.0;
        report["exposure_time"] = round2(union_time);
    }

    std::vector<std::string> ids = ledger.unique_camera_ids;
    std::sort(ids.begin(), ids.end(), report_detail::id_less);
    ordered_json cams = ordered_json::object();
    for (const std::string& id : ids) {
        const Camera* cam = db.find(id);
        if (!cam) continue;
        ordered_json entry = cam->record;
        const CameraExposure& exposure = ledger.per_camera.at(id);
        if (a.time_known)
            entry["time_in_camera_fov"] =
                round2(exposure.covered_time.value_or(0.0));
        entry["distance_in_camera_fov"] = round2(exposure.covered_distance);
        cams[id] = entry;
    }
    report["cameras"] = cams;
    return report;
}

// array format: a single report stays a bare object, several become a
// JSON array; both pretty-printed the same way as the per-camera store.
inline std::string render_reports(const std::vector<ordered_json>& reports) {
    if (reports.size() == 1) return reports.front().dump(4) + "\n";
    ordered_json arr = ordered_json::array();
    for (const ordered_json& r : reports) arr.push_back(r);
    return arr.dump(4) + "\n";
}

inline std::string render_jsonl(const std::vector<ordered_json>& reports) {
    std::string out;
    for (const ordered_json& r : reports) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

inline ordered_json geojson_collection() {
    ordered_json collection = ordered_json::object();
    collection["type"] = "FeatureCollection";
    collection["features"] = ordered_json::array();
    return collection;
}

// Two features per segment: the full route, plus the covered spans as a
// styled MultiLineString for map viewers.
inline void append_geojson_features(ordered_json& collection,
                                    const TrackSegment& seg,
                                    const SegmentAnalysis& a,
                                    const ordered_json& report) {
    auto position = [](const GeoPoint& p) {
        return ordered_json::array({p.longitude, p.latitude});
    };

    ordered_json route = ordered_json::object();
    route["type"] = "Feature";
    ordered_json props = report;
    props["kind"] = "route";
    props["stroke"] = "#3388ff";
    route["properties"] = std::move(props);
    ordered_json line = ordered_json::array();
    for (const TrackPoint& pt : seg.points) line.push_back(position(pt.position));
    route["geometry"] = {{"type", "LineString"},
                         {"coordinates", std::move(line)}};
    collection["features"].push_back(std::move(route));

    ordered_json spans = ordered_json::array();
    for (std::size_t leg = 0; leg < a.ledger.legs.size(); ++leg) {
        const LegCoverage& cov = a.ledger.legs[leg];
        const GeoPoint& from = seg.points[leg].position;
        const GeoPoint& to = seg.points[leg + 1].position;
        for (const auto& [start, end] : cov.union_spans) {
            ordered_json piece = ordered_json::array();
            double length = cov.length;
            piece.push_back(position(
                length > 0.0 ? point_along(from, to, start / length) : from));
            piece.push_back(position(
                length > 0.0 ? point_along(from, to, end / length) : to));
            spans.push_back(std::move(piece));
        }
    }
    if (spans.empty()) return;

    ordered_json exposure = ordered_json::object();
    exposure["type"] = "Feature";
    exposure["properties"] = {{"file", report.at("file")},
                              {"track", report.at("track")},
                              {"segment", report.at("segment")},
                              {"kind", "exposure"},
                              {"stroke", "#ff0000"}};
    exposure["geometry"] = {{"type", "MultiLineString"},
                            {"coordinates", std::move(spans)}};
    collection["features"].push_back(std::move(exposure));
}

inline std::string render_geojson(const ordered_json& collection) {
    return collection.dump(4) + "\n";
}

}  // namespace cctvx
