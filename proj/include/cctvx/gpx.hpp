#pragma once

// GPX ingestion (1.0 and 1.1), per-segment baseline statistics, PII
// scrubbing, and writing of the scrubbed subset. Timestamps are
// normalized at parse time to seconds since the Unix epoch, UTC.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "geo.hpp"
#include "xml.hpp"

namespace cctvx {

struct TrackPoint {
    GeoPoint position;
    std::optional<double> elevation;  // meters
    std::optional<double> time;       // seconds since epoch, UTC
    std::optional<double> speed;      // meters/second
    std::string name;                 // scrubbable metadata
    std::string description;
    std::string extensions;  // canonical XML of the <extensions> content
};

struct TrackSegment {
    std::vector<TrackPoint> points;

    bool has_time() const {
        return !points.empty() &&
               std::all_of(points.begin(), points.end(),
                           [](const TrackPoint& p) { return p.time.has_value(); });
    }
    bool has_speed() const {
        return !points.empty() &&
               std::all_of(points.begin(), points.end(), [](const TrackPoint& p) {
                   return p.speed.has_value();
               });
    }
    bool analyzable() const { return points.size() >= 2; }
};

struct Track {
    std::string name;
    std::string description;
    std::string extensions;
    std::vector<TrackSegment> segments;
};

struct GpxDocument {
    std::string source_name;
    std::string creator;
    std::string name;
    std::string description;
    std::string author;
    std::string keywords;
    std::vector<std::string> links;
    std::optional<double> metadata_time;
    std::string extensions;
    std::vector<Track> tracks;

    std::size_t segment_count() const {
        std::size_t n = 0;
        for (const auto& t : tracks) n += t.segments.size();
        return n;
    }
    std::size_t point_count() const {
        std::size_t n = 0;
        for (const auto& t : tracks)
            for (const auto& s : t.segments) n += s.points.size();
        return n;
    }
};

namespace gpx_detail {

// Days since 1970-01-01 for a proleptic-Gregorian civil date.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                            unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

inline bool parse_fixed_digits(std::string_view s, std::size_t pos,
                               std::size_t count, long& out) {
    if (pos + count > s.size()) return false;
    long v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

inline bool parse_double(std::string_view s, double& out) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return false;
    std::size_t e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Shortest decimal representation that round-trips.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace gpx_detail

// ISO-8601 combined date and time, e.g. 2022-06-14T09:30:01.250Z.
// Offsets +hh:mm / +hhmm / +hh are applied; a missing designator means
// UTC. Returns seconds since the Unix epoch.
inline double parse_iso8601(std::string_view s) {
    using gpx_detail::parse_fixed_digits;
    auto malformed = [&]() -> GpxError {
        return GpxError("malformed timestamp \"" + std::string(s) + "\"");
    };

    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) throw malformed();
    std::size_t e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);

    bool negative_year = !s.empty() && s[0] == '-';
    std::size_t p = negative_year ? 1 : 0;
    long year, month, day, hour, minute, second;
    if (!parse_fixed_digits(s, p, 4, year)) throw malformed();
    p += 4;
    if (p >= s.size() || s[p] != '-') throw malformed();
    if (!parse_fixed_digits(s, ++p, 2, month)) throw malformed();
    p += 2;
    if (p >= s.size() || s[p] != '-') throw malformed();
    if (!parse_fixed_digits(s, ++p, 2, day)) throw malformed();
    p += 2;
    if (p >= s.size() || (s[p] != 'T' && s[p] != 't' && s[p] != ' '))
        throw malformed();
    if (!parse_fixed_digits(s, ++p, 2, hour)) throw malformed();
    p += 2;
    if (p >= s.size() || s[p] != ':') throw malformed();
    if (!parse_fixed_digits(s, ++p, 2, minute)) throw malformed();
    p += 2;
    if (p >= s.size() || s[p] != ':') throw malformed();
    if (!parse_fixed_digits(s, ++p, 2, second)) throw malformed();
    p += 2;

    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
        minute > 59 || second > 60)
        throw malformed();

    double fraction = 0.0;
    if (p < s.size() && (s[p] == '.' || s[p] == ',')) {
        ++p;
        double scale = 0.1;
        bool any = false;
        while (p < s.size() && s[p] >= '0' && s[p] <= '9') {
            fraction += (s[p] - '0') * scale;
            scale *= 0.1;
            ++p;
            any = true;
        }
        if (!any) throw malformed();
    }

    long offset_seconds = 0;
    if (p < s.size()) {
        char c = s[p];
        if (c == 'Z' || c == 'z') {
            ++p;
        } else if (c == '+' || c == '-') {
            int sign = c == '+' ? 1 : -1;
            long oh, om = 0;
            if (!parse_fixed_digits(s, ++p, 2, oh)) throw malformed();
            p += 2;
            if (p < s.size() && s[p] == ':') ++p;
            if (p < s.size()) {
                if (!parse_fixed_digits(s, p, 2, om)) throw malformed();
                p += 2;
            }
            if (oh > 14 || om > 59) throw malformed();
            offset_seconds = sign * (oh * 3600 + om * 60);
        } else {
            throw malformed();
        }
    }
    if (p != s.size()) throw malformed();

    std::int64_t days = gpx_detail::days_from_civil(
        negative_year ? -year : year, static_cast<unsigned>(month),
        static_cast<unsigned>(day));
    double t = static_cast<double>(days) * 86400.0 + hour * 3600.0 +
               minute * 60.0 + second + fraction - offset_seconds;
    return t;
}

// UTC timestamp with up to microsecond precision, trailing zeros trimmed.
inline std::string format_iso8601(double t) {
    double floor_sec = std::floor(t);
    double fraction = t - floor_sec;
    // Round the fraction to microseconds; carry into the seconds if needed.
    long micros = static_cast<long>(std::llround(fraction * 1e6));
    if (micros >= 1000000) {
        micros -= 1000000;
        floor_sec += 1.0;
    }
    auto total = static_cast<std::int64_t>(floor_sec);
    std::int64_t days = total / 86400;
    std::int64_t rem = total % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t year;
    unsigned month, day;
    gpx_detail::civil_from_days(days, year, month, day);
    int hour = static_cast<int>(rem / 3600);
    int minute = static_cast<int>((rem % 3600) / 60);
    int second = static_cast<int>(rem % 60);

    char buf[48];
    int n = std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d",
                          static_cast<long long>(year), month, day, hour,
                          minute, second);
    std::string out(buf, static_cast<std::size_t>(n));
    if (micros > 0) {
        std::snprintf(buf, sizeof buf, "%06ld", micros);
        std::string frac(buf);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        out.push_back('.');
        out += frac;
    }
    out.push_back('Z');
    return out;
}

namespace gpx_detail {

inline std::string serialize_children(const XmlNode& node) {
    std::string out;
    xml_escape(node.trimmed_text(), out);
    for (const XmlNode& c : node.children) xml_serialize(c, out);
    return out;
}

inline double require_coordinate(const XmlNode& pt, const char* attr,
                                 const std::string& where) {
    const std::string* raw = pt.attribute(attr);
    double v;
    if (!raw || !parse_double(*raw, v))
        throw GpxError("missing or malformed " + std::string(attr) + " at " +
                       where + " (line " + std::to_string(pt.line) + ")");
    return v;
}

inline std::optional<double> optional_number(const XmlNode& parent,
                                             const char* tag,
                                             const std::string& where) {
    const XmlNode* node = parent.child(tag);
    if (!node) return std::nullopt;
    double v;
    if (!parse_double(node->trimmed_text(), v))
        throw GpxError("malformed <" + std::string(tag) + "> at " + where);
    return v;
}

inline TrackPoint parse_point(const XmlNode& pt, std::size_t track_index,
                              std::size_t segment_index,
                              std::size_t point_index) {
    std::string where = "track " + std::to_string(track_index) + " segment " +
                        std::to_string(segment_index) + " point " +
                        std::to_string(point_index);
    TrackPoint p;
    p.position.latitude = require_coordinate(pt, "lat", where);
    p.position.longitude = require_coordinate(pt, "lon", where);
    if (!p.position.valid())
        throw ValidationError("coordinates out of range at " + where);

    p.elevation = optional_number(pt, "ele", where);
    if (const XmlNode* time = pt.child("time")) {
        try {
            p.time = parse_iso8601(time->trimmed_text());
        } catch (const GpxError& e) {
            throw GpxError(std::string(e.what()) + " at " + where);
        }
    }
    p.speed = optional_number(pt, "speed", where);  // native in GPX 1.0
    if (const XmlNode* name = pt.child("name")) p.name = name->trimmed_text();
    if (const XmlNode* desc = pt.child("desc"))
        p.description = desc->trimmed_text();
    if (const XmlNode* ext = pt.child("extensions")) {
        p.extensions = serialize_children(*ext);
        if (!p.speed) {
            // Recognized extension element, e.g. gpxtpx:speed.
            if (const XmlNode* es = ext->find("speed")) {
                double v;
                if (parse_double(es->trimmed_text(), v)) p.speed = v;
            }
        }
    }
    if (p.speed && *p.speed < 0)
        throw ValidationError("negative speed at " + where);
    return p;
}

}  // namespace gpx_detail

inline GpxDocument parse_gpx(std::string_view xml_text,
                             std::string source_name) {
    XmlNode root = xml_parse(xml_text);
    if (root.name != "gpx")
        throw GpxError("root element is <" + root.name + ">, expected <gpx>");

    GpxDocument doc;
    doc.source_name = std::move(source_name);
    if (const std::string* creator = root.attribute("creator"))
        doc.creator = *creator;

    // GPX 1.1 metadata block.
    if (const XmlNode* meta = root.child("metadata")) {
        if (const XmlNode* n = meta->child("name")) doc.name = n->trimmed_text();
        if (const XmlNode* n = meta->child("desc"))
            doc.description = n->trimmed_text();
        if (const XmlNode* n = meta->child("keywords"))
            doc.keywords = n->trimmed_text();
        if (const XmlNode* author = meta->child("author")) {
            if (const XmlNode* n = author->child("name"))
                doc.author = n->trimmed_text();
            else
                doc.author = author->trimmed_text();
        }
        for (const XmlNode* link : meta->children_named("link"))
            if (const std::string* href = link->attribute("href"))
                doc.links.push_back(*href);
        if (const XmlNode* t = meta->child("time"))
            doc.metadata_time = parse_iso8601(t->trimmed_text());
    }
    // GPX 1.0 top-level metadata.
    if (const XmlNode* n = root.child("name")) doc.name = n->trimmed_text();
    if (const XmlNode* n = root.child("desc"))
        doc.description = n->trimmed_text();
    if (const XmlNode* n = root.child("author")) doc.author = n->trimmed_text();
    if (const XmlNode* n = root.child("keywords"))
        doc.keywords = n->trimmed_text();
    if (const XmlNode* n = root.child("url"))
        doc.links.push_back(n->trimmed_text());
    if (const XmlNode* t = root.child("time"))
        doc.metadata_time = parse_iso8601(t->trimmed_text());
    if (const XmlNode* ext = root.child("extensions"))
        doc.extensions = gpx_detail::serialize_children(*ext);

    std::size_t track_index = 0;
    for (const XmlNode* trk : root.children_named("trk")) {
        Track track;
        if (const XmlNode* n = trk->child("name")) track.name = n->trimmed_text();
        if (const XmlNode* n = trk->child("desc"))
            track.description = n->trimmed_text();
        if (const XmlNode* ext = trk->child("extensions"))
            track.extensions = gpx_detail::serialize_children(*ext);

        std::size_t segment_index = 0;
        for (const XmlNode* seg : trk->children_named("trkseg")) {
            TrackSegment segment;
            std::size_t point_index = 0;
            for (const XmlNode* pt : seg->children_named("trkpt")) {
                segment.points.push_back(gpx_detail::parse_point(
                    *pt, track_index, segment_index, point_index));
                ++point_index;
            }
            track.segments.push_back(std::move(segment));
            ++segment_index;
        }
        doc.tracks.push_back(std::move(track));
        ++track_index;
    }
    return doc;
}

struct SegmentBaseline {
    double total_distance = 0.0;           // meters
    std::optional<double> total_time;      // seconds, when fully timestamped
};

// Sum of leg distances plus first-to-last elapsed time. Timestamps must
// be non-decreasing when the segment is fully timestamped.
inline SegmentBaseline segment_baseline(const TrackSegment& segment,
                                        DistanceMethod method,
                                        std::size_t track_index = 0,
                                        std::size_t segment_index = 0) {
    if (segment.points.size() < 2)
        throw ValidationError("segment needs at least 2 points for analysis");
    SegmentBaseline baseline;
    for (std::size_t i = 0; i + 1 < segment.points.size(); ++i)
        baseline.total_distance += distance(method, segment.points[i].position,
                                            segment.points[i + 1].position);
    if (segment.has_time()) {
        for (std::size_t i = 0; i + 1 < segment.points.size(); ++i) {
            if (*segment.points[i + 1].time < *segment.points[i].time)
                throw ValidationError(
                    "decreasing timestamp on leg " + std::to_string(i) +
                    " (track " + std::to_string(track_index) + " segment " +
                    std::to_string(segment_index) + ")");
        }
        baseline.total_time =
            *segment.points.back().time - *segment.points.front().time;
    }
    return baseline;
}

// Strips creator/author metadata, names, descriptions, links, and device
// extensions while preserving coordinates, elevations, timestamps, and
// speeds. Idempotent.
inline GpxDocument scrub_pii(const GpxDocument& doc) {
    GpxDocument out = doc;
    out.creator = "scrubbed";
    out.name.clear();
    out.description.clear();
    out.author.clear();
    out.keywords.clear();
    out.links.clear();
    out.metadata_time.reset();
    out.extensions.clear();
    for (Track& t : out.tracks) {
        t.name.clear();
        t.description.clear();
        t.extensions.clear();
        for (TrackSegment& s : t.segments) {
            for (TrackPoint& p : s.points) {
                p.name.clear();
                p.description.clear();
                p.extensions.clear();
            }
        }
    }
    return out;
}

// Serializes the analyzable subset of the model (structure, coordinates,
// elevations, timestamps, speeds) as GPX 1.0, the version whose track
// points carry <speed> natively. Scrubbable metadata is never emitted;
// this writer exists to produce the scrubbed copy.
inline std::string write_gpx(const GpxDocument& doc) {
    using gpx_detail::format_double;
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<gpx version=\"1.0\" creator=\"";
    xml_escape(doc.creator.empty() ? "scrubbed" : doc.creator, out);
    out += "\" xmlns=\"http://www.topografix.com/GPX/1/0\">\n";
    for (const Track& t : doc.tracks) {
        out += "<trk>\n";
        for (const TrackSegment& s : t.segments) {
            out += "<trkseg>\n";
            for (const TrackPoint& p : s.points) {
                out += "<trkpt lat=\"" + format_double(p.position.latitude) +
                       "\" lon=\"" + format_double(p.position.longitude) +
                       "\">";
                if (p.elevation)
                    out += "<ele>" + format_double(*p.elevation) + "</ele>";
                if (p.time) out += "<time>" + format_iso8601(*p.time) + "</time>";
                if (p.speed)
                    out += "<speed>" + format_double(*p.speed) + "</speed>";
                out += "</trkpt>\n";
            }
            out += "</trkseg>\n";
        }
        out += "</trk>\n";
    }
    out += "</gpx>\n";
    return out;
}

}  // namespace cctvx
