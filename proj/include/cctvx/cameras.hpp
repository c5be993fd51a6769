#pragma once

// Camera database: JSON loading, normalization, global radius/FOV
// overrides, and single-camera point-coverage queries.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include <cctvx/errors.hpp>
#include <cctvx/geo.hpp>

namespace cctvx {

using ordered_json = nlohmann::ordered_json;

enum class CameraType { round, directed };

struct Camera {
    std::string id;
    GeoPoint position;
    double radius = 10.0;
    CameraType camera_type = CameraType::round;
    double angle_of_view = 360.0;
    std::optional<double> orientation;
    ordered_json record;  // original JSON entry, passed through into reports

    // Sector coverage needs both an aim direction and a proper sector angle;
    // anything else degrades to full-circle coverage.
    bool sector() const {
        return orientation.has_value() && angle_of_view < 360.0;
    }
};

struct BoundingBox {
    double min_latitude = 0.0;
    double max_latitude = 0.0;
    double min_longitude = 0.0;
    double max_longitude = 0.0;
    bool empty = true;

    void expand(const GeoPoint& p) {
        if (empty) {
            min_latitude = max_latitude = p.latitude;
            min_longitude = max_longitude = p.longitude;
            empty = false;
            return;
        }
        min_latitude = std::min(min_latitude, p.latitude);
        max_latitude = std::max(max_latitude, p.latitude);
        min_longitude = std::min(min_longitude, p.longitude);
        max_longitude = std::max(max_longitude, p.longitude);
    }

    bool contains(const GeoPoint& p) const {
        return !empty && p.latitude >= min_latitude &&
               p.latitude <= max_latitude && p.longitude >= min_longitude &&
               p.longitude <= max_longitude;
    }

    GeoPoint center() const {
        if (empty) return {0.0, 0.0};
        return {(min_latitude + max_latitude) / 2.0,
                (min_longitude + max_longitude) / 2.0};
    }
};

struct CameraDatabase {
    std::vector<Camera> cameras;  // in file order
    BoundingBox bounds;
    double max_radius = 0.0;

    std::size_t size() const { return cameras.size(); }

    const Camera* find(std::string_view id) const {
        for (const Camera& c : cameras)
            if (c.id == id) return &c;
        return nullptr;
    }
};

namespace camera_detail {

// nlohmann's DOM parser silently keeps the last of duplicate keys, so
// duplicate camera ids are caught with a SAX pass over the raw text.
class TopLevelKeyScanner : public nlohmann::json_sax<ordered_json> {
  public:
    std::vector<std::string> keys;

    bool null() override { return true; }
    bool boolean(bool) override { return true; }
    bool number_integer(number_integer_t) override { return true; }
    bool number_unsigned(number_unsigned_t) override { return true; }
    bool number_float(number_float_t, const string_t&) override {
        return true;
    }
    bool string(string_t&) override { return true; }
    bool binary(binary_t&) override { return true; }
    bool start_object(std::size_t) override {
        ++depth_;
        return true;
    }
    bool key(string_t& value) override {
        if (depth_ == 1) keys.push_back(value);
        return true;
    }
    bool end_object() override {
        --depth_;
        return true;
    }
    bool start_array(std::size_t) override {
        ++depth_;
        return true;
    }
    bool end_array() override {
        --depth_;
        return true;
    }
    bool parse_error(std::size_t, const std::string&,
                     const nlohmann::detail::exception&) override {
        return false;
    }

  private:
    int depth_ = 0;
};

inline std::optional<double> numeric_field(const ordered_json& record,
                                           const char* key,
                                           const std::string& id) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return std::nullopt;
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) {
        const std::string& text = it->get_ref<const std::string&>();
        double value = 0.0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec == std::errc{} && ptr == end && std::isfinite(value))
            return value;
    }
    throw CameraDbError("camera " + id + ": field \"" + key +
                        "\" is not numeric");
}

inline std::string format_number(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

// Keeps the raw record consistent with an overridden typed field,
// preserving the original's string-vs-number representation.
inline void set_record_number(ordered_json& record, const char* key,
                              double value) {
    auto it = record.find(key);
    if (it != record.end() && it->is_string())
        record[key] = format_number(value);
    else
        record[key] = value;
}

}  // namespace camera_detail

inline CameraDatabase load_cameras(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::detail::exception& e) {
        throw CameraDbError(std::string("camera database: ") + e.what());
    }
    if (!doc.is_object())
        throw CameraDbError(
            "camera database must be a JSON object keyed by camera id");

    camera_detail::TopLevelKeyScanner scanner;
    ordered_json::sax_parse(text, &scanner);
    std::vector<std::string> keys = scanner.keys;
    std::sort(keys.begin(), keys.end());
    auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end())
        throw CameraDbError("duplicate camera id \"" + *dup + "\"");

    CameraDatabase db;
    db.cameras.reserve(doc.size());
    for (const auto& [id, record] : doc.items()) {
        if (!record.is_object())
            throw CameraDbError("camera " + id + ": entry must be an object");
        Camera cam;
        cam.id = id;
        cam.record = record;

        auto lat = camera_detail::numeric_field(record, "latitude", id);
        auto lon = camera_detail::numeric_field(record, "longitude", id);
        if (!lat || !lon)
            throw CameraDbError("camera " + id +
                                ": latitude and longitude are required");
        cam.position = {*lat, *lon};
        if (!cam.position.valid())
            throw CameraDbError("camera " + id + ": coordinates out of range");

        cam.radius =
            camera_detail::numeric_field(record, "radius", id).value_or(10.0);
        if (cam.radius <= 0.0)
            throw CameraDbError("camera " + id + ": radius must be positive");

        auto type_it = record.find("camera_type");
        if (type_it != record.end()) {
            if (!type_it->is_string())
                throw CameraDbError("camera " + id +
                                    ": camera_type must be a string");
            cam.camera_type = *type_it == "directed" ? CameraType::directed
                                                     : CameraType::round;
        }

        double fov = camera_detail::numeric_field(record, "angle_of_view", id)
                         .value_or(360.0);
        if (fov <= 0.0 || fov > 360.0)
            throw CameraDbError("camera " + id +
                                ": angle_of_view must be in (0, 360]");
        if (cam.camera_type == CameraType::round) fov = 360.0;
        cam.angle_of_view = fov;

        if (auto aim = camera_detail::numeric_field(record, "orientation", id))
            cam.orientation = normalize_degrees(*aim);

        db.bounds.expand(cam.position);
        db.max_radius = std::max(db.max_radius, cam.radius);
        db.cameras.push_back(std::move(cam));
    }
    return db;
}

inline std::string serialize_cameras(const CameraDatabase& db) {
    ordered_json doc = ordered_json::object();
    for (const Camera& cam : db.cameras) doc[cam.id] = cam.record;
    return doc.dump(2);
}

inline CameraDatabase apply_overrides(const CameraDatabase& db,
                                      std::optional<double> radius_override,
                                      std::optional<double> fov_override) {
    if (radius_override && *radius_override <= 0.0)
        throw ConfigError("radius override must be positive");
    if (fov_override && (*fov_override <= 0.0 || *fov_override > 360.0))
        throw ConfigError("field-of-view override must be in (0, 360]");

    CameraDatabase out = db;
    if (!radius_override && !fov_override) return out;
    out.max_radius = 0.0;
    for (Camera& cam : out.cameras) {
        if (radius_override) {
            cam.radius = *radius_override;
            camera_detail::set_record_number(cam.record, "radius", cam.radius);
        }
        if (fov_override) {
            cam.angle_of_view = *fov_override;
            camera_detail::set_record_number(cam.record, "angle_of_view",
                                             cam.angle_of_view);
        }
        out.max_radius = std::max(out.max_radius, cam.radius);
    }
    return out;
}

inline bool sector_contains(const Camera& cam, const GeoPoint& p,
                            double dist) {
    if (!cam.sector()) return true;
    if (dist == 0.0) return true;  // bearing undefined at the apex
    double b = initial_bearing(cam.position, p).degrees;
    return bearing_difference(b, *cam.orientation) <= cam.angle_of_view / 2.0;
}

inline bool covers(const Camera& cam, const GeoPoint& p,
                   DistanceMethod method) {
    double d = distance(method, cam.position, p);
    return d <= cam.radius && sector_contains(cam, p, d);
}

}  // namespace cctvx
