#pragma once

// Uniform-grid candidate retrieval plus the geo-fence prefilter. Queries
// scan a 3x3 cell neighborhood; cell sizing guarantees that neighborhood
// holds every camera whose range can reach the query point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include <cctvx/cameras.hpp>
#include <cctvx/errors.hpp>
#include <cctvx/geo.hpp>
#include <cctvx/gpx.hpp>

namespace cctvx {

// Planar chart for cell arithmetic: the same equirectangular convention as
// euclidean_distance, but with the longitude scale frozen at one anchor.
class LocalProjection {
  public:
    LocalProjection() : LocalProjection(GeoPoint{0.0, 0.0}) {}
    explicit LocalProjection(const GeoPoint& anchor)
        : anchor_(anchor),
          cos_lat_(std::cos(anchor.latitude * kDegToRad)) {}

    const GeoPoint& anchor() const { return anchor_; }

    std::pair<double, double> to_xy(const GeoPoint& p) const {
        double x = (p.longitude - anchor_.longitude) * kDegToRad * cos_lat_ *
                   kEarthRadius;
        double y = (p.latitude - anchor_.latitude) * kDegToRad * kEarthRadius;
        return {x, y};
    }

    GeoPoint from_xy(double x, double y) const {
        return {anchor_.latitude + y / kEarthRadius * kRadToDeg,
                anchor_.longitude +
                    x / (kEarthRadius * cos_lat_) * kRadToDeg};
    }

  private:
    GeoPoint anchor_;
    double cos_lat_;
};

class GridIndex {
  public:
    GridIndex() = default;

    explicit GridIndex(const CameraDatabase& db)
        : projection_(db.bounds.center()) {
        if (db.cameras.empty()) return;

        // The chart's x-scale is the anchor's; toward the poles a fixed
        // metric radius spans more projected meters. Widen cells by that
        // worst-case stretch so the 2x-radius neighborhood bound survives
        // the distortion, then apply the default 4x sizing on top.
        double pad_deg = (db.max_radius / kEarthRadius) * kRadToDeg + 1e-9;
        double extreme = std::max(std::abs(db.bounds.min_latitude - pad_deg),
                                  std::abs(db.bounds.max_latitude + pad_deg));
        double cos_edge =
            std::max(std::cos(std::min(extreme, 90.0) * kDegToRad), 0.01);
        double cos_anchor =
            std::max(std::cos(projection_.anchor().latitude * kDegToRad), 0.01);
        double stretch = std::max(cos_anchor / cos_edge, 1.0);
        cell_size_ = std::max({4.0 * db.max_radius,
                               2.0 * db.max_radius * stretch * 1.01, 1.0});
        if (cell_size_ < 2.0 * db.max_radius)
            throw ConfigError("grid cell size below twice the camera radius");

        max_radius_ = db.max_radius;
        for (std::size_t i = 0; i < db.cameras.size(); ++i) {
            auto [x, y] = projection_.to_xy(db.cameras[i].position);
            cells_[key(cell_of(x), cell_of(y))].push_back(i);
        }
    }

    // Indices of every camera that could cover p, sorted ascending.
    std::vector<std::size_t> candidates(const GeoPoint& p) const {
        std::vector<std::size_t> out;
        if (cells_.empty()) return out;
        auto [x, y] = projection_.to_xy(p);
        std::int64_t col = cell_of(x);
        std::int64_t row = cell_of(y);
        for (std::int64_t dr = -1; dr <= 1; ++dr) {
            for (std::int64_t dc = -1; dc <= 1; ++dc) {
                auto it = cells_.find(key(col + dc, row + dr));
                if (it == cells_.end()) continue;
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    double cell_size() const { return cell_size_; }
    double max_radius() const { return max_radius_; }
    std::size_t occupied_cells() const { return cells_.size(); }

    std::size_t indexed_count() const {
        std::size_t n = 0;
        for (const auto& [k, ids] : cells_) n += ids.size();
        return n;
    }

    const LocalProjection& projection() const { return projection_; }

  private:
    std::int64_t cell_of(double v) const {
        return static_cast<std::int64_t>(std::floor(v / cell_size_));
    }

    static std::int64_t key(std::int64_t col, std::int64_t row) {
        return (row << 32) ^ (col & 0xffffffff);
    }

    LocalProjection projection_;
    double cell_size_ = 1.0;
    double max_radius_ = 0.0;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

// Drops cameras that cannot touch any position on the document's tracks:
// anything outside the track bounding box grown by `margin` meters. The
// margin must cover the largest camera radius or in-range cameras could
// be lost.
inline CameraDatabase geofence_filter(const CameraDatabase& db,
                                      const GpxDocument& doc, double margin) {
    if (margin < db.max_radius)
        throw ConfigError(
            "geo-fence margin must be at least the largest camera radius");

    BoundingBox box;
    for (const Track& track : doc.tracks)
        for (const TrackSegment& seg : track.segments)
            for (const TrackPoint& p : seg.points) box.expand(p.position);

    CameraDatabase out;
    if (box.empty) return out;

    double dlat = (margin / kEarthRadius) * kRadToDeg;
    double lat_lo = std::max(box.min_latitude - dlat, -90.0);
    double lat_hi = std::min(box.max_latitude + dlat, 90.0);
    // Longitude degrees shrink toward the poles; convert with the smallest
    // cosine in the expanded band so the fence never undershoots.
    double extreme = std::max(std::abs(lat_lo), std::abs(lat_hi));
    double cos_min = std::max(std::cos(extreme * kDegToRad), 0.01);
    double dlon = margin / (kEarthRadius * cos_min) * kRadToDeg;
    double lon_lo = box.min_longitude - dlon;
    double lon_hi = box.max_longitude + dlon;

    for (const Camera& cam : db.cameras) {
        if (cam.position.latitude < lat_lo || cam.position.latitude > lat_hi ||
            cam.position.longitude < lon_lo ||
            cam.position.longitude > lon_hi)
            continue;
        out.bounds.expand(cam.position);
        out.max_radius = std::max(out.max_radius, cam.radius);
        out.cameras.push_back(cam);
    }
    return out;
}

}  // namespace cctvx
