#pragma once

// Exposure engine: per-point in-range detection, interpolated sweep
// refinement of coverage boundaries, per-camera and union accounting,
// and time attribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <cctvx/cameras.hpp>
#include <cctvx/errors.hpp>
#include <cctvx/geo.hpp>
#include <cctvx/gpx.hpp>
#include <cctvx/grid_index.hpp>

namespace cctvx {

struct EngineConfig {
    double resolution = 0.5;
    DistanceMethod method = DistanceMethod::euclidean;
};

// Candidate retrieval behind one interface so grid-indexed and exhaustive
// runs share every other code path.
class CameraLookup {
  public:
    CameraLookup(const CameraDatabase& db, const GridIndex* index)
        : db_(&db), index_(index) {}

    std::vector<std::size_t> point_candidates(const GeoPoint& p) const {
        if (index_) return index_->candidates(p);
        return all();
    }

    // Candidates able to reach any position on the leg a->b. Indexed mode
    // samples the leg densely enough that a camera in range of some
    // intermediate position is in range of a sample's 3x3 neighborhood.
    std::vector<std::size_t> leg_candidates(const GeoPoint& a,
                                            const GeoPoint& b,
                                            double length) const {
        if (!index_) return all();
        if (db_->cameras.empty()) return {};
        std::vector<std::size_t> out;
        double spacing = std::max(index_->max_radius(), 1e-3);
        for (double t = 0.0; t < length; t += spacing) {
            GeoPoint p = t == 0.0 ? a : point_along(a, b, t / length);
            auto c = index_->candidates(p);
            out.insert(out.end(), c.begin(), c.end());
        }
        auto c = index_->candidates(b);
        out.insert(out.end(), c.begin(), c.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    const CameraDatabase& db() const { return *db_; }

  private:
    std::vector<std::size_t> all() const {
        std::vector<std::size_t> out(db_->cameras.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
        return out;
    }

    const CameraDatabase* db_;
    const GridIndex* index_;
};

struct PointCameraHit {
    std::size_t point_index = 0;
    std::size_t camera_index = 0;
    std::string camera_id;
    double distance_to_camera = 0.0;
};

struct CoveredInterval {
    std::size_t leg_index = 0;
    double start_offset = 0.0;
    double end_offset = 0.0;
    std::size_t camera_index = 0;
    std::string camera_id;
};

struct CameraExposure {
    double covered_distance = 0.0;
    std::optional<double> covered_time;
};

// Per-leg rollup kept for time attribution and map export.
struct LegCoverage {
    double length = 0.0;
    std::vector<std::pair<double, double>> union_spans;
    double union_length = 0.0;
    // camera index -> covered length on this leg; zero-length entries mark
    // coverage of a stationary (zero-distance) leg.
    std::vector<std::pair<std::size_t, double>> per_camera;
};

struct ExposureLedger {
    std::map<std::string, CameraExposure> per_camera;
    double union_distance = 0.0;
    std::optional<double> union_time;
    // Total segment duration reconstructed from point speeds when the
    // input carries speeds but no timestamps.
    std::optional<double> synthesized_total_time;
    std::vector<std::string> unique_camera_ids;
    std::vector<double> per_point_nearest;
    std::vector<LegCoverage> legs;
    std::vector<std::string> warnings;
};

inline std::vector<PointCameraHit> scan_segment(const TrackSegment& seg,
                                                const CameraDatabase& db,
                                                const CameraLookup& lookup,
                                                DistanceMethod method) {
    std::vector<PointCameraHit> hits;
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
        const GeoPoint& p = seg.points[i].position;
        for (std::size_t c : lookup.point_candidates(p)) {
            const Camera& cam = db.cameras[c];
            double d = distance(method, cam.position, p);
            if (d <= cam.radius && sector_contains(cam, p, d))
                hits.push_back({i, c, cam.id, d});
        }
    }
    return hits;
}

inline std::vector<double> nearest_camera_distances(const TrackSegment& seg,
                                                    const CameraDatabase& db,
                                                    DistanceMethod method) {
    std::vector<double> out;
    if (db.cameras.empty()) return out;
    out.reserve(seg.points.size());
    for (const TrackPoint& tp : seg.points) {
        double best = distance(method, db.cameras[0].position, tp.position);
        for (std::size_t c = 1; c < db.cameras.size(); ++c)
            best = std::min(
                best, distance(method, db.cameras[c].position, tp.position));
        out.push_back(best);
    }
    return out;
}

inline std::vector<CoveredInterval> refine_coverage(
    const TrackSegment& seg, const std::vector<PointCameraHit>& hits,
    const CameraDatabase& db, const CameraLookup& lookup, double resolution,
    DistanceMethod method) {
    if (resolution <= 0.0)
        throw ConfigError("resolution must be positive");

    std::vector<std::vector<std::size_t>> point_hits(seg.points.size());
    for (const PointCameraHit& h : hits)
        point_hits[h.point_index].push_back(h.camera_index);

    std::vector<CoveredInterval> out;
    std::vector<double> offsets;
    std::vector<GeoPoint> positions;
    std::vector<char> mask;

    for (std::size_t leg = 0; leg + 1 < seg.points.size(); ++leg) {
        const GeoPoint& a = seg.points[leg].position;
        const GeoPoint& b = seg.points[leg + 1].position;
        double length = distance(method, a, b);
        const auto& hit_a = point_hits[leg];
        const auto& hit_b = point_hits[leg + 1];
        bool positions_ready = false;

        for (std::size_t c : lookup.leg_candidates(a, b, length)) {
            const Camera& cam = db.cameras[c];
            bool at_a = std::binary_search(hit_a.begin(), hit_a.end(), c);
            bool at_b = std::binary_search(hit_b.begin(), hit_b.end(), c);

            // Both endpoints in range: the camera covers the whole leg,
            // no interpolation needed.
            if (at_a && at_b) {
                out.push_back({leg, 0.0, length, c, cam.id});
                continue;
            }
            // A leg shorter than one step has no interior test positions;
            // attribute it whole when either end is covered.
            if (length < resolution) {
                if (at_a || at_b) out.push_back({leg, 0.0, length, c, cam.id});
                continue;
            }
            // Reach prune: no point of the leg can be closer than the
            // nearer endpoint minus the leg length.
            if (!at_a && !at_b &&
                std::min(distance(method, cam.position, a),
                         distance(method, cam.position, b)) >
                    cam.radius + length + 0.01)
                continue;

            if (!positions_ready) {
                offsets.assign(1, 0.0);
                positions.assign(1, a);
                for (double t = resolution; t < length - 1e-9;
                     t += resolution) {
                    offsets.push_back(t);
                    positions.push_back(point_along(a, b, t / length));
                }
                offsets.push_back(length);
                positions.push_back(b);
                positions_ready = true;
            }

            mask.assign(offsets.size(), 0);
            mask.front() = at_a;
            mask.back() = at_b;
            for (std::size_t j = 1; j + 1 < offsets.size(); ++j) {
                double d = distance(method, cam.position, positions[j]);
                mask[j] =
                    d <= cam.radius && sector_contains(cam, positions[j], d);
            }

            // Emit maximal covered runs, stretched outward one step: the
            // true boundary lies between the last covered and the first
            // uncovered test position, and exposure is estimated high.
            std::size_t j = 0;
            while (j < mask.size()) {
                if (!mask[j]) {
                    ++j;
                    continue;
                }
                std::size_t k = j;
                while (k + 1 < mask.size() && mask[k + 1]) ++k;
                double start = j == 0 ? 0.0 : offsets[j - 1];
                double end = k + 1 == mask.size() ? length : offsets[k + 1];
                out.push_back({leg, start, end, c, cam.id});
                j = k + 1;
            }
        }
    }
    return out;
}

namespace exposure_detail {

// Sorted, clipped spans -> merged spans; returns total merged length.
inline double merge_spans(std::vector<std::pair<double, double>>& spans) {
    std::sort(spans.begin(), spans.end());
    std::size_t w = 0;
    double total = 0.0;
    for (std::size_t r = 0; r < spans.size(); ++r) {
        if (w > 0 && spans[r].first <= spans[w - 1].second) {
            spans[w - 1].second =
                std::max(spans[w - 1].second, spans[r].second);
        } else {
            spans[w++] = spans[r];
        }
    }
    spans.resize(w);
    for (const auto& [s, e] : spans) total += e - s;
    return total;
}

}  // namespace exposure_detail

inline ExposureLedger accumulate(const std::vector<CoveredInterval>& intervals,
                                 const TrackSegment& seg,
                                 const CameraDatabase& db,
                                 DistanceMethod method) {
    std::size_t leg_count =
        seg.points.size() < 2 ? 0 : seg.points.size() - 1;
    ExposureLedger ledger;
    ledger.legs.resize(leg_count);
    for (std::size_t leg = 0; leg < leg_count; ++leg)
        ledger.legs[leg].length = distance(method, seg.points[leg].position,
                                           seg.points[leg + 1].position);

    // Group per leg, then per camera within the leg.
    std::vector<std::vector<const CoveredInterval*>> by_leg(leg_count);
    for (const CoveredInterval& iv : intervals)
        by_leg[iv.leg_index].push_back(&iv);

    for (std::size_t leg = 0; leg < leg_count; ++leg) {
        LegCoverage& cover = ledger.legs[leg];
        auto& items = by_leg[leg];
        std::sort(items.begin(), items.end(),
                  [](const CoveredInterval* x, const CoveredInterval* y) {
                      if (x->camera_index != y->camera_index)
                          return x->camera_index < y->camera_index;
                      return x->start_offset < y->start_offset;
                  });

        std::vector<std::pair<double, double>> all_spans;
        std::size_t i = 0;
        while (i < items.size()) {
            std::size_t j = i;
            std::vector<std::pair<double, double>> cam_spans;
            while (j < items.size() &&
                   items[j]->camera_index == items[i]->camera_index) {
                double s = std::max(0.0, items[j]->start_offset);
                double e = std::min(cover.length, items[j]->end_offset);
                cam_spans.emplace_back(s, std::max(s, e));
                ++j;
            }
            double cam_len = exposure_detail::merge_spans(cam_spans);
            cover.per_camera.emplace_back(items[i]->camera_index, cam_len);
            all_spans.insert(all_spans.end(), cam_spans.begin(),
                             cam_spans.end());
            const std::string& id = db.cameras[items[i]->camera_index].id;
            ledger.per_camera[id].covered_distance += cam_len;
            i = j;
        }
        cover.union_spans = std::move(all_spans);
        cover.union_length = exposure_detail::merge_spans(cover.union_spans);
        ledger.union_distance += cover.union_length;
    }
    return ledger;
}

inline void attribute_time(ExposureLedger& ledger, const TrackSegment& seg,
                           const CameraDatabase& db, DistanceMethod /*m*/) {
    bool timed = seg.has_time();
    if (!timed && !seg.has_speed()) return;

    ledger.union_time = 0.0;
    for (auto& [id, exp] : ledger.per_camera) exp.covered_time = 0.0;

    double synthesized = 0.0;
    for (std::size_t leg = 0; leg < ledger.legs.size(); ++leg) {
        const LegCoverage& cover = ledger.legs[leg];
        double L = cover.length;

        double dt = 0.0;
        if (timed) {
            dt = *seg.points[leg + 1].time - *seg.points[leg].time;
        } else {
            double v =
                (*seg.points[leg].speed + *seg.points[leg + 1].speed) / 2.0;
            if (v > 0.0) dt = L / v;
        }

        if (L == 0.0) {
            // A stop: elapsed time is exposure time for every camera that
            // covers the stationary position. Without timestamps the stop
            // duration is unknowable and contributes nothing.
            if (timed && dt > 0.0) {
                for (const auto& [c, len] : cover.per_camera)
                    *ledger.per_camera[db.cameras[c].id].covered_time += dt;
                if (!cover.union_spans.empty()) *ledger.union_time += dt;
            }
            continue;
        }

        if (dt <= 0.0) {
            if (timed)
                ledger.warnings.push_back(
                    "zero-duration leg " + std::to_string(leg) +
                    " with nonzero distance; no time attributed");
            else
                ledger.warnings.push_back(
                    "zero speed on leg " + std::to_string(leg) +
                    " with nonzero distance; no time attributed");
            continue;
        }

        if (!timed) synthesized += dt;
        double scale = dt / L;
        for (const auto& [c, len] : cover.per_camera)
            *ledger.per_camera[db.cameras[c].id].covered_time += len * scale;
        *ledger.union_time += cover.union_length * scale;
    }
    if (!timed) ledger.synthesized_total_time = synthesized;
}

// Drops cameras that contributed neither distance nor time, then records
// the surviving ids.
inline void finalize_ledger(ExposureLedger& ledger) {
    for (auto it = ledger.per_camera.begin();
         it != ledger.per_camera.end();) {
        bool keep = it->second.covered_distance > 0.0 ||
                    it->second.covered_time.value_or(0.0) > 0.0;
        it = keep ? std::next(it) : ledger.per_camera.erase(it);
    }
    ledger.unique_camera_ids.clear();
    for (const auto& [id, exp] : ledger.per_camera)
        ledger.unique_camera_ids.push_back(id);
}

struct SegmentAnalysis {
    std::size_t track_index = 0;
    std::size_t segment_index = 0;
    SegmentBaseline baseline;
    ExposureLedger ledger;
    bool time_known = false;
    std::optional<double> total_time;
    bool degenerate = false;  // zero total distance
};

// Full per-segment pipeline. `db` is the active (possibly geo-fenced)
// database used for coverage; `stats_db` is the complete one so nearest-
// camera statistics do not depend on the fence.
inline SegmentAnalysis analyze_segment(const TrackSegment& seg,
                                       const CameraDatabase& db,
                                       const CameraLookup& lookup,
                                       const CameraDatabase& stats_db,
                                       const EngineConfig& cfg,
                                       std::size_t track_index = 0,
                                       std::size_t segment_index = 0) {
    SegmentAnalysis out;
    out.track_index = track_index;
    out.segment_index = segment_index;
    out.baseline =
        segment_baseline(seg, cfg.method, track_index, segment_index);

    auto hits = scan_segment(seg, db, lookup, cfg.method);
    auto intervals =
        refine_coverage(seg, hits, db, lookup, cfg.resolution, cfg.method);
    out.ledger = accumulate(intervals, seg, db, cfg.method);
    out.ledger.per_point_nearest =
        nearest_camera_distances(seg, stats_db, cfg.method);

    out.time_known = seg.has_time() || seg.has_speed();
    if (out.time_known) {
        attribute_time(out.ledger, seg, db, cfg.method);
        out.total_time = out.baseline.total_time
                             ? out.baseline.total_time
                             : out.ledger.synthesized_total_time;
    }
    finalize_ledger(out.ledger);
    out.degenerate = out.baseline.total_distance == 0.0;
    return out;
}

}  // namespace cctvx
