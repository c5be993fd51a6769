#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <cctvx/grid_index.hpp>

using namespace cctvx;

namespace {

CameraDatabase make_field(std::size_t count, unsigned seed,
                          double extent_m = 2000.0) {
    std::mt19937_64 rng(seed);
    LocalProjection proj(GeoPoint{62.24, 25.74});
    std::uniform_real_distribution<double> coord(-extent_m / 2, extent_m / 2);
    std::uniform_real_distribution<double> radius(5.0, 15.0);
    std::uniform_real_distribution<double> angle(0.0, 360.0);
    std::uniform_real_distribution<double> fov(60.0, 180.0);

    CameraDatabase db;
    for (std::size_t i = 0; i < count; ++i) {
        Camera cam;
        cam.id = std::to_string(i);
        cam.position = proj.from_xy(coord(rng), coord(rng));
        cam.radius = radius(rng);
        if (i % 2 == 0) {
            cam.camera_type = CameraType::directed;
            cam.orientation = angle(rng);
            cam.angle_of_view = fov(rng);
        }
        db.bounds.expand(cam.position);
        db.max_radius = std::max(db.max_radius, cam.radius);
        db.cameras.push_back(cam);
    }
    return db;
}

std::set<std::size_t> brute_force_in_range(const CameraDatabase& db,
                                           const GeoPoint& p,
                                           DistanceMethod method) {
    std::set<std::size_t> hits;
    for (std::size_t i = 0; i < db.cameras.size(); ++i)
        if (covers(db.cameras[i], p, method)) hits.insert(i);
    return hits;
}

GpxDocument document_for(const std::vector<GeoPoint>& points) {
    GpxDocument doc;
    doc.tracks.emplace_back();
    doc.tracks[0].segments.emplace_back();
    for (const GeoPoint& p : points)
        doc.tracks[0].segments[0].points.push_back({p, {}, {}, {}, "", "", ""});
    return doc;
}

}  // namespace

TEST_CASE("projection round-trips and matches the metric near the anchor") {
    LocalProjection proj(GeoPoint{62.24, 25.74});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-3000.0, 3000.0);
    for (int i = 0; i < 200; ++i) {
        double x = coord(rng), y = coord(rng);
        GeoPoint p = proj.from_xy(x, y);
        auto [x2, y2] = proj.to_xy(p);
        REQUIRE_THAT(x2, Catch::Matchers::WithinAbs(x, 1e-6));
        REQUIRE_THAT(y2, Catch::Matchers::WithinAbs(y, 1e-6));
    }
    // Planar separation tracks the metric to sub-permille error at city scale.
    GeoPoint a = proj.from_xy(-400.0, 250.0);
    GeoPoint b = proj.from_xy(350.0, -300.0);
    auto [ax, ay] = proj.to_xy(a);
    auto [bx, by] = proj.to_xy(b);
    double planar = std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
    REQUIRE_THAT(euclidean_distance(a, b),
                 Catch::Matchers::WithinRel(planar, 1e-3));
}

TEST_CASE("index structure") {
    SECTION("every camera lands in exactly one cell") {
        CameraDatabase db = make_field(450, 17);
        GridIndex idx(db);
        REQUIRE(idx.indexed_count() == 450);
        REQUIRE(idx.cell_size() >= 2.0 * db.max_radius);
    }
    SECTION("single camera occupies one cell and is its own candidate") {
        CameraDatabase db = make_field(1, 5);
        GridIndex idx(db);
        REQUIRE(idx.occupied_cells() == 1);
        auto c = idx.candidates(db.cameras[0].position);
        REQUIRE(c == std::vector<std::size_t>{0});
    }
    SECTION("empty database yields an empty index") {
        CameraDatabase db;
        GridIndex idx(db);
        REQUIRE(idx.occupied_cells() == 0);
        REQUIRE(idx.candidates(GeoPoint{62.24, 25.74}).empty());
    }
}

TEST_CASE("candidates form a superset of the in-range set") {
    CameraDatabase db = make_field(500, 23);
    GridIndex idx(db);
    LocalProjection proj(db.bounds.center());
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> coord(-1300.0, 1300.0);

    for (int i = 0; i < 1000; ++i) {
        GeoPoint p = proj.from_xy(coord(rng), coord(rng));
        auto cand = idx.candidates(p);
        std::set<std::size_t> cand_set(cand.begin(), cand.end());
        for (DistanceMethod m :
             {DistanceMethod::euclidean, DistanceMethod::haversine}) {
            for (std::size_t hit : brute_force_in_range(db, p, m)) {
                REQUIRE(cand_set.count(hit) == 1);
            }
        }
    }
}

TEST_CASE("candidates filtered by covers equal brute force") {
    CameraDatabase db = make_field(10000, 31, 6000.0);
    GridIndex idx(db);
    LocalProjection proj(db.bounds.center());
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> coord(-3200.0, 3200.0);

    for (int i = 0; i < 300; ++i) {
        GeoPoint p = proj.from_xy(coord(rng), coord(rng));
        std::set<std::size_t> via_index;
        for (std::size_t c : idx.candidates(p))
            if (covers(db.cameras[c], p, DistanceMethod::euclidean))
                via_index.insert(c);
        REQUIRE(via_index ==
                brute_force_in_range(db, p, DistanceMethod::euclidean));
    }
}

TEST_CASE("distant query points return no candidates") {
    CameraDatabase db = make_field(100, 41);
    GridIndex idx(db);
    LocalProjection proj(db.bounds.center());
    GeoPoint far = proj.from_xy(50000.0, 50000.0);
    REQUIRE(idx.candidates(far).empty());
}

TEST_CASE("rebuilding gives identical candidate lists") {
    CameraDatabase db = make_field(300, 43);
    GridIndex a(db);
    GridIndex b(db);
    LocalProjection proj(db.bounds.center());
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> coord(-1100.0, 1100.0);
    for (int i = 0; i < 200; ++i) {
        GeoPoint p = proj.from_xy(coord(rng), coord(rng));
        auto ca = a.candidates(p);
        REQUIRE(ca == b.candidates(p));
        REQUIRE(std::is_sorted(ca.begin(), ca.end()));
    }
}

TEST_CASE("geo-fence filtering") {
    CameraDatabase db = make_field(200, 53);
    LocalProjection proj(db.bounds.center());

    SECTION("margin below the largest radius is rejected") {
        GpxDocument doc = document_for({proj.from_xy(0, 0)});
        REQUIRE_THROWS_AS(geofence_filter(db, doc, db.max_radius - 1.0),
                          ConfigError);
    }

    SECTION("track far from every camera empties the database") {
        GpxDocument doc = document_for(
            {proj.from_xy(90000, 0), proj.from_xy(91000, 0)});
        CameraDatabase kept = geofence_filter(db, doc, db.max_radius);
        REQUIRE(kept.size() == 0);
    }

    SECTION("keeps nearby cameras, drops remote ones") {
        GpxDocument doc = document_for(
            {proj.from_xy(-200, -200), proj.from_xy(200, 200)});
        double margin = 50.0;
        CameraDatabase kept = geofence_filter(db, doc, margin);
        REQUIRE(kept.size() > 0);
        REQUIRE(kept.size() < db.size());
        // Nothing reachable was dropped: any camera whose disc can touch
        // the track box must be retained.
        std::set<std::string> kept_ids;
        for (const Camera& c : kept.cameras) kept_ids.insert(c.id);
        for (const Camera& c : db.cameras) {
            auto [x, y] = proj.to_xy(c.position);
            double gap = std::max({-200.0 - x, x - 200.0, -200.0 - y,
                                   y - 200.0, 0.0});
            if (gap <= margin - c.radius)
                REQUIRE(kept_ids.count(c.id) == 1);
        }
    }

    SECTION("route passing within range keeps both city cameras") {
        CameraDatabase two = load_cameras(R"({
            "133": {"latitude": "62.2415517", "longitude": "25.7452791"},
            "199": {"latitude": "62.2438628", "longitude": "25.7500291"}})");
        GpxDocument doc = document_for(
            {GeoPoint{62.2415, 25.7452}, GeoPoint{62.2439, 25.7501}});
        CameraDatabase kept = geofence_filter(two, doc, two.max_radius);
        REQUIRE(kept.size() == 2);
    }
}
