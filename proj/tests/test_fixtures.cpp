#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <cctvx/exposure.hpp>
#include <cctvx/fixtures.hpp>

using namespace cctvx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SegmentAnalysis run_scenario(const Scenario& sc, double resolution = 0.5) {
    GridIndex index(sc.cameras);
    CameraLookup lookup(sc.cameras, &index);
    return analyze_segment(sc.segment(), sc.cameras, lookup, sc.cameras,
                           {resolution, DistanceMethod::euclidean});
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("chord expectations follow the circle geometry") {
    CHECK_THAT(straight_line_scenario(0.0).expected_union_distance,
               WithinAbs(20.0, 1e-12));
    CHECK_THAT(straight_line_scenario(6.0).expected_union_distance,
               WithinAbs(16.0, 1e-12));
    CHECK_THAT(straight_line_scenario(8.0).expected_union_distance,
               WithinAbs(12.0, 1e-12));
    CHECK_THAT(straight_line_scenario(9.5).expected_union_distance,
               WithinAbs(6.2449979983, 1e-9));
    CHECK(straight_line_scenario(10.0).expected_union_distance == 0.0);
}

TEST_CASE("engine reproduces chord lengths within a meter") {
    double offset = GENERATE(0.0, 2.0, 4.0, 6.0, 8.0, 9.5);
    Scenario sc = straight_line_scenario(offset);
    SegmentAnalysis a = run_scenario(sc);
    CHECK_THAT(a.ledger.union_distance,
               WithinAbs(sc.expected_union_distance, 1.0));
}

TEST_CASE("tangent and out-of-range passes see no exposure") {
    SegmentAnalysis tangent = run_scenario(straight_line_scenario(10.0));
    CHECK(tangent.ledger.union_distance == 0.0);
    CHECK(tangent.ledger.unique_camera_ids.empty());

    SegmentAnalysis outside = run_scenario(straight_line_scenario(12.0));
    CHECK(outside.ledger.union_distance == 0.0);
    CHECK(outside.ledger.per_camera.empty());
}

TEST_CASE("sector scenario covers the aimed wedge only") {
    Scenario sc = sector_line_scenario();
    CHECK_THAT(sc.expected_union_distance, WithinAbs(5.7735026919, 1e-9));
    SegmentAnalysis a = run_scenario(sc);
    // one covered window, so at most two snapped transitions
    CHECK_THAT(a.ledger.union_distance,
               WithinAbs(sc.expected_union_distance, 2.0));
    CHECK(a.ledger.unique_camera_ids ==
          std::vector<std::string>{"1"});
}

TEST_CASE("two-camera walk calibrates to the published totals") {
    Scenario sc = two_camera_walk_scenario();
    SegmentAnalysis a = run_scenario(sc);

    CHECK_THAT(a.baseline.total_distance, WithinAbs(1538.83, 1e-7));
    REQUIRE(a.total_time.has_value());
    CHECK_THAT(*a.total_time, WithinAbs(1109.0, 1e-6));

    CHECK_THAT(a.ledger.union_distance, WithinAbs(41.14, 5e-3));
    CHECK_THAT(a.ledger.per_camera.at("133").covered_distance,
               WithinAbs(23.64, 5e-3));
    CHECK_THAT(a.ledger.per_camera.at("199").covered_distance,
               WithinAbs(17.50, 5e-3));
    REQUIRE(a.ledger.union_time.has_value());
    CHECK_THAT(*a.ledger.union_time,
               WithinAbs(41.14 / (1538.83 / 1109.0), 1e-3));
    CHECK(a.ledger.unique_camera_ids ==
          std::vector<std::string>{"133", "199"});

    SegmentAnalysis fine = run_scenario(sc, 0.05);
    CHECK_THAT(fine.ledger.union_distance,
               WithinAbs(a.ledger.union_distance, 0.01));
}

TEST_CASE("random fields are reproducible from their seed") {
    Scenario a = random_field_scenario(42, 60);
    Scenario b = random_field_scenario(42, 60);
    CHECK(write_gpx(a.gpx) == write_gpx(b.gpx));
    CHECK(serialize_cameras(a.cameras) == serialize_cameras(b.cameras));
    CHECK(a.expected_union_distance == b.expected_union_distance);
    CHECK(a.oracle_runs == b.oracle_runs);

    Scenario c = random_field_scenario(43, 60);
    CHECK(write_gpx(a.gpx) != write_gpx(c.gpx));
}

TEST_CASE("engine tracks the fine-step oracle on random fields") {
    unsigned seed = GENERATE(11u, 12u, 13u);
    Scenario sc = random_field_scenario(seed, 40);
    SegmentAnalysis a = run_scenario(sc);
    double slack =
        2.0 * 0.5 * (2.0 * static_cast<double>(sc.oracle_runs)) + 0.05;
    CHECK_THAT(a.ledger.union_distance,
               WithinAbs(sc.expected_union_distance, slack));
}

TEST_CASE("empty random field measures zero") {
    Scenario sc = random_field_scenario(7, 0);
    CHECK(sc.expected_union_distance == 0.0);
    CHECK(sc.oracle_runs == 0);
    SegmentAnalysis a = run_scenario(sc);
    CHECK(a.ledger.union_distance == 0.0);
}

TEST_CASE("exported scenarios reload to the same analysis") {
    Scenario sc = straight_line_scenario(4.0);
    auto dir = std::filesystem::temp_directory_path() / "cctvx-fixtures";
    std::filesystem::create_directories(dir);
    auto gpx_path = dir / "line.gpx";
    auto cam_path = dir / "cameras.json";
    export_scenario(sc, gpx_path.string(), cam_path.string());

    GpxDocument doc = parse_gpx(slurp(gpx_path), "line.gpx");
    CameraDatabase db = load_cameras(slurp(cam_path));
    GridIndex index(db);
    CameraLookup lookup(db, &index);
    SegmentAnalysis reloaded =
        analyze_segment(doc.tracks[0].segments[0], db, lookup, db,
                        {0.5, DistanceMethod::euclidean});
    SegmentAnalysis direct = run_scenario(sc);

    CHECK(reloaded.ledger.union_distance == direct.ledger.union_distance);
    REQUIRE(reloaded.ledger.union_time.has_value());
    CHECK_THAT(*reloaded.ledger.union_time,
               WithinAbs(*direct.ledger.union_time, 1e-3));
}

TEST_CASE("bundled fixture set is complete") {
    std::vector<Scenario> all = bundled_fixtures();
    REQUIRE(all.size() == 8);
    for (const Scenario& sc : all) {
        CHECK(!sc.description.empty());
        CHECK(sc.segment().analyzable());
        CHECK(sc.segment().has_time());
        CHECK(sc.expected_union_time.has_value());
    }
}
