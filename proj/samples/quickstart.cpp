// Library walk-through: load a camera store, parse a GPX file, analyze
// one segment and print its JSON report.
//
//   quickstart cameras.json walk.gpx

#include <iostream>

#include <cctvx/cctvx.hpp>

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: quickstart CAMERAS.json TRACK.gpx\n";
        return 64;
    }
    try {
        cctvx::CameraDatabase cameras =
            cctvx::load_cameras(cctvx::read_file(argv[1]));
        cctvx::GpxDocument doc =
            cctvx::parse_gpx(cctvx::read_file(argv[2]), argv[2]);

        const cctvx::TrackSegment& segment = doc.tracks.at(0).segments.at(0);
        cctvx::GridIndex index(cameras);
        cctvx::CameraLookup lookup(cameras, &index);
        cctvx::SegmentAnalysis analysis = cctvx::analyze_segment(
            segment, cameras, lookup, cameras,
            {0.5, cctvx::DistanceMethod::euclidean});

        std::cout << cctvx::render_reports(
            {cctvx::build_report(analysis, cameras, argv[2])});

        std::cerr << "covered " << analysis.ledger.union_distance
                  << " m out of " << analysis.baseline.total_distance
                  << " m, " << analysis.ledger.unique_camera_ids.size()
                  << " cameras involved\n";
    } catch (const cctvx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    }
    return 0;
}
