#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ropeid/observation.hpp"

using namespace ropeid;

namespace {

CameraModel test_camera() {
  CameraModel cam;
  cam.position = Vec3(0.0, -0.65, 0.5);
  cam.lookat = Vec3(0.0, 0.0, 0.5);
  cam.focal_px = 700.0;
  return cam;
}

}  // namespace

TEST_CASE("pinhole projection basics") {
  const CameraModel cam = test_camera();

  // point on the optical axis -> principal point
  const Vec2 center = project_point(cam, Vec3(0.0, 0.0, 0.5));
  CHECK(center.x() == doctest::Approx(640.0));
  CHECK(center.y() == doctest::Approx(360.0));

  // 0.1 m lateral offset at 0.65 m depth with focal 700 -> ~107.7 px
  const Vec2 off = project_point(cam, Vec3(0.1, 0.0, 0.5));
  CHECK(off.x() - 640.0 == doctest::Approx(700.0 * 0.1 / 0.65).epsilon(1e-12));

  // doubling the focal length doubles offsets from the principal point
  CameraModel cam2 = cam;
  cam2.focal_px = 1400.0;
  const Vec2 off2 = project_point(cam2, Vec3(0.1, 0.0, 0.5));
  CHECK(off2.x() - 640.0 == doctest::Approx(2.0 * (off.x() - 640.0)));

  // v grows downward: a lower point has larger v
  const Vec2 below = project_point(cam, Vec3(0.0, 0.0, 0.4));
  CHECK(below.y() > center.y());

  CHECK_THROWS(project_point(cam, Vec3(0.0, -0.65, 0.5)));  // on the camera plane
  CHECK_THROWS(project_point(cam, Vec3(0.0, -1.0, 0.5)));   // behind
}

TEST_CASE("arc-length resampling fixes the point count") {
  TrackedPoints tracked;
  tracked.points.resize(3);
  for (int t = 0; t < 3; ++t) {
    for (int i = 0; i < 5; ++i) tracked.points[t].push_back(Vec2(10.0 * i + t, 7.0));
  }
  const TrackedPoints r = resample_arclength(tracked, 9);
  REQUIRE(r.num_points() == 9);
  REQUIRE(r.frame_count() == 3);
  // uniform spacing along the straight line, endpoints preserved
  for (int t = 0; t < 3; ++t) {
    CHECK((r.points[t].front() - tracked.points[t].front()).norm() < 1e-12);
    CHECK((r.points[t].back() - tracked.points[t].back()).norm() < 1e-12);
    for (int k = 1; k < 9; ++k)
      CHECK((r.points[t][k] - r.points[t][k - 1]).norm() == doctest::Approx(5.0));
  }
}

TEST_CASE("gaussian kernel is normalized, symmetric, and flattens for large sigma") {
  const auto w = gaussian_kernel(1.0, 5);
  REQUIRE(w.size() == 5);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(w[4 - i]).epsilon(1e-12));

  const auto flat = gaussian_kernel(100.0, 5);
  for (double v : flat) CHECK(std::abs(v - 0.2) < 1e-3);

  CHECK_THROWS(gaussian_kernel(1.0, 4));
}

TEST_CASE("unwrap_angles continues across the +-pi seam") {
  const std::vector<double> in = {3.1, -3.1};
  const auto out = unwrap_angles(in);
  CHECK(out[0] == doctest::Approx(3.1));
  CHECK(out[1] == doctest::Approx(3.1 + (2.0 * M_PI - 6.2)));

  const std::vector<double> smooth = {0.1, 0.2, 0.15, 0.3};
  const auto same = unwrap_angles(smooth);
  for (std::size_t i = 0; i < smooth.size(); ++i) CHECK(same[i] == doctest::Approx(smooth[i]));

  // differences always in (-pi, pi]
  const std::vector<double> wild = {0.0, 3.0, -3.0, 2.9, -2.8, 0.4};
  const auto un = unwrap_angles(wild);
  for (std::size_t i = 1; i < un.size(); ++i) {
    const double d = un[i] - un[i - 1];
    CHECK(d > -M_PI);
    CHECK(d <= M_PI + 1e-12);
  }
}

TEST_CASE("feature extraction: normalization, angles, invariances") {
  // horizontal rope translating rigidly
  TrackedPoints tracked;
  tracked.frame_rate = 60.0;
  const int frames = 12, n = 6;
  tracked.points.resize(frames);
  for (int t = 0; t < frames; ++t)
    for (int i = 0; i < n; ++i)
      tracked.points[t].push_back(Vec2(100.0 + 20.0 * i + 3.0 * t, 50.0 + 2.0 * t));

  const FeatureTensor f = extract_features(tracked, FeatureSet::kPositionsAngles, 40);
  CHECK(f.channels == n * 3);
  CHECK(f.valid_frames == frames);

  // first point's channels identically zero; horizontal rope has angle 0
  for (int t = 0; t < frames; ++t) {
    CHECK(f.at(t, 0) == 0.0f);
    CHECK(f.at(t, n) == 0.0f);
    for (int i = 0; i < n; ++i) CHECK(f.at(t, 2 * n + i) == doctest::Approx(0.0));
  }

  // translation invariance: shifting every point per frame leaves the grid
  TrackedPoints shifted = tracked;
  for (int t = 0; t < frames; ++t)
    for (int i = 0; i < n; ++i) shifted.points[t][i] += Vec2(31.0 * t, -17.0);
  const FeatureTensor g = extract_features(shifted, FeatureSet::kPositionsAngles, 40);
  for (std::size_t i = 0; i < f.grid.size(); ++i) CHECK(f.grid[i] == g.grid[i]);

  // frames beyond valid_frames exactly zero
  for (int t = frames; t < 40; ++t)
    for (int c = 0; c < f.channels; ++c) CHECK(f.at(t, c) == 0.0f);

  // vertical rope, image v grows downward: a downward-hanging rope has
  // angle +pi/2
  TrackedPoints vertical;
  vertical.points.resize(3);
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 4; ++i) vertical.points[t].push_back(Vec2(100.0, 50.0 + 25.0 * i));
  const FeatureTensor v = extract_features(vertical, FeatureSet::kPositionsAngles, 8);
  for (int i = 1; i < 4; ++i) CHECK(v.at(0, 2 * 4 + i) == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("smoothed angular velocity matches constant rotation rate") {
  TrackedPoints tracked;
  tracked.frame_rate = 60.0;
  const int frames = 120, n = 3;
  const double omega = 2.5;  // rad/s
  tracked.points.resize(frames);
  for (int t = 0; t < frames; ++t) {
    const double a = omega * t / 60.0;
    const Vec2 dir(std::cos(a), std::sin(a));
    for (int i = 0; i < n; ++i) tracked.points[t].push_back(Vec2(400, 300) + 40.0 * i * dir);
  }
  const FeatureTensor f = extract_features(tracked, FeatureSet::kAll, 160);
  CHECK(f.channels == n * 5);
  for (int t = 5; t < frames - 5; ++t)
    for (int i = 1; i < n; ++i)
      CHECK(f.at(t, 3 * n + i) == doctest::Approx(omega).epsilon(0.02));
}

TEST_CASE("tracked csv round trip and error paths") {
  TrackedPoints tracked;
  tracked.points.resize(4);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 3; ++i) tracked.points[t].push_back(Vec2(t * 10.0 + i, i * 2.5));
  const std::string path = "/tmp/ropeid_test_tracked.csv";
  export_tracked_csv(tracked, path);
  const TrackedPoints back = ingest_tracked_csv(path);
  REQUIRE(back.frame_count() == 4);
  REQUIRE(back.num_points() == 3);
  for (int t = 0; t < 4; ++t)
    for (int i = 0; i < 3; ++i) CHECK((back.points[t][i] - tracked.points[t][i]).norm() < 1e-9);

  {
    std::ofstream bad("/tmp/ropeid_test_bad.csv");
    bad << "frame,point,u,v\n0,0,1,2\n0,1,3,4\n2,0,5,6\n";  // frame 1 missing
  }
  CHECK_THROWS(ingest_tracked_csv("/tmp/ropeid_test_bad.csv"));

  {
    std::ofstream bad("/tmp/ropeid_test_ragged.csv");
    bad << "frame,point,u,v\n0,0,1,2\n0,1,3,4\n1,0,5,6\n";  // frame 1 has 1 point
  }
  CHECK_THROWS(ingest_tracked_csv("/tmp/ropeid_test_ragged.csv"));
}

TEST_CASE("feature tensor io round trip") {
  TrackedPoints tracked;
  tracked.points.resize(5);
  for (int t = 0; t < 5; ++t)
    for (int i = 0; i < 4; ++i) tracked.points[t].push_back(Vec2(10.0 * i, 3.0 * t + i));
  const FeatureTensor f = extract_features(tracked, FeatureSet::kAll, 16);
  const std::string path = "/tmp/ropeid_test_features.wagf";
  save_features(f, path);
  const FeatureTensor back = load_features(path);
  CHECK(back.t_max == f.t_max);
  CHECK(back.channels == f.channels);
  CHECK(back.valid_frames == f.valid_frames);
  CHECK(back.num_points == f.num_points);
  CHECK(back.feature_set == f.feature_set);
  CHECK(back.grid == f.grid);
}
