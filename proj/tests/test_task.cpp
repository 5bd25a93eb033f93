#include <cmath>
#include <random>

#include <doctest.h>

#include "stt/error.hpp"
#include "stt/rng.hpp"
#include "stt/task.hpp"

using namespace stt;

namespace {

TRasTask simple_task() {
  TRasTask t;
  t.name = "simple";
  t.dimension = 2;
  t.workspace = {{0.0, 0.0}, {5.0, 5.0}};
  t.initial = {{1.0, 2.0}, {1.5, 2.5}};
  t.target = {{4.5, 4.5}, {5.0, 5.0}};
  t.horizon = 5.0;
  t.min_width = {0.1, 0.1};
  return t;
}

}  // namespace

TEST_CASE("box membership and overlap") {
  Box b{{0.0, 0.0}, {1.0, 2.0}};
  CHECK(b.contains(std::vector<double>{0.5, 1.0}));
  CHECK(b.contains(std::vector<double>{1.0, 2.0}));  // closed
  CHECK(!b.contains(std::vector<double>{1.0001, 1.0}));
  CHECK(b.intersects(Box{{1.0, 1.0}, {2.0, 3.0}}));  // touching counts
  CHECK(!b.intersects(Box{{1.1, 0.0}, {2.0, 1.0}}));
}

TEST_CASE("timed region evaluation") {
  TimedRegion r;
  r.active_lo = 1.0;
  r.active_hi = 3.0;
  r.lower_poly = {{0.0, 1.0}};  // t
  r.upper_poly = {{1.0, 1.0}};  // 1 + t
  CHECK(r.active_at(2.0));
  CHECK(!r.active_at(0.5));
  Box b = r.box_at(2.0);
  CHECK(b.lower[0] == doctest::Approx(2.0));
  CHECK(b.upper[0] == doctest::Approx(3.0));
  CHECK(!r.is_static());

  UnsafeSet u;
  u.pieces.push_back(r);
  CHECK(u.contains(2.0, {2.5}));
  CHECK(!u.contains(0.5, {2.5}));  // inactive
  CHECK(!u.contains(2.0, {3.5}));
  CHECK(u.contains(2.0, {3.0}));  // boundary counts
}

TEST_CASE("validate_task: well-formed task is clean") {
  CHECK(validate_task(simple_task()).empty());
}

TEST_CASE("validate_task diagnostics") {
  auto t = simple_task();
  SUBCASE("initial outside workspace") {
    t.initial.upper[0] = 6.0;
    auto d = validate_task(t);
    REQUIRE(!d.empty());
  }
  SUBCASE("empty box") {
    t.target.lower[1] = 5.5;
    CHECK(!validate_task(t).empty());
  }
  SUBCASE("nonpositive horizon") {
    t.horizon = 0.0;
    CHECK(!validate_task(t).empty());
  }
  SUBCASE("min width exceeds target width") {
    t.min_width = {0.6, 0.1};
    CHECK(!validate_task(t).empty());
  }
  SUBCASE("degenerate unsafe piece") {
    TimedRegion r;
    r.active_lo = 0.0;
    r.active_hi = 5.0;
    r.lower_poly = {{2.0}, {2.0}};
    r.upper_poly = {{3.0}, {1.9}};  // upper < lower in dim 1
    t.unsafe.pieces.push_back(r);
    CHECK(!validate_task(t).empty());
  }
  SUBCASE("active window outside the horizon") {
    TimedRegion r;
    r.active_lo = 6.0;
    r.active_hi = 7.0;
    r.lower_poly = {{2.0}, {2.0}};
    r.upper_poly = {{3.0}, {3.0}};
    t.unsafe.pieces.push_back(r);
    CHECK(!validate_task(t).empty());
  }
  SUBCASE("require_valid throws with joined diagnostics") {
    t.horizon = -1.0;
    CHECK_THROWS_AS(require_valid(t), Error);
  }
}

TEST_CASE("rectify: circular workspace, area against a Monte-Carlo oracle") {
  Box bounding{{-1.0, -1.0}, {1.0, 1.0}};
  auto disk = [](const std::vector<double>& y) {
    return y[0] * y[0] + y[1] * y[1] <= 1.0;
  };
  auto boxes = workspace_rectify(bounding, disk, 0.1);
  double area = 0.0;
  for (const auto& b : boxes) area += b.width(0) * b.width(1);

  std::mt19937_64 g(99123u);
  std::size_t outside = 0;
  const std::size_t probes = 1'000'000;
  for (std::size_t i = 0; i < probes; ++i) {
    std::vector<double> y{uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0)};
    if (!disk(y)) ++outside;
  }
  double mc_area = 4.0 * double(outside) / double(probes);  // ~ 4 - pi
  CHECK(std::abs(area - mc_area) < 0.10 * mc_area);
  CHECK(mc_area == doctest::Approx(4.0 - 3.14159265358979).epsilon(0.01));
}

TEST_CASE("rectify: L-shaped workspace against a fine membership grid") {
  Box bounding{{0.0, 0.0}, {2.0, 2.0}};
  auto inside = [](const std::vector<double>& y) {
    return !(y[0] >= 1.0 && y[1] >= 1.0);  // [0,2]^2 minus [1,2]^2
  };
  auto boxes = workspace_rectify(bounding, inside, 0.5);
  // the excluded quadrant must be covered, and nothing a full cell beyond it
  auto covered = [&](double x, double ycoord) {
    for (const auto& b : boxes)
      if (x >= b.lower[0] && x <= b.upper[0] && ycoord >= b.lower[1] && ycoord <= b.upper[1])
        return true;
    return false;
  };
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      double x = 2.0 * i / 100.0, y = 2.0 * j / 100.0;
      bool in_quadrant = x > 1.0 && y > 1.0;
      if (in_quadrant) CHECK(covered(x, y));
      if (covered(x, y)) {
        CHECK(x >= 1.0 - 0.5);
        CHECK(y >= 1.0 - 0.5);
      }
    }
  }
}

TEST_CASE("rectify: coarse grid clashing with the initial box throws") {
  Box bounding{{0.0, 0.0}, {2.0, 2.0}};
  Box initial{{0.9, 0.9}, {1.2, 1.2}};  // hugs the excluded quadrant
  auto inside = [](const std::vector<double>& y) {
    return !(y[0] >= 1.0 && y[1] >= 1.0);
  };
  CHECK_THROWS_AS(
      workspace_rectify(bounding, inside, 0.5, &initial, nullptr), Error);
  try {
    workspace_rectify(bounding, inside, 0.5, &initial, nullptr);
  } catch (const Error& e) {
    CHECK(e.code == Errc::ResolutionTooCoarse);
  }
}

TEST_CASE("apply_rectification appends static full-horizon pieces") {
  auto t = simple_task();
  auto inside = [](const std::vector<double>& y) {
    return !(y[0] >= 2.0 && y[0] <= 3.0 && y[1] >= 2.8 && y[1] <= 3.6);
  };
  std::size_t before = t.unsafe.pieces.size();
  apply_rectification(t, inside, 0.25);
  CHECK(t.unsafe.pieces.size() > before);
  for (std::size_t i = before; i < t.unsafe.pieces.size(); ++i) {
    CHECK(t.unsafe.pieces[i].is_static());
    CHECK(t.unsafe.pieces[i].active_lo == 0.0);
    CHECK(t.unsafe.pieces[i].active_hi == t.horizon);
  }
  CHECK(validate_task(t).empty());
}
