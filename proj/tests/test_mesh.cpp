#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "qtbasis/mesh.hpp"

using namespace qtb;

TEST_CASE("unit cell splits into the expected two triangles") {
  const TriMesh m = structured_square(1);
  REQUIRE(m.size() == 2);
  const Point c0 = m.centroid(0);
  const Point c1 = m.centroid(1);
  CHECK(c0[0] == Catch::Approx(2.0 / 3.0));
  CHECK(c0[1] == Catch::Approx(1.0 / 3.0));
  CHECK(c1[0] == Catch::Approx(1.0 / 3.0));
  CHECK(c1[1] == Catch::Approx(2.0 / 3.0));
  CHECK(m.area() == Catch::Approx(1.0).margin(1e-14));
  CHECK(m.hmax() == Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("element counts and area partition") {
  const TriMesh m = structured_square(20);
  CHECK(m.size() == 800);
  CHECK(m.area() == Catch::Approx(1.0).margin(1e-14));
  CHECK_NOTHROW(m.validate());

  const TriMesh r = structured_rect(0.0, 300.0, -100.0, 0.0, 10, 10);
  CHECK(r.size() == 200);
  CHECK(r.area() == Catch::Approx(300.0 * 100.0).epsilon(1e-13));
}

TEST_CASE("centroids are distinct and interior") {
  const TriMesh m = structured_rect(0.0, 300.0, -100.0, 0.0, 7, 5);
  std::set<std::pair<double, double>> seen;
  for (std::size_t t = 0; t < m.size(); ++t) {
    const Point c = m.centroid(t);
    CHECK(c[0] > 0.0);
    CHECK(c[0] < 300.0);
    CHECK(c[1] > -100.0);
    CHECK(c[1] < 0.0);
    seen.insert({c[0], c[1]});
  }
  CHECK(seen.size() == m.size());
}

TEST_CASE("seam side flags follow the centroid") {
  const TriMesh m = structured_rect(140.0, 160.0, -60.0, -40.0, 2, 1);
  int right = 0;
  for (std::size_t t = 0; t < m.size(); ++t)
    if (right_of_seam(m, t, 150.0)) ++right;
  CHECK(right == 2);
}

TEST_CASE("invalid construction arguments") {
  CHECK_THROWS_AS(structured_square(0), std::invalid_argument);
  CHECK_THROWS_AS(structured_rect(0.0, 0.0, 0.0, 1.0, 2, 2), std::invalid_argument);
  TriMesh degenerate;
  degenerate.vertices = {{0, 0}, {1, 0}, {2, 0}};
  degenerate.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
}

TEST_CASE("JSON round trip") {
  const TriMesh m = structured_square(3);
  const TriMesh back = mesh_from_json(json::parse(mesh_to_json(m).dump()));
  REQUIRE(back.size() == m.size());
  CHECK(back.vertices == m.vertices);
  CHECK(back.triangles == m.triangles);
}
