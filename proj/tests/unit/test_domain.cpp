#include "geoflow/errors.hpp"
#include "geoflow/parallel.hpp"
#include "support.hpp"

#include <atomic>

using namespace geoflow;
using geoflow::test::vec;

TEST_CASE("box membership is closed") {
  const ChartDomain d = ChartDomain::cube(2, 1.0);
  CHECK(d.contains(vec({1.0, -1.0})));
  CHECK(d.contains(vec({0.0, 0.0})));
  CHECK_FALSE(d.contains(vec({1.0 + 1e-12, 0.0})));
  CHECK_FALSE(d.contains(vec({0.0, 0.0, 0.0})));
  CHECK_FALSE(d.contains(vec({std::nan(""), 0.0})));
}

TEST_CASE("ball-restricted domain") {
  const ChartDomain d(vec({-0.8, -0.8}), vec({0.8, 0.8}), 0.8);
  CHECK(d.contains(vec({0.8, 0.0})));
  CHECK_FALSE(d.contains(vec({0.6, 0.6})));
  CHECK(d.inradius() == doctest::Approx(0.8));
  const ChartDomain s = d.shrunk(0.1);
  CHECK(*s.radius() == doctest::Approx(0.7));
  CHECK_FALSE(s.contains(vec({0.75, 0.0})));
}

TEST_CASE("inradius, widths and center") {
  const ChartDomain d(vec({-1.0, 0.0}), vec({1.0, 0.5}));
  CHECK(d.width(0) == 2.0);
  CHECK(d.min_width() == 0.5);
  CHECK(d.inradius() == 0.25);
  CHECK(d.center() == vec({0.0, 0.25}));
}

TEST_CASE("erosion and intersection") {
  const ChartDomain d = ChartDomain::cube(2, 1.0);
  CHECK(d.shrunk(0.25) == ChartDomain::cube(2, 0.75));
  CHECK_THROWS_AS(d.shrunk(1.0), DomainTooSmall);
  const ChartDomain other(vec({0.0, -2.0}), vec({2.0, 0.5}), 3.0);
  const ChartDomain i = d.intersect(other);
  CHECK(i.lower() == vec({0.0, -1.0}));
  CHECK(i.upper() == vec({1.0, 0.5}));
  CHECK(*i.radius() == 3.0);
  CHECK_THROWS_AS(d.intersect(ChartDomain(vec({2.0, 2.0}), vec({3.0, 3.0}))), DomainTooSmall);
}

TEST_CASE("invalid boxes") {
  CHECK_THROWS_AS(ChartDomain(vec({0.0}), vec({0.0})), DomainTooSmall);
  CHECK_THROWS_AS(ChartDomain(vec({0.0}), vec({1.0, 2.0})), Error);
  CHECK_THROWS_AS(ChartDomain(vec({0.0}), vec({1.0}), 0.0), DomainTooSmall);
}

TEST_CASE("regularity tags round-trip and order") {
  for (const char* t : {"C11", "C2", "C3", "smooth"}) CHECK(Regularity::parse(t).tag() == t);
  const Regularity h = Regularity::parse("c2ALPHA", 0.5);
  CHECK(h.tag() == "C2alpha");
  CHECK(h.alpha == 0.5);
  CHECK_THROWS_AS(Regularity::parse("C2alpha", 0.0), ConfigError);
  CHECK_THROWS_AS(Regularity::parse("C4"), ConfigError);
  CHECK(h.at_least(RegularityClass::C2));
  CHECK_FALSE(h.at_least(RegularityClass::C3));
  CHECK(Regularity::parse("smooth").at_least(RegularityClass::C3));
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  std::atomic<int> count{0};
  CHECK_THROWS_AS(parallel_for(50,
                               [&](std::size_t i) {
                                 ++count;
                                 if (i == 7) throw OutOfDomain("boom");
                               }),
                  OutOfDomain);
  CHECK(thread_budget() >= 1);
}
