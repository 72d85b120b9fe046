#include "geoflow/errors.hpp"
#include "geoflow/regularity.hpp"
#include "support.hpp"

#include <numbers>

using namespace geoflow;
using geoflow::test::vec;

TEST_CASE("second fundamental norm") {
  CHECK(second_fundamental_norm(PointGeometry(make_catalog_surface("flat"), vec({0.1, 0.2}))) == 0.0);
  CHECK(second_fundamental_norm(PointGeometry(make_catalog_surface("hemisphere"), vec({0, 0}))) ==
        doctest::Approx(1.0));
  // |h''| / sqrt(1 + h'^2) with h' = 1, h'' = 2 at x1 = 0.5.
  CHECK(second_fundamental_norm(PointGeometry(make_catalog_surface("vee"), vec({0.5, 0}))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("convergence rule") {
  const RuleOutcome geometric = apply_rule({1.0, 0.25, 0.0625});
  CHECK(geometric.decreasing);
  CHECK(geometric.converging);
  CHECK(geometric.mean_factor == doctest::Approx(4.0));
  const RuleOutcome slow = apply_rule({1.0, 0.9, 0.8});
  CHECK(slow.decreasing);
  CHECK_FALSE(slow.converging);
  CHECK_FALSE(apply_rule({1.0, 0.1, 0.2}).decreasing);
  CHECK(apply_rule({1e-12, 1e-11}).converging);
  CHECK(apply_rule({1e-3, 1e-12, 1e-11}).converging);
  CHECK_FALSE(apply_rule({0.5}).converging);
}

TEST_CASE("small closed forms") {
  CHECK(gronwall_bound(1.0, 1.0, 1.0) == doctest::Approx(std::numbers::e));
  CHECK(gronwall_bound(0.0, 2.0, 5.0) == 2.0);
  CHECK_THROWS_AS(gronwall_bound(-1.0, 1.0, 1.0), ConfigError);
  CHECK(injradius_lower_bound(1.0, 10.0) == doctest::Approx(std::numbers::pi));
  CHECK(injradius_lower_bound(2.0, 10.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(injradius_lower_bound(1.0, 1.0) == 0.5);
  CHECK_THROWS_AS(injradius_lower_bound(0.0, 1.0), ConfigError);
  CHECK(osgood_gamma(Modulus::linear(1.0), 1.0, 1.0, 1.0)(0.1) == doctest::Approx(0.2718281828).epsilon(1e-9));
  CHECK(std::string(verdict_name(Verdict::Holds)) == "holds");
  CHECK(std::string(verdict_name(Verdict::Violated)) == "violated");
  CHECK(std::string(verdict_name(Verdict::Inconclusive)) == "inconclusive");
}

TEST_CASE("Osgood integral check") {
  const double c = 1.5, a = 0.01;
  std::vector<double> ts, equality, faster;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.05 * i;
    ts.push_back(t);
    equality.push_back(a * std::exp(c * t));
    faster.push_back(a * std::exp(1.2 * c * t));
  }
  SUBCASE("equality case sits on the boundary") {
    const OsgoodCheck r = osgood_integral_check(ts, equality, a, Modulus::linear(c));
    CHECK(r.verdict == Verdict::Holds);
    CHECK(std::abs(r.margin) < 1e-10);
  }
  SUBCASE("growth faster than the modulus allows") {
    const OsgoodCheck r = osgood_integral_check(ts, faster, a, Modulus::linear(c));
    CHECK(r.verdict == Verdict::Violated);
    CHECK(r.margin == doctest::Approx(-0.2).epsilon(1e-8));
  }
  SUBCASE("zero initial gap") {
    CHECK(osgood_integral_check(ts, std::vector<double>(ts.size(), 0.0), 0.0, Modulus::linear(c)).verdict ==
          Verdict::Holds);
    CHECK(osgood_integral_check(ts, equality, 0.0, Modulus::linear(c)).verdict == Verdict::Violated);
    CHECK(osgood_integral_check(ts, equality, 0.0, Modulus::power(1.0, 0.5)).verdict == Verdict::Inconclusive);
  }
  CHECK_THROWS_AS(osgood_integral_check(ts, {1.0}, a, Modulus::linear(c)), Error);
  CHECK_THROWS_AS(osgood_integral_check(ts, equality, -1.0, Modulus::linear(c)), ConfigError);
  CHECK_THROWS_AS(osgood_integral_check(ts, equality, a, Modulus::linear(0.0)), QuadratureFailure);
}

TEST_CASE("Hoelder check against an empirical modulus") {
  const Modulus m = Modulus::empirical({0.01, 0.1, 1.0}, {0.05, 0.2, 0.9}, {true, true, false});
  const HolderCheck ok = holder_modulus_check(m, 0.5, 1.0);
  CHECK(ok.holds);
  CHECK(ok.worst_ratio == doctest::Approx(0.2 / std::sqrt(0.1)).epsilon(1e-12));
  CHECK_FALSE(holder_modulus_check(m, 0.5, 0.4).holds);
  CHECK_THROWS_AS(holder_modulus_check(m, 0.0, 1.0), ConfigError);
  ModulusBins bins;
  bins.bins = 4;
  bins.delta_min = 1e-4;
  bins.delta_max = 1.0;
  CHECK(holder_modulus_check({{1e-3, 1e-3}, {0.5, 0.4}}, 1.0, 1.0, bins).holds);
  CHECK_FALSE(holder_modulus_check({{1e-3, 2e-2}}, 1.0, 1.0, bins).holds);
}

TEST_CASE("Jacobi state stays under the Gronwall envelope") {
  for (const char* name : {"hemisphere", "c2alpha", "vee"}) {
    const GraphSurface s = make_catalog_surface(name);
    const GronwallSample g = gronwall_dominance(s, {vec({0.1, -0.1}), vec({0.6, 0.6})}, {vec({0.2, 0}), vec({0, 1})}, 0.4);
    CHECK(g.dominated);
    CHECK(g.sup_ratio <= 1.0);
    CHECK(g.c_bar > 0.0);
  }
}

TEST_CASE("measured parameter pair satisfies the Osgood inequality") {
  const GraphSurface s = make_catalog_surface("c2alpha");
  DependenceOptions o;
  const PairRun run = run_parameter_pair(s, vec({0.05, 0.0}), vec({0.051, 0.0}), o);
  REQUIRE(run.coeff_gap > 0.0);
  const double a = run.c_tilde * o.t1 * run.coeff_gap;
  std::vector<double> ts, ls;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    if (run.state_gaps[k] == 0.0) continue;
    ts.push_back(run.times[k]);
    ls.push_back(run.state_gaps[k]);
  }
  // Shift so that the first retained sample is the origin of time.
  const double t0 = ts.front();
  for (double& t : ts) t -= t0;
  const OsgoodCheck r = osgood_integral_check(ts, ls, a, Modulus::linear(run.c_bar));
  CHECK(r.verdict == Verdict::Holds);
  CHECK(r.margin > 0.0);
}

TEST_CASE("parameter dependence on a C2alpha surface") {
  const GraphSurface s = make_catalog_surface("c2alpha");
  DependenceOptions o;
  o.pairs = 40;
  std::mt19937_64 rng(79);
  const DependenceSample d = parameter_dependence(s, o, rng);
  CHECK(d.pairs.size() == 40);
  CHECK(d.c_bar > 0.0);
  CHECK(d.t1 == o.t1);
  const OsgoodDominance od = osgood_dominance(d);
  CHECK(od.populated > 0);
  CHECK(od.dominated);
  CHECK(od.worst_ratio > 0.0);
  const HolderExperiment he = holder_experiment(d, 0.5);
  CHECK(he.check.holds);
  CHECK(he.c_bound > 0.0);
}

TEST_CASE("smoothing sequence distances shrink") {
  const GraphSurface c21 = make_catalog_surface("c21_cubic");
  SequenceOptions o;
  o.mollify.region = ChartDomain::cube(2, 0.5);
  o.samples_per_axis = 33;
  const SmoothingSequence seq = approximation_sequence(c21, {0.1, 0.05, 0.025}, o);
  REQUIRE(seq.smoothed.size() == 3);
  CHECK(seq.common.upper()[0] <= 0.5);
  for (std::size_t l = 1; l < 3; ++l) {
    CHECK(seq.metric_c1[l] < seq.metric_c1[l - 1]);
    CHECK(seq.pi_c0[l] < seq.pi_c0[l - 1]);
    CHECK(seq.height_c1[l] < seq.height_c1[l - 1]);
  }
  CHECK(seq.pi_bound < 10.0);
  CHECK_THROWS_AS(approximation_sequence(c21, {0.05, 0.1}, o), ConfigError);
  CHECK_THROWS_AS(approximation_sequence(c21, {}, o), ConfigError);

  std::vector<Probe> probes = {{0.2, {vec({0.0, 0.0}), vec({1.0, 0.0})}},
                               {0.2, {vec({-0.1, 0.1}), vec({0.6, 0.8})}},
                               {0.2, {vec({0.48, 0.0}), vec({1.0, 0.0})}}};
  const ConvergenceReport rep = flow_convergence_report(seq, probes);
  CHECK(rep.probes_used == 2);
  CHECK(rep.pruned == std::vector<std::size_t>{2});
  CHECK(rep.flow_c0.size() == 2);
  CHECK(rep.verdict == "converging");
  CHECK_THROWS_AS(flow_convergence_report(seq, {probes[2]}), OutOfDomain);
}

TEST_CASE("Lipschitz quotients on the vee surface") {
  const GraphSurface vee = make_catalog_surface("vee");
  const Probe p{0.3, {vec({-0.1, 0.0}), vec({0.8, 0.5})}};
  FlowOptions f;
  f.method = StepMethod::FixedRK4;
  const QuotientSample q = lipschitz_quotient(vee, p, vec({1e-4, 0, 0, 0}), f);
  CHECK(q.quotient > 0.0);
  CHECK(q.quotient <= std::exp(q.c_bar * 0.3));

  std::mt19937_64 rng(83);
  PerturbationOptions o;
  o.pairs = 30;
  const LipschitzReport r = lipschitz_quotients(vee, {p}, o, rng);
  CHECK(r.quotients.size() == 30);
  CHECK(r.bounded);
  CHECK(r.max_quotient <= r.bound);
  const Probe out{2.0, {vec({0.9, 0.0}), vec({1.0, 0.0})}};
  CHECK_THROWS_AS(lipschitz_quotient(vee, out, vec({1e-4, 0, 0, 0}), f), OutOfDomain);
}
