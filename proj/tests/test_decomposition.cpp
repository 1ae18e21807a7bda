#include <doctest.h>

#include "clonecover/instance.hpp"
#include "support.hpp"

using namespace clonecover;

namespace {

MTuple tup(std::initializer_list<Point> pts) { return MTuple(std::vector<Point>(pts)); }

bool failed(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return !c.pass;
  FAIL("no check named " << name);
  return false;
}

std::string detail(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.detail;
  return {};
}

// One wasteful value per key c of index 1: a high tuple plus two low ones.
PointFn wasteful_2ary() {
  PointFn g(IndexSet{1, 2});
  for (Nat c = 0; c < 3; ++c) {
    Point key{c, 0};
    Point d{c, 40};
    g.insert(tup({key, {0, 10}}), d);
    g.insert(tup({key, {1, 2 * c}}), d);
    g.insert(tup({key, {2, 2 * c + 1}}), d);
    g.insert(tup({key, {c, 0}}), {c, 50});  // thrifty value
  }
  return g;
}

}  // namespace

TEST_SUITE("decomposition") {
  TEST_CASE("selection picks one fresh tuple per value") {
    PointFn w(IndexSet{1, 2});
    const Point d{0, 7};
    w.insert(tup({{0, 1}, {0, 1}}), d);
    w.insert(tup({{0, 2}, {0, 2}}), d);
    w.insert(tup({{0, 9}, {0, 9}}), d);
    std::map<MTuple, PointFn> family{{MTuple(), w}};
    auto r = countable_selection(family, 3);
    REQUIRE(r.a.size() == 1);
    CHECK(*r.a.begin() == tup({{0, 2}, {0, 2}}));
    const PointFn& gp = r.g_primes.at(MTuple());
    CHECK(gp.size() == 1);
    CHECK(is_injective(gp));
    const TupleFn& h = r.h_parts.at(MTuple());
    CHECK(h.range() == std::set<MTuple>{tup({{0, 2}, {0, 2}})});
    CHECK(compose(gp, h) == w);

    auto smallest = countable_selection(family, 3, AllocatorPolicy::SmallestMinY);
    CHECK(*smallest.a.begin() == tup({{0, 1}, {0, 1}}));
  }

  TEST_CASE("selection edge cases") {
    auto empty = countable_selection({}, 3);
    CHECK(empty.a.empty());
    CHECK(empty.chosen.empty());

    // Both values can only use a tuple on line 1.
    PointFn w(IndexSet{1, 2});
    w.insert(tup({{0, 1}, {0, 1}}), {0, 7});
    w.insert(tup({{5, 5}, {5, 5}}), {0, 7});
    w.insert(tup({{1, 1}, {1, 1}}), {1, 7});
    w.insert(tup({{6, 5}, {6, 5}}), {1, 7});
    CHECK_THROWS_AS(countable_selection({{MTuple(), w}}, 3), AdmissibilityError);

    PointFn thrifty(IndexSet{1, 2});
    thrifty.insert(tup({{0, 0}, {0, 0}}), {0, 7});
    CHECK_THROWS_AS(countable_selection({{MTuple(), thrifty}}, 3), ContractViolation);
  }

  TEST_CASE("strong decomposition") {
    PointFn thrifty(IndexSet{1, 2});
    for (Nat i = 0; i < 5; ++i) thrifty.insert(tup({{i, 0}, {i, 1}}), {i % 2, 3});
    for (const auto& s : subsets_by_size(thrifty.arity())) {
      auto d = strong_decompose(thrifty, s, 2);
      CHECK(d.g_prime == thrifty);
      CHECK(d.h == identity_on(thrifty.arity(), thrifty.domain()));
    }

    PointFn g = wasteful_2ary();
    const Nat theta = 6;
    auto whole = strong_decompose(g, IndexSet{}, theta);
    CHECK(classify_preimages(whole.g_prime, theta).all_thrifty());

    auto d = strong_decompose(g, IndexSet{1}, theta);
    CHECK(d.g_prime.subset_of(g));
    for (auto& [u, v] : g) {
      auto mid = d.h(u);
      REQUIRE(mid);
      CHECK(d.g_prime(*mid) == v);
      CHECK(mid->at(1) == u.at(1));
    }
    for (const auto& c : fiber_keys(d.g_prime, IndexSet{1}))
      CHECK(classify_preimages(fiber(d.g_prime, IndexSet{1}, c), theta).all_thrifty());
    for (auto& [i, cert] : d.h_certificates) CHECK(check_certificate(component(d.h, i), cert));
    CHECK(d.h_certificates.at(1).kind == CiCertificate::Kind::Projection);

    CHECK_THROWS_AS(strong_decompose(g, IndexSet{3}, theta), StructuralError);
  }

  TEST_CASE("hereditary decomposition") {
    PointFn injective(IndexSet{1});
    for (Nat i = 0; i < 6; ++i) injective.insert(tup({{i, 0}}), {i, 1});
    auto trivial = hereditary_decompose(injective, 1);
    CHECK(trivial.stages.size() == 2);
    CHECK(trivial.g_prime == injective);
    CHECK(trivial.h == identity_on(IndexSet{1}, injective.domain()));

    PointFn g = wasteful_2ary();
    const Nat theta = 6;
    auto trace = hereditary_decompose(g, theta);
    CHECK(trace.stages.size() == 4);
    CHECK(compose(trace.g_prime, trace.h) == g);
    CHECK(is_hereditarily_thrifty(trace.g_prime, theta).pass);
    // Thriftiness gained at stage i survives to the end.
    for (const auto& st : trace.stages)
      for (const auto& c : fiber_keys(trace.g_prime, st.s))
        CHECK(classify_preimages(fiber(trace.g_prime, st.s, c), theta).all_thrifty());
    CHECK(verify_decomposition(g, trace).pass());

    PointFn empty(IndexSet{1, 2});
    auto none = hereditary_decompose(empty, theta);
    CHECK(none.g_prime.empty());
    CHECK(verify_decomposition(empty, none).pass());
  }

  TEST_CASE("random admissible instances decompose pointwise") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      GenOptions o;
      o.m = 2;
      o.seed = seed;
      Instance inst = generate_instance(o);
      auto trace = hereditary_decompose(inst.g, inst.theta);
      for (auto& [u, v] : inst.g) {
        auto mid = trace.h(u);
        REQUIRE(mid);
        CHECK(trace.g_prime(*mid) == v);
      }
      CHECK(trace.g_prime.subset_of(inst.g));
    }
  }

  TEST_CASE("verification catches tampering") {
    PointFn g = wasteful_2ary();
    auto trace = hereditary_decompose(g, 6);
    REQUIRE(verify_decomposition(g, trace).pass());

    // Move one h entry of the stage that actually selected tuples.
    std::size_t stage = 0;
    while (stage < trace.stages.size() && trace.stages[stage].selection.a.empty()) ++stage;
    REQUIRE(stage < trace.stages.size());
    auto tampered = trace;
    auto& h = tampered.stages[stage].h;
    const MTuple target = h.begin()->first;
    TupleFn moved(h.arity(), h.codomain());
    for (auto& [u, v] : h) moved.insert(u, u == target ? tup({{99, 99}, {99, 99}}) : v);
    h = moved;
    auto report = verify_decomposition(g, tampered);
    CHECK_FALSE(report.pass());
    const std::string tag = "stage" + std::to_string(stage + 1) + trace.stages[stage].s.to_string();
    CHECK(failed(report, tag + ".recompose"));
    CHECK(detail(report, tag + ".recompose").find(target.to_string()) != std::string::npos);

    auto wide = trace;
    auto& a = wide.stages[stage].selection.a;
    std::vector<Point> extra = a.begin()->entries();
    extra[0].x += 1000;
    a.insert(MTuple(a.begin()->index_set(), std::move(extra)));
    auto wide_report = verify_decomposition(g, wide);
    CHECK(failed(wide_report, tag + ".selection.width"));
  }
}
