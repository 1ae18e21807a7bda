#include <doctest.h>

#include "clonecover/term.hpp"
#include "support.hpp"

using namespace clonecover;
using testkit::random_point_fn;
using testkit::random_tuple_fn;

namespace {

MTuple tup(std::initializer_list<Point> pts) { return MTuple(std::vector<Point>(pts)); }

PointFn unary(std::initializer_list<std::pair<Point, Point>> entries) {
  PointFn p(IndexSet{1});
  for (auto& [u, v] : entries) p.insert(tup({u}), v);
  return p;
}

}  // namespace

TEST_SUITE("core-algebra") {
  TEST_CASE("index sets and tuples") {
    CHECK(IndexSet{3, 1, 3}.elements() == std::vector<Index>{1, 3});
    CHECK_THROWS_AS(IndexSet{0}, StructuralError);
    CHECK(IndexSet{1, 2}.minus(IndexSet{2}) == IndexSet{1});
    CHECK(IndexSet{1}.united(IndexSet{3}) == IndexSet{1, 3});

    auto subsets = subsets_by_size(IndexSet::range(3));
    REQUIRE(subsets.size() == 8);
    CHECK(subsets[0].empty());
    CHECK(subsets[1] == IndexSet{1});
    CHECK(subsets[3] == IndexSet{3});
    CHECK(subsets[4] == IndexSet{1, 2});
    CHECK(subsets[6] == IndexSet{2, 3});
    CHECK(subsets[7] == IndexSet{1, 2, 3});

    MTuple u = tup({{1, 2}, {3, 4}});
    CHECK(u.at(2) == Point{3, 4});
    CHECK(u.min_y() == 2);
    CHECK(u.restricted(IndexSet{2}) == MTuple(IndexSet{2}, {Point{3, 4}}));
    CHECK_THROWS_AS(u.joined(MTuple(IndexSet{1}, {Point{0, 0}})), StructuralError);
    CHECK(to_string(Point{1, 2}) == "(1|2)");
  }

  TEST_CASE("apply") {
    PointFn p = unary({{{0, 0}, {5, 7}}});
    CHECK(p(tup({{0, 0}})) == Point{5, 7});
    CHECK_FALSE(p(tup({{1, 1}})));
    PointFn id = unary({{{2, 3}, {2, 3}}});
    CHECK(id(tup({{2, 3}})) == Point{2, 3});
    CHECK_THROWS_AS(p(tup({{0, 0}, {0, 0}})), StructuralError);
  }

  TEST_CASE("insert collisions") {
    PointFn p(IndexSet{1});
    p.insert(tup({{0, 0}}), {1, 1});
    p.insert(tup({{0, 0}}), {1, 1});
    CHECK(p.size() == 1);
    CHECK_THROWS_AS(p.insert(tup({{0, 0}}), {2, 2}), DomainCollision);
    CHECK_THROWS_AS(p.insert(tup({{0, 0}, {1, 1}}), {2, 2}), StructuralError);
  }

  TEST_CASE("compose") {
    TupleFn inner(IndexSet{1}, IndexSet{1});
    inner.insert(tup({{0, 0}}), tup({{1, 1}}));
    inner.insert(tup({{0, 1}}), tup({{9, 9}}));
    PointFn outer = unary({{{1, 1}, {4, 4}}});
    PointFn out = compose(outer, inner);
    CHECK(out.size() == 1);
    CHECK(out(tup({{0, 0}})) == Point{4, 4});
    CHECK_FALSE(out.defined_at(tup({{0, 1}})));
    CHECK(compose(outer, identity_on(IndexSet{1}, outer.domain())) == outer);
    CHECK_THROWS_AS(compose(PointFn(IndexSet{1, 2}), inner), StructuralError);
  }

  TEST_CASE("disjoint union") {
    PointFn a = unary({{{0, 0}, {1, 1}}});
    PointFn b = unary({{{0, 1}, {2, 2}}});
    CHECK(disjoint_union(std::vector<PointFn>{a, b}).size() == 2);
    CHECK_THROWS_AS(disjoint_union(std::vector<PointFn>{a, a}), DomainCollision);
    CHECK(disjoint_union(std::vector<PointFn>{PointFn(IndexSet{1}), a}) == a);
  }

  TEST_CASE("shrink_inner") {
    TupleFn h_prime(IndexSet{1}, IndexSet{1});
    h_prime.insert(tup({{0, 0}}), tup({{1, 1}}));
    h_prime.insert(tup({{0, 1}}), tup({{1, 1}}));
    h_prime.insert(tup({{0, 2}}), tup({{5, 5}}));
    PointFn g_prime = unary({{{1, 1}, {7, 7}}});

    PointFn g = compose(g_prime, h_prime);
    CHECK(shrink_inner(g, g_prime, h_prime) == h_prime.restricted(g.domain()));

    PointFn smaller = unary({{{0, 0}, {7, 7}}});
    TupleFn h = shrink_inner(smaller, g_prime, h_prime);
    CHECK(h.size() == 1);
    CHECK(compose(g_prime, h) == smaller);

    PointFn bad = unary({{{0, 0}, {8, 8}}});
    CHECK_THROWS_AS(shrink_inner(bad, g_prime, h_prime), ContractViolation);
  }

  TEST_CASE("bar_extend") {
    TupleSet universe{tup({{3, 3}})};
    PointFn e = bar_extend(PointFn(IndexSet{1}), universe);
    CHECK(e.size() == 1);
    CHECK(e(tup({{3, 3}})) == kOrigin);

    PointFn p = unary({{{3, 3}, {1, 2}}});
    CHECK(bar_extend(p, universe) == p);
    universe.insert(tup({{4, 4}}));
    PointFn q = bar_extend(p, universe);
    CHECK(q.size() == 2);
    CHECK(q(tup({{4, 4}})) == kOrigin);
    CHECK_THROWS_AS(bar_extend(unary({{{9, 9}, {0, 0}}}), universe), ContractViolation);
  }

  TEST_CASE("star, hash and fiber") {
    TupleSet a{MTuple(IndexSet{2}, {Point{3, 4}})};
    CHECK(star_set(MTuple(), a) == a);
    MTuple c(IndexSet{1}, {Point{0, 0}});
    TupleSet ca = star_set(c, a);
    REQUIRE(ca.size() == 1);
    CHECK(*ca.begin() == tup({{0, 0}, {3, 4}}));

    PointFn g(IndexSet{2});
    g.insert(MTuple(IndexSet{2}, {Point{3, 4}}), {9, 9});
    CHECK(star_fn(MTuple(), g) == g);
    PointFn cg = star_fn(c, g);
    CHECK(cg(tup({{0, 0}, {3, 4}})) == Point{9, 9});
    CHECK(fiber(cg, IndexSet{1}, c) == g);
    CHECK(fiber(cg, IndexSet{1}, MTuple(IndexSet{1}, {Point{1, 1}})).empty());
    CHECK(fiber(cg, IndexSet{}, MTuple()) == cg);

    TupleFn id = identity_on(IndexSet{2}, a);
    TupleFn cid = hash_fn(c, id);
    CHECK(cid == identity_on(IndexSet{1, 2}, ca));
    CHECK_THROWS_AS(hash_fn(c, TupleFn(IndexSet{2}, IndexSet{1})), StructuralError);
  }

  TEST_CASE("terms evaluate like graph composition") {
    TermBundle b;
    b.arity = 2;
    b.term = Term::projection(1);
    CHECK(eval_term(b, tup({{3, 4}, {5, 6}})) == Point{3, 4});

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      PointFn inner = random_point_fn(rng, IndexSet{1, 2}, 20, 4, 4);
      PointFn outer = random_point_fn(rng, IndexSet{1}, 12, 4, 9);
      AtomEnv env{{"inner", {inner, AtomClass::CIAtom, CiCertificate{}}},
                  {"outer", {outer, AtomClass::WitnessF, std::nullopt}}};
      TermPtr t = Term::compose(Term::atom("outer"), {Term::atom("inner")});
      TupleFn as_tuples(IndexSet{1, 2}, IndexSet{1});
      for (auto& [u, v] : inner) as_tuples.insert(u, MTuple({v}));
      PointFn expected = compose(outer, as_tuples);
      for (Nat x = 0; x < 4; ++x)
        for (Nat y = 0; y < 4; ++y) {
          MTuple u = tup({{x, y}, {y, x}});
          CHECK(eval_term(*t, env, u) == expected(u));
        }
    }
  }

  TEST_CASE("term validation") {
    TermBundle b;
    b.arity = 1;
    b.atoms.emplace("p", AtomEntry{unary({{{0, 0}, {0, 0}}}), AtomClass::CIAtom, std::nullopt});
    b.term = Term::compose(Term::atom("p"), {Term::projection(1)});
    CHECK_THROWS_AS(validate(b), StructuralError);  // no certificate
    b.atoms.at("p").cert = CiCertificate{};
    CHECK_NOTHROW(validate(b));
    b.term = Term::compose(Term::atom("p"), {Term::projection(2)});
    CHECK_THROWS_AS(validate(b), StructuralError);
    b.term = Term::compose(Term::atom("missing"), {Term::projection(1)});
    CHECK_THROWS_AS(validate(b), StructuralError);
    b.term = Term::compose(Term::atom("p"), {Term::projection(1), Term::projection(1)});
    CHECK_THROWS_AS(validate(b), StructuralError);
  }

  TEST_CASE("term statistics count shared subterms once per occurrence") {
    TermPtr leaf = Term::compose(Term::atom("f"), {Term::projection(1)});
    TermBundle b;
    b.arity = 1;
    b.atoms.emplace("f", AtomEntry{unary({}), AtomClass::WitnessF, std::nullopt});
    b.atoms.emplace("g", AtomEntry{PointFn(IndexSet{1, 2}), AtomClass::CIAtom, CiCertificate{}});
    b.term = Term::compose(Term::atom("g"), {leaf, leaf});
    TermStats s = term_stats(b);
    CHECK(s.nodes == 8);
    CHECK(s.depth == 3);
    CHECK(s.projections == 2);
    CHECK(s.witness_atoms == 2);
    CHECK(s.ci_atoms == 1);
    CHECK(s.distinct_atoms == 2);
  }
}

// Property tests for the operator identities, union composition and the
// inner-map shrinking. Each runs on random small graphs.
TEST_SUITE("core-algebra laws") {
  TEST_CASE("c*(f o g) = (c*f) o (c#g)") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
      const Index m = 1 + rng.below(3);
      IndexSet s = testkit::random_subset(rng, m);
      IndexSet t = IndexSet::range(m).minus(s);
      MTuple c = testkit::random_tuple(rng, s, 4);
      TupleFn g = random_tuple_fn(rng, t, t, 1 + rng.below(15), 3);
      PointFn f = random_point_fn(rng, t, 1 + rng.below(15), 3, 5);
      CHECK(star_fn(c, compose(f, g)) == compose(star_fn(c, f), hash_fn(c, g)));
    }
  }

  TEST_CASE("(c*g) fiber at c = g") {
    Rng rng(102);
    for (int trial = 0; trial < 300; ++trial) {
      const Index m = 1 + rng.below(3);
      IndexSet s = testkit::random_subset(rng, m);
      IndexSet t = IndexSet::range(m).minus(s);
      MTuple c = testkit::random_tuple(rng, s, 4);
      PointFn g = random_point_fn(rng, t, rng.below(20), 4, 5);
      CHECK(fiber(star_fn(c, g), s, c) == g);
    }
  }

  TEST_CASE("g = union over c of c*(fiber of g at c)") {
    Rng rng(103);
    for (int trial = 0; trial < 300; ++trial) {
      const Index m = 1 + rng.below(3);
      IndexSet s = testkit::random_subset(rng, m);
      PointFn g = random_point_fn(rng, IndexSet::range(m), rng.below(30), 3, 5);
      std::vector<PointFn> parts;
      for (const auto& c : fiber_keys(g, s)) parts.push_back(star_fn(c, fiber(g, s, c)));
      PointFn rebuilt = parts.empty() ? PointFn(g.arity()) : disjoint_union(parts);
      CHECK(rebuilt == g);
    }
  }

  TEST_CASE("union of compositions is inside the composition of unions") {
    Rng rng(104);
    for (int trial = 0; trial < 300; ++trial) {
      const Index m = 1 + rng.below(2);
      const IndexSet idx = IndexSet::range(m);
      // Disjoint domains come from slicing the tuple space by the first
      // coordinate's line.
      const std::size_t n = 1 + rng.below(4);
      std::vector<PointFn> fs;
      std::vector<TupleFn> gs;
      std::vector<PointFn> composed;
      for (std::size_t k = 0; k < n; ++k) {
        TupleFn g(idx, idx);
        PointFn f(idx);
        for (int e = 0; e < 6; ++e) {
          MTuple u = testkit::random_tuple(rng, idx, 3);
          std::vector<Point> pts = u.entries();
          pts[0].y = k;
          MTuple gu(idx, pts);
          MTuple v = testkit::random_tuple(rng, idx, 3);
          std::vector<Point> vp = v.entries();
          vp[0].y = 10 + k;
          MTuple fv(idx, vp);
          if (!g.defined_at(gu)) g.insert(gu, rng.chance(3, 4) ? fv : testkit::random_tuple(rng, idx, 3));
          if (!f.defined_at(fv)) f.insert(fv, testkit::random_point(rng, 5));
        }
        fs.push_back(f);
        gs.push_back(g);
        composed.push_back(compose(f, g));
      }
      PointFn lhs = disjoint_union(composed);
      PointFn rhs = compose(disjoint_union(fs), disjoint_union(gs));
      CHECK(lhs.subset_of(rhs));
    }
  }

  TEST_CASE("g inside g' o h' shrinks to h inside h' with g = g' o h") {
    Rng rng(105);
    for (int trial = 0; trial < 300; ++trial) {
      const Index m = 1 + rng.below(3);
      const IndexSet idx = IndexSet::range(m);
      TupleFn h_prime = random_tuple_fn(rng, idx, idx, 1 + rng.below(20), 3);
      PointFn g_prime = random_point_fn(rng, idx, 1 + rng.below(20), 3, 4);
      PointFn full = compose(g_prime, h_prime);
      TupleSet keep;
      for (auto& [u, v] : full)
        if (rng.chance(1, 2)) keep.insert(u);
      PointFn g = full.restricted(keep);
      TupleFn h = shrink_inner(g, g_prime, h_prime);
      CHECK(h.subset_of(h_prime));
      CHECK(compose(g_prime, h) == g);
      CHECK(h.size() == g.size());
    }
  }
}
