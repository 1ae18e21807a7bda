#include "clonecover/ideals.hpp"

#include <algorithm>

namespace clonecover {

WidthCertificate width(const PointSet& points) {
  WidthCertificate cert;
  for (const auto& p : points) ++cert.per_line_counts[p.y];
  for (auto& [line, count] : cert.per_line_counts) {
    if (count > cert.width) {
      cert.width = count;
      cert.witness_line = line;
    }
  }
  return cert;
}

Nat tuple_set_width(const TupleSet& tuples) {
  if (tuples.empty()) return 0;
  const IndexSet& idx = tuples.begin()->index_set();
  Nat best = 0;
  for (const auto& u : tuples)
    if (u.index_set() != idx) throw StructuralError("tuple_set_width over mixed index sets");
  for (Index i : idx) best = std::max(best, width(project(tuples, i)).width);
  return best;
}

BoundCertificate least_bound(const TupleSet& tuples) {
  BoundCertificate cert;
  if (tuples.empty()) return cert;
  const IndexSet& idx = tuples.begin()->index_set();
  for (const auto& u : tuples)
    if (u.index_set() != idx) throw StructuralError("least_bound over mixed index sets");
  if (idx.empty()) return cert;
  for (const auto& u : tuples) cert.k = std::max(cert.k, u.min_y() + 1);
  return cert;
}

KTable k_table(const PointFn& t, Nat theta) {
  auto report = classify_preimages(t, theta);
  for (auto& [value, cls] : report.per_value) {
    if (cls.verdict == Verdict::Wasteful)
      throw ContractViolation("k_table: preimage of " + to_string(value) + " has bound " +
                              std::to_string(cls.bound) + " > theta " + std::to_string(theta));
  }
  std::map<Nat, TupleSet> per_line;
  for (auto& [u, v] : t) per_line[v.y].insert(u);
  KTable table;
  for (auto& [line, pre] : per_line) table.emplace(line, least_bound(pre).k);
  return table;
}

HereditaryReport is_hereditarily_thrifty(const PointFn& q, Nat theta) {
  HereditaryReport report;
  report.theta = theta;
  for (const auto& s : subsets_by_size(q.arity())) {
    for (const auto& c : fiber_keys(q, s)) {
      auto fib = classify_preimages(fiber(q, s, c), theta);
      if (!fib.all_thrifty() && report.pass) {
        report.pass = false;
        for (auto& [value, cls] : fib.per_value) {
          if (cls.verdict == Verdict::Wasteful) {
            report.failure = HereditaryFailure{s, c, value, cls.bound};
            break;
          }
        }
      }
      report.fibers.emplace(FiberKey{s, c}, std::move(fib));
    }
  }
  return report;
}

namespace {

IdealVerdict image_width_check(IdealKind kind, const PointFn& p,
                               const std::vector<TupleSet>& test_sets, Nat bound) {
  IdealVerdict verdict;
  verdict.kind = kind;
  verdict.test_family = test_sets;
  verdict.bound_claimed = bound;
  for (const auto& a : test_sets) {
    PointSet image;
    for (const auto& u : a) {
      auto v = p(u);
      if (!v) throw ContractViolation("test set tuple " + u.to_string() + " outside dom(p)");
      image.insert(*v);
    }
    Nat w = width(image).width;
    verdict.image_widths.push_back(w);
    if (w > bound) verdict.pass = false;
  }
  return verdict;
}

}  // namespace

IdealVerdict ci_fragment_check(const PointFn& p, const std::vector<TupleSet>& test_sets, Nat bound) {
  return image_width_check(IdealKind::CIFragment, p, test_sets, bound);
}

IdealVerdict cj_fragment_check(const PointFn& p, const std::vector<TupleSet>& test_sets, Nat bound) {
  return image_width_check(IdealKind::CJFragment, p, test_sets, bound);
}

std::vector<TupleSet> width1_slices(const TupleSet& tuples) {
  std::vector<TupleSet> slices;
  // Per slice and component: the point occupying each line.
  std::vector<std::vector<std::map<Nat, Point>>> occupied;
  for (const auto& u : tuples) {
    const auto& pts = u.entries();
    std::size_t r = 0;
    for (; r < slices.size(); ++r) {
      bool fits = true;
      for (std::size_t i = 0; i < pts.size() && fits; ++i) {
        auto it = occupied[r][i].find(pts[i].y);
        fits = it == occupied[r][i].end() || it->second == pts[i];
      }
      if (fits) break;
    }
    if (r == slices.size()) {
      slices.emplace_back();
      occupied.emplace_back(pts.size());
    }
    slices[r].insert(u);
    for (std::size_t i = 0; i < pts.size(); ++i) occupied[r][i].emplace(pts[i].y, pts[i]);
  }
  return slices;
}

std::vector<PointSet> width1_slices(const PointSet& points) {
  std::vector<PointSet> slices;
  std::map<Nat, std::size_t> seen;
  for (const auto& p : points) {  // points arrive in (x, y) order
    std::size_t r = seen[p.y]++;
    if (r == slices.size()) slices.emplace_back();
    slices[r].insert(p);
  }
  return slices;
}

std::string to_string(CiCertificate::Kind kind) {
  switch (kind) {
    case CiCertificate::Kind::Projection: return "projection";
    case CiCertificate::Kind::Width1Range: return "width1-range";
    case CiCertificate::Kind::ProjectionUnion: return "projection-union";
    case CiCertificate::Kind::MainLemma: return "main-lemma";
  }
  return "unknown";
}

bool check_certificate(const PointFn& p, const CiCertificate& cert) {
  using K = CiCertificate::Kind;
  switch (cert.kind) {
    case K::Projection:
      if (!p.arity().contains(cert.projection)) return false;
      return std::all_of(p.begin(), p.end(),
                         [&](const auto& e) { return e.second == e.first.at(cert.projection); });
    case K::Width1Range: return width(p.range()).width <= 1;
    case K::ProjectionUnion: {
      if (!p.arity().contains(cert.projection)) return false;
      PointSet rest;
      for (auto& [u, v] : p)
        if (v != u.at(cert.projection)) rest.insert(v);
      return width(rest).width <= 1;
    }
    case K::MainLemma: return true;
  }
  return false;
}

std::optional<CiCertificate> certify_ci(const PointFn& p, Index preferred) {
  using K = CiCertificate::Kind;
  std::vector<Index> order;
  if (p.arity().contains(preferred)) order.push_back(preferred);
  for (Index i : p.arity())
    if (i != preferred) order.push_back(i);
  for (Index i : order) {
    CiCertificate c{K::Projection, i, {}};
    if (check_certificate(p, c)) return c;
  }
  if (CiCertificate c{K::Width1Range, 0, {}}; check_certificate(p, c)) return c;
  for (Index i : order) {
    CiCertificate c{K::ProjectionUnion, i, {}};
    if (check_certificate(p, c)) return c;
  }
  return std::nullopt;
}

}  // namespace clonecover
