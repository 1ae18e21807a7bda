#include "clonecover/decomposition.hpp"

#include <algorithm>
#include <set>

namespace clonecover {

SelectionResult countable_selection(const std::map<MTuple, PointFn>& wasteful_family, Nat theta,
                                    AllocatorPolicy policy) {
  SelectionResult result;
  result.wasteful = wasteful_family;
  std::set<Nat> used_y;

  for (const auto& [c, w] : wasteful_family) {
    auto report = classify_preimages(w, theta);
    std::vector<Point> values;
    for (auto& [value, cls] : report.per_value) {
      if (cls.verdict != Verdict::Wasteful)
        throw ContractViolation("selection input at " + c.to_string() + " is thrifty at value " +
                                to_string(value));
      values.push_back(value);
    }
    std::sort(values.begin(), values.end(), LineOrder{});

    PointFn g_prime(w.arity());
    for (const auto& d : values) {
      const TupleSet preimage = w.preimage(d);
      const MTuple* best = nullptr;
      for (const auto& z : preimage) {
        if (least_bound({z}).k > theta) continue;
        bool fresh = std::none_of(z.entries().begin(), z.entries().end(),
                                  [&](const Point& p) { return used_y.count(p.y) != 0; });
        if (!fresh) continue;
        if (!best) {
          best = &z;
          continue;
        }
        bool better = policy == AllocatorPolicy::LargestMinY ? z.min_y() > best->min_y()
                                                             : z.min_y() < best->min_y();
        if (better) best = &z;
      }
      if (!best)
        throw AdmissibilityError("no fresh tuple bounded by theta in the preimage of " +
                                 to_string(d) + " over fiber " + c.to_string());
      for (const auto& p : best->entries()) used_y.insert(p.y);
      result.chosen.emplace(ChoiceKey{c, d}, *best);
      result.a.insert(*best);
      g_prime.insert(*best, d);
    }

    TupleFn h_c(w.arity(), w.arity());
    for (auto& [z, d] : w) h_c.insert(z, result.chosen.at(ChoiceKey{c, d}));
    result.g_primes.emplace(c, std::move(g_prime));
    result.h_parts.emplace(c, std::move(h_c));
  }
  return result;
}

StrongDecomposition strong_decompose(const PointFn& g, const IndexSet& s, Nat theta,
                                     AllocatorPolicy policy) {
  if (!s.subset_of(g.arity()))
    throw StructuralError("strong_decompose: " + s.to_string() + " not inside " +
                          g.arity().to_string());
  const IndexSet t = g.arity().minus(s);

  std::map<MTuple, PointFn> thrifty_parts;
  std::map<MTuple, PointFn> wasteful_parts;
  for (const auto& c : fiber_keys(g, s)) {
    auto [t_c, w_c] = split_thrifty(fiber(g, s, c), theta);
    thrifty_parts.emplace(c, std::move(t_c));
    if (!w_c.empty()) wasteful_parts.emplace(c, std::move(w_c));
  }

  StrongDecomposition out;
  out.s = s;
  out.selection = countable_selection(wasteful_parts, theta, policy);

  // g' = U_c c*(t_c u w'_c),  h' = U_c c#(i_c u h_c)
  std::vector<PointFn> g_parts;
  std::vector<TupleFn> h_pieces;
  for (const auto& [c, t_c] : thrifty_parts) {
    std::vector<PointFn> inner_g{t_c};
    std::vector<TupleFn> inner_h{identity_on(t, t_c.domain())};
    if (auto it = out.selection.g_primes.find(c); it != out.selection.g_primes.end()) {
      inner_g.push_back(it->second);
      inner_h.push_back(out.selection.h_parts.at(c));
    }
    g_parts.push_back(star_fn(c, disjoint_union(inner_g)));
    h_pieces.push_back(hash_fn(c, disjoint_union(inner_h)));
  }
  PointFn g_prime = g_parts.empty() ? PointFn(g.arity()) : disjoint_union(g_parts);
  TupleFn h_prime = h_pieces.empty() ? TupleFn(g.arity(), g.arity()) : disjoint_union(h_pieces);

  out.h = shrink_inner(g, g_prime, h_prime);
  out.g_prime = std::move(g_prime);
  for (Index i : g.arity()) {
    auto cert = certify_ci(component(out.h, i), i);
    if (!cert)
      throw ContractViolation("component " + std::to_string(i) + " of h has no C_I certificate");
    out.h_certificates.emplace(i, *cert);
  }
  return out;
}

DecompositionTrace hereditary_decompose(const PointFn& g, Nat theta, AllocatorPolicy policy) {
  DecompositionTrace trace;
  trace.theta = theta;
  trace.g = g;
  PointFn current = g;
  for (const auto& s : subsets_by_size(g.arity())) {
    auto stage = strong_decompose(current, s, theta, policy);
    current = stage.g_prime;
    trace.stages.push_back(std::move(stage));
  }
  trace.g_prime = current;
  trace.h = compose_stages(trace);
  return trace;
}

TupleFn compose_stages(const DecompositionTrace& trace) {
  TupleFn h = identity_on(trace.g.arity(), trace.g.domain());
  for (const auto& stage : trace.stages) h = compose(stage.h, h);
  return h;
}

bool VerificationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void VerificationReport::add(std::string name, bool ok, std::string detail) {
  checks.push_back(CheckResult{std::move(name), ok, std::move(detail)});
}

namespace {

// First tuple where two functions disagree, described for a report.
template <class V>
std::string first_difference(const PartialFn<V>& expected, const PartialFn<V>& actual) {
  for (auto& [u, v] : expected) {
    auto w = actual.defined_at(u) ? actual(u) : std::nullopt;
    if (!w) return "missing at " + u.to_string();
    if (*w != v) return "differs at " + u.to_string();
  }
  for (auto& [u, v] : actual)
    if (!expected.defined_at(u)) return "extra entry at " + u.to_string();
  return {};
}

}  // namespace

VerificationReport verify_decomposition(const PointFn& g, const DecompositionTrace& trace) {
  VerificationReport report;
  const Nat theta = trace.theta;
  report.add("trace.source", trace.g == g, trace.g == g ? "" : first_difference(g, trace.g));

  const PointFn* previous = &g;
  for (std::size_t i = 0; i < trace.stages.size(); ++i) {
    const auto& st = trace.stages[i];
    const std::string tag = "stage" + std::to_string(i + 1) + st.s.to_string();

    report.add(tag + ".shrinks", st.g_prime.subset_of(*previous));

    PointFn recomposed = compose(st.g_prime, st.h);
    bool exact = recomposed == *previous;
    report.add(tag + ".recompose", exact, exact ? "" : first_difference(*previous, recomposed));

    bool s_projection = true;
    std::string s_detail;
    for (auto& [u, w] : st.h) {
      if (w.restricted(st.s) != u.restricted(st.s)) {
        s_projection = false;
        s_detail = "h moves S-components at " + u.to_string();
        break;
      }
    }
    report.add(tag + ".s_projections", s_projection, s_detail);

    for (Index k : st.h.codomain()) {
      auto it = st.h_certificates.find(k);
      bool ok = it != st.h_certificates.end() && check_certificate(component(st.h, k), it->second);
      report.add(tag + ".h_cert." + std::to_string(k), ok,
                 it == st.h_certificates.end() ? "missing" : to_string(it->second.kind));
    }

    const auto& sel = st.selection;
    Nat a_width = tuple_set_width(sel.a);
    report.add(tag + ".selection.width", a_width <= 1, "width " + std::to_string(a_width));

    bool injective = true;
    bool partition = true;
    TupleSet covered;
    for (auto& [c, gp] : sel.g_primes) {
      injective = injective && is_injective(gp);
      for (auto& [z, d] : gp) partition = covered.insert(z).second && partition;
    }
    report.add(tag + ".selection.injective", injective);
    report.add(tag + ".selection.partition", partition && covered == sel.a);

    std::map<Nat, std::size_t> y_owner;
    bool y_disjoint = true;
    std::size_t idx = 0;
    for (const auto& z : sel.a) {
      std::set<Nat> ys;
      for (const auto& p : z.entries()) ys.insert(p.y);
      for (Nat y : ys) {
        auto [it, fresh] = y_owner.emplace(y, idx);
        if (!fresh && it->second != idx) y_disjoint = false;
      }
      ++idx;
    }
    report.add(tag + ".selection.fresh_y", y_disjoint);

    bool factors = true;
    std::string factor_detail;
    for (auto& [c, w] : sel.wasteful) {
      auto gp = sel.g_primes.find(c);
      auto hp = sel.h_parts.find(c);
      if (gp == sel.g_primes.end() || hp == sel.h_parts.end() || compose(gp->second, hp->second) != w) {
        factors = false;
        factor_detail = "w_c != w'_c o h_c at " + c.to_string();
        break;
      }
    }
    report.add(tag + ".selection.factors", factors, factor_detail);

    bool fibers_thrifty = true;
    std::string fiber_detail;
    for (const auto& c : fiber_keys(st.g_prime, st.s)) {
      if (!classify_preimages(fiber(st.g_prime, st.s, c), theta).all_thrifty()) {
        fibers_thrifty = false;
        fiber_detail = "fiber " + c.to_string() + " not thrifty";
        break;
      }
    }
    report.add(tag + ".fibers_thrifty", fibers_thrifty, fiber_detail);

    previous = &st.g_prime;
  }

  report.add("final.g_prime", trace.g_prime == *previous);
  report.add("final.subset", trace.g_prime.subset_of(g));
  auto hered = is_hereditarily_thrifty(trace.g_prime, theta);
  report.add("final.hereditarily_thrifty", hered.pass,
             hered.failure ? "fails at S=" + hered.failure->s.to_string() + " c=" +
                                 hered.failure->c.to_string()
                           : "");
  TupleFn composed = compose_stages(trace);
  report.add("final.h_matches_stages", composed == trace.h,
             composed == trace.h ? "" : first_difference(composed, trace.h));
  PointFn recomposed = compose(trace.g_prime, trace.h);
  report.add("final.recompose", recomposed == g,
             recomposed == g ? "" : first_difference(g, recomposed));
  return report;
}

}  // namespace clonecover
