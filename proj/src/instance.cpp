#include "clonecover/instance.hpp"

#include <algorithm>
#include <numeric>

#include "clonecover/rng.hpp"
#include "clonecover/synthesis.hpp"

namespace clonecover {

Nat default_theta(Nat horizon) { return (horizon + 1) / 2; }

namespace {

struct WitnessPlan {
  PointFn f_unary;
  std::vector<Nat> witness_lines;
  PointSet domain;
};

// A (*)-shaped unary function scrambled by random line and column
// relabelings on both sides, plus a few unrelated entries.
WitnessPlan plant_witness(Rng& rng, Nat horizon, Nat ceiling) {
  std::vector<Nat> normalized_y{0};
  for (Nat n = 1; n < horizon; ++n)
    for (Nat k = 0; k < n; ++k) normalized_y.push_back(oplus(n, k));
  const std::size_t noise = 3;

  std::vector<Nat> domain_lines(ceiling);
  std::iota(domain_lines.begin(), domain_lines.end(), Nat{0});
  rng.shuffle(domain_lines);
  std::vector<Nat> codomain_lines = domain_lines;
  rng.shuffle(codomain_lines);
  if (domain_lines.size() < normalized_y.size() + noise || codomain_lines.size() < horizon + noise)
    throw AdmissibilityError("coordinate ceiling too small for the witness");

  // codomain line n of the (*) graph -> scrambled line; column k -> scrambled x
  std::vector<std::vector<Nat>> columns(horizon);
  for (Nat n = 0; n < horizon; ++n) {
    std::vector<Nat> xs(ceiling);
    std::iota(xs.begin(), xs.end(), Nat{0});
    rng.shuffle(xs);
    columns[n].assign(xs.begin(), xs.begin() + std::max<Nat>(n, 1));
  }

  WitnessPlan plan;
  plan.f_unary = PointFn(IndexSet{1});
  auto scramble_out = [&](Point p) { return Point{columns[p.y][p.x], codomain_lines[p.y]}; };
  for (std::size_t i = 0; i < normalized_y.size(); ++i) {
    Nat y = normalized_y[i];
    Point value = kOrigin;
    if (auto nk = oplus_decode(y)) value = Point{nk->second, nk->first};
    Point x{rng.below(ceiling), domain_lines[i]};
    plan.f_unary.insert(MTuple({x}), scramble_out(value));
    plan.domain.insert(x);
  }
  for (std::size_t i = 0; i < noise; ++i) {
    Point x{rng.below(ceiling), domain_lines[normalized_y.size() + i]};
    Point value{rng.below(ceiling), codomain_lines[horizon + i]};
    plan.f_unary.insert(MTuple({x}), value);
    plan.domain.insert(x);
  }
  for (Nat n = 1; n < horizon; ++n) plan.witness_lines.push_back(codomain_lines[n]);
  return plan;
}

PointFn constant_on(const PointSet& domain, Point value) {
  PointFn out(IndexSet{1});
  for (const auto& x : domain) out.insert(MTuple({x}), value);
  return out;
}

PointFn identity_on_points(const PointSet& domain) {
  PointFn out(IndexSet{1});
  for (const auto& x : domain) out.insert(MTuple({x}), x);
  return out;
}

class GraphBuilder {
 public:
  GraphBuilder(Rng& rng, Index m, Nat theta, Nat ceiling, Nat max_domain)
      : rng_(rng), theta_(theta), ceiling_(ceiling), max_domain_(max_domain),
        g_(IndexSet::range(m)) {}

  Point low_point() { return Point{rng_.below(ceiling_), rng_.below(theta_)}; }
  Point high_point() { return Point{rng_.below(ceiling_), rng_.between(theta_, ceiling_ - 1)}; }

  bool full(std::size_t extra = 0) const { return g_.size() + extra > max_domain_; }

  // Inserts u -> v unless u is taken; returns whether it was inserted.
  bool add(const MTuple& u, Point v) {
    if (full() || g_.defined_at(u)) return false;
    g_.insert(u, v);
    values_.insert(v);
    return true;
  }

  Point fresh_value() {
    Point v;
    do v = Point{rng_.below(ceiling_), rng_.below(ceiling_)};
    while (values_.count(v));
    values_.insert(v);
    return v;
  }

  MTuple random_tuple(const IndexSet& idx, bool low) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < idx.size(); ++i) pts.push_back(low ? low_point() : high_point());
    return MTuple(idx, std::move(pts));
  }

  // Tuples with every component below theta, valued in a small pool lying on
  // few lines so that line preimages merge several values.
  void thrifty_block(std::size_t count) {
    std::vector<Nat> lines;
    for (int i = 0; i < 3; ++i) lines.push_back(rng_.below(ceiling_));
    std::vector<Point> pool;
    for (int i = 0; i < 8; ++i) {
      Point v{rng_.below(ceiling_), lines[rng_.below(lines.size())]};
      if (!values_.count(v)) pool.push_back(v);
      values_.insert(v);
    }
    if (pool.empty()) pool.push_back(fresh_value());
    for (std::size_t n = 0; n < count && !full(1); ++n) {
      for (int attempt = 0; attempt < 8; ++attempt)
        if (add(random_tuple(g_.arity(), true), pool[rng_.below(pool.size())])) break;
    }
  }

  // For stage S: values whose fibers over S-keys are wasteful, each with
  // 1 + surplus landing tuples below theta. Every class gets its own lines:
  // the key c and the first landing tuple share one, the spares take fresh ones.
  void wasteful_block(const IndexSet& s, std::size_t classes, Nat surplus) {
    const IndexSet t = g_.arity().minus(s);
    std::vector<Nat> lines(theta_);
    std::iota(lines.begin(), lines.end(), Nat{0});
    rng_.shuffle(lines);
    std::size_t next_y = 0;
    for (std::size_t cls = 0; cls < classes; ++cls) {
      const std::size_t highs = 1 + rng_.below(3);
      if (next_y + 1 + surplus > lines.size() || full(highs + 1 + surplus)) return;
      const Nat home = lines[next_y];
      std::vector<Point> key;
      for (std::size_t i = 0; i < s.size(); ++i) key.push_back(Point{rng_.below(ceiling_), home});
      const MTuple c(s, std::move(key));
      const Point d = fresh_value();
      for (Nat l = 0; l < 1 + surplus; ++l) {
        const Nat y = lines[next_y++];
        bool placed = false;
        for (int attempt = 0; attempt < 32 && !placed; ++attempt) {
          std::vector<Point> pts;
          for (std::size_t i = 0; i < t.size(); ++i) pts.push_back(Point{rng_.below(ceiling_), y});
          placed = add(c.joined(MTuple(t, std::move(pts))), d);
        }
        if (!placed) throw AdmissibilityError("no free landing tuple on line " + std::to_string(y));
      }
      for (std::size_t i = 0; i < highs; ++i) add(c.joined(random_tuple(t, false)), d);
    }
  }

  void projection_block(std::size_t count) {
    for (std::size_t n = 0; n < count && !full(1); ++n) {
      MTuple u = random_tuple(g_.arity(), true);
      add(u, u.at(1));
    }
  }

  PointFn take() { return std::move(g_); }

 private:
  Rng& rng_;
  Nat theta_;
  Nat ceiling_;
  Nat max_domain_;
  PointFn g_;
  std::set<Point> values_;
};

}  // namespace

Instance generate_instance(const GenOptions& options) {
  if (options.m < 1 || options.m > 3) throw ContractViolation("supported arities are m = 1, 2, 3");
  if (options.horizon < 2) throw ContractViolation("horizon must be at least 2");
  if (std::find(std::begin(kProfiles), std::end(kProfiles), options.profile) == std::end(kProfiles))
    throw ContractViolation("unknown profile '" + options.profile + "'");

  Instance inst;
  inst.m = options.m;
  inst.horizon = options.horizon;
  inst.theta = options.theta ? options.theta : default_theta(options.horizon);
  inst.ceiling = options.horizon * options.horizon + options.horizon;
  inst.seed = options.seed;
  inst.profile = options.profile;
  inst.admissibility.wasteful_surplus = options.surplus;
  inst.admissibility.width_threshold = options.horizon - 2;
  if (inst.theta >= inst.horizon) throw ContractViolation("theta must lie below the horizon");
  if (options.profile == "mixed" && 1 + options.surplus > inst.theta)
    throw AdmissibilityError("surplus " + std::to_string(options.surplus) +
                             " too large for theta " + std::to_string(inst.theta));

  // Witness.
  Rng witness_rng(mix_seed(options.seed, 1));
  WitnessPlan plan = plant_witness(witness_rng, inst.horizon, inst.ceiling);
  inst.admissibility.witness_lines = plan.witness_lines;
  if (inst.m == 1) {
    inst.f = plan.f_unary;
    inst.candidates.push_back(identity_on_points(plan.domain));
  } else {
    Point pa{inst.ceiling - 1, inst.ceiling - 1};
    while (plan.domain.count(pa)) --pa.x;
    Point pb{inst.ceiling - 1, 0};
    while (plan.domain.count(pb) || pb == pa) --pb.x;
    inst.candidates = {constant_on(plan.domain, pa), identity_on_points(plan.domain),
                       constant_on(plan.domain, pb)};
    inst.f = PointFn(IndexSet::range(inst.m));
    for (auto& [x, v] : plan.f_unary) {
      std::vector<Point> args(inst.m, pa);
      args[0] = x.at(1);
      inst.f.insert(MTuple(std::move(args)), v);
    }
    if (inst.horizon >= 4) {
      // f(pa, x, pa, ...) = x: a width-preserving slice the search must pass over.
      for (const auto& x : plan.domain) {
        std::vector<Point> args(inst.m, pa);
        args[1] = x;
        inst.f.insert(MTuple(std::move(args)), x);
      }
    }
    inst.admissibility.planted.assign(inst.m, 0);
    inst.admissibility.planted[0] = 1;
  }

  // g.
  Rng g_rng(mix_seed(options.seed, 2));
  GraphBuilder builder(g_rng, inst.m, inst.theta, inst.ceiling, options.max_domain);
  const std::size_t base = 15 + 15 * inst.m;
  if (options.profile == "all-thrifty") {
    builder.thrifty_block(base + g_rng.below(base));
  } else if (options.profile == "projection") {
    builder.projection_block(base);
  } else if (options.profile == "mixed") {
    // Landing tuples first, so a crowded low region cannot displace them.
    const IndexSet m = IndexSet::range(inst.m);
    for (const auto& s : subsets_by_size(m)) {
      if (s == m) continue;
      builder.wasteful_block(s, 1 + g_rng.below(2), options.surplus);
    }
    builder.thrifty_block(base / 2 + g_rng.below(base / 2));
  }
  inst.g = builder.take();

  auto check = check_admissibility(inst);
  if (!check.pass()) {
    std::string why;
    for (const auto& c : check.checks)
      if (!c.pass) why += c.name + ": " + c.detail + "; ";
    throw AdmissibilityError("generated instance is not admissible: " + why);
  }
  return inst;
}

namespace {

bool below_ceiling(const PointFn& p, Nat ceiling) {
  auto ok = [&](const Point& q) { return q.x < ceiling && q.y < ceiling; };
  for (auto& [u, v] : p) {
    if (!ok(v)) return false;
    for (const auto& q : u.entries())
      if (!ok(q)) return false;
  }
  return true;
}

}  // namespace

VerificationReport check_admissibility(const Instance& inst) {
  VerificationReport r;
  bool ceiling = below_ceiling(inst.g, inst.ceiling) && below_ceiling(inst.f, inst.ceiling);
  for (const auto& c : inst.candidates) ceiling = ceiling && below_ceiling(c, inst.ceiling);
  r.add("ceiling", ceiling, "ceiling " + std::to_string(inst.ceiling));
  r.add("arity", inst.m >= 1 && inst.g.arity() == IndexSet::range(inst.m));
  r.add("theta", inst.theta >= 1 && inst.theta < inst.horizon,
        "theta " + std::to_string(inst.theta) + ", horizon " + std::to_string(inst.horizon));

  std::optional<UnaryReduction> reduction;
  try {
    reduction = reduce_to_unary(inst.f, inst.candidates, inst.admissibility.width_threshold);
    bool planted = reduction->choice == inst.admissibility.planted;
    r.add("unary_witness", planted, planted ? "" : "search found a different candidate tuple");
  } catch (const Error& e) {
    r.add("unary_witness", false, e.what());
  }
  if (reduction) {
    try {
      normalize_f(reduction->unary, inst.horizon);
      r.add("normalize", true);
    } catch (const Error& e) {
      r.add("normalize", false, e.what());
    }
  }
  try {
    if (inst.theta >= 1) hereditary_decompose(inst.g, inst.theta);
    r.add("decomposition", inst.theta >= 1);
  } catch (const Error& e) {
    r.add("decomposition", false, e.what());
  }
  return r;
}

}  // namespace clonecover
