#include "clonecover/serialize.hpp"

namespace clonecover {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError((where.empty() ? std::string("document") : where) + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

Nat nat(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(where, "expected a natural number");
  return j.get<Nat>();
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

void check_header(const Json& j, const std::string& format) {
  if (!j.is_object()) fail("", "expected an object");
  const std::string got = str(field(j, "format", ""), "format");
  if (got != format) fail("format", "expected '" + format + "', found '" + got + "'");
  const Json& v = field(j, "version", "");
  if (!v.is_number_integer() || v.get<std::int64_t>() != kFormatVersion)
    fail("version", "unsupported version " + v.dump());
}

Json header(const std::string& format) {
  return Json{{"format", format}, {"version", kFormatVersion}};
}

IndexSet index_set_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an index array");
  std::vector<Index> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<Index>(nat(j[i], where + "[" + std::to_string(i) + "]")));
  try {
    return IndexSet(out);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Json to_json(const IndexSet& s) { return Json(s.elements()); }

template <class V, class Parse>
PartialFn<V> fn_from_json(const Json& j, const std::string& where, Parse parse_value) {
  IndexSet arity = index_set_from_json(field(j, "arity", where), where + ".arity");
  IndexSet codomain;
  if (j.contains("codomain")) codomain = index_set_from_json(j["codomain"], where + ".codomain");
  PartialFn<V> out(arity, codomain);
  const Json& entries = field(j, "entries", where);
  if (!entries.is_array()) fail(where + ".entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = where + ".entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    if (!e.is_array() || e.size() != 2) fail(at, "expected [input, value]");
    MTuple u = tuple_from_json(e[0], at + "[0]");
    if (u.index_set() != arity) fail(at, "input " + u.to_string() + " not over " + arity.to_string());
    if (out.defined_at(u)) fail(at, "duplicate input " + u.to_string());
    out.insert(u, parse_value(e[1], at + "[1]"));
  }
  return out;
}

template <class V>
Json fn_to_json(const PartialFn<V>& p) {
  Json entries = Json::array();
  for (auto& [u, v] : p) entries.push_back(Json::array({to_json(u), to_json(v)}));
  Json out{{"arity", to_json(p.arity())}, {"entries", std::move(entries)}};
  if constexpr (std::is_same_v<V, MTuple>) out["codomain"] = to_json(p.codomain());
  return out;
}

CiCertificate::Kind cert_kind_from(const std::string& s, const std::string& where) {
  for (auto k : {CiCertificate::Kind::Projection, CiCertificate::Kind::Width1Range,
                 CiCertificate::Kind::ProjectionUnion, CiCertificate::Kind::MainLemma})
    if (to_string(k) == s) return k;
  fail(where, "unknown certificate kind '" + s + "'");
}

Json to_json(const CiCertificate& c) {
  return Json{{"kind", to_string(c.kind)}, {"projection", c.projection}, {"note", c.note}};
}

CiCertificate cert_from_json(const Json& j, const std::string& where) {
  CiCertificate c;
  c.kind = cert_kind_from(str(field(j, "kind", where), where + ".kind"), where + ".kind");
  if (j.contains("projection")) c.projection = static_cast<Index>(nat(j["projection"], where + ".projection"));
  if (j.contains("note")) c.note = str(j["note"], where + ".note");
  return c;
}

Json checks_to_json(const std::vector<CheckResult>& checks) {
  Json out = Json::array();
  for (const auto& c : checks) {
    Json e{{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Json to_json(const Point& p) { return Json::array({p.x, p.y}); }

Json to_json(const MTuple& t) {
  Json out = Json::object();
  for (std::size_t i = 0; i < t.size(); ++i)
    out[std::to_string(t.index_set().elements()[i])] = to_json(t.entries()[i]);
  return out;
}

Json to_json(const PointFn& p) { return fn_to_json(p); }
Json to_json(const TupleFn& p) { return fn_to_json(p); }

Json to_json(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Projection: return Json{{"kind", "proj"}, {"index", t.index()}};
    case Term::Kind::Atom: return Json{{"kind", "atom"}, {"name", t.name()}};
    case Term::Kind::Compose: {
      Json args = Json::array();
      for (const auto& a : t.args()) args.push_back(to_json(*a));
      return Json{{"kind", "compose"}, {"head", to_json(*t.head())}, {"args", std::move(args)}};
    }
  }
  return Json();
}

Json to_json(const TermBundle& b) {
  Json out = header("clonecover.term");
  out["arity"] = b.arity;
  out["term"] = b.term ? to_json(*b.term) : Json();
  Json atoms = Json::object();
  for (auto& [name, e] : b.atoms) {
    Json a{{"class", e.cls == AtomClass::WitnessF ? "witness" : "ci"}, {"fn", to_json(e.fn)}};
    if (e.cert) a["certificate"] = to_json(*e.cert);
    atoms[name] = std::move(a);
  }
  out["atoms"] = std::move(atoms);
  return out;
}

Json to_json(const Instance& inst) {
  Json out = header("clonecover.instance");
  out["m"] = inst.m;
  out["horizon"] = inst.horizon;
  out["theta"] = inst.theta;
  out["ceiling"] = inst.ceiling;
  out["seed"] = inst.seed;
  out["profile"] = inst.profile;
  out["g"] = to_json(inst.g);
  out["f"] = to_json(inst.f);
  Json cands = Json::array();
  for (const auto& c : inst.candidates) cands.push_back(to_json(c));
  out["candidates"] = std::move(cands);
  out["admissibility"] = Json{{"wasteful_surplus", inst.admissibility.wasteful_surplus},
                              {"width_threshold", inst.admissibility.width_threshold},
                              {"witness_lines", inst.admissibility.witness_lines},
                              {"planted", inst.admissibility.planted}};
  return out;
}

Json to_json(const VerificationReport& r) {
  Json out = header("clonecover.verification");
  out["pass"] = r.pass();
  out["checks"] = checks_to_json(r.checks);
  return out;
}

Json to_json(const Report& r) {
  Json out = header("clonecover.report");
  out["pass"] = r.pass();
  out["seed"] = r.seed;
  out["m"] = r.m;
  out["horizon"] = r.horizon;
  out["theta"] = r.theta;
  out["domain_size"] = r.domain_size;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e{{"stage", c.stage}, {"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(std::move(e));
  }
  out["checks"] = std::move(checks);
  if (r.term_stats) {
    const auto& s = *r.term_stats;
    out["term_stats"] = Json{{"nodes", s.nodes},
                             {"depth", s.depth},
                             {"projections", s.projections},
                             {"witness_atoms", s.witness_atoms},
                             {"ci_atoms", s.ci_atoms},
                             {"distinct_atoms", s.distinct_atoms}};
  }
  if (r.error) out["error"] = *r.error;
  if (!r.timing_ms.empty()) out["timing_ms"] = r.timing_ms;
  return out;
}

Json to_json(const DecompositionTrace& trace) {
  Json out = header("clonecover.trace");
  out["theta"] = trace.theta;
  out["g"] = to_json(trace.g);
  Json stages = Json::array();
  for (const auto& st : trace.stages) {
    Json chosen = Json::array();
    for (auto& [key, z] : st.selection.chosen)
      chosen.push_back(Json{{"c", to_json(key.c)}, {"value", to_json(key.value)}, {"tuple", to_json(z)}});
    Json certs = Json::object();
    for (auto& [i, c] : st.h_certificates) certs[std::to_string(i)] = to_json(c);
    stages.push_back(Json{{"s", to_json(st.s)},
                          {"g_prime", to_json(st.g_prime)},
                          {"h", to_json(st.h)},
                          {"selection", std::move(chosen)},
                          {"h_certificates", std::move(certs)}});
  }
  out["stages"] = std::move(stages);
  out["g_prime"] = to_json(trace.g_prime);
  out["h"] = to_json(trace.h);
  return out;
}

Point point_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected a point [x, y]");
  return Point{nat(j[0], where + "[0]"), nat(j[1], where + "[1]")};
}

MTuple tuple_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a tuple object keyed by index");
  std::vector<std::pair<Index, Point>> entries;
  for (auto& [key, value] : j.items()) {
    Index i = 0;
    try {
      std::size_t used = 0;
      unsigned long parsed = std::stoul(key, &used);
      if (used != key.size() || parsed == 0) throw std::invalid_argument(key);
      i = static_cast<Index>(parsed);
    } catch (const std::exception&) {
      fail(where, "invalid index key '" + key + "'");
    }
    entries.emplace_back(i, point_from_json(value, where + "." + key));
  }
  std::sort(entries.begin(), entries.end());
  std::vector<Index> idx;
  std::vector<Point> pts;
  for (auto& [i, p] : entries) {
    idx.push_back(i);
    pts.push_back(p);
  }
  return MTuple(IndexSet(idx), std::move(pts));
}

PointFn point_fn_from_json(const Json& j, const std::string& where) {
  return fn_from_json<Point>(j, where, [](const Json& v, const std::string& at) {
    return point_from_json(v, at);
  });
}

TermPtr term_from_json(const Json& j, const std::string& where) {
  const std::string kind = str(field(j, "kind", where), where + ".kind");
  if (kind == "proj") {
    Nat k = nat(field(j, "index", where), where + ".index");
    if (k == 0) fail(where + ".index", "projections are indexed from 1");
    return Term::projection(static_cast<Index>(k));
  }
  if (kind == "atom") return Term::atom(str(field(j, "name", where), where + ".name"));
  if (kind == "compose") {
    TermPtr head = term_from_json(field(j, "head", where), where + ".head");
    const Json& args = field(j, "args", where);
    if (!args.is_array()) fail(where + ".args", "expected an array");
    std::vector<TermPtr> parsed;
    for (std::size_t i = 0; i < args.size(); ++i)
      parsed.push_back(term_from_json(args[i], where + ".args[" + std::to_string(i) + "]"));
    return Term::compose(std::move(head), std::move(parsed));
  }
  fail(where + ".kind", "unknown term kind '" + kind + "'");
}

TermBundle term_bundle_from_json(const Json& j) {
  check_header(j, "clonecover.term");
  TermBundle b;
  b.arity = static_cast<Index>(nat(field(j, "arity", ""), "arity"));
  b.term = term_from_json(field(j, "term", ""), "term");
  const Json& atoms = field(j, "atoms", "");
  if (!atoms.is_object()) fail("atoms", "expected an object");
  for (auto& [name, a] : atoms.items()) {
    const std::string at = "atoms." + name;
    AtomEntry e;
    const std::string cls = str(field(a, "class", at), at + ".class");
    if (cls == "witness") e.cls = AtomClass::WitnessF;
    else if (cls == "ci") e.cls = AtomClass::CIAtom;
    else fail(at + ".class", "unknown atom class '" + cls + "'");
    e.fn = point_fn_from_json(field(a, "fn", at), at + ".fn");
    if (a.contains("certificate")) e.cert = cert_from_json(a["certificate"], at + ".certificate");
    b.atoms.emplace(name, std::move(e));
  }
  return b;
}

Instance instance_from_json(const Json& j) {
  check_header(j, "clonecover.instance");
  Instance inst;
  inst.m = static_cast<Index>(nat(field(j, "m", ""), "m"));
  inst.horizon = nat(field(j, "horizon", ""), "horizon");
  inst.theta = nat(field(j, "theta", ""), "theta");
  inst.ceiling = nat(field(j, "ceiling", ""), "ceiling");
  inst.seed = nat(field(j, "seed", ""), "seed");
  inst.profile = str(field(j, "profile", ""), "profile");
  inst.g = point_fn_from_json(field(j, "g", ""), "g");
  inst.f = point_fn_from_json(field(j, "f", ""), "f");
  const Json& cands = field(j, "candidates", "");
  if (!cands.is_array()) fail("candidates", "expected an array");
  for (std::size_t i = 0; i < cands.size(); ++i)
    inst.candidates.push_back(point_fn_from_json(cands[i], "candidates[" + std::to_string(i) + "]"));
  const Json& adm = field(j, "admissibility", "");
  inst.admissibility.wasteful_surplus = nat(field(adm, "wasteful_surplus", "admissibility"), "admissibility.wasteful_surplus");
  inst.admissibility.width_threshold = nat(field(adm, "width_threshold", "admissibility"), "admissibility.width_threshold");
  try {
    inst.admissibility.witness_lines = field(adm, "witness_lines", "admissibility").get<std::vector<Nat>>();
    inst.admissibility.planted = field(adm, "planted", "admissibility").get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    fail("admissibility", e.what());
  }
  if (inst.g.arity() != IndexSet::range(inst.m))
    fail("g.arity", "expected " + IndexSet::range(inst.m).to_string());
  return inst;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

std::string serialize(const Instance& inst) { return dump(to_json(inst)); }
std::string serialize(const TermBundle& b) { return dump(to_json(b)); }
std::string serialize(const Report& r) { return dump(to_json(r)); }
Instance deserialize_instance(const std::string& text) { return instance_from_json(parse(text)); }
TermBundle deserialize_term(const std::string& text) { return term_bundle_from_json(parse(text)); }

}  // namespace clonecover
