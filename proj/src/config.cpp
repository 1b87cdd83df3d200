#include "landau/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "landau/errors.hpp"

namespace landau {

using nlohmann::json;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view to_string(SpectralTransform t) {
  switch (t) {
    case SpectralTransform::automatic: return "auto";
    case SpectralTransform::none: return "none";
    case SpectralTransform::shift_invert: return "shift_invert";
  }
  return "auto";
}

namespace {

std::string join(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }

// Mirrors the JSON schema keywords used in docs/schemas: type, required,
// additionalProperties: false, minimum / exclusiveMinimum, enum.
class Node {
 public:
  Node(const json& j, std::string pointer) : j_(j), pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }
  const json& raw() const { return j_; }

  Node object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) throw ConfigError(pointer_or_root(), "expected an object");
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!keys.count(it.key())) throw ConfigError(join(pointer_, it.key()), "unknown property");
    return *this;
  }

  bool has(const char* key) const { return j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.contains(key)) throw ConfigError(join(pointer_, key), "required property missing");
    return Node(j_.at(key), join(pointer_, key));
  }

  double number() const {
    if (!j_.is_number()) throw ConfigError(pointer_or_root(), "expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) throw ConfigError(pointer_or_root(), "expected a finite number");
    return v;
  }

  double number(double exclusive_min) const {
    const double v = number();
    if (!(v > exclusive_min)) throw ConfigError(pointer_or_root(), "must be > " + format(exclusive_min));
    return v;
  }

  double number_min(double inclusive_min) const {
    const double v = number();
    if (!(v >= inclusive_min)) throw ConfigError(pointer_or_root(), "must be >= " + format(inclusive_min));
    return v;
  }

  long long integer(long long minimum, long long maximum = std::numeric_limits<long long>::max()) const {
    if (!j_.is_number_integer()) throw ConfigError(pointer_or_root(), "expected an integer");
    const long long v = j_.get<long long>();
    if (v < minimum || v > maximum)
      throw ConfigError(pointer_or_root(), "must lie in [" + std::to_string(minimum) + ", " + std::to_string(maximum) + "]");
    return v;
  }

  std::string string(std::initializer_list<const char*> allowed) const {
    if (!j_.is_string()) throw ConfigError(pointer_or_root(), "expected a string");
    const std::string v = j_.get<std::string>();
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    throw ConfigError(pointer_or_root(), "must be one of: " + list);
  }

  std::vector<Node> array(std::size_t min_items = 0) const {
    if (!j_.is_array()) throw ConfigError(pointer_or_root(), "expected an array");
    if (j_.size() < min_items) throw ConfigError(pointer_or_root(), "needs at least " + std::to_string(min_items) + " items");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_.at(i), pointer_ + "/" + std::to_string(i));
    return out;
  }

 private:
  static std::string format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }
  std::string pointer_or_root() const { return pointer_.empty() ? "/" : pointer_; }

  const json& j_;
  std::string pointer_;
};

PotentialTerm parse_term(const Node& n) {
  if (!n.raw().is_object()) throw ConfigError(n.pointer(), "expected an object");
  const std::string type =
      n.at("type").string({"axis_charge", "axis_segment", "smeared_charge", "hollow_tube", "separable_harmonic"});
  if (type == "axis_charge") {
    n.object({"type", "position", "charge"});
    return AxisCharge{n.at("position").number(), n.at("charge").number(0.0)};
  }
  if (type == "axis_segment") {
    n.object({"type", "z_lo", "z_hi", "linear_density"});
    AxisSegment s{n.at("z_lo").number(), n.at("z_hi").number(), n.at("linear_density").number_min(0.0)};
    if (!(s.z_lo < s.z_hi)) throw ConfigError(n.pointer() + "/z_hi", "must be > z_lo");
    return s;
  }
  if (type == "smeared_charge") {
    n.object({"type", "center_z", "radius", "total_charge"});
    return SmearedCharge{n.at("center_z").number(), n.at("radius").number(0.0), n.at("total_charge").number_min(0.0)};
  }
  if (type == "hollow_tube") {
    n.object({"type", "tau", "radius"});
    return HollowTube{n.at("tau").number(0.0), n.at("radius").number(0.0)};
  }
  n.object({"type", "c_perp", "omega_z"});
  return SeparableHarmonic{n.at("c_perp").number_min(0.0), n.at("omega_z").number_min(0.0)};
}

SolveConfig parse_solver(const Node& n) {
  n.object({"tol", "max_iterations", "seed", "transform"});
  SolveConfig c;
  if (n.has("tol")) c.tol = n.at("tol").number(0.0);
  if (n.has("max_iterations")) c.max_iterations = static_cast<int>(n.at("max_iterations").integer(1, 1000000));
  if (n.has("seed")) {
    const Node s = n.at("seed");
    if (!s.raw().is_number_unsigned() && !(s.raw().is_number_integer() && s.raw().get<long long>() >= 0))
      throw ConfigError(s.pointer(), "expected a non-negative integer");
    c.seed = s.raw().get<std::uint64_t>();
  }
  if (n.has("transform")) {
    const std::string t = n.at("transform").string({"auto", "none", "shift_invert"});
    c.transform = t == "none" ? SpectralTransform::none
                  : t == "shift_invert" ? SpectralTransform::shift_invert
                                        : SpectralTransform::automatic;
  }
  return c;
}

}  // namespace

PotentialSpec parse_potential(const json& document, const std::string& pointer) {
  const Node n(document, pointer);
  n.object({"terms", "period"});
  std::vector<PotentialTerm> terms;
  if (n.has("terms"))
    for (const Node& t : n.at("terms").array()) terms.push_back(parse_term(t));
  if (n.has("period")) {
    const Node p = n.at("period");
    p.object({"a", "nucleus_charge", "smeared"});
    const double a = p.at("a").number(0.0);
    const double nucleus = p.at("nucleus_charge").number_min(0.0);
    double radius = a / 4.0;
    double charge = 0.0;
    if (p.has("smeared")) {
      const Node s = p.at("smeared");
      s.object({"radius", "total_charge"});
      radius = s.at("radius").number(0.0);
      charge = s.at("total_charge").number_min(0.0);
      if (!(radius < a / 2.0)) throw ConfigError(s.pointer() + "/radius", "must be < a/2");
    }
    terms.push_back(PeriodicChainSpec::make(a, nucleus, radius, charge));
  }
  try {
    return PotentialSpec(std::move(terms));
  } catch (const UsageError& e) {
    throw ConfigError(pointer, e.what());
  }
}

json potential_to_json(const PotentialSpec& spec) {
  json out = json::object();
  json terms = json::array();
  for (const auto& t : spec.terms()) {
    if (const auto* c = std::get_if<AxisCharge>(&t)) {
      terms.push_back({{"type", "axis_charge"}, {"position", c->position}, {"charge", c->charge}});
    } else if (const auto* s = std::get_if<AxisSegment>(&t)) {
      terms.push_back({{"type", "axis_segment"}, {"z_lo", s->z_lo}, {"z_hi", s->z_hi}, {"linear_density", s->linear_density}});
    } else if (const auto* b = std::get_if<SmearedCharge>(&t)) {
      terms.push_back({{"type", "smeared_charge"}, {"center_z", b->center_z}, {"radius", b->radius}, {"total_charge", b->total_charge}});
    } else if (const auto* h = std::get_if<HollowTube>(&t)) {
      terms.push_back({{"type", "hollow_tube"}, {"tau", h->tau}, {"radius", h->radius}});
    } else if (const auto* q = std::get_if<SeparableHarmonic>(&t)) {
      terms.push_back({{"type", "separable_harmonic"}, {"c_perp", q->c_perp}, {"omega_z", q->omega_z}});
    } else if (const auto* p = std::get_if<PeriodicChainSpec>(&t)) {
      out["period"] = {{"a", p->period},
                       {"nucleus_charge", p->nucleus_charge},
                       {"smeared", {{"radius", p->smeared.radius}, {"total_charge", p->smeared.total_charge}}}};
    }
  }
  out["terms"] = terms;
  return out;
}

RunConfig parse_config(const json& document) {
  const Node root(document, "");
  root.object({"potential", "field", "m_max", "m", "levels", "resolution", "solver", "grid", "band", "verify",
               "convergence", "run"});
  RunConfig c;
  c.document = document;
  c.document.erase("run");
  c.potential = parse_potential(root.at("potential").raw(), "/potential");

  const Node field = root.at("field");
  field.object({"B"});
  c.field.B = field.at("B").number(0.0);

  if (root.has("m_max")) c.m_max = static_cast<int>(root.at("m_max").integer(0, 100000));
  if (root.has("m")) {
    c.m = static_cast<int>(root.at("m").integer(0, 100000));
    c.m_max = std::max(c.m_max, *c.m);
  }
  if (root.has("levels")) c.levels = static_cast<int>(root.at("levels").integer(1, 64));
  if (root.has("resolution")) c.resolution = static_cast<int>(root.at("resolution").integer(-4, 8));
  if (root.has("solver")) c.solver = parse_solver(root.at("solver"));

  if (root.has("grid")) {
    const Node g = root.at("grid");
    g.object({"r_max", "z_max", "max_dimension"});
    if (g.has("r_max")) c.grid.r_max = g.at("r_max").number(0.0);
    if (g.has("z_max")) c.grid.z_max = g.at("z_max").number(0.0);
    if (g.has("max_dimension")) c.grid.max_dimension = static_cast<std::size_t>(g.at("max_dimension").integer(1));
  }
  if (root.has("band")) {
    const Node b = root.at("band");
    b.object({"n_alpha"});
    if (b.has("n_alpha")) c.band.n_alpha = static_cast<int>(b.at("n_alpha").integer(8, 4096));
  }
  if (root.has("verify")) {
    const Node v = root.at("verify");
    v.object({"tolerance_factor", "tolerance_floor", "domain_z_max"});
    if (v.has("tolerance_factor")) c.verify.tolerance_factor = v.at("tolerance_factor").number(0.0);
    if (v.has("tolerance_floor")) c.verify.tolerance_floor = v.at("tolerance_floor").number_min(0.0);
    if (v.has("domain_z_max")) c.verify.domain_z_max = v.at("domain_z_max").number(0.0);
  }
  if (root.has("convergence")) {
    const Node v = root.at("convergence");
    v.object({"resolutions", "m"});
    if (v.has("resolutions"))
      for (const Node& r : v.at("resolutions").array()) c.convergence.resolutions.push_back(static_cast<int>(r.integer(-4, 8)));
    if (v.has("m")) {
      c.convergence.m.clear();
      for (const Node& r : v.at("m").array(1)) c.convergence.m.push_back(static_cast<int>(r.integer(0, 100000)));
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::string RunConfig::digest() const { return fnv1a_hex(document.dump()); }

}  // namespace landau
