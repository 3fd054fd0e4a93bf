#include "glasslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "glasslab/errors.hpp"

namespace glasslab {

namespace {

// Exact trig values on the Z_q lattice. The generic q is handled by std::cos
// / std::sin; the integer conditions pick out the points where the exact
// result is 0 or +-1 so those channels vanish identically (q = 2 sin, q = 4
// quarter turns, ...).
double lattice_cos(int s, int q) {
  const long r = ((long)s % q + q) % q;
  if (r == 0) return 1.0;
  if (2 * r == q) return -1.0;
  if (4 * r == q || 4 * r == 3L * q) return 0.0;
  return std::cos(2.0 * std::numbers::pi * (double)r / (double)q);
}

double lattice_sin(int s, int q) {
  const long r = ((long)s % q + q) % q;
  if (r == 0 || 2 * r == q) return 0.0;
  if (4 * r == q) return 1.0;
  if (4 * r == 3L * q) return -1.0;
  return std::sin(2.0 * std::numbers::pi * (double)r / (double)q);
}

}  // namespace

double SpinSpace::angle(int state) const {
  return 2.0 * std::numbers::pi * (double)state / (double)q;
}

double SpinSpace::cos_state(int state) const { return lattice_cos(state, q); }
double SpinSpace::sin_state(int state) const { return lattice_sin(state, q); }

int BondGraph::degree(int site) const {
  int d = 0;
  for (const auto& [a, b] : bonds)
    if (a == site || b == site) ++d;
  return d;
}

CouplingSlot CouplingSlot::bond(int i, int j, int m) {
  CouplingSlot s;
  s.site_a = std::min(i, j);
  s.site_b = std::max(i, j);
  s.harmonic = m;
  return s;
}

CouplingSlot CouplingSlot::site(int i, int m) {
  CouplingSlot s;
  s.site_a = i;
  s.site_b = -1;
  s.harmonic = m;
  return s;
}

std::string CouplingSlot::label() const {
  char buf[64];
  if (one_body())
    std::snprintf(buf, sizeof buf, "site(%d)m%d", site_a, harmonic);
  else
    std::snprintf(buf, sizeof buf, "bond(%d,%d)m%d", site_a, site_b, harmonic);
  return buf;
}

NishimoriParams NishimoriParams::zeros(std::size_t n_slots) {
  return NishimoriParams{std::vector<double>(n_slots, 0.0)};
}

NishimoriParams NishimoriParams::uniform(std::size_t n_slots, double value) {
  return NishimoriParams{std::vector<double>(n_slots, value)};
}

NishimoriParams NishimoriParams::with(std::size_t slot_index, double value) const {
  NishimoriParams out = *this;
  out.x.at(slot_index) = value;
  return out;
}

NishimoriParams NishimoriParams::shifted(std::size_t slot_index, double delta) const {
  NishimoriParams out = *this;
  out.x.at(slot_index) += delta;
  return out;
}

double CanonicalCoupling::to_x() const {
  if (beta <= 0.0 || sigma2 <= 0.0 || mean < 0.0)
    throw ConfigurationError("canonical coupling requires beta > 0, sigma2 > 0, mean >= 0");
  if (std::abs(mean / sigma2 - beta) > 1e-12 * beta) {
    std::ostringstream os;
    os << "coupling off the Nishimori line: D/sigma^2 = " << mean / sigma2
       << " but beta = " << beta;
    throw ConfigurationError(os.str());
  }
  return beta * mean;
}

int ModelSpec::find_slot(const CouplingSlot& slot) const {
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i] == slot) return (int)i;
  return -1;
}

void ModelSpec::validate() const {
  if (spin.q < 2) throw ConfigurationError("spin space requires q >= 2");
  if (graph.n_sites <= 0) throw ConfigurationError("model requires at least one site");
  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : graph.bonds) {
    if (a < 0 || b < 0 || a >= graph.n_sites || b >= graph.n_sites)
      throw ConfigurationError("bond endpoint out of range");
    if (a == b) throw ConfigurationError("bond endpoints must differ");
    if (a > b) throw ConfigurationError("bonds must be normalized with a < b");
    if (!seen.insert({a, b}).second) throw ConfigurationError("duplicate bond");
  }
  std::set<CouplingSlot> slot_seen;
  for (const auto& s : slots) {
    if (s.harmonic < 0) throw ConfigurationError("slot harmonic must be >= 0");
    if (s.one_body()) {
      if (s.site_a < 0 || s.site_a >= graph.n_sites)
        throw ConfigurationError("one-body slot site out of range");
    } else {
      if (seen.find({s.site_a, s.site_b}) == seen.end())
        throw ConfigurationError("slot references bond (" + std::to_string(s.site_a) + "," +
                                 std::to_string(s.site_b) + ") not present in the bond list");
    }
    if (!slot_seen.insert(s).second)
      throw ConfigurationError("duplicate slot " + s.label());
  }
}

ModelSpec ModelSpec::single_bond(int q, int m) {
  ModelSpec model;
  model.spin.q = q;
  model.graph.n_sites = 2;
  model.graph.bonds = {{0, 1}};
  model.slots = {CouplingSlot::bond(0, 1, m)};
  return model;
}

ModelSpec ModelSpec::chain(int q, int n_sites, int m) {
  ModelSpec model;
  model.spin.q = q;
  model.graph.n_sites = n_sites;
  for (int i = 0; i + 1 < n_sites; ++i) {
    model.graph.bonds.push_back({i, i + 1});
    model.slots.push_back(CouplingSlot::bond(i, i + 1, m));
  }
  return model;
}

ModelSpec ModelSpec::ring(int q, int n_sites, int m) {
  ModelSpec model = chain(q, n_sites, m);
  model.graph.bonds.push_back({0, n_sites - 1});
  model.slots.push_back(CouplingSlot::bond(0, n_sites - 1, m));
  return model;
}

DisorderSample DisorderSample::zeros(std::size_t n_slots) {
  return DisorderSample{std::vector<double>(n_slots, 0.0),
                        std::vector<double>(n_slots, 0.0)};
}

std::pair<ModelSpec, NishimoriParams> model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(std::string("model document is not valid JSON: ") + e.what());
  }
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key))
      throw ConfigurationError(std::string("model document missing key '") + key + "'");
    return doc.at(key);
  };

  ModelSpec model;
  NishimoriParams params;
  try {
    model.spin.q = require("spin_space").at("q").get<int>();
    model.graph.n_sites = require("sites").get<int>();
    for (const auto& b : require("bonds")) {
      if (!b.is_array() || b.size() != 2)
        throw ConfigurationError("each bond must be a pair [i, j]");
      int i = b.at(0).get<int>(), j = b.at(1).get<int>();
      model.graph.bonds.push_back({std::min(i, j), std::max(i, j)});
    }
    for (const auto& s : require("slots")) {
      CouplingSlot slot;
      int m = s.value("m", 1);
      if (s.contains("bond")) {
        const auto& b = s.at("bond");
        slot = CouplingSlot::bond(b.at(0).get<int>(), b.at(1).get<int>(), m);
      } else if (s.contains("site")) {
        slot = CouplingSlot::site(s.at("site").get<int>(), m);
        model.graph.one_body_sites.push_back(slot.site_a);
      } else {
        throw ConfigurationError("slot entry needs either 'bond' or 'site'");
      }
      double x;
      if (s.contains("x")) {
        x = s.at("x").get<double>();
      } else if (s.contains("beta")) {
        // (beta, sigma2, D) boundary form; converted on the spot.
        CanonicalCoupling c{s.at("beta").get<double>(), s.at("sigma2").get<double>(),
                            s.at("mean").get<double>()};
        x = c.to_x();
      } else {
        throw ConfigurationError("slot entry needs 'x' or a (beta, sigma2, mean) triple");
      }
      if (!(x >= 0.0)) throw ConfigurationError("slot x must be >= 0");
      model.slots.push_back(slot);
      params.x.push_back(x);
    }
    model.default_seed = doc.value("seed", (std::uint64_t)0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed model document: ") + e.what());
  }

  std::sort(model.graph.one_body_sites.begin(), model.graph.one_body_sites.end());
  model.graph.one_body_sites.erase(
      std::unique(model.graph.one_body_sites.begin(), model.graph.one_body_sites.end()),
      model.graph.one_body_sites.end());
  model.validate();
  return {model, params};
}

std::pair<ModelSpec, NishimoriParams> model_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace glasslab
