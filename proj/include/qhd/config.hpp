#pragma once

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qhd/errors.hpp"
#include "qhd/point_spectrum.hpp"
#include "qhd/shock_data.hpp"

namespace qhd {

struct RunConfig {
  ShockParams shock;
  // domain
  std::optional<double> L;  // default 40/eps
  int n_points = 4001;
  int order = 10;
  double newton_tol = 1e-12;
  // spectra
  double xi_max = 20.0;
  int n_xi = 4001;
  // eigen
  int eigen_n = 2000;
  std::optional<double> eigen_L;  // default from the profile tails
  double localization_threshold = 0.05;
  double tol_margin = 1e-6;
  double match_distance = 1e-3;
  int eigen_order = 8;
  EigenClosure eigen_closure = EigenClosure::zero_ghost;
  int max_dense = 6000;
  // energy
  double tail_floor = 1e-13;
  // sweep
  std::vector<double> sweep;
  std::string output_dir = "qhd_out";

  double domain_L() const { return L ? *L : 40.0 / shock.epsilon; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view v, int line) {
  v = trim(v);
  double x = 0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  if (!v.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (v.empty() || ec != std::errc() || ptr != e) throw ParseError("malformed number '" + std::string(v) + "'", line);
  return x;
}

inline int parse_int(std::string_view v, int line) {
  v = trim(v);
  int x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ParseError("malformed integer '" + std::string(v) + "'", line);
  return x;
}

}  // namespace detail

// Line-oriented `key = value` configuration; '#' starts a comment.
inline RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> kv;
  static const std::set<std::string> known = {
      "shock.gamma", "shock.mu", "shock.k", "shock.P_minus", "shock.P_plus", "shock.epsilon", "shock.s",
      "shock.J_plus", "domain.L", "domain.n_points", "domain.order", "domain.tol", "spectra.xi_max", "spectra.n_xi",
      "eigen.n", "eigen.L", "eigen.localization_threshold", "eigen.tol_margin", "eigen.match_distance",
      "eigen.stencil_order", "eigen.closure", "eigen.max_dense", "energy.tail_floor", "sweep.epsilon", "output_dir"};

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (!known.count(key)) throw ParseError("unknown key '" + key + "'", line_no);
    if (kv.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);
    kv[key] = {value, line_no};
  }

  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto num = [&](const char* k) { return detail::parse_double(kv.at(k).value, kv.at(k).line); };
  auto integer = [&](const char* k) { return detail::parse_int(kv.at(k).value, kv.at(k).line); };
  auto line_of = [&](const char* k) { return has(k) ? kv.at(k).line : 0; };
  auto require = [&](const char* k) {
    if (!has(k)) throw ParseError(std::string("missing required key '") + k + "'", 0);
  };
  auto one_of = [&](const char* a, const char* b) {
    if (has(a) == has(b))
      throw ParseError(std::string("exactly one of '") + a + "' and '" + b + "' is required",
                       std::max(line_of(a), line_of(b)));
  };

  RunConfig c;
  require("shock.gamma");
  require("shock.mu");
  require("shock.k");
  require("shock.epsilon");
  one_of("shock.P_minus", "shock.P_plus");
  one_of("shock.s", "shock.J_plus");
  ShockParams& p = c.shock;
  p.gamma = num("shock.gamma");
  p.mu = num("shock.mu");
  p.k = num("shock.k");
  p.epsilon = num("shock.epsilon");
  p.P_minus = has("shock.P_minus") ? num("shock.P_minus") : num("shock.P_plus") + p.epsilon;

  auto invalid = [&](const std::string& m, const char* key) { throw ParseError(m, line_of(key)); };
  if (!(p.gamma >= 1.0)) invalid("shock.gamma must be >= 1", "shock.gamma");
  if (!(p.mu > 0.0)) invalid("shock.mu must be > 0", "shock.mu");
  if (!(p.k > 0.0)) invalid("shock.k must be > 0", "shock.k");
  if (!(p.epsilon > 0.0)) invalid("shock.epsilon must be > 0", "shock.epsilon");
  if (!(p.P_minus > 0.0)) invalid("P_minus must be > 0", has("shock.P_minus") ? "shock.P_minus" : "shock.P_plus");
  if (!(p.epsilon < p.P_minus)) invalid("shock.epsilon must be < P_minus", "shock.epsilon");
  if (has("shock.s")) {
    p.s = num("shock.s");
  } else {
    p.s = speed_from_right_momentum(p.P_minus, p.epsilon, p.gamma, num("shock.J_plus"));
  }
  if (!(p.s > 0.0)) invalid("shock speed must be > 0", has("shock.s") ? "shock.s" : "shock.J_plus");

  if (has("domain.L")) {
    c.L = num("domain.L");
    if (!(*c.L > 0)) invalid("domain.L must be > 0", "domain.L");
  }
  if (has("domain.n_points")) c.n_points = integer("domain.n_points");
  if (has("domain.order")) c.order = integer("domain.order");
  if (has("domain.tol")) c.newton_tol = num("domain.tol");
  if (c.order < 2 || c.order % 2) invalid("domain.order must be even and >= 2", "domain.order");
  if (c.n_points < c.order + 6) invalid("domain.n_points too small", "domain.n_points");
  if (!(c.newton_tol > 0)) invalid("domain.tol must be > 0", "domain.tol");
  if (has("spectra.xi_max")) c.xi_max = num("spectra.xi_max");
  if (has("spectra.n_xi")) c.n_xi = integer("spectra.n_xi");
  if (!(c.xi_max > 0)) invalid("spectra.xi_max must be > 0", "spectra.xi_max");
  if (c.n_xi < 3) invalid("spectra.n_xi must be >= 3", "spectra.n_xi");
  if (has("eigen.n")) c.eigen_n = integer("eigen.n");
  if (has("eigen.L")) {
    c.eigen_L = num("eigen.L");
    if (!(*c.eigen_L > 0)) invalid("eigen.L must be > 0", "eigen.L");
  }
  if (has("eigen.localization_threshold")) c.localization_threshold = num("eigen.localization_threshold");
  if (has("eigen.tol_margin")) c.tol_margin = num("eigen.tol_margin");
  if (has("eigen.match_distance")) c.match_distance = num("eigen.match_distance");
  if (has("eigen.stencil_order")) c.eigen_order = integer("eigen.stencil_order");
  if (has("eigen.max_dense")) c.max_dense = integer("eigen.max_dense");
  if (has("eigen.closure")) {
    const auto& v = kv.at("eigen.closure").value;
    if (v == "zero_ghost")
      c.eigen_closure = EigenClosure::zero_ghost;
    else if (v == "dirichlet_one_sided")
      c.eigen_closure = EigenClosure::dirichlet_one_sided;
    else
      invalid("eigen.closure must be zero_ghost or dirichlet_one_sided", "eigen.closure");
  }
  if (c.eigen_n < 16) invalid("eigen.n must be >= 16", "eigen.n");
  if (c.eigen_order < 2 || c.eigen_order % 2) invalid("eigen.stencil_order must be even and >= 2", "eigen.stencil_order");
  if (!(c.localization_threshold > 0 && c.localization_threshold < 1))
    invalid("eigen.localization_threshold must lie in (0, 1)", "eigen.localization_threshold");
  if (!(c.tol_margin >= 0)) invalid("eigen.tol_margin must be >= 0", "eigen.tol_margin");
  if (has("energy.tail_floor")) c.tail_floor = num("energy.tail_floor");
  if (has("sweep.epsilon")) {
    const auto& e = kv.at("sweep.epsilon");
    std::string_view v = e.value;
    size_t start = 0;
    while (start <= v.size()) {
      size_t comma = v.find(',', start);
      auto item = v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      double x = detail::parse_double(item, e.line);
      if (!(x > 0 && x < p.P_minus)) throw ParseError("sweep.epsilon values must lie in (0, P_minus)", e.line);
      c.sweep.push_back(x);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  if (has("output_dir")) c.output_dir = kv.at("output_dir").value;
  return c;
}

}  // namespace qhd
