#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qhd/config.hpp"
#include "qhd/energy_estimates.hpp"
#include "qhd/essential_spectrum.hpp"
#include "qhd/fit.hpp"
#include "qhd/io.hpp"
#include "qhd/point_spectrum.hpp"
#include "qhd/profile.hpp"
#include "qhd/shock_data.hpp"

namespace qhd {

namespace fs = std::filesystem;

struct Verdict {
  std::string name;
  bool pass = false;
  json detail;
};

// Upper bound on the round-off level of first differences of P; monotonicity is
// judged against it because P' sits at the noise floor in the tails.
inline double derivative_noise(const WaveProfile& w, double P_scale) {
  DiffOperator D1(int(w.P.size()), w.h, 1, w.order > 0 ? w.order : 4);
  double wsum = 0;
  for (int j = 0; j < D1.size(); ++j) {
    double t = 0;
    for (double v : D1.row(j).w) t += std::abs(v);
    wsum = std::max(wsum, t);
  }
  return 100.0 * std::numeric_limits<double>::epsilon() * P_scale * wsum;
}

// Smallest half-width outside which |P - P_end| <= rel_tol * eps on both sides,
// rounded up to a multiple of 10.
inline double eigen_window(const WaveProfile& w, const EndStates& e, double rel_tol = 1e-10) {
  double tol = rel_tol * e.epsilon;
  double yl = 0, yr = 0;
  for (size_t j = 0; j < w.P.size(); ++j) {
    double y = w.grid[j];
    if (y < 0 && std::abs(w.P[j] - e.P_minus) > tol) yl = std::max(yl, -y);
    if (y > 0 && std::abs(w.P[j] - e.P_plus) > tol) yr = std::max(yr, y);
  }
  double Y = std::max(yl, yr);
  return std::min(w.L, 10.0 * std::ceil(Y / 10.0 + 1e-12));
}

inline json params_json(const ShockParams& p) {
  return {{"gamma", p.gamma}, {"mu", p.mu}, {"k", p.k}, {"P_minus", p.P_minus}, {"epsilon", p.epsilon}, {"s", p.s}};
}

inline json endstates_json(const ShockParams& p, const EndStates& e) {
  auto rh = rankine_hugoniot_residuals(e);
  auto sub = check_subsonicity_conditions(e, p);
  double P0 = critical_point_P0(e);
  return {
      {"params", params_json(p)},
      {"end_states",
       {{"P_plus", e.P_plus}, {"P_minus", e.P_minus}, {"J_plus", e.J_plus}, {"J_minus", e.J_minus}, {"A", e.A},
        {"B", e.B}, {"u_plus", e.u_plus}, {"u_minus", e.u_minus}, {"cs_plus", e.cs_plus}, {"cs_minus", e.cs_minus},
        {"s_bar", e.s_bar}, {"subsonic_minus", e.subsonic_minus}, {"subsonic_plus", e.subsonic_plus},
        {"lax2", e.lax2}}},
      {"rankine_hugoniot_residual", {{"mass", rh.mass}, {"momentum", rh.momentum}}},
      {"critical_point", {{"P0", P0}, {"df_at_P0", df_of_P(P0, e)}, {"f_at_midpoint", f_of_P(0.5 * (e.P_plus + e.P_minus), e)}}},
      {"expansions",
       {{"A_leading", expansion_A_leading(p.P_minus, p.epsilon, p.gamma)},
        {"A_error", std::abs(e.A - expansion_A_leading(p.P_minus, p.epsilon, p.gamma))},
        {"P0_leading", expansion_P0_leading(p.P_minus, p.epsilon)},
        {"P0_error", std::abs(P0 - expansion_P0_leading(p.P_minus, p.epsilon))}}},
      {"subsonicity",
       {{"left_subsonic", sub.left_subsonic}, {"s_below_2cs", sub.s_below_2cs}, {"u_minus_small", sub.u_minus_small},
        {"s_below_gamma_bound", sub.s_below_gamma_bound}, {"implication_i_ii", sub.implication_i_ii},
        {"implication_iii_iv", sub.implication_iii_iv}, {"gamma3_i_implies_iii", sub.gamma3_i_implies_iii}}},
  };
}

// One pipeline run for a single shock; stages are computed lazily and shared.
class Run {
 public:
  Run(RunConfig cfg, fs::path dir) : cfg_(std::move(cfg)), dir_(std::move(dir)), es_(lax_end_states(cfg_.shock)) {
    fs::create_directories(dir_);
  }

  const RunConfig& config() const { return cfg_; }
  const EndStates& end_states() const { return es_; }
  const std::vector<Verdict>& verdicts() const { return verdicts_; }
  json summary() const { return summary_; }

  bool all_pass() const {
    return std::all_of(verdicts_.begin(), verdicts_.end(), [](const Verdict& v) { return v.pass; });
  }

  void endstates() {
    auto j = endstates_json(cfg_.shock, es_);
    write_json(dir_ / "endstates.json", j);
  }

  const WaveProfile& profile() {
    if (!profile_) {
      ProfileOptions po;
      po.order = cfg_.order;
      profile_ = solve_profile(cfg_.shock, es_, cfg_.domain_L(), cfg_.n_points, cfg_.newton_tol, po);
    }
    return *profile_;
  }

  const BorderPair& borders() {
    if (!borders_) borders_ = fredholm_borders(es_, cfg_.shock, cfg_.xi_max, cfg_.n_xi);
    return *borders_;
  }

  void profile_stage() {
    const auto& w = profile();
    const auto& p = cfg_.shock;
    {
      CsvWriter csv(dir_ / "profile.csv", {"y", "P", "dP", "d2P", "J"});
      for (size_t j = 0; j < w.P.size(); ++j) csv.cell(w.grid[j]).cell(w.P[j]).cell(w.dP[j]).cell(w.d2P[j]).cell(w.J[j]).end_row();
    }
    auto sh = profile_shape(w, p, es_);
    auto d = decay_rates(w, p, es_);
    double noise = derivative_noise(w, es_.P_minus);
    bool monotone = sh.max_dP < noise;
    bool resid_ok = w.residual_inf <= 1e-8, bc_ok = w.bc_mismatch <= 1e-6;
    json j = {
        {"profile_ref", w.id},
        {"L", w.L},
        {"n_points", int(w.P.size())},
        {"order", w.order},
        {"left_boundary", w.left_projection ? "projection" : "dirichlet"},
        {"newton_iterations", w.newton_iterations},
        {"newton_residual", w.newton_residual},
        {"residual_inf", w.residual_inf},
        {"bc_mismatch", w.bc_mismatch},
        {"max_dP", sh.max_dP},
        {"max_dP_y", w.grid[sh.argmax_dP]},
        {"monotone_noise_level", noise},
        {"max_abs_dP", sh.max_abs_dP},
        {"max_abs_d2P", sh.max_abs_d2P},
        {"overshoot", sh.overshoot},
        {"J_consistency", sh.J_consistency},
        {"decay",
         {{"rate_minus", d.minus.rate}, {"rate_plus", d.plus.rate}, {"theta_minus", d.theta_minus},
          {"theta_plus", d.theta_plus}, {"predicted_rate", d.predicted_rate}, {"fit_points_minus", d.minus.points},
          {"fit_points_plus", d.plus.points}, {"warnings", d.warnings}}},
        {"checks",
         {{"residual_le_1e-8", resid_ok}, {"bc_mismatch_le_1e-6", bc_ok}, {"monotone", monotone}}},
    };
    write_json(dir_ / "profile.json", j);
    Verdict v{"profile", monotone && resid_ok && bc_ok, {}};
    if (!v.pass) {
      v.detail = {{"max_dP", sh.max_dP}, {"y", w.grid[sh.argmax_dP]}, {"margin", noise - sh.max_dP},
                  {"residual_inf", w.residual_inf}, {"bc_mismatch", w.bc_mismatch}};
    }
    add(v);
    summary_["max_abs_dP"] = sh.max_abs_dP;
    summary_["max_abs_d2P"] = sh.max_abs_d2P;
    summary_["theta_minus"] = d.theta_minus;
    summary_["theta_plus"] = d.theta_plus;
    summary_["rate_minus"] = d.minus.rate;
    summary_["rate_plus"] = d.plus.rate;
    summary_["residual_inf"] = w.residual_inf;
  }

  void essential_stage() {
    const auto& b = borders();
    {
      CsvWriter csv(dir_ / "essential.csv",
                    {"xi", "re_lambda_plus", "im_lambda_plus", "re_lambda_minus", "im_lambda_minus", "side"});
      for (const SpectrumCurve* c : {&b.plus, &b.minus})
        for (size_t i = 0; i < c->xi_grid.size(); ++i)
          csv.cell(c->xi_grid[i]).cell(c->lambda_plus[i].real()).cell(c->lambda_plus[i].imag())
              .cell(c->lambda_minus[i].real()).cell(c->lambda_minus[i].imag()).cell(std::string(side_name(c->end_state_tag)))
              .end_row();
    }
    auto v = essential_stability_verdict(b);
    json gap = json::array();
    for (auto [d, s] : v.gap_profile) gap.push_back({{"delta", d}, {"sup_re", jnum(s)}});
    json j = {
        {"verdict", v.pass ? "PASS" : "FAIL"},
        {"tolerance", v.tol},
        {"max_re", v.max_re},
        {"xi_at_max_re", v.xi_at_max},
        {"side_at_max_re", side_name(v.side_at_max)},
        {"zero_only_at_origin", v.zero_only_at_origin},
        {"tangency_order", v.tangency_order},
        {"tangency_coefficient", v.tangency_coefficient},
        {"gap_profile", gap},
        {"xi_max", cfg_.xi_max},
        {"xi_max_note", "xi_max default 20 is a chosen plotting range"},
        {"n_xi", int(b.plus.xi_grid.size())},
        {"alpha_plus", b.plus.coeffs.alpha},
        {"beta_plus", b.plus.coeffs.beta},
        {"alpha_minus", b.minus.coeffs.alpha},
        {"beta_minus", b.minus.coeffs.beta},
    };
    write_json(dir_ / "essential.json", j);
    Verdict vd{"essential", v.pass, {}};
    if (!v.pass)
      vd.detail = {{"max_re", v.max_re}, {"xi", v.xi_at_max}, {"side", side_name(v.side_at_max)}, {"margin", v.tol - v.max_re}};
    add(vd);
  }

  double eigen_half_width() {
    if (cfg_.eigen_L) return *cfg_.eigen_L;
    return eigen_window(profile(), es_);
  }

  void point_stage() {
    const auto& p = cfg_.shock;
    double Le = eigen_half_width();
    ProfileOptions po;
    po.order = cfg_.order;
    WaveProfile w = solve_profile(p, es_, Le, cfg_.eigen_n, cfg_.newton_tol, po);
    PointOptions opt;
    opt.stencil_order = cfg_.eigen_order;
    opt.closure = cfg_.eigen_closure;
    auto op = assemble_integrated(w, p, es_, opt);
    auto orig = assemble_original(w, p, es_, opt);
    double zm = zero_mode_residual(orig);
    EigenOptions eo;
    eo.localization_threshold = cfg_.localization_threshold;
    eo.max_dense = cfg_.max_dense;
    auto r = eigen_solve(op, eo);
    r.zero_mode_residual = zm;
    auto v = stability_verdict(r, borders(), {cfg_.tol_margin, cfg_.match_distance});
    {
      CsvWriter csv(dir_ / "point.csv", {"re", "im", "localization", "classified_as"});
      std::vector<int> idx(r.eigenvalues.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
      std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        auto za = r.eigenvalues[a], zb = r.eigenvalues[b];
        return za.real() != zb.real() ? za.real() > zb.real() : za.imag() > zb.imag();
      });
      for (int i : idx)
        csv.cell(r.eigenvalues[i].real()).cell(r.eigenvalues[i].imag()).cell(r.localization[i])
            .cell(std::string(class_name(v.classes[i]))).end_row();
    }
    json off = json::array();
    for (const auto& o : v.offenders)
      off.push_back({{"lambda", jcomplex(o.lambda)}, {"localization", o.localization},
                     {"border_distance", o.border_distance}, {"margin", -o.lambda.real() - cfg_.tol_margin}});
    json j = {
        {"verdict", v.pass ? "PASS" : "FAIL"},
        {"profile_ref", w.id},
        {"operator", "integrated"},
        {"closure", closure_name(opt.closure)},
        {"stencil_order", opt.stencil_order},
        {"L", Le},
        {"n", cfg_.eigen_n},
        {"h", w.h},
        {"matrix_size", r.size},
        {"max_re_point", jnum(r.max_re_point)},
        {"max_re_point_lambda", r.argmax_point >= 0 ? jcomplex(r.eigenvalues[r.argmax_point]) : json(nullptr)},
        {"max_re_all", r.max_re_all},
        {"spectral_margin", jnum(v.margin)},
        {"point_candidates", v.candidates},
        {"border_matched", v.matched},
        {"localization_threshold", cfg_.localization_threshold},
        {"localization_note", "point candidates are separated from essential-spectrum artifacts by boundary mass; heuristic"},
        {"tol_margin", cfg_.tol_margin},
        {"match_distance", cfg_.match_distance},
        {"max_relative_residual", r.max_relative_residual},
        {"conjugate_pairing", r.conjugate_pairing},
        {"matrix_norm", r.matrix_norm},
        {"zero_mode_residual", zm},
        {"profile_residual_inf", w.residual_inf},
        {"offenders", off},
    };
    write_json(dir_ / "point.json", j);
    Verdict vd{"point", v.pass, {}};
    if (!v.pass && !v.offenders.empty()) {
      const auto& o = v.offenders.front();
      vd.detail = {{"lambda", jcomplex(o.lambda)}, {"localization", o.localization},
                   {"margin", -o.lambda.real() - cfg_.tol_margin}};
    }
    add(vd);
    summary_["max_re_point"] = jnum(r.max_re_point);
    summary_["zero_mode_residual"] = zm;
    summary_["eigen_L"] = Le;
  }

  void energy_stage() {
    const auto& w = profile();
    auto r = energy_report(w, es_, cfg_.shock, cfg_.tail_floor);
    {
      CsvWriter csv(dir_ / "energy.csv", {"y", "f1", "f2", "g", "abs_dP"});
      for (size_t j = 0; j < w.P.size(); ++j) csv.cell(w.grid[j]).cell(r.f1[j]).cell(r.f2[j]).cell(r.g[j]).cell(r.abs_dP[j]).end_row();
    }
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", jnum(c.margin)}, {"index", c.index}, {"y", c.y}});
    auto yat = [&](int i) { return i >= 0 ? json(w.grid[i]) : json(nullptr); };
    json j = {
        {"verdict", r.pass ? "PASS" : "FAIL"},
        {"epsilon", r.epsilon},
        {"c1", r.c1},
        {"c2", r.c2},
        {"c3", jnum(r.c3)},
        {"c3_y", yat(r.c3_index)},
        {"c4", r.c4},
        {"c4_y", yat(r.c4_index)},
        {"C_bar", r.C_bar},
        {"C_bar_y", yat(r.C_bar_index)},
        {"tail_floor", r.tail_floor},
        {"floored_points", r.floored_points},
        {"form_agreement", r.form_agreement},
        {"g_agreement", r.g_agreement},
        {"checks", checks},
        {"profile_ref", w.id},
    };
    write_json(dir_ / "energy.json", j);
    Verdict vd{"energy", r.pass, {}};
    for (const auto& c : r.checks)
      if (!c.pass) {
        vd.detail = {{"check", c.name}, {"y", c.y}, {"margin", c.margin}};
        break;
      }
    add(vd);
    summary_["C_bar"] = r.C_bar;
    summary_["c1"] = r.c1;
    summary_["c2"] = r.c2;
    summary_["c3"] = jnum(r.c3);
    summary_["c4"] = r.c4;
  }

  void all() {
    endstates();
    profile_stage();
    essential_stage();
    energy_stage();
    point_stage();
    json v = json::object();
    for (const auto& x : verdicts_) v[x.name] = {{"pass", x.pass}, {"detail", x.detail}};
    json j = {{"verdicts", v}, {"all_pass", all_pass()}, {"summary", summary_}, {"params", params_json(cfg_.shock)}};
    write_json(dir_ / "all.json", j);
  }

 private:
  void add(Verdict v) {
    summary_[v.name] = v.pass ? "PASS" : "FAIL";
    verdicts_.push_back(std::move(v));
  }

  RunConfig cfg_;
  fs::path dir_;
  EndStates es_;
  std::optional<WaveProfile> profile_;
  std::optional<BorderPair> borders_;
  std::vector<Verdict> verdicts_;
  json summary_ = json::object();
};

inline RunConfig sweep_member(const RunConfig& base, double eps) {
  RunConfig c = base;
  c.shock.epsilon = eps;
  c.sweep.clear();
  // an explicit domain is kept; the default 40/eps follows the member
  return c;
}

inline std::string sweep_dir_name(size_t i, double eps) {
  return "eps_" + std::to_string(i) + "_" + format_double(eps);
}

struct SweepOutcome {
  bool all_pass = true;
  bool any_error = false;
  json summary;
};

inline double variation(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / std::abs(*lo);
}

inline SweepOutcome run_sweep(const RunConfig& base, const fs::path& dir, int jobs) {
  if (base.sweep.empty()) throw DomainError("sweep: config has no sweep.epsilon list");
  fs::create_directories(dir);
  const size_t m = base.sweep.size();
  std::vector<json> rows(m);
  std::vector<std::string> errors(m);
  std::vector<char> passed(m, 0);
  std::mutex mu;
  size_t next = 0;
  auto worker = [&] {
    for (;;) {
      size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= m) return;
        i = next++;
      }
      double eps = base.sweep[i];
      try {
        Run run(sweep_member(base, eps), dir / sweep_dir_name(i, eps));
        run.all();
        rows[i] = run.summary();
        passed[i] = run.all_pass();
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, std::min<int>(jobs, int(m))); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SweepOutcome out;
  CsvWriter csv(dir / "sweep.csv", {"epsilon", "max_abs_dP", "max_abs_d2P", "d2P_over_dP", "theta_minus", "theta_plus",
                                    "max_re_point", "C_bar", "c1", "c2", "c3", "c4", "essential", "point", "energy",
                                    "profile"});
  std::vector<double> eps_ok, dP, ratio, cbar, c1, c2, c3, c4, rate_p, rate_m;
  json members = json::array();
  auto num = [](const json& j, const char* k) {
    return j.contains(k) && j[k].is_number() ? j[k].get<double>() : std::nan("");
  };
  auto str = [](const json& j, const char* k) { return j.contains(k) ? j[k].get<std::string>() : std::string("n/a"); };
  for (size_t i = 0; i < m; ++i) {
    if (!errors[i].empty()) {
      out.any_error = true;
      members.push_back({{"epsilon", base.sweep[i]}, {"error", errors[i]}});
      continue;
    }
    const json& r = rows[i];
    out.all_pass = out.all_pass && passed[i];
    double a = num(r, "max_abs_dP"), b = num(r, "max_abs_d2P");
    csv.cell(base.sweep[i]).cell(a).cell(b).cell(b / a).cell(num(r, "theta_minus")).cell(num(r, "theta_plus"))
        .cell(num(r, "max_re_point")).cell(num(r, "C_bar")).cell(num(r, "c1")).cell(num(r, "c2")).cell(num(r, "c3"))
        .cell(num(r, "c4")).cell(str(r, "essential")).cell(str(r, "point")).cell(str(r, "energy")).cell(str(r, "profile"))
        .end_row();
    eps_ok.push_back(base.sweep[i]);
    dP.push_back(a);
    ratio.push_back(b / a);
    cbar.push_back(num(r, "C_bar"));
    c1.push_back(num(r, "c1"));
    c2.push_back(num(r, "c2"));
    c3.push_back(num(r, "c3"));
    c4.push_back(num(r, "c4"));
    rate_m.push_back(num(r, "rate_minus"));
    rate_p.push_back(num(r, "rate_plus"));
    json row = r;
    row["epsilon"] = base.sweep[i];
    row["directory"] = sweep_dir_name(i, base.sweep[i]);
    members.push_back(row);
  }
  json fits = json::object();
  if (eps_ok.size() >= 2) {
    auto positive = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x > 0 && std::isfinite(x); });
    };
    fits["slope_max_abs_dP"] = loglog_slope(eps_ok, dP);
    fits["slope_d2P_over_dP"] = loglog_slope(eps_ok, ratio);
    if (positive(rate_m)) fits["slope_rate_minus"] = loglog_slope(eps_ok, rate_m);
    if (positive(rate_p)) fits["slope_rate_plus"] = loglog_slope(eps_ok, rate_p);
    fits["variation_C_bar"] = jnum(variation(cbar));
    fits["variation_c1"] = jnum(variation(c1));
    fits["variation_c2"] = jnum(variation(c2));
    fits["variation_c3"] = jnum(variation(c3));
    fits["variation_c4"] = jnum(variation(c4));
  }
  out.summary = {{"members", members}, {"fits", fits}, {"all_pass", out.all_pass && !out.any_error},
                 {"variation_definition", "(max - min) / |min| across members"}};
  write_json(dir / "sweep.json", out.summary);
  return out;
}

}  // namespace qhd
