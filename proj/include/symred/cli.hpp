#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symred/config_io.hpp"
#include "symred/flow.hpp"
#include "symred/generators.hpp"
#include "symred/invariants.hpp"
#include "symred/quantization.hpp"

namespace symred::cli {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline std::string fmt_double(double x) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

inline ratvec parse_ratvec(const std::string& s) {
  ratvec out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(Rat::parse(tok));
  return out;
}

inline std::string ratvec_str(const ratvec& v, char sep = ';') {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i].str();
  }
  return s;
}

inline json ratvec_json(const ratvec& v) {
  json j = json::array();
  for (const Rat& r : v) j.push_back(r.str());
  return j;
}

inline void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw malformed_config("cannot open output path '" + out_path + "'");
  f << text;
}

inline std::string fnv1a(const std::string& s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Every report carries the tool version and a hash: of the rep config when
// one is fixed, of the batch parameters otherwise.
inline json envelope(const std::string& subcommand, const RepSpec* rep, uint64_t seed) {
  json j;
  j["tool"] = "symred";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  if (rep) {
    j["config"] = rep_to_json(*rep);
    j["config_hash"] = config_hash(*rep);
  } else {
    j["config_hash"] = fnv1a(subcommand + ":seed=" + std::to_string(seed));
  }
  return j;
}

struct CommonOpts {
  std::string rep_path;
  std::string out_path;
  std::string point;
  uint64_t seed = 1;
  double tol_phi = 1e-6;
  double tol_grad = 1e-10;
  double tmax = 1e8;
  int degree_cap = 10;
  bool csv = false;

  FlowOptions flow_options() const {
    FlowOptions o;
    o.phi_tol = tol_phi;
    o.grad_stop = tol_grad;
    o.t_max = tmax;
    return o;
  }

  RepSpec load_rep_or_default() const {
    if (!rep_path.empty()) return rep_from_file(rep_path);
    // the (1,-1)-resonance circle action on C^2
    return build_torus_rep({{1, -1}}, PhaseMode::Affine);
  }
};

inline json classify_row(const RepSpec& rep, const cvec& v, const FlowOptions& opts, int index) {
  FlowResult fr = integrate_flow(rep, v, opts);
  json row;
  row["index"] = index;
  row["point"] = state_to_json(v);
  row["tag"] = to_string(fr.classification.tag);
  row["closed_orbit"] = fr.classification.closed_orbit;
  row["indeterminate"] = fr.classification.indeterminate;
  row["phi_residual"] = fr.phi_residual;
  row["converged"] = fr.converged;
  if (rep.kind == GroupKind::Torus) {
    HullVerdict h = hull_oracle(rep, v);
    row["hull"] = {{"semistable", h.semistable}, {"closed", h.closed}, {"stable", h.stable}};
  }
  return row;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  using namespace detail;
  CLI::App app{"momentum maps, descent flows, stability and multiplicities for linear torus and SU(2) actions"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts c;
  app.add_option("--rep", c.rep_path, "rep config JSON path (default: the (1,-1) circle action)");
  app.add_option("--seed", c.seed, "seed for randomized batches");
  app.add_option("--tol-phi", c.tol_phi, "zero-level threshold on ||Phi||");
  app.add_option("--tol-grad", c.tol_grad, "gradient stopping threshold");
  app.add_option("--tmax", c.tmax, "flow time horizon");
  app.add_option("--degree-cap", c.degree_cap, "degree cap for basis/enumeration");
  app.add_option("--out", c.out_path, "output path (default stdout)");
  app.add_flag("--csv", c.csv, "tabular output as CSV");

  auto* sc_classify = app.add_subcommand("classify", "stability classification for a point or a random batch");
  int batch = 0;
  sc_classify->add_option("--point", c.point, "state as JSON, e.g. [[1,0],[1,0]]");
  sc_classify->add_option("--batch", batch, "number of seeded random points");

  auto* sc_flow = app.add_subcommand("flow", "descent trajectory dump");
  int max_samples = 256;
  sc_flow->add_option("--point", c.point, "state as JSON")->required();
  sc_flow->add_option("--max-samples", max_samples, "maximum trajectory samples kept");

  auto* sc_kn = app.add_subcommand("kn", "Kempf-Ness minimization report");
  sc_kn->add_option("--point", c.point, "state as JSON")->required();

  auto* sc_inv = app.add_subcommand("invariants", "Hilbert basis and orbit-type strata");

  auto* sc_mult = app.add_subcommand("multiplicity", "weight multiplicity table");
  std::vector<std::string> lambda_args;
  int kmax = 8;
  sc_mult->add_option("--lambda", lambda_args, "weight(s), comma-separated rationals, repeatable");
  sc_mult->add_option("--kmax", kmax, "degrees 0..kmax");

  auto* sc_ehr = app.add_subcommand("ehrhart", "lattice-count polynomial fit and volume check");
  std::string ehr_lambda;
  long long k0 = 1;
  int samples = 0;
  sc_ehr->add_option("--lambda", ehr_lambda, "weight, comma-separated rationals");
  sc_ehr->add_option("--k0", k0, "base degree");
  sc_ehr->add_option("--samples", samples, "number of dilation samples (default dim+3)");

  auto* sc_qr = app.add_subcommand("verify-qr", "dual-path invariant counting check");
  int qr_count = 50;
  sc_qr->add_option("--count", qr_count, "batch size (ignored when --rep is given)");
  sc_qr->add_option("--kmax", kmax, "degrees 0..kmax for the fixed-rep mode");

  auto* sc_id = app.add_subcommand("identities", "momentum-map identity residual suite");
  int id_count = 100;
  sc_id->add_option("--count", id_count, "number of seeded (rep, v, xi) triples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    FlowOptions opts = c.flow_options();
    opts.validate();

    if (sc_classify->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      json rep_json = envelope("classify", &rep, c.seed);
      json rows = json::array();
      std::string csv = "index,tag,closed_orbit,indeterminate,phi_residual\n";
      std::vector<cvec> points;
      if (!c.point.empty()) points.push_back(state_from_string(c.point));
      if (batch > 0) {
        SplitMix64 rng(c.seed);
        for (int i = 0; i < batch; ++i) points.push_back(random_state(rng, rep.n));
      }
      if (points.empty()) throw malformed_config("classify needs --point or --batch");
      for (size_t i = 0; i < points.size(); ++i) {
        json row = classify_row(rep, points[i], opts, static_cast<int>(i));
        csv += std::to_string(i) + "," + row["tag"].get<std::string>() + "," +
               (row["closed_orbit"].get<bool>() ? "true" : "false") + "," +
               (row["indeterminate"].get<bool>() ? "true" : "false") + "," +
               fmt_double(row["phi_residual"].get<double>()) + "\n";
        rows.push_back(std::move(row));
      }
      rep_json["rows"] = rows;
      emit(c.out_path, c.csv ? csv : rep_json.dump(2) + "\n");
      return 0;
    }

    if (sc_flow->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      opts.max_samples = max_samples;
      cvec v = state_from_string(c.point);
      FlowResult fr = integrate_flow(rep, v, opts);
      std::string text;
      text += "# symred flow dump\n";
      text += "# version " + std::string(kVersion) + " config " + config_hash(rep) + "\n";
      text += "# columns: t re(v1) im(v1) ... re(vn) im(vn) mu\n";
      for (const auto& s : fr.samples) {
        text += fmt_double(s.t);
        for (const auto& z : s.state) {
          text += " " + fmt_double(z.real()) + " " + fmt_double(z.imag());
        }
        text += " " + fmt_double(s.mu) + "\n";
      }
      text += "# converged " + std::string(fr.converged ? "true" : "false") + " phi_residual " +
              fmt_double(fr.phi_residual) + " classification " + to_string(fr.classification.tag) + "\n";
      emit(c.out_path, text);
      return 0;
    }

    if (sc_kn->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      cvec v = state_from_string(c.point);
      KempfNessOutcome kn = minimize_kempf_ness(rep, v, opts);
      json j = envelope("kn", &rep, c.seed);
      j["status"] = kn.status == KempfNessOutcome::Status::Minimum ? "minimum" : "divergent";
      j[kn.status == KempfNessOutcome::Status::Minimum ? "minimizer" : "direction"] = kn.xi;
      j["value"] = kn.value;
      j["iterations"] = kn.iterations;
      emit(c.out_path, j.dump(2) + "\n");
      return 0;
    }

    if (sc_inv->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      HilbertBasis hb = hilbert_basis(rep, c.degree_cap);
      json j = envelope("invariants", &rep, c.seed);
      json gens = json::array();
      for (const auto& g : hb.generators)
        gens.push_back({{"exps", g.exps}, {"degree", g.degree}, {"weight", g.weight}});
      j["generators"] = gens;
      j["complete_certified"] = hb.complete_certified;
      j["degree_cap"] = hb.degree_cap;
      json strata = json::array();
      for (const auto& s : enumerate_strata(rep)) {
        json sj;
        sj["kernel_basis"] = s.stabilizer_kernel;
        sj["supports"] = s.supports;
        sj["dimension"] = s.dimension;
        sj["stabilizer_dim"] = s.stabilizer_dim;
        strata.push_back(std::move(sj));
      }
      j["strata"] = strata;
      emit(c.out_path, j.dump(2) + "\n");
      return 0;
    }

    if (sc_mult->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      if (rep.kind != GroupKind::Torus) throw malformed_config("multiplicity tables are torus-only");
      std::vector<ratvec> lambdas;
      for (const auto& s : lambda_args) {
        ratvec l = parse_ratvec(s);
        if (static_cast<int>(l.size()) != rep.d) throw malformed_config("lambda length must equal torus rank");
        lambdas.push_back(std::move(l));
      }
      if (lambdas.empty()) lambdas.push_back(ratvec(rep.d, Rat(0)));
      std::vector<long long> degrees;
      for (long long k = 0; k <= kmax; ++k) degrees.push_back(k);
      auto rows = multiplicity_table(rep, lambdas, degrees);
      if (c.csv) {
        std::string csv = "lambda,degree,count\n";
        for (const auto& r : rows)
          csv += ratvec_str(r.lambda) + "," + std::to_string(r.degree) + "," + std::to_string(r.count) + "\n";
        emit(c.out_path, csv);
        return 0;
      }
      json j = envelope("multiplicity", &rep, c.seed);
      json jr = json::array();
      for (const auto& r : rows)
        jr.push_back({{"lambda", ratvec_json(r.lambda)},
                      {"degree", r.degree},
                      {"count", r.count},
                      {"in_weight_hull", r.in_weight_hull}});
      j["rows"] = jr;
      emit(c.out_path, j.dump(2) + "\n");
      return 0;
    }

    if (sc_ehr->parsed()) {
      RepSpec rep = c.load_rep_or_default();
      if (rep.kind != GroupKind::Torus) throw malformed_config("ehrhart is torus-only");
      ratvec lambda = ehr_lambda.empty() ? ratvec(rep.d, Rat(0)) : parse_ratvec(ehr_lambda);
      if (static_cast<int>(lambda.size()) != rep.d) throw malformed_config("lambda length must equal torus rank");
      FiberPolytope base = fiber_polytope(rep, lambda, k0);
      int want = samples > 0 ? samples : std::max(0, base.empty() ? 3 : base.dim()) + 3;
      EhrhartFit fit = ehrhart_fit(rep, lambda, k0, want);
      json j = envelope("ehrhart", &rep, c.seed);
      j["lambda"] = ratvec_json(lambda);
      j["k0"] = k0;
      j["period"] = fit.period;
      j["dim"] = fit.dim;
      json sj = json::array();
      for (auto& [r, cnt] : fit.samples) sj.push_back({{"r", r}, {"count", cnt}});
      j["samples"] = sj;
      json cj = json::array();
      for (const Rat& co : fit.coeffs) cj.push_back(co.str());
      j["coefficients"] = cj;
      j["leading"] = fit.leading.str();
      j["normalized_volume"] = fit.normalized_vol.str();
      j["leading_matches_volume"] = fit.leading_matches_volume;
      emit(c.out_path, j.dump(2) + "\n");
      return fit.leading_matches_volume ? 0 : 2;
    }

    if (sc_qr->parsed()) {
      json j = envelope("verify-qr", nullptr, c.seed);
      json rows = json::array();
      int failures = 0;
      if (!c.rep_path.empty()) {
        RepSpec rep = c.load_rep_or_default();
        j["config"] = rep_to_json(rep);
        j["config_hash"] = config_hash(rep);
        ratvec lambda(rep.d, Rat(0));
        for (long long k = 0; k <= kmax; ++k) {
          QrCheck q = verify_qr(rep, lambda, k);
          rows.push_back({{"degree", k}, {"upstairs", q.upstairs}, {"downstairs", q.downstairs}, {"equal", q.equal}});
          failures += q.equal ? 0 : 1;
        }
      } else {
        SplitMix64 rng(c.seed);
        TorusInstanceOptions o;
        o.n_max = 5;
        o.d_max = 2;
        o.w_max = 3;
        for (int i = 0; i < qr_count; ++i) {
          o.mode = i % 2 ? PhaseMode::Projective : PhaseMode::Affine;
          RepSpec rep = random_torus_rep(rng, o);
          ratvec lambda(rep.d, Rat(0));
          if (i % 2)
            for (Rat& l : lambda) l = Rat(rng.uniform_int(-2, 2));
          long long k = rng.uniform_int(0, 8);
          QrCheck q = verify_qr(rep, lambda, k);
          rows.push_back({{"index", i},
                          {"config", rep_to_json(rep)},
                          {"lambda", ratvec_json(lambda)},
                          {"degree", k},
                          {"upstairs", q.upstairs},
                          {"downstairs", q.downstairs},
                          {"equal", q.equal}});
          failures += q.equal ? 0 : 1;
        }
      }
      j["rows"] = rows;
      j["failures"] = failures;
      emit(c.out_path, j.dump(2) + "\n");
      return failures == 0 ? 0 : 2;
    }

    if (sc_id->parsed()) {
      json j = envelope("identities", nullptr, c.seed);
      json rows = json::array();
      SplitMix64 rng(c.seed);
      int failures = 0;
      double worst = 0.0;
      for (int i = 0; i < id_count; ++i) {
        RepSpec rep = i % 3 == 2 ? random_su2_rep(rng) : random_torus_rep(rng);
        cvec v = random_state(rng, rep.n);
        lievec xi = random_lie(rng, rep.lie_dim());
        IdentityResiduals r = identity_residuals(rep, v, xi);
        double m = std::max(std::max(r.grad_identity, r.angle_identity), std::max(r.mu_identity, r.isotropy));
        worst = std::max(worst, m);
        bool ok = m < 1e-8;
        failures += ok ? 0 : 1;
        rows.push_back({{"index", i},
                        {"kind", rep.kind == GroupKind::Torus ? "torus" : "su2"},
                        {"grad", r.grad_identity},
                        {"angle", r.angle_identity},
                        {"mu", r.mu_identity},
                        {"isotropy", r.isotropy},
                        {"ok", ok}});
      }
      j["rows"] = rows;
      j["worst_residual"] = worst;
      j["failures"] = failures;
      emit(c.out_path, j.dump(2) + "\n");
      return failures == 0 ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("symred");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace symred::cli
