#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "padic/approx.hpp"
#include "padic/dimension.hpp"
#include "padic/error.hpp"
#include "padic/manifold.hpp"
#include "padic/minkowski.hpp"

namespace padic::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr int kSchemaVersion = 1;

json header(const std::string& command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

json str(const Rational& r) { return to_string(r); }
json str(const Integer& z) { return to_string(z); }

std::vector<Rational> rationals(const std::vector<std::string>& xs) {
  std::vector<Rational> out;
  for (const auto& x : xs)
    for (const auto& r : parse_rational_list(x)) out.push_back(r);
  return out;
}

json rational_array(std::span<const Rational> xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(str(x));
  return a;
}

json integer_array(std::span<const Integer> xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(str(x));
  return a;
}

ApproxTuple psi_tuple(const std::vector<std::string>& texts, int n) {
  if (texts.empty()) throw Error(Errc::InvalidArgument, "--psi is required");
  if (texts.size() != 1 && texts.size() != static_cast<std::size_t>(n))
    throw Error(Errc::InvalidArgument, "give one --psi or one per coordinate");
  ApproxTuple psi;
  for (int i = 0; i < n; ++i) psi.push_back(parse_psi(texts.size() == 1 ? texts[0] : texts[i]));
  return psi;
}

json psi_json(const ApproxTuple& psi) {
  json a = json::array();
  for (const auto& f : psi) a.push_back(f.to_string());
  return a;
}

json series_json(const SeriesValue& s) {
  json j;
  j["exact"] = s.exact ? json(str(*s.exact)) : json(nullptr);
  j["approx"] = s.approx;
  return j;
}

json counts_json(const std::map<int, Integer>& counts) {
  json j = json::object();
  for (const auto& [k, c] : counts) j[std::to_string(k)] = str(c);
  return j;
}

double six_decimals(double x) { return std::round(x * 1e6) / 1e6; }

json fit_json(const BoxDimFit& fit) {
  json j;
  j["slope"] = six_decimals(fit.slope);
  j["intercept"] = six_decimals(fit.intercept);
  j["levels"] = fit.levels;
  json r = json::array();
  for (double x : fit.residuals) r.push_back(six_decimals(x));
  j["residuals"] = r;
  return j;
}

json exact_power_json(const ExactPower& v) {
  json j;
  j["exact"] = v.to_string();
  j["approx"] = v.to_double();
  return j;
}

Rational json_rational(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw Error(Errc::Parse, "coefficients must be integers or \"p/q\" strings");
}

DQEMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open map file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("bad map JSON: ") + e.what());
  }
  const long p = j.at("p").get<long>();
  const int d = j.at("d").get<int>();
  const int m = j.at("m").get<int>();
  std::vector<Polynomial> polys;
  for (const auto& poly : j.at("polys")) {
    std::vector<Monomial> terms;
    for (const auto& term : poly) terms.push_back({json_rational(term.at(0)), term.at(1).get<std::vector<int>>()});
    polys.emplace_back(d, std::move(terms));
  }
  if (static_cast<int>(polys.size()) != m) throw Error(Errc::InvalidArgument, "map has m != number of polys");
  return DQEMap(p, d, std::move(polys));
}

json point_json(const RationalPoint& pt) {
  json j;
  j["a"] = integer_array(pt.a);
  j["height"] = str(pt.height);
  j["a0_coprime_to_p"] = pt.a0_coprime_to_p;
  j["primitive"] = pt.primitive;
  j["in_domain"] = pt.in_domain;
  return j;
}

int jobs_of(int jobs, bool serial) { return serial ? 1 : std::max(1, jobs); }

struct Common {
  long p = 3;
  int n = 1;
  int depth = 24;
  int jobs = 1;
  bool serial = false;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact experiments in simultaneous p-adic approximation", "padic"};
  app.require_subcommand(1);
  Common c;
  std::vector<std::string> psi_texts;
  bool reduced = false;
  long a0 = 1, b0 = 1, from = 1, to = 1, count = 1;
  std::string format = "json";

  auto add_space = [&](CLI::App* s) {
    s->add_option("--p", c.p, "prime")->default_val(3);
    s->add_option("--n", c.n, "dimension")->default_val(1);
  };
  auto add_depth = [&](CLI::App* s, int dflt) { s->add_option("--depth", c.depth, "trie depth K")->default_val(dflt); };
  auto add_jobs = [&](CLI::App* s) {
    s->add_option("--jobs", c.jobs, "worker threads")->default_val(1);
    s->add_flag("--serial", c.serial, "single-threaded reference mode");
  };

  auto* layer = app.add_subcommand("measure-layer", "exact measure of one approximation layer");
  add_space(layer);
  add_depth(layer, 24);
  layer->add_option("--psi", psi_texts, "approximation function(s)")->required();
  layer->add_option("--a0", a0)->required();
  layer->add_flag("--reduced", reduced, "coprime numerators only");

  auto* claims = app.add_subcommand("claims-check", "layer measure identities and pairwise intersection");
  add_space(claims);
  add_depth(claims, 24);
  claims->add_option("--psi", psi_texts)->required();
  claims->add_option("--a0", a0)->required();
  claims->add_option("--b0", b0)->required();

  auto* kh = app.add_subcommand("khintchine", "partial sum of sum_q q^n prod psi_i(q)");
  kh->add_option("--n", c.n)->default_val(1);
  kh->add_option("--psi", psi_texts)->required();
  kh->add_option("--N", count)->required();
  auto* ds = app.add_subcommand("duffin-schaeffer", "partial sum of sum_q phi(q)^n prod psi_i(q)");
  ds->add_option("--n", c.n)->default_val(1);
  ds->add_option("--psi", psi_texts)->required();
  ds->add_option("--N", count)->required();

  auto* lim = app.add_subcommand("partial-limsup", "union of layers a0 in [from, to]");
  add_space(lim);
  add_depth(lim, 24);
  add_jobs(lim);
  lim->add_option("--psi", psi_texts)->required();
  lim->add_option("--from", from)->default_val(1);
  lim->add_option("--to", to)->required();
  lim->add_flag("--reduced", reduced);
  lim->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}))->default_val("json");

  std::vector<std::string> forms_text, tau_text, sigma_text, v_text, x_text, a_text, t_text;
  std::vector<long> heights;
  int precision = 60;
  bool oracle = false;
  auto* mink = app.add_subcommand("minkowski", "small solution of a p-adic linear form system");
  mink->add_option("--p", c.p)->default_val(3);
  mink->add_option("--forms", forms_text, "one row per form, comma separated rationals")->required();
  mink->add_option("--H", heights, "heights H_0..H_n, or one for all")->required();
  mink->add_option("--tau", tau_text)->required();
  mink->add_option("--sigma", sigma_text)->required();
  mink->add_option("--precision", precision)->default_val(40);
  mink->add_flag("--oracle", oracle, "also run the exhaustive search");

  std::string map_path;
  long H = 1, Hmax = 1;
  std::uint64_t seed = 0;
  bool random_x = false;
  std::string delta_text = "1";
  auto* dsolve = app.add_subcommand("dirichlet-solve", "Dirichlet system on the graph of a polynomial map");
  dsolve->add_option("--map", map_path, "JSON map fixture")->required();
  dsolve->add_option("--x", x_text, "base point coordinates (rationals)");
  dsolve->add_option("--seed", seed, "random base point from this seed")->each([&](const std::string&) { random_x = true; });
  dsolve->add_option("--precision", precision)->default_val(60);
  dsolve->add_option("--tau", tau_text, "dependent exponents")->required();
  dsolve->add_option("--v", v_text, "independent exponents")->required();
  dsolve->add_option("--H", H)->required();

  std::size_t limit = 1000;
  auto* stau = app.add_subcommand("enumerate-s-tau", "resonant integer points near the graph");
  stau->add_option("--map", map_path)->required();
  stau->add_option("--tau", tau_text, "dependent exponents")->required();
  stau->add_option("--Hmax", Hmax)->required();
  stau->add_option("--limit", limit, "points to print")->default_val(1000);
  add_jobs(stau);

  auto* cover = app.add_subcommand("cover-preimage", "finite cover of the preimage of the approximable set");
  cover->add_option("--map", map_path)->required();
  cover->add_option("--tau", tau_text, "full weight vector")->required();
  cover->add_option("--delta", delta_text)->default_val("1");
  cover->add_option("--Hmax", Hmax)->required();
  add_depth(cover, 12);
  add_jobs(cover);

  auto* dim = app.add_subcommand("dim", "dimension formulas");
  dim->require_subcommand(1);
  int d = 1, m = 0;
  std::string which, variant = "K2-sum";
  auto* jb = dim->add_subcommand("jb", "weighted Jarnik-Besicovitch");
  jb->add_option("--n", c.n);
  jb->add_option("--tau", tau_text)->required();
  auto* rynne = dim->add_subcommand("rynne", "real weighted formula");
  rynne->add_option("--n", c.n);
  rynne->add_option("--tau", tau_text)->required();
  auto* ww = dim->add_subcommand("ww", "rectangle mass transference exponent");
  ww->add_option("--a", a_text)->required();
  ww->add_option("--t", t_text)->required();
  ww->add_option("--variant", variant)->check(CLI::IsMember({"K2-sum", "K3-sum"}))->default_val("K2-sum");
  auto* manifold = dim->add_subcommand("manifold", "lower bounds on manifolds");
  manifold->add_option("--which", which)->check(CLI::IsMember({"equal", "curve", "general"}))->required();
  manifold->add_option("--tau", tau_text)->required();
  manifold->add_option("--d", d)->required();
  manifold->add_option("--m", m)->required();
  auto* water = dim->add_subcommand("waterfill", "level fill of the weights");
  water->add_option("--tau", tau_text)->required();
  water->add_option("--d", d, "independent count (manifold form)")->default_val(0);
  water->add_option("--m", m)->default_val(0);

  std::vector<std::string> count_text;
  int exclude = 2;
  auto* box = app.add_subcommand("boxdim", "box-counting slope from level:count pairs");
  box->add_option("--p", c.p)->default_val(3);
  box->add_option("--counts", count_text, "k:N entries")->required();
  box->add_option("--exclude", exclude, "coarse levels to drop")->default_val(2);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    json j;
    if (*layer) {
      Params params{c.p, c.n};
      params.validate();
      const auto psi = psi_tuple(psi_texts, c.n);
      const auto set = build_layer(params, psi, a0, reduced, c.depth);
      const auto t = layer_exponents(psi, a0, c.p);
      Rational scale = 1;
      json clipped = json::array();
      for (const auto& f : psi) clipped.push_back(step_exponent(f, a0, c.p).clipped);
      for (long ti : t) scale /= ipow(Integer(c.p), static_cast<unsigned long>(ti));
      const Rational phi = Rational(ipow(Integer(static_cast<unsigned long>(euler_phi(static_cast<std::uint64_t>(a0)))), static_cast<unsigned long>(c.n)));
      const Rational adm = Rational(ipow(admissible_count(a0, reduced), static_cast<unsigned long>(c.n)));
      j = header("measure-layer");
      j["p"] = c.p;
      j["n"] = c.n;
      j["a0"] = a0;
      j["reduced"] = reduced;
      j["psi"] = psi_json(psi);
      j["exponents"] = t;
      j["clipped"] = clipped;
      j["measure"] = str(set.measure());
      j["reference"] = "phi*p^-t";
      j["phi_reference"] = str(phi * scale);
      j["equal"] = set.measure() == phi * scale;
      j["admissible_reference"] = str(adm * scale);
      j["admissible_equal"] = set.measure() == adm * scale;
    } else if (*claims) {
      Params params{c.p, c.n};
      params.validate();
      const auto psi = psi_tuple(psi_texts, c.n);
      const auto r = measure_claims_check(params, psi, a0, b0, c.depth);
      j = header("claims-check");
      j["a0"] = r.a0;
      j["b0"] = r.b0;
      j["exponents"] = r.exponents;
      j["layer_measure"] = str(r.layer_measure);
      j["phi_reference"] = str(r.phi_reference);
      j["phi_equal"] = r.phi_equal;
      j["admissible_reference"] = str(r.admissible_reference);
      j["disjoint"] = r.disjoint;
      j["intersection_measure"] = str(r.intersection_measure);
      j["scale"] = exact_power_json(r.claim_c_scale);
      j["ratio"] = r.claim_c_ratio;
    } else if (*kh || *ds) {
      const auto psi = psi_tuple(psi_texts, c.n);
      j = header(*kh ? "khintchine" : "duffin-schaeffer");
      j["n"] = c.n;
      j["N"] = count;
      j["psi"] = psi_json(psi);
      j["sum"] = series_json(*kh ? khintchine_sum(c.n, psi, count) : duffin_schaeffer_sum(c.n, psi, count));
    } else if (*lim) {
      Params params{c.p, c.n};
      params.validate();
      const auto psi = psi_tuple(psi_texts, c.n);
      LimsupOptions opts{reduced, c.depth, static_cast<unsigned>(jobs_of(c.jobs, c.serial))};
      if (format == "csv") {
        out << "a0,exponents,layer_measure,phi_reference,admissible_reference,union_measure,khintchine_partial,"
               "duffin_schaeffer_partial\n";
        for (const auto& row : limsup_rows(params, psi, from, to, opts)) {
          std::string e;
          for (long t : row.exponents) e += (e.empty() ? "" : ";") + std::to_string(t);
          out << row.a0 << "," << e << "," << to_string(row.layer_measure) << "," << to_string(row.phi_reference)
              << "," << to_string(row.admissible_reference) << "," << to_string(row.union_measure) << ","
              << row.khintchine_partial.to_string() << "," << row.duffin_schaeffer_partial.to_string() << "\n";
        }
        return 0;
      }
      const auto set = partial_limsup(params, psi, from, to, opts);
      j = header("partial-limsup");
      j["p"] = c.p;
      j["n"] = c.n;
      j["psi"] = psi_json(psi);
      j["from"] = from;
      j["to"] = to;
      j["reduced"] = reduced;
      j["depth"] = c.depth;
      j["measure"] = str(set.measure());
      j["measure_approx"] = to_double(set.measure());
      j["generation_counts"] = counts_json(generation_box_counts(params, psi, from, to, opts));
      const auto next = layer_exponents(psi, to + 1, c.p);
      j["complete_below"] = *std::max_element(next.begin(), next.end());
    } else if (*mink) {
      LinearFormSystem sys;
      sys.p = c.p;
      for (const auto& row : forms_text) {
        std::vector<PAdicInt> form;
        for (const auto& r : parse_rational_list(row)) form.push_back(embed_rational(r, c.p, precision));
        sys.forms.push_back(std::move(form));
      }
      const std::size_t vars = sys.forms.empty() ? 0 : sys.forms[0].size();
      sys.heights = heights.size() == 1 ? std::vector<long>(vars, heights[0]) : heights;
      sys.tau = rationals(tau_text);
      sys.sigma = rationals(sigma_text);
      const auto r = solve(sys);
      j = header("minkowski");
      j["x"] = r.x;
      j["bucket_exponents"] = r.bucket_exponents;
      j["used_exponents"] = r.used_exponents;
      j["surplus"] = r.surplus;
      j["boundary"] = r.boundary;
      j["method"] = method_name(r.method);
      j["verified"] = r.verified;
      if (oracle) {
        const auto bf = brute_force(sys);
        j["oracle"] = bf ? json(*bf) : json(nullptr);
      }
    } else if (*dsolve) {
      auto f = load_map(map_path);
      std::vector<PAdicInt> x;
      if (random_x) {
        std::mt19937_64 rng(seed);
        const Integer mod = ipow(Integer(f.prime()), static_cast<unsigned long>(precision));
        for (int i = 0; i < f.d(); ++i) {
          Integer r = 0;
          for (int w = 0; w < precision; ++w) r = r * 4294967296UL + static_cast<unsigned long>(rng() >> 32);
          x.emplace_back(f.prime(), precision, r % mod);
        }
      } else {
        for (const auto& r : rationals(x_text)) x.push_back(embed_rational(r, f.prime(), precision));
      }
      DirichletInstance inst{std::move(f), std::move(x), rationals(tau_text), rationals(v_text), H};
      const auto h0 = dirichlet_h0(inst);
      const auto sol = dirichlet_solve(inst);
      j = header("dirichlet-solve");
      json xs = json::array();
      for (const auto& xi : inst.x) xs.push_back(str(xi.residue()));
      j["x_residues"] = xs;
      j["precision"] = precision;
      j["H"] = H;
      json h = json::object();
      h["alpha1"] = exact_power_json(h0.alpha1);
      h["alpha2"] = exact_power_json(h0.alpha2);
      h["beta"] = exact_power_json(h0.beta);
      h["gamma"] = exact_power_json(h0.gamma);
      h["feasibility"] = str(h0.feasibility);
      h["value"] = exact_power_json(h0.value);
      h["binding"] = h0.binding;
      j["H0"] = h;
      j["point"] = point_json(sol.point);
      j["k"] = sol.k;
      j["method"] = sol.method;
      j["verified"] = sol.check.ok();
    } else if (*stau) {
      const auto f = load_map(map_path);
      const auto tau = rationals(tau_text);
      const auto pts = enumerate_s_tau(f, tau, Hmax, {1ull << 34, jobs_of(c.jobs, c.serial)});
      j = header("enumerate-s-tau");
      j["Hmax"] = Hmax;
      j["count"] = pts.size();
      json blocks = json::object();
      for (const auto& [b, n] : dyadic_counts(pts)) blocks[std::to_string(b)] = n;
      j["dyadic_counts"] = blocks;
      json list = json::array();
      for (std::size_t i = 0; i < pts.size() && i < limit; ++i) list.push_back(integer_array(pts[i].a));
      j["points"] = list;
    } else if (*cover) {
      const auto f = load_map(map_path);
      const auto tau = rationals(tau_text);
      const auto r = cover_preimage(f, tau, parse_rational(delta_text), Hmax, c.depth, {1ull << 34, jobs_of(c.jobs, c.serial)});
      j = header("cover-preimage");
      j["Hmax"] = Hmax;
      j["delta"] = delta_text;
      j["depth"] = c.depth;
      j["points"] = r.points;
      j["measure"] = str(r.set.measure());
      j["measure_approx"] = to_double(r.set.measure());
      j["generation_counts"] = counts_json(r.generation_counts);
      j["complete_below"] = r.complete_below;
      std::map<int, Integer> nz;
      for (const auto& [k, n] : r.generation_counts)
        if (n > 0 && k < r.complete_below) nz[k] = n;
      j["boxdim"] = nz.size() >= 3 ? fit_json(boxdim_estimate(nz, f.prime())) : json(nullptr);
    } else if (*dim) {
      j = header("dim");
      json report;
      report["ok"] = true;
      report["failed"] = json::array();
      if (*jb) {
        const auto tau = rationals(tau_text);
        if (jb->count("--n") && static_cast<std::size_t>(c.n) != tau.size())
          throw Error(Errc::InvalidArgument, "--n does not match the number of weights");
        j["formula"] = "jb";
        j["value"] = str(jb_dimension(tau));
      } else if (*rynne) {
        const auto tau = rationals(tau_text);
        const auto r = rynne_dimension(tau);
        j["formula"] = "rynne";
        j["value"] = str(r.value);
        if (r.reordered) j["note"] = "weights sorted descending";
      } else if (*ww) {
        const auto a = rationals(a_text), t = rationals(t_text);
        const auto r = ww_exponent(a, t, variant == "K2-sum" ? WWVariant::K2Sum : WWVariant::K3Sum);
        j["formula"] = "ww";
        j["variant"] = variant;
        j["value"] = str(r.value);
        j["argmin"] = str(r.argmin);
        j["partition"] = {{"K1", r.k1}, {"K2", r.k2}, {"K3", r.k3}};
      } else if (*manifold) {
        const auto tau = rationals(tau_text);
        const auto b = parse_bound(which);
        const auto h = manifold_hypotheses(tau, d, m, b);
        j["formula"] = "manifold";
        j["which"] = which;
        h.throw_if_failed();
        j["value"] = str(manifold_lower_bound(tau, d, m, b));
      } else if (*water) {
        const auto tau = rationals(tau_text);
        const auto w = d > 0 ? waterfill_v(tau, d, m) : waterfill_alpha(tau);
        j["formula"] = "waterfill";
        j["level"] = str(w.level);
        j["values"] = rational_array(w.values);
      }
      j["hypothesis_report"] = report;
    } else if (*box) {
      std::map<int, Integer> counts;
      for (const auto& entry : count_text) {
        std::stringstream ss(entry);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) throw Error(Errc::Parse, "count entries look like k:N");
          counts[std::stoi(item.substr(0, colon))] = Integer(item.substr(colon + 1));
        }
      }
      j = header("boxdim");
      j["p"] = c.p;
      j["fit"] = fit_json(boxdim_estimate(counts, c.p, exclude));
    }
    out << j.dump(2) << "\n";
    return 0;
  } catch (const HypothesisError& e) {
    json j = header(app.get_subcommands().front()->get_name());
    j["error"] = "hypothesis";
    j["hypothesis_report"] = {{"ok", false}, {"failed", e.failed()}};
    out << j.dump(2) << "\n";
    err << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    json j = header(app.get_subcommands().front()->get_name());
    j["error"] = errc_name(e.code());
    j["message"] = e.what();
    out << j.dump(2) << "\n";
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return 1;
  }
}

}  // namespace padic::cli
