#include "padic/approx.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "padic/error.hpp"

namespace padic {

ApproxFunction ApproxFunction::power_law(const Rational& exponent) { return scaled(Rational(1), exponent); }

ApproxFunction ApproxFunction::scaled(const Rational& c, const Rational& exponent) {
  if (c <= 0) throw Error(Errc::InvalidArgument, "approximation scale must be positive");
  ApproxFunction f;
  f.scale_ = c;
  f.exponent_ = exponent;
  return f;
}

ApproxFunction ApproxFunction::table(std::map<long, Rational> values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "empty approximation table");
  for (const auto& [q, v] : values) {
    if (q < 1) throw Error(Errc::InvalidArgument, "table arguments must be positive");
    if (v <= 0) throw Error(Errc::InvalidArgument, "table values must be positive");
  }
  ApproxFunction f;
  f.table_ = std::move(values);
  return f;
}

ExactPower ApproxFunction::at(long q) const {
  if (q < 1) throw Error(Errc::InvalidArgument, "approximation argument must be positive");
  if (is_table()) {
    auto it = table_.find(q);
    if (it == table_.end()) throw Error(Errc::InvalidArgument, "table has no value at q=" + std::to_string(q));
    return ExactPower(it->second);
  }
  return ExactPower(scale_) * ExactPower::power(Rational(q), -exponent_);
}

std::optional<Rational> ApproxFunction::rational_at(long q) const { return at(q).as_rational(); }

double ApproxFunction::approx(long q) const { return at(q).to_double(); }

std::string ApproxFunction::to_string() const {
  if (is_table()) {
    std::string out = "table:";
    bool first = true;
    for (const auto& [q, v] : table_) {
      if (!first) out += ",";
      first = false;
      out += std::to_string(q) + "=" + padic::to_string(v);
    }
    return out;
  }
  std::string out;
  if (scale_ != 1) out = padic::to_string(scale_) + "*";
  out += "q^(" + padic::to_string(-exponent_) + ")";
  return out;
}

namespace {

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

std::string unwrap(std::string s) {
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool outer = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0 && i + 1 < s.size()) {
        outer = false;
        break;
      }
    }
    if (!outer) break;
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

// c * q^e as written; returns (c, e).
std::pair<Rational, Rational> parse_monomial(const std::string& text, std::string_view whole) {
  std::string s = unwrap(text);
  auto qpos = s.find('q');
  if (qpos == std::string::npos) return {parse_rational(s), Rational(0)};
  std::string coeff = s.substr(0, qpos);
  if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
  Rational c = coeff.empty() ? Rational(1) : parse_rational(unwrap(coeff));
  std::string rest = s.substr(qpos + 1);
  Rational e(1);
  if (!rest.empty()) {
    if (rest.front() != '^') throw Error(Errc::Parse, "cannot parse psi '" + std::string(whole) + "'");
    e = parse_rational(unwrap(rest.substr(1)));
  }
  return {c, e};
}

}  // namespace

ApproxFunction parse_psi(std::string_view text) {
  std::string s = strip_spaces(text);
  if (s.rfind("table:", 0) == 0) {
    std::map<long, Rational> values;
    std::string body = s.substr(6);
    std::size_t start = 0;
    while (start < body.size()) {
      auto comma = body.find(',', start);
      std::string entry = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      auto eq = entry.find('=');
      if (eq == std::string::npos) throw Error(Errc::Parse, "table entry needs q=value: '" + entry + "'");
      Rational q = parse_rational(entry.substr(0, eq));
      if (!is_integer(q)) throw Error(Errc::Parse, "table argument must be an integer");
      values[to_long(q.get_num())] = parse_rational(entry.substr(eq + 1));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return ApproxFunction::table(std::move(values));
  }
  try {
    // Division form: numerator without q, denominator monomial.
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (s[i] == '/' && depth == 0) {
        std::string left = s.substr(0, i), right = s.substr(i + 1);
        if (left.find('q') == std::string::npos && right.find('q') != std::string::npos) {
          Rational num = parse_rational(unwrap(left));
          auto [c, e] = parse_monomial(right, text);
          return ApproxFunction::scaled(num / c, e);
        }
        break;
      }
    }
    auto [c, e] = parse_monomial(s, text);
    return ApproxFunction::scaled(c, -e);
  } catch (const Error& err) {
    if (err.code() == Errc::Parse) throw Error(Errc::Parse, "cannot parse psi '" + std::string(text) + "'");
    throw;
  }
}

StepExponent step_exponent(const ApproxFunction& psi, long a0, long p) {
  ExactPower v = psi.at(a0);
  if (v > ExactPower(Rational(1))) return {0, true};
  return {smallest_exponent_below(p, v), false};
}

bool is_proper_at(const ApproxFunction& psi, long q) { return psi.at(q) < ExactPower(Rational(1, q)); }

std::vector<long> improper_points(const ApproxTuple& psi, long from, long to) {
  std::vector<long> out;
  for (long q = from; q <= to; ++q) {
    for (const auto& f : psi) {
      if (!is_proper_at(f, q)) {
        out.push_back(q);
        break;
      }
    }
  }
  return out;
}

Integer admissible_count(long a0, bool reduced) {
  if (a0 < 1) throw Error(Errc::InvalidArgument, "a0 must be positive");
  if (!reduced) return Integer(2 * a0 + 1);
  if (a0 == 1) return Integer(3);
  return Integer(2 * static_cast<long>(euler_phi(static_cast<std::uint64_t>(a0))));
}

std::vector<long> layer_exponents(const ApproxTuple& psi, long a0, long p) {
  std::vector<long> out;
  for (const auto& f : psi) out.push_back(step_exponent(f, a0, p).t);
  return out;
}

namespace {

struct CoordinateCells {
  int t = 0;
  bool whole = false;
  std::vector<std::uint64_t> residues;  // sorted, distinct, mod p^t
};

std::uint64_t checked_modulus(long p, long t) {
  Integer m = ipow(p, static_cast<unsigned long>(t));
  if (m > Integer("9223372036854775807"))
    throw Error(Errc::InsufficientDepth, "radius p^-" + std::to_string(t) + " too fine for cell residues");
  return m.get_ui();
}

CoordinateCells coordinate_cells(const ApproxFunction& psi, long a0, long p, bool reduced) {
  CoordinateCells cells;
  if (reduced && a0 % p == 0) return cells;
  ExactPower radius = psi.at(a0);
  StepExponent step = step_exponent(psi, a0, p);
  cells.t = static_cast<int>(step.t);
  std::uint64_t mod = checked_modulus(p, step.t);

  auto admissible = [&](long a) { return !reduced || std::gcd(std::labs(a), a0) == 1; };

  if (a0 % p != 0) {
    Integer inv_z;
    Integer mz(mod), a0z(a0);
    mpz_invert(inv_z.get_mpz_t(), a0z.get_mpz_t(), mz.get_mpz_t());
    std::uint64_t inv = mod == 1 ? 0 : inv_z.get_ui();
    for (long a = -a0; a <= a0; ++a) {
      if (!admissible(a)) continue;
      long long am = static_cast<long long>(a % static_cast<long long>(mod));
      if (am < 0) am += static_cast<long long>(mod);
      auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(am) * inv) % mod);
      cells.residues.push_back(r);
    }
  } else {
    for (long a = -a0; a <= a0; ++a) {
      if (!admissible(a)) continue;
      Rational c = make_rational(Integer(a), Integer(a0));
      if (c.get_den() % p == 0) {
        // |x - c|_p = |c|_p on Z_p
        if (ExactPower(norm_p(c, p)) < radius) cells.whole = true;
        continue;
      }
      PAdicInt e = embed_rational(c, p, std::max(cells.t, 1));
      cells.residues.push_back(cells.t == 0 ? 0 : e.residue().get_ui());
    }
  }
  std::sort(cells.residues.begin(), cells.residues.end());
  cells.residues.erase(std::unique(cells.residues.begin(), cells.residues.end()), cells.residues.end());
  if (cells.t == 0 && !cells.residues.empty()) cells.whole = true;
  if (cells.whole) cells.residues.clear();
  return cells;
}

ClopenSet coordinate_set(const CoordinateCells& cells, long p, int depth) {
  if (cells.whole) return ClopenSet::full(p, 1, depth);
  ClopenBuilder b(p, 1, depth);
  const int t = cells.t;
  for (auto r : cells.residues) b.add_cell(std::span<const std::uint64_t>(&r, 1), std::span<const int>(&t, 1));
  return b.build();
}

void check_psi(const Params& params, const ApproxTuple& psi) {
  params.validate();
  if (psi.size() != static_cast<std::size_t>(params.n))
    throw Error(Errc::InvalidArgument, "need one approximation function per coordinate");
}

void add_layer(ClopenBuilder& builder, const Params& params, const ApproxTuple& psi, long a0, bool reduced,
               int depth) {
  if (params.n == 1) {
    CoordinateCells cells = coordinate_cells(psi[0], a0, params.p, reduced);
    if (cells.t > depth)
      throw Error(Errc::InsufficientDepth, "insufficient depth: a0=" + std::to_string(a0) + " needs " +
                                               std::to_string(cells.t));
    const int zero = 0;
    const std::uint64_t origin = 0;
    if (cells.whole) {
      builder.add_cell(std::span<const std::uint64_t>(&origin, 1), std::span<const int>(&zero, 1));
      return;
    }
    for (auto r : cells.residues)
      builder.add_cell(std::span<const std::uint64_t>(&r, 1), std::span<const int>(&cells.t, 1));
    return;
  }
  builder.add_set(build_layer(params, psi, a0, reduced, depth));
}

}  // namespace

ClopenSet build_layer(const Params& params, const ApproxTuple& psi, long a0, bool reduced, int depth) {
  check_psi(params, psi);
  if (a0 < 1) throw Error(Errc::InvalidArgument, "a0 must be positive");
  std::vector<ClopenSet> factors;
  for (const auto& f : psi) {
    CoordinateCells cells = coordinate_cells(f, a0, params.p, reduced);
    if (cells.t > depth)
      throw Error(Errc::InsufficientDepth, "insufficient depth: a0=" + std::to_string(a0) + " needs " +
                                               std::to_string(cells.t) + ", depth is " + std::to_string(depth));
    factors.push_back(coordinate_set(cells, params.p, depth));
  }
  if (factors.size() == 1) return factors[0];
  return ClopenSet::product(factors);
}

ClopenSet build_layer_by_rectangles(const Params& params, const ApproxTuple& psi, long a0, bool reduced,
                                    int depth) {
  check_psi(params, psi);
  std::vector<long> nums;
  if (!(reduced && a0 % params.p == 0)) {
    for (long a = -a0; a <= a0; ++a)
      if (!reduced || std::gcd(std::labs(a), a0) == 1) nums.push_back(a);
  }
  std::vector<int> t;
  for (const auto& f : psi) t.push_back(static_cast<int>(step_exponent(f, a0, params.p).t));
  ClopenSet result(params.p, params.n, depth);
  if (nums.empty()) return result;
  std::vector<std::size_t> pos(static_cast<std::size_t>(params.n), 0);
  while (true) {
    bool integral = true;
    BallSpec ball;
    ball.exponents = t;
    for (int i = 0; i < params.n; ++i) {
      Rational c = make_rational(Integer(nums[pos[i]]), Integer(a0));
      if (c.get_den() % params.p == 0) integral = false;
      ball.center.push_back(c);
    }
    if (integral) result = result.insert_rectangle(ball);
    std::size_t i = 0;
    while (i < pos.size() && ++pos[i] == nums.size()) pos[i++] = 0;
    if (i == pos.size()) break;
  }
  return result;
}

ClopenSet partial_limsup(const Params& params, const ApproxTuple& psi, long from, long to,
                         const LimsupOptions& opts) {
  check_psi(params, psi);
  if (from < 1 || to < from) throw Error(Errc::InvalidArgument, "range must satisfy 1 <= from <= to");
  unsigned jobs = std::max(1u, opts.jobs);
  long span = to - from + 1;
  if (jobs > static_cast<unsigned long>(span)) jobs = static_cast<unsigned>(span);

  auto run_shard = [&](long lo, long hi) {
    ClopenBuilder builder(params.p, params.n, opts.depth);
    for (long a0 = lo; a0 <= hi; ++a0) add_layer(builder, params, psi, a0, opts.reduced, opts.depth);
    return builder.build();
  };

  if (jobs == 1) return run_shard(from, to);

  std::vector<std::optional<ClopenSet>> parts(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    long lo = from + span * j / jobs;
    long hi = from + span * (j + 1) / jobs - 1;
    workers.emplace_back([&, j, lo, hi] {
      try {
        parts[j] = run_shard(lo, hi);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  ClopenSet result = *parts[0];
  for (unsigned j = 1; j < jobs; ++j) result = set_union(result, *parts[j]);
  return result;
}

std::map<int, Integer> generation_box_counts(const Params& params, const ApproxTuple& psi, long from,
                                             long to, const LimsupOptions& opts) {
  check_psi(params, psi);
  std::map<int, ClopenBuilder> builders;
  for (long a0 = from; a0 <= to; ++a0) {
    if (opts.reduced && a0 % params.p == 0) continue;
    auto t = layer_exponents(psi, a0, params.p);
    int k = static_cast<int>(*std::max_element(t.begin(), t.end()));
    auto it = builders.find(k);
    if (it == builders.end()) it = builders.emplace(k, ClopenBuilder(params.p, params.n, opts.depth)).first;
    add_layer(it->second, params, psi, a0, opts.reduced, opts.depth);
  }
  std::map<int, Integer> counts;
  if (builders.empty()) return counts;
  for (int k = builders.begin()->first; k <= builders.rbegin()->first; ++k) {
    auto it = builders.find(k);
    counts[k] = it == builders.end() ? Integer(0) : it->second.build().box_count(k);
  }
  return counts;
}

std::string SeriesValue::to_string() const {
  if (exact) return padic::to_string(*exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", approx);
  return buf;
}

namespace {

void add_term(SeriesValue& acc, const ExactPower& term) {
  acc.approx += term.to_double();
  if (acc.exact) {
    auto r = term.as_rational();
    if (r)
      *acc.exact += *r;
    else
      acc.exact.reset();
  }
}

ExactPower psi_product(const ApproxTuple& psi, long q) {
  ExactPower prod;
  for (const auto& f : psi) prod *= f.at(q);
  return prod;
}

}  // namespace

SeriesValue khintchine_sum(int n, const ApproxTuple& psi, long count) {
  SeriesValue acc{Rational(0), 0.0};
  for (long q = 1; q <= count; ++q)
    add_term(acc, ExactPower(rpow(Rational(q), n)) * psi_product(psi, q));
  return acc;
}

SeriesValue duffin_schaeffer_sum(int n, const ApproxTuple& psi, long count) {
  SeriesValue acc{Rational(0), 0.0};
  auto phi = phi_table(static_cast<std::uint64_t>(std::max(count, 1L)));
  for (long q = 1; q <= count; ++q)
    add_term(acc, ExactPower(rpow(Rational(static_cast<long>(phi[q])), n)) * psi_product(psi, q));
  return acc;
}

SeriesValue series_ratio(const SeriesValue& ds, const SeriesValue& kh) {
  SeriesValue r;
  if (kh.approx == 0.0 && (!kh.exact || *kh.exact == 0)) return SeriesValue{std::nullopt, 0.0};
  r.approx = ds.approx / kh.approx;
  if (ds.exact && kh.exact && *kh.exact != 0) r.exact = *ds.exact / *kh.exact;
  return r;
}

std::optional<ExactPower> claim_c_ratio_exact(const ClaimsReport& r) {
  if (r.intersection_measure == 0) return std::nullopt;
  return ExactPower(r.intersection_measure) * r.claim_c_scale.inverse();
}

ClaimsReport measure_claims_check(const Params& params, const ApproxTuple& psi, long a0, long b0, int depth) {
  check_psi(params, psi);
  if (a0 % params.p == 0 || b0 % params.p == 0)
    throw Error(Errc::InvalidArgument, "claims check needs a0 and b0 coprime to p");
  ClaimsReport r;
  r.a0 = a0;
  r.b0 = b0;
  r.exponents = layer_exponents(psi, a0, params.p);
  ClopenSet la = build_layer(params, psi, a0, true, depth);
  r.layer_measure = la.measure();
  Rational cell(1);
  for (long t : r.exponents) cell *= rpow(Rational(params.p), -t);
  r.phi_reference = rpow(Rational(static_cast<long>(euler_phi(static_cast<std::uint64_t>(a0)))), params.n) * cell;
  r.admissible_reference = rpow(Rational(admissible_count(a0, true)), params.n) * cell;
  r.phi_equal = r.layer_measure == r.phi_reference;
  r.disjoint = r.layer_measure == r.admissible_reference;
  ClopenSet lb = a0 == b0 ? la : build_layer(params, psi, b0, true, depth);
  r.intersection_measure = set_intersection(la, lb).measure();
  ExactPower scale(rpow(Rational(a0 * b0), params.n));
  for (const auto& f : psi) scale *= f.at(a0) * f.at(b0);
  r.claim_c_scale = scale;
  r.claim_c_ratio = r.intersection_measure.get_d() / scale.to_double();
  return r;
}

std::vector<LimsupRow> limsup_rows(const Params& params, const ApproxTuple& psi, long from, long to,
                                   const LimsupOptions& opts) {
  check_psi(params, psi);
  std::vector<LimsupRow> rows;
  ClopenBuilder builder(params.p, params.n, opts.depth);
  SeriesValue kh{Rational(0), 0.0}, ds{Rational(0), 0.0};
  for (long q = 1; q < from; ++q) {
    add_term(kh, ExactPower(rpow(Rational(q), params.n)) * psi_product(psi, q));
    add_term(ds, ExactPower(rpow(Rational(static_cast<long>(euler_phi(static_cast<std::uint64_t>(q)))), params.n)) *
                     psi_product(psi, q));
  }
  for (long a0 = from; a0 <= to; ++a0) {
    LimsupRow row;
    row.a0 = a0;
    row.exponents = layer_exponents(psi, a0, params.p);
    row.layer_measure = build_layer(params, psi, a0, opts.reduced, opts.depth).measure();
    Rational cell(1);
    for (long t : row.exponents) cell *= rpow(Rational(params.p), -t);
    bool skipped = opts.reduced && a0 % params.p == 0;
    Rational phi = skipped ? Rational(0) : Rational(static_cast<long>(euler_phi(static_cast<std::uint64_t>(a0))));
    Rational adm = skipped ? Rational(0) : Rational(admissible_count(a0, opts.reduced));
    row.phi_reference = rpow(phi, params.n) * cell;
    row.admissible_reference = rpow(adm, params.n) * cell;
    add_layer(builder, params, psi, a0, opts.reduced, opts.depth);
    row.union_measure = builder.build().measure();
    add_term(kh, ExactPower(rpow(Rational(a0), params.n)) * psi_product(psi, a0));
    add_term(ds, ExactPower(rpow(Rational(static_cast<long>(euler_phi(static_cast<std::uint64_t>(a0)))), params.n)) *
                     psi_product(psi, a0));
    row.khintchine_partial = kh;
    row.duffin_schaeffer_partial = ds;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace padic
