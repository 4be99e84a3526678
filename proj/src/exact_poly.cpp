#include "leafldp/exact_poly.hpp"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "leafldp/chain.hpp"

namespace leafldp {

namespace {

using ZPoly = std::vector<mpz_class>;  // lowest degree first, no trailing zeros

mpq_class to_mpq(const Rational& r) { return mpq_class(mpz_class(r.num), mpz_class(r.den)); }

const Rational& exact_param(const SlopeSequence& s) {
  if (!s.slope().exact)
    throw InexactModelError(
        fmt::format("model parameter {} is not an exact rational", s.slope().value));
  return *s.slope().exact;
}

void trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const ZPoly& p) { return static_cast<int>(p.size()) - 1; }

ZPoly derivative(const ZPoly& p) {
  ZPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<unsigned long>(k));
  trim(d);
  return d;
}

// Divides by the positive gcd of the coefficients.
void make_primitive(ZPoly& p) {
  mpz_class g = 0;
  for (const auto& c : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g > 1)
    for (auto& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

// lc(b)^e a = q b + r with e <= deg a - deg b + 1; returns r and sets e.
ZPoly pseudo_remainder(ZPoly a, const ZPoly& b, int* multiplications = nullptr) {
  const int db = degree(b);
  const mpz_class& lb = b.back();
  int e = 0;
  while (degree(a) >= db) {
    ++e;
    const int shift = degree(a) - db;
    const mpz_class la = a.back();
    for (auto& c : a) c *= lb;
    for (int k = 0; k <= db; ++k) a[static_cast<std::size_t>(k + shift)] -= la * b[static_cast<std::size_t>(k)];
    trim(a);
  }
  if (multiplications != nullptr) *multiplications = e;
  return a;
}

// Sign-correct Sturm chain with each member made primitive.
std::vector<ZPoly> sturm_chain(const ZPoly& p) {
  std::vector<ZPoly> chain{p, derivative(p)};
  make_primitive(chain[0]);
  make_primitive(chain[1]);
  while (degree(chain.back()) > 0) {
    const ZPoly& a = chain[chain.size() - 2];
    const ZPoly& b = chain.back();
    int e = 0;
    ZPoly r = pseudo_remainder(a, b, &e);
    if (r.empty()) break;
    // r is lc(b)^e times the remainder; the Sturm member is minus the remainder.
    const bool flip = !(b.back() < 0 && e % 2 == 1);
    if (flip)
      for (auto& c : r) c = -c;
    make_primitive(r);
    chain.push_back(std::move(r));
  }
  return chain;
}

int sign_at_minus_infinity(const ZPoly& p) {
  const int s = sgn(p.back());
  return degree(p) % 2 == 0 ? s : -s;
}

int variations(const std::vector<int>& signs) {
  int v = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

// Distinct real roots in (-inf, 0); requires p(0) != 0.
std::int64_t distinct_negative(const ZPoly& p) {
  if (degree(p) < 1) return 0;
  const auto chain = sturm_chain(p);
  std::vector<int> at_inf;
  std::vector<int> at_zero;
  for (const auto& q : chain) {
    at_inf.push_back(sign_at_minus_infinity(q));
    at_zero.push_back(sgn(q.front()));
  }
  return variations(at_inf) - variations(at_zero);
}

ZPoly poly_gcd(ZPoly a, ZPoly b) {
  make_primitive(a);
  make_primitive(b);
  if (degree(a) < degree(b)) std::swap(a, b);
  while (!b.empty()) {
    ZPoly r = pseudo_remainder(a, b);
    make_primitive(r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() < 0)
    for (auto& c : a) c = -c;
  return a;
}

}  // namespace

std::int64_t ExactPoly::degree() const {
  for (std::size_t k = coeffs.size(); k-- > 0;)
    if (coeffs[k] != 0) return static_cast<std::int64_t>(k);
  return -1;
}

mpq_class ExactPoly::sum() const {
  mpq_class total = 0;
  for (const auto& c : coeffs) total += c;
  return total;
}

std::string ExactPoly::str() const {
  std::string out;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0) continue;
    if (!out.empty()) out += " + ";
    out += coeffs[k].get_str();
    if (k == 1) out += " u";
    if (k > 1) out += fmt::format(" u^{}", k);
  }
  return out.empty() ? "0" : out;
}

mpq_class exact_slope(const SlopeSequence& s, std::int64_t n) {
  const mpq_class nq(static_cast<long>(n));
  switch (s.kind()) {
    case SlopeKind::uniform_recursive: return nq;
    case SlopeKind::plane_oriented: return 2 * nq - 1;
    case SlopeKind::yule: return mpq_class(nq / 2);
    case SlopeKind::linear: return mpq_class(to_mpq(exact_param(s)) * nq);
    case SlopeKind::pref_attach:
    case SlopeKind::randomized_pa: {
      const mpq_class beta = to_mpq(exact_param(s));
      const mpq_class edges(static_cast<long>(s.gamma_prefix(n)));
      mpq_class v = (mpq_class(static_cast<long>(s.seed_degree())) + 2 * edges +
                     (nq - 1 + static_cast<long>(s.seed_vertices())) * beta) /
                    (1 + beta);
      v.canonicalize();
      return v;
    }
  }
  return nq;
}

ExactPoly exact_poly(const ModelSpec& model, std::int64_t n, std::int64_t max_n) {
  if (n < 1) throw std::invalid_argument("exact_poly: n must be >= 1");
  if (n > max_n)
    throw std::invalid_argument(fmt::format("exact_poly: n = {} exceeds the limit {}", n, max_n));
  ExactPoly p{1, std::vector<mpq_class>(static_cast<std::size_t>(model.k0 + 1), 0)};
  p.coeffs.back() = 1;
  for (std::int64_t j = 1; j < n; ++j) {
    const mpq_class s = exact_slope(model.slopes, j);
    const auto top = static_cast<long>(p.coeffs.size()) - 1;
    if (p.coeffs.back() != 0 && top > 0 && mpq_class(top) > s)
      throw ChainStateError(fmt::format("exact_poly: P(Z_{} = {}) > 0 exceeds s_{}", j, top, j));
    std::vector<mpq_class> next(p.coeffs.size() + 1, 0);
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
      const mpq_class& c = p.coeffs[k];
      if (c == 0) continue;
      const mpq_class stay = k == 0 ? mpq_class(0) : mpq_class(static_cast<long>(k) / s);
      next[k] += c * stay;
      next[k + 1] += c * (1 - stay);
    }
    for (auto& c : next) c.canonicalize();
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    p.coeffs = std::move(next);
    p.n = j + 1;
  }
  return p;
}

std::string RootReport::str() const {
  return fmt::format(
      "real_rooted={} degree={} zero_multiplicity={} negative_roots={} distinct_negative={} "
      "monomial={}",
      real_rooted, degree, zero_multiplicity, negative_roots, distinct_negative_roots, monomial);
}

RootReport certify_real_rooted(const ExactPoly& poly) {
  RootReport report;
  report.degree = poly.degree();
  if (report.degree < 0) throw std::invalid_argument("certify_real_rooted: zero polynomial");

  mpz_class scale = 1;
  for (const auto& c : poly.coeffs) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), c.get_den_mpz_t());
  std::size_t low = 0;
  while (poly.coeffs[low] == 0) ++low;
  report.zero_multiplicity = static_cast<std::int64_t>(low);

  ZPoly q;
  for (std::size_t k = low; k <= static_cast<std::size_t>(report.degree); ++k) {
    const mpq_class scaled = poly.coeffs[k] * scale;
    q.push_back(scaled.get_num());
  }
  make_primitive(q);
  report.monomial = degree(q) == 0;

  // Roots with multiplicity: a root of multiplicity r is a distinct root of
  // q, gcd(q, q'), ... exactly r times.
  ZPoly cur = q;
  bool first = true;
  while (degree(cur) > 0) {
    const std::int64_t distinct = distinct_negative(cur);
    if (first) report.distinct_negative_roots = distinct;
    first = false;
    report.negative_roots += distinct;
    cur = poly_gcd(cur, derivative(cur));
  }
  report.real_rooted = report.negative_roots == degree(q);
  return report;
}

RootStructure predicted_root_structure(const ModelSpec& model, std::int64_t n,
                                       std::int64_t max_n) {
  if (n < 1 || n > max_n)
    throw std::invalid_argument(fmt::format("predicted_root_structure: n = {} out of range", n));
  std::int64_t low = model.k0;
  std::int64_t high = model.k0;
  for (std::int64_t j = 1; j < n; ++j) {
    const mpq_class s = exact_slope(model.slopes, j);
    if (mpq_class(static_cast<long>(high)) < s) ++high;
    if (low == 0) low = 1;
  }
  return {low, high - low, low == high};
}

Certification certify_model(const ModelSpec& model, std::int64_t n, std::int64_t max_n) {
  Certification c;
  c.report = certify_real_rooted(exact_poly(model, n, max_n));
  c.expected = predicted_root_structure(model, n, max_n);
  c.passed = c.report.real_rooted && c.report.monomial == c.expected.monomial &&
             c.report.zero_multiplicity == c.expected.zero_multiplicity &&
             c.report.negative_roots == c.expected.negative_roots && c.report.negatives_simple();
  return c;
}

}  // namespace leafldp
