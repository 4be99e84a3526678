#include "leafldp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "leafldp/rng.hpp"

namespace leafldp {

namespace {

using i128 = __int128;

bool fits64(i128 v) {
  return v >= static_cast<i128>(INT64_MIN) && v <= static_cast<i128>(INT64_MAX);
}

std::optional<Rational> make_rational(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  if (!fits64(num) || !fits64(den)) return std::nullopt;
  return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::optional<Rational> parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  i128 mantissa = 0;
  int scale = 0;  // value = mantissa * 10^scale
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      any_digit = true;
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > static_cast<i128>(INT64_MAX)) return std::nullopt;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    int exponent = 0;
    const auto* first = text.data() + i + 1;
    const auto* last = text.data() + text.size();
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    scale += exponent;
    i = text.size();
  }
  if (i != text.size()) return std::nullopt;
  if (scale > 18 || scale < -18) return std::nullopt;
  i128 pow10 = 1;
  for (int k = 0; k < std::abs(scale); ++k) pow10 *= 10;
  i128 num = negative ? -mantissa : mantissa;
  if (scale >= 0) return make_rational(num * pow10, 1);
  return make_rational(num, pow10);
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ModelError(fmt::format("model parameter '{}': expected an integer, got '{}'", key, text));
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ModelError(
        fmt::format("model parameter '{}': expected an unsigned integer, got '{}'", key, text));
  return v;
}

std::string format_param(const Param& p) {
  if (p.exact) return p.exact->str();
  return fmt::format("{:.17g}", p.value);
}

}  // namespace

std::string Rational::str() const {
  if (den == 1) return fmt::format("{}", num);
  return fmt::format("{}/{}", num, den);
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_decimal(text.substr(0, slash));
    const auto den = parse_decimal(text.substr(slash + 1));
    if (!num || !den || den->num == 0) return std::nullopt;
    return make_rational(static_cast<i128>(num->num) * den->den,
                         static_cast<i128>(num->den) * den->num);
  }
  return parse_decimal(text);
}

Param Param::from_string(std::string_view text) {
  if (auto r = parse_rational(text)) return Param(*r);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ModelError(fmt::format("cannot parse '{}' as a real number", text));
  return Param(v);
}

// ---------------------------------------------------------------------------

GammaPmf::GammaPmf(std::vector<std::pair<std::int64_t, double>> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ModelError("gamma pmf must have at least one atom");
  std::sort(atoms_.begin(), atoms_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto [v, p] = atoms_[i];
    if (v < 1) throw ModelError(fmt::format("gamma pmf atom {} is not a positive integer", v));
    if (i > 0 && atoms_[i - 1].first == v)
      throw ModelError(fmt::format("gamma pmf atom {} listed twice", v));
    if (!(p > 0.0)) throw ModelError(fmt::format("gamma pmf probability for {} must be > 0", v));
    total += p;
    cumulative_.push_back(total);
    mean_ += static_cast<double>(v) * p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ModelError(fmt::format("gamma pmf probabilities sum to {}, not 1", total));
  for (auto& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
  mean_ /= total;
}

GammaPmf GammaPmf::parse(std::string_view text) {
  std::vector<std::pair<std::int64_t, double>> atoms;
  while (!text.empty()) {
    const auto plus = text.find('+');
    const auto item = text.substr(0, plus);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ModelError(fmt::format("gamma pmf item '{}' must look like value:prob", item));
    const auto value = parse_int("gamma", item.substr(0, colon));
    atoms.emplace_back(value, Param::from_string(item.substr(colon + 1)).value);
    if (plus == std::string_view::npos) break;
    text.remove_prefix(plus + 1);
  }
  return GammaPmf(std::move(atoms));
}

std::int64_t GammaPmf::draw(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         atoms_.size() - 1);
  return atoms_[idx].first;
}

std::string GammaPmf::str() const {
  std::string out;
  for (const auto& [v, p] : atoms_) {
    if (!out.empty()) out += '+';
    out += fmt::format("{}:{}", v, p);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SlopeKind kind) {
  switch (kind) {
    case SlopeKind::linear: return "linear";
    case SlopeKind::pref_attach: return "pref_attach";
    case SlopeKind::yule: return "yule";
    case SlopeKind::uniform_recursive: return "uniform_recursive";
    case SlopeKind::plane_oriented: return "plane_oriented";
    case SlopeKind::randomized_pa: return "randomized_pa";
  }
  return "unknown";
}

SlopeSequence SlopeSequence::linear(Param alpha) {
  if (!(alpha.value > 0.0) || !std::isfinite(alpha.value))
    throw ModelError("linear slope alpha must be a positive finite number");
  SlopeSequence s;
  s.kind_ = SlopeKind::linear;
  s.param_ = alpha;
  s.alpha_ = alpha.value;
  return s;
}

SlopeSequence SlopeSequence::pref_attach(Param beta, std::int64_t seed_degree,
                                         std::int64_t seed_vertices) {
  if (!(beta.value > -1.0) || !std::isfinite(beta.value))
    throw ModelError("preferential attachment requires beta > -1");
  if (seed_degree < 2 || seed_vertices < 2)
    throw ModelError("seed graph needs at least one edge (degree >= 2, vertices >= 2)");
  SlopeSequence s;
  s.kind_ = SlopeKind::pref_attach;
  s.param_ = beta;
  s.alpha_ = (2.0 + beta.value) / (1.0 + beta.value);
  s.seed_degree_ = seed_degree;
  s.seed_vertices_ = seed_vertices;
  return s;
}

SlopeSequence SlopeSequence::yule() {
  SlopeSequence s;
  s.kind_ = SlopeKind::yule;
  s.alpha_ = 0.5;
  return s;
}

SlopeSequence SlopeSequence::uniform_recursive() {
  SlopeSequence s;
  s.kind_ = SlopeKind::uniform_recursive;
  s.alpha_ = 1.0;
  return s;
}

SlopeSequence SlopeSequence::plane_oriented() {
  SlopeSequence s;
  s.kind_ = SlopeKind::plane_oriented;
  s.alpha_ = 2.0;
  return s;
}

SlopeSequence SlopeSequence::randomized_pa(Param beta, GammaPmf gamma, std::uint64_t gamma_seed,
                                           std::int64_t seed_degree, std::int64_t seed_vertices,
                                           std::int64_t horizon) {
  SlopeSequence s = pref_attach(beta, seed_degree, seed_vertices);
  if (gamma.atoms().empty()) throw ModelError("randomized preferential attachment needs a gamma pmf");
  s.kind_ = SlopeKind::randomized_pa;
  s.gamma_ = std::move(gamma);
  s.gamma_seed_ = gamma_seed;
  s.alpha_ = (2.0 * s.gamma_.mean() + beta.value) / (1.0 + beta.value);
  auto prefix = std::make_shared<std::vector<std::int64_t>>();
  prefix->reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 1)) + 1);
  prefix->push_back(0);  // prefix[n - 1] = sum_{i < n} gamma_i
  for (std::int64_t i = 1; i <= horizon; ++i) prefix->push_back(prefix->back() + s.gamma(i));
  s.gamma_prefix_ = std::move(prefix);
  return s;
}

std::int64_t SlopeSequence::gamma(std::int64_t i) const {
  if (kind_ != SlopeKind::randomized_pa) return 1;
  const CounterRng rng(gamma_seed_, kGammaStream);
  const double u = static_cast<double>(rng.at(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53;
  return gamma_.draw(u);
}

std::int64_t SlopeSequence::gamma_prefix(std::int64_t n) const {
  if (kind_ != SlopeKind::randomized_pa) return n - 1;
  const auto& prefix = *gamma_prefix_;
  const auto cached = static_cast<std::int64_t>(prefix.size());  // holds n - 1 = 0..cached-1
  if (n - 1 < cached) return prefix[static_cast<std::size_t>(n - 1)];
  std::int64_t total = prefix.back();
  for (std::int64_t i = cached; i <= n - 1; ++i) total += gamma(i);
  return total;
}

double SlopeSequence::value(std::int64_t n) const {
  const auto nd = static_cast<double>(n);
  switch (kind_) {
    case SlopeKind::linear: return param_.value * nd;
    case SlopeKind::yule: return 0.5 * nd;
    case SlopeKind::uniform_recursive: return nd;
    case SlopeKind::plane_oriented: return 2.0 * nd - 1.0;
    case SlopeKind::pref_attach:
    case SlopeKind::randomized_pa: {
      const double beta = param_.value;
      const double edges = static_cast<double>(gamma_prefix(n));
      return (static_cast<double>(seed_degree_) + 2.0 * edges +
              (nd - 1.0 + static_cast<double>(seed_vertices_)) * beta) /
             (1.0 + beta);
    }
  }
  return nd;
}

bool SlopeSequence::is_exact() const {
  switch (kind_) {
    case SlopeKind::yule:
    case SlopeKind::uniform_recursive:
    case SlopeKind::plane_oriented: return true;
    default: return param_.exact.has_value();
  }
}

std::string SlopeSequence::describe() const {
  switch (kind_) {
    case SlopeKind::linear:
      return fmt::format("kind=linear alpha={}", format_param(param_));
    case SlopeKind::pref_attach:
      return fmt::format("kind=pref_attach beta={} dG1={} vG1={} alpha={:.17g}",
                         format_param(param_), seed_degree_, seed_vertices_, alpha_);
    case SlopeKind::randomized_pa:
      return fmt::format("kind=randomized_pa beta={} dG1={} vG1={} gamma={} gamma_seed={} alpha={:.17g}",
                         format_param(param_), seed_degree_, seed_vertices_, gamma_.str(),
                         gamma_seed_, alpha_);
    default:
      return fmt::format("kind={} alpha={:.17g}", to_string(kind_), alpha_);
  }
}

// ---------------------------------------------------------------------------

ModelSpec::ModelSpec(SlopeSequence s, std::int64_t initial, std::string label)
    : slopes(std::move(s)), k0(initial), name(std::move(label)) {
  constexpr double kSlack = 1e-12;
  if (k0 < 0) throw ModelError("k0 must be nonnegative");
  const double s1 = slopes.value(1);
  if (static_cast<double>(k0) > s1 * (1.0 + kSlack))
    throw ModelError(fmt::format("k0 = {} exceeds s_1 = {}", k0, s1));
  const double s2 = slopes.value(2);
  if (s2 < static_cast<double>(std::max<std::int64_t>(k0, 1)) * (1.0 - kSlack))
    throw ModelError(fmt::format("s_2 = {} is below max(k0, 1)", s2));
}

ModelSpec ModelSpec::uniform_recursive() {
  return ModelSpec(SlopeSequence::uniform_recursive(), 1, "uniform");
}

ModelSpec ModelSpec::plane_oriented() {
  return ModelSpec(SlopeSequence::plane_oriented(), 1, "plane_oriented");
}

ModelSpec ModelSpec::yule() { return ModelSpec(SlopeSequence::yule(), 0, "yule"); }

ModelSpec ModelSpec::pref_attach(Param beta) {
  return ModelSpec(SlopeSequence::pref_attach(beta), 2, "pa:beta=" + format_param(beta));
}

ModelSpec ModelSpec::linear(Param alpha, std::int64_t k0) {
  return ModelSpec(SlopeSequence::linear(alpha), k0,
                   fmt::format("linear:alpha={},k0={}", format_param(alpha), k0));
}

ModelSpec ModelSpec::randomized_pa(Param beta, GammaPmf gamma, std::uint64_t gamma_seed) {
  auto label = fmt::format("rpa:beta={},gamma={},seed={}", format_param(beta), gamma.str(), gamma_seed);
  return ModelSpec(SlopeSequence::randomized_pa(beta, std::move(gamma), gamma_seed), 2,
                   std::move(label));
}

std::string ModelSpec::describe() const {
  return fmt::format("model={} {} k0={}", name, slopes.describe(), k0);
}

// ---------------------------------------------------------------------------

ModelSpec parse_model(std::string_view text) {
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  std::map<std::string, std::string, std::less<>> kv;
  if (colon != std::string_view::npos) {
    auto rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw ModelError(fmt::format("model option '{}' must look like key=value", item));
      if (!kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))).second)
        throw ModelError(fmt::format("model option '{}' given twice", item.substr(0, eq)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }

  auto take = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](std::string_view key) {
    auto v = take(key);
    if (!v) throw ModelError(fmt::format("model '{}' requires option '{}'", head, key));
    return *v;
  };
  auto finish = [&](ModelSpec m) {
    if (!kv.empty())
      throw ModelError(fmt::format("model '{}' does not accept option '{}'", head, kv.begin()->first));
    m.name = std::string(text);
    return m;
  };

  if (head == "plane_oriented" || head == "plane") return finish(ModelSpec::plane_oriented());
  if (head == "uniform" || head == "uniform_recursive") return finish(ModelSpec::uniform_recursive());
  if (head == "yule") return finish(ModelSpec::yule());
  if (head == "linear") {
    const auto alpha = Param::from_string(require("alpha"));
    const auto k0 = parse_int("k0", require("k0"));
    return finish(ModelSpec(SlopeSequence::linear(alpha), k0, ""));
  }
  if (head == "pa" || head == "rpa") {
    const auto beta = Param::from_string(require("beta"));
    const auto dg = take("dg");
    const auto vg = take("vg");
    const auto k0_text = take("k0");
    if ((dg || vg) && !k0_text)
      throw ModelError("a custom seed graph (dg/vg) also needs k0 = number of seed leaves");
    const std::int64_t seed_degree = dg ? parse_int("dg", *dg) : 2;
    const std::int64_t seed_vertices = vg ? parse_int("vg", *vg) : 2;
    const std::int64_t k0 = k0_text ? parse_int("k0", *k0_text) : 2;
    if (head == "pa")
      return finish(ModelSpec(SlopeSequence::pref_attach(beta, seed_degree, seed_vertices), k0, ""));
    auto gamma = GammaPmf::parse(require("gamma"));
    const auto seed = parse_u64("seed", require("seed"));
    return finish(ModelSpec(
        SlopeSequence::randomized_pa(beta, std::move(gamma), seed, seed_degree, seed_vertices), k0,
        ""));
  }
  throw ModelError(fmt::format("unknown model preset '{}'", head));
}

}  // namespace leafldp
