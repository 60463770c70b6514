#include "sxpid/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace sxpid {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

cpp_int pow10(long e) {
  cpp_int r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    auto exp_text = text.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) return std::nullopt;
    if (std::abs(exponent) > 400) return std::nullopt;
    text = text.substr(0, e);
  }
  std::string_view int_part = text, frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !all_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !all_digits(frac_part)) return std::nullopt;

  std::string digits = std::string(int_part) + std::string(frac_part);
  // cpp_int reads a leading zero as an octal prefix.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  cpp_int num(digits.empty() ? std::string("0") : digits);
  exponent -= static_cast<long>(frac_part.size());
  Rational r = exponent >= 0 ? Rational(num * pow10(exponent)) : Rational(num, pow10(-exponent));
  return negative ? -r : r;
}

} // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_decimal(text.substr(0, slash));
    auto den = parse_decimal(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return *num / *den;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool fits_u64(const Rational& r) {
  const cpp_int limit = std::numeric_limits<std::uint64_t>::max();
  return boost::multiprecision::abs(boost::multiprecision::numerator(r)) <= limit &&
         boost::multiprecision::denominator(r) <= limit;
}

DistributionError::DistributionError(const std::string& what, std::string location)
    : std::runtime_error(location.empty() ? what : location + ": " + what),
      location_(std::move(location)) {}

Alphabet::Alphabet(std::string name, std::vector<std::string> symbols)
    : name_(std::move(name)), symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw DistributionError("alphabet '" + name_ + "' has no symbols");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second)
      throw DistributionError("alphabet '" + name_ + "' repeats symbol '" + s + "'");
  }
}

Alphabet Alphabet::range(std::string name, std::size_t size) {
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < size; ++i) symbols.push_back(std::to_string(i));
  return Alphabet(std::move(name), std::move(symbols));
}

std::optional<Symbol> Alphabet::index_of(std::string_view label) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), label);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<Symbol>(it - symbols_.begin());
}

JointDistribution::JointDistribution(Alphabet target, std::vector<Alphabet> sources,
                                     std::vector<SupportPoint> support,
                                     double normalization_tolerance,
                                     std::optional<std::vector<Rational>> exact)
    : target_(std::move(target)), sources_(std::move(sources)), tolerance_(normalization_tolerance) {
  if (target_.size() == 0) throw DistributionError("target alphabet is empty");
  if (!(tolerance_ >= 0.0)) throw DistributionError("normalization tolerance must be nonnegative");
  if (exact && exact->size() != support.size())
    throw DistributionError("exact masses do not align with the support");

  std::set<Realization> seen;
  std::vector<Rational> kept_exact;
  bool exact_ok = exact.has_value();
  double total = 0.0;
  for (std::size_t row = 0; row < support.size(); ++row) {
    const auto& pt = support[row];
    const std::string where = "row " + std::to_string(row + 1);
    if (pt.r.s.size() != sources_.size())
      throw DistributionError("expected " + std::to_string(sources_.size()) + " source symbols", where);
    if (pt.r.t >= target_.size()) throw DistributionError("target symbol out of range", where + ", field t");
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      if (pt.r.s[i] >= sources_[i].size())
        throw DistributionError("source symbol out of range", where + ", field s" + std::to_string(i + 1));
    }
    if (!std::isfinite(pt.p)) throw DistributionError("mass is not finite", where + ", field p");
    if (pt.p < 0.0) throw DistributionError("negative mass", where + ", field p");
    if (!seen.insert(pt.r).second) throw DistributionError("duplicate realization", where);
    total += pt.p;
    if (pt.p == 0.0) continue;
    support_.push_back(pt);
    if (exact_ok) {
      const auto& q = (*exact)[row];
      if (q < 0 || !fits_u64(q)) exact_ok = false;
      else kept_exact.push_back(q);
    }
  }
  if (std::abs(total - 1.0) > tolerance_) {
    std::ostringstream os;
    os.precision(17);
    os << "masses sum to " << total << ", not 1 (tolerance " << tolerance_ << ")";
    throw DistributionError(os.str());
  }
  if (support_.empty()) throw DistributionError("distribution has no positive mass");
  if (exact_ok) exact_ = std::move(kept_exact);
}

std::optional<std::size_t> JointDistribution::find(const Realization& r) const {
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (support_[i].r == r) return i;
  return std::nullopt;
}

double JointDistribution::mass(const Realization& r) const {
  auto i = find(r);
  return i ? support_[*i].p : 0.0;
}

double JointDistribution::total_mass() const {
  double total = 0.0;
  for (const auto& pt : support_) total += pt.p;
  return total;
}

std::string JointDistribution::label(const Realization& r) const {
  std::string out = target_.label(r.t);
  for (std::size_t i = 0; i < r.s.size(); ++i) out += "," + sources_[i].label(r.s[i]);
  return out;
}

CylinderEvent::CylinderEvent(std::vector<std::pair<std::size_t, Symbol>> source_constraints,
                             std::optional<Symbol> target)
    : constraints_(std::move(source_constraints)), target_(target) {
  std::set<std::size_t> positions;
  for (const auto& [pos, sym] : constraints_) {
    if (!positions.insert(pos).second)
      throw std::invalid_argument("cylinder event constrains source " + std::to_string(pos + 1) +
                                  " twice");
  }
}

CylinderEvent CylinderEvent::coalition(const Realization& r, std::uint32_t coalition) {
  std::vector<std::pair<std::size_t, Symbol>> c;
  for (std::size_t i = 0; i < r.s.size(); ++i)
    if (coalition & (1u << i)) c.emplace_back(i, r.s[i]);
  return CylinderEvent(std::move(c));
}

bool CylinderEvent::contains(const Realization& r) const {
  if (target_ && r.t != *target_) return false;
  for (const auto& [pos, sym] : constraints_)
    if (r.s.at(pos) != sym) return false;
  return true;
}

double event_probability(const JointDistribution& d, std::span<const CylinderEvent> events,
                         EventMode mode) {
  if (events.empty()) throw std::invalid_argument("event_probability needs at least one event");
  double total = 0.0;
  for (const auto& pt : d.support()) {
    bool hit;
    if (mode == EventMode::union_of)
      hit = std::any_of(events.begin(), events.end(), [&](const CylinderEvent& e) { return e.contains(pt.r); });
    else
      hit = std::all_of(events.begin(), events.end(), [&](const CylinderEvent& e) { return e.contains(pt.r); });
    if (hit) total += pt.p;
  }
  return total;
}

JointDistribution marginal(const JointDistribution& d, std::span<const VariableIndex> keep) {
  if (keep.empty()) throw std::invalid_argument("marginal needs a nonempty keep set");
  std::set<VariableIndex> vars(keep.begin(), keep.end());
  if (*vars.rbegin() > d.n_sources())
    throw std::invalid_argument("marginal keep set names an unknown variable");
  const bool keep_target = vars.count(0) > 0;
  std::vector<std::size_t> kept_sources;
  for (auto v : vars)
    if (v > 0) kept_sources.push_back(v - 1);

  Alphabet target = keep_target ? d.target_alphabet() : Alphabet("_", {"*"});
  std::vector<Alphabet> sources;
  for (auto i : kept_sources) sources.push_back(d.source_alphabets()[i]);

  std::map<Realization, std::pair<double, Rational>> merged;
  const auto& exact = d.exact_masses();
  for (std::size_t k = 0; k < d.support().size(); ++k) {
    const auto& pt = d.support()[k];
    Realization r;
    r.t = keep_target ? pt.r.t : 0;
    for (auto i : kept_sources) r.s.push_back(pt.r.s[i]);
    auto& slot = merged[r];
    slot.first += pt.p;
    if (exact) slot.second += (*exact)[k];
  }
  std::vector<SupportPoint> support;
  std::vector<Rational> masses;
  for (auto& [r, m] : merged) {
    support.push_back({r, m.first});
    masses.push_back(m.second);
  }
  return JointDistribution(std::move(target), std::move(sources), std::move(support),
                           d.normalization_tolerance(),
                           exact ? std::optional(std::move(masses)) : std::nullopt);
}

JointDistribution map_target(const JointDistribution& d, std::span<const Symbol> target_map,
                             Alphabet new_target) {
  if (target_map.size() != d.target_alphabet().size())
    throw std::invalid_argument("target map must cover every target symbol");
  std::map<Realization, std::pair<double, Rational>> merged;
  const auto& exact = d.exact_masses();
  for (std::size_t k = 0; k < d.support().size(); ++k) {
    const auto& pt = d.support()[k];
    Realization r{target_map[pt.r.t], pt.r.s};
    auto& slot = merged[r];
    slot.first += pt.p;
    if (exact) slot.second += (*exact)[k];
  }
  std::vector<SupportPoint> support;
  std::vector<Rational> masses;
  for (auto& [r, m] : merged) {
    support.push_back({r, m.first});
    masses.push_back(m.second);
  }
  return JointDistribution(std::move(new_target), d.source_alphabets(), std::move(support),
                           d.normalization_tolerance(),
                           exact ? std::optional(std::move(masses)) : std::nullopt);
}

} // namespace sxpid
