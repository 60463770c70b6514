#include "sxpid/builtins.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace sxpid {

namespace {

struct Row {
  std::vector<Symbol> s;
  Symbol t;
  Rational p;
};

JointDistribution make(std::size_t target_size, std::vector<std::size_t> source_sizes,
                       const std::vector<Row>& rows) {
  std::vector<Alphabet> sources;
  for (std::size_t i = 0; i < source_sizes.size(); ++i)
    sources.push_back(Alphabet::range("s" + std::to_string(i + 1), source_sizes[i]));
  std::vector<SupportPoint> support;
  std::vector<Rational> exact;
  for (const auto& row : rows) {
    support.push_back({Realization{row.t, row.s}, row.p.convert_to<double>()});
    exact.push_back(row.p);
  }
  return JointDistribution(Alphabet::range("t", target_size), std::move(sources), std::move(support),
                           JointDistribution::default_tolerance, std::move(exact));
}

Rational frac(int num, int den) { return Rational(num, den); }

} // namespace

JointDistribution xor_distribution() {
  return make(2, {2, 2},
              {{{0, 0}, 0, frac(1, 4)}, {{0, 1}, 1, frac(1, 4)}, {{1, 0}, 1, frac(1, 4)}, {{1, 1}, 0, frac(1, 4)}});
}

JointDistribution pwunq_distribution() {
  // Target symbols are labelled 1 and 2 as in the usual presentation.
  std::vector<Alphabet> sources{Alphabet::range("s1", 3), Alphabet::range("s2", 3)};
  std::vector<SupportPoint> support{{{0, {0, 1}}, 0.25}, {{0, {1, 0}}, 0.25}, {{1, {0, 2}}, 0.25}, {{1, {2, 0}}, 0.25}};
  return JointDistribution(Alphabet("t", {"1", "2"}), std::move(sources), std::move(support),
                           JointDistribution::default_tolerance,
                           std::vector<Rational>(4, frac(1, 4)));
}

JointDistribution rnd_distribution() {
  return make(2, {2, 2}, {{{0, 0}, 0, frac(1, 2)}, {{1, 1}, 1, frac(1, 2)}});
}

JointDistribution rnderr_distribution() {
  return make(2, {2, 2},
              {{{0, 0}, 0, frac(3, 8)}, {{1, 1}, 1, frac(3, 8)}, {{0, 1}, 0, frac(1, 8)}, {{1, 0}, 1, frac(1, 8)}});
}

JointDistribution xor_duplicate_distribution() {
  return make(2, {2, 2, 2},
              {{{0, 0, 0}, 0, frac(1, 4)},
               {{0, 1, 0}, 1, frac(1, 4)},
               {{1, 0, 1}, 1, frac(1, 4)},
               {{1, 1, 1}, 0, frac(1, 4)}});
}

JointDistribution parity_distribution(std::size_t k) {
  if (k < 1 || k > 5) throw std::invalid_argument("parity needs 1 <= k <= 5");
  std::vector<Row> rows;
  const int count = 1 << k;
  for (int bits = 0; bits < count; ++bits) {
    Row row;
    Symbol parity = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const Symbol b = static_cast<Symbol>(bits >> i & 1);
      row.s.push_back(b);
      parity ^= b;
    }
    row.t = parity;
    row.p = frac(1, count);
    rows.push_back(std::move(row));
  }
  return make(2, std::vector<std::size_t>(k, 2), rows);
}

std::vector<std::string> builtin_names() {
  return {"xor", "pwunq", "rnd", "rnderr", "xorduplicate", "parity:1", "parity:2", "parity:3", "parity:4", "parity:5"};
}

bool is_builtin(std::string_view name) {
  try {
    builtin(name);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

JointDistribution builtin(std::string_view name) {
  std::string key;
  for (char c : name)
    if (!std::isspace(static_cast<unsigned char>(c))) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (key == "xor") return xor_distribution();
  if (key == "pwunq") return pwunq_distribution();
  if (key == "rnd") return rnd_distribution();
  if (key == "rnderr") return rnderr_distribution();
  if (key == "xorduplicate") return xor_duplicate_distribution();
  if (key.rfind("parity:", 0) == 0) {
    std::size_t k = 0;
    const char* begin = key.data() + 7;
    const char* end = key.data() + key.size();
    auto [ptr, ec] = std::from_chars(begin, end, k);
    if (ec == std::errc{} && ptr == end && k >= 1 && k <= 5) return parity_distribution(k);
  }
  throw std::invalid_argument("unknown builtin distribution '" + std::string(name) + "'");
}

} // namespace sxpid
