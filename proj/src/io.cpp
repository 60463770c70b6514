#include "sxpid/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sxpid {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

struct ParsedMass {
  double value;
  std::optional<Rational> exact;
};

ParsedMass parse_mass(const std::string& text, const std::string& where) {
  auto exact = parse_rational(text);
  if (!exact) throw DistributionError("cannot parse mass '" + text + "'", where);
  double value;
  if (text.find('/') == std::string::npos) {
    const char* begin = text.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
      throw DistributionError("cannot parse mass '" + text + "'", where);
  } else {
    value = exact->convert_to<double>();
  }
  return {value, exact};
}

// Integer-looking labels sort numerically, anything else lexicographically.
void sort_labels(std::vector<std::string>& labels) {
  auto is_int = [](const std::string& s) {
    long long v;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (std::all_of(labels.begin(), labels.end(), is_int)) {
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
  } else {
    std::sort(labels.begin(), labels.end());
  }
}

JointDistribution finish(Alphabet target, std::vector<Alphabet> sources,
                         std::vector<SupportPoint> support, std::vector<std::optional<Rational>> exact,
                         double tolerance) {
  std::optional<std::vector<Rational>> masses;
  if (std::all_of(exact.begin(), exact.end(), [](const auto& q) { return q.has_value(); })) {
    masses.emplace();
    for (auto& q : exact) masses->push_back(*q);
  }
  return JointDistribution(std::move(target), std::move(sources), std::move(support), tolerance,
                           std::move(masses));
}

JointDistribution load_csv(std::istream& in, double tolerance) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_csv(line);
    break;
  }
  if (header.size() < 2) throw DistributionError("CSV header must be t,s1,...,sn,p", "header");
  if (header.back() != "p") throw DistributionError("last CSV column must be 'p'", "header");
  const std::size_t n = header.size() - 2;

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    const std::string where = "row " + std::to_string(rows.size() + 1);
    if (fields.size() != header.size())
      throw DistributionError("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              where);
    for (std::size_t c = 0; c + 1 < fields.size(); ++c)
      if (fields[c].empty()) throw DistributionError("empty symbol", where + ", field " + header[c]);
    rows.push_back(std::move(fields));
  }

  std::vector<std::vector<std::string>> labels(n + 1);
  for (std::size_t c = 0; c <= n; ++c) {
    for (const auto& row : rows)
      if (std::find(labels[c].begin(), labels[c].end(), row[c]) == labels[c].end())
        labels[c].push_back(row[c]);
    sort_labels(labels[c]);
    if (labels[c].empty()) labels[c].push_back("0");
  }
  Alphabet target(header[0], labels[0]);
  std::vector<Alphabet> sources;
  for (std::size_t i = 1; i <= n; ++i) sources.emplace_back(header[i], labels[i]);

  std::vector<SupportPoint> support;
  std::vector<std::optional<Rational>> exact;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    const std::string where = "row " + std::to_string(k + 1);
    SupportPoint pt;
    pt.r.t = *target.index_of(row[0]);
    for (std::size_t i = 0; i < n; ++i) pt.r.s.push_back(*sources[i].index_of(row[i + 1]));
    auto mass = parse_mass(row.back(), where + ", field p");
    pt.p = mass.value;
    support.push_back(std::move(pt));
    exact.push_back(mass.exact);
  }
  return finish(std::move(target), std::move(sources), std::move(support), std::move(exact), tolerance);
}

std::string symbol_text(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  throw DistributionError("symbol must be a string or integer", where);
}

Alphabet alphabet_from_json(const json& j, const std::string& default_name, const std::string& where) {
  std::string name = default_name;
  const json* symbols = &j;
  if (j.is_object()) {
    if (j.contains("name")) name = j.at("name").get<std::string>();
    if (!j.contains("symbols")) throw DistributionError("alphabet object needs 'symbols'", where);
    symbols = &j.at("symbols");
  }
  if (!symbols->is_array()) throw DistributionError("alphabet must be a list of symbols", where);
  std::vector<std::string> labels;
  for (const auto& s : *symbols) labels.push_back(symbol_text(s, where));
  try {
    return Alphabet(name, labels);
  } catch (const DistributionError& e) {
    throw DistributionError(e.what(), where);
  }
}

Symbol lookup(const Alphabet& a, const json& j, const std::string& where) {
  auto text = symbol_text(j, where);
  auto idx = a.index_of(text);
  if (!idx) throw DistributionError("symbol '" + text + "' is not in alphabet '" + a.name() + "'", where);
  return *idx;
}

JointDistribution load_json(std::istream& in, double tolerance) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DistributionError(std::string("JSON parse error: ") + e.what(),
                            "byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw DistributionError("top level must be an object");
  for (const char* key : {"target_alphabet", "source_alphabets", "support"})
    if (!doc.contains(key)) throw DistributionError(std::string("missing field '") + key + "'");

  Alphabet target = alphabet_from_json(doc["target_alphabet"], "t", "field target_alphabet");
  if (!doc["source_alphabets"].is_array())
    throw DistributionError("source_alphabets must be a list", "field source_alphabets");
  std::vector<Alphabet> sources;
  for (std::size_t i = 0; i < doc["source_alphabets"].size(); ++i)
    sources.push_back(alphabet_from_json(doc["source_alphabets"][i], "s" + std::to_string(i + 1),
                                         "source_alphabets[" + std::to_string(i) + "]"));

  if (!doc["support"].is_array()) throw DistributionError("support must be a list", "field support");
  std::vector<SupportPoint> support;
  std::vector<std::optional<Rational>> exact;
  std::size_t row = 0;
  for (const auto& entry : doc["support"]) {
    ++row;
    const std::string where = "row " + std::to_string(row);
    if (!entry.is_object() || !entry.contains("t") || !entry.contains("s") || !entry.contains("p"))
      throw DistributionError("support entries need t, s and p", where);
    SupportPoint pt;
    pt.r.t = lookup(target, entry["t"], where + ", field t");
    const auto& s = entry["s"];
    if (!s.is_array() || s.size() != sources.size())
      throw DistributionError("expected " + std::to_string(sources.size()) + " source symbols",
                              where + ", field s");
    for (std::size_t i = 0; i < sources.size(); ++i)
      pt.r.s.push_back(lookup(sources[i], s[i], where + ", field s" + std::to_string(i + 1)));
    const auto& p = entry["p"];
    if (p.is_string()) {
      auto mass = parse_mass(p.get<std::string>(), where + ", field p");
      pt.p = mass.value;
      exact.push_back(mass.exact);
    } else if (p.is_number()) {
      pt.p = p.get<double>();
      exact.push_back(std::isfinite(pt.p) ? parse_rational(shortest(pt.p)) : std::nullopt);
    } else {
      throw DistributionError("mass must be a number or string", where + ", field p");
    }
    support.push_back(std::move(pt));
  }
  return finish(std::move(target), std::move(sources), std::move(support), std::move(exact), tolerance);
}

} // namespace

JointDistribution load_distribution(std::istream& in, Format format, double normalization_tolerance) {
  return format == Format::csv ? load_csv(in, normalization_tolerance)
                               : load_json(in, normalization_tolerance);
}

JointDistribution load_distribution_file(const std::filesystem::path& path,
                                         double normalization_tolerance) {
  std::ifstream in(path);
  if (!in) throw DistributionError("cannot open " + path.string());
  const Format format = path.extension() == ".json" ? Format::json : Format::csv;
  return load_distribution(in, format, normalization_tolerance);
}

void write_distribution(std::ostream& out, const JointDistribution& d, Format format) {
  const std::size_t n = d.n_sources();
  if (format == Format::csv) {
    out << (d.target_alphabet().name().empty() ? "t" : d.target_alphabet().name());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& name = d.source_alphabets()[i].name();
      out << ',' << (name.empty() ? "s" + std::to_string(i + 1) : name);
    }
    out << ",p\n";
    for (const auto& pt : d.support()) out << d.label(pt.r) << ',' << shortest(pt.p) << '\n';
    return;
  }
  auto alphabet_json = [](const Alphabet& a) {
    return json{{"name", a.name()}, {"symbols", a.symbols()}};
  };
  json doc;
  doc["target_alphabet"] = alphabet_json(d.target_alphabet());
  doc["source_alphabets"] = json::array();
  for (const auto& a : d.source_alphabets()) doc["source_alphabets"].push_back(alphabet_json(a));
  doc["support"] = json::array();
  for (const auto& pt : d.support()) {
    json s = json::array();
    for (std::size_t i = 0; i < n; ++i) s.push_back(d.source_alphabets()[i].label(pt.r.s[i]));
    doc["support"].push_back({{"t", d.target_alphabet().label(pt.r.t)}, {"s", s}, {"p", pt.p}});
  }
  out << doc.dump(2) << '\n';
}

std::string to_string(const JointDistribution& d, Format format) {
  std::ostringstream os;
  write_distribution(os, d, format);
  return os.str();
}

} // namespace sxpid
