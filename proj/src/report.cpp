#include "sxpid/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sxpid/lattice.hpp"

namespace sxpid {

namespace {

using nlohmann::ordered_json;

struct Field {
  const char* pointwise_key;
  const char* average_key;
  std::vector<double> PointwiseDecomposition::*pointwise;
  std::vector<double> AverageDecomposition::*average;
  std::vector<Rational> ExactPointwise::*exact;
};

const Field fields[] = {
    {"i_plus", "I_plus", &PointwiseDecomposition::shared_plus, &AverageDecomposition::shared_plus,
     &ExactPointwise::shared_plus},
    {"i_minus", "I_minus", &PointwiseDecomposition::shared_minus, &AverageDecomposition::shared_minus,
     &ExactPointwise::shared_minus},
    {"i", "I", &PointwiseDecomposition::shared, &AverageDecomposition::shared, &ExactPointwise::shared},
    {"pi_plus", "Pi_plus", &PointwiseDecomposition::atom_plus, &AverageDecomposition::atom_plus,
     &ExactPointwise::atom_plus},
    {"pi_minus", "Pi_minus", &PointwiseDecomposition::atom_minus, &AverageDecomposition::atom_minus,
     &ExactPointwise::atom_minus},
    {"pi", "Pi", &PointwiseDecomposition::atom, &AverageDecomposition::atom, &ExactPointwise::atom},
};

ordered_json alphabet_json(const Alphabet& a) { return {{"name", a.name()}, {"symbols", a.symbols()}}; }

Alphabet alphabet_from(const ordered_json& j) {
  return Alphabet(j.at("name").get<std::string>(), j.at("symbols").get<std::vector<std::string>>());
}

Symbol symbol_from(const Alphabet& a, const ordered_json& j) {
  const auto s = a.index_of(j.get<std::string>());
  if (!s) throw DistributionError("unknown symbol '" + j.get<std::string>() + "' for " + a.name());
  return *s;
}

std::size_t node_index(const std::vector<std::string>& nodes, const std::string& name) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return i;
  throw DistributionError("unknown node '" + name + "'");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void write_rows(std::ostringstream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += c == 0 ? pad_right(row[c], width[c]) : pad(row[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
}

std::vector<std::string> realization_cells(const DecompositionReport& r, const Realization& x) {
  std::vector<std::string> cells;
  for (std::size_t i = 0; i < r.sources.size(); ++i) cells.push_back(r.sources[i].label(x.s[i]));
  cells.push_back(r.target.label(x.t));
  return cells;
}

} // namespace

std::string format_fixed(double value, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << value;
  std::string s = os.str();
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

DecompositionReport make_report(const JointDistribution& d, std::string source, bool pointwise,
                                const EvaluationOptions& options) {
  DecompositionReport r;
  r.source = std::move(source);
  r.target = d.target_alphabet();
  r.sources = d.source_alphabets();
  for (const auto& a : RedundancyLattice::get(d.n_sources()).nodes()) r.nodes.push_back(a.name());
  auto pw = all_pointwise(d, options);
  r.averages = average_of(pw, r.nodes.size());
  if (pointwise) r.pointwise = std::move(pw);
  return r;
}

DecompositionReport filter_nodes(const DecompositionReport& report, const std::vector<std::string>& names) {
  const auto& lattice = RedundancyLattice::get(report.sources.size());
  std::vector<std::size_t> keep;
  for (const auto& name : names) keep.push_back(node_index(report.nodes, lattice.node(lattice.parse(name)).name()));
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out;
    for (auto k : keep) out.push_back(v[k]);
    return out;
  };
  auto pick_exact = [&](const std::vector<Rational>& v) {
    std::vector<Rational> out;
    for (auto k : keep) out.push_back(v[k]);
    return out;
  };
  DecompositionReport out = report;
  out.nodes.clear();
  for (auto k : keep) out.nodes.push_back(report.nodes[k]);
  for (const auto& f : fields) {
    out.averages.*f.average = pick(report.averages.*f.average);
    for (std::size_t i = 0; i < report.pointwise.size(); ++i) {
      out.pointwise[i].*f.pointwise = pick(report.pointwise[i].*f.pointwise);
      if (report.pointwise[i].exact) (*out.pointwise[i].exact).*f.exact = pick_exact((*report.pointwise[i].exact).*f.exact);
    }
  }
  return out;
}

std::string render_json(const DecompositionReport& report) {
  ordered_json doc;
  doc["source"] = report.source;
  doc["target"] = alphabet_json(report.target);
  doc["sources"] = ordered_json::array();
  for (const auto& a : report.sources) doc["sources"].push_back(alphabet_json(a));
  doc["nodes"] = report.nodes;
  ordered_json avg = ordered_json::object();
  for (std::size_t k = 0; k < report.nodes.size(); ++k) {
    ordered_json entry = ordered_json::object();
    for (const auto& f : fields) entry[f.average_key] = (report.averages.*f.average)[k];
    avg[report.nodes[k]] = entry;
  }
  doc["average"] = avg;
  if (!report.pointwise.empty()) {
    ordered_json blocks = ordered_json::array();
    for (const auto& pw : report.pointwise) {
      ordered_json block;
      ordered_json s = ordered_json::array();
      for (std::size_t i = 0; i < report.sources.size(); ++i) s.push_back(report.sources[i].label(pw.realization.s[i]));
      block["realization"] = {{"t", report.target.label(pw.realization.t)}, {"s", s}};
      block["p"] = pw.weight;
      ordered_json nodes = ordered_json::object();
      for (std::size_t k = 0; k < report.nodes.size(); ++k) {
        ordered_json entry = ordered_json::object();
        for (const auto& f : fields) entry[f.pointwise_key] = (pw.*f.pointwise)[k];
        entry["misinformative"] = pw.atom[k] < 0.0;
        if (pw.exact) {
          ordered_json ex = ordered_json::object();
          for (const auto& f : fields) ex[f.pointwise_key] = to_string(((*pw.exact).*f.exact)[k]);
          entry["exact_log2_argument"] = ex;
        }
        nodes[report.nodes[k]] = entry;
      }
      block["nodes"] = nodes;
      blocks.push_back(block);
    }
    doc["pointwise"] = blocks;
  }
  return doc.dump(2) + "\n";
}

DecompositionReport parse_json_report(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw DistributionError(std::string("malformed report: ") + e.what());
  }
  try {
    DecompositionReport r;
    r.source = doc.at("source").get<std::string>();
    r.target = alphabet_from(doc.at("target"));
    for (const auto& a : doc.at("sources")) r.sources.push_back(alphabet_from(a));
    r.nodes = doc.at("nodes").get<std::vector<std::string>>();
    const std::size_t count = r.nodes.size();
    for (const auto& f : fields) (r.averages.*f.average).assign(count, 0.0);
    for (const auto& [name, entry] : doc.at("average").items()) {
      const auto k = node_index(r.nodes, name);
      for (const auto& f : fields) (r.averages.*f.average)[k] = entry.at(f.average_key).get<double>();
    }
    if (doc.contains("pointwise")) {
      for (const auto& block : doc.at("pointwise")) {
        PointwiseDecomposition pw;
        const auto& real = block.at("realization");
        pw.realization.t = symbol_from(r.target, real.at("t"));
        const auto& s = real.at("s");
        if (s.size() != r.sources.size()) throw DistributionError("realization has the wrong source count");
        for (std::size_t i = 0; i < r.sources.size(); ++i) pw.realization.s.push_back(symbol_from(r.sources[i], s[i]));
        pw.weight = block.at("p").get<double>();
        for (const auto& f : fields) (pw.*f.pointwise).assign(count, 0.0);
        bool has_exact = false;
        for (const auto& [name, entry] : block.at("nodes").items()) has_exact |= entry.contains("exact_log2_argument");
        if (has_exact) {
          pw.exact.emplace();
          for (const auto& f : fields) ((*pw.exact).*f.exact).assign(count, Rational(0));
        }
        for (const auto& [name, entry] : block.at("nodes").items()) {
          const auto k = node_index(r.nodes, name);
          for (const auto& f : fields) (pw.*f.pointwise)[k] = entry.at(f.pointwise_key).get<double>();
          if (has_exact) {
            const auto& ex = entry.at("exact_log2_argument");
            for (const auto& f : fields) {
              const auto text = ex.at(f.pointwise_key).get<std::string>();
              const auto value = parse_rational(text);
              if (!value) throw DistributionError("malformed rational '" + text + "'");
              ((*pw.exact).*f.exact)[k] = *value;
            }
          }
        }
        r.pointwise.push_back(std::move(pw));
      }
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw DistributionError(std::string("malformed report: ") + e.what());
  }
}

std::string render_table(const DecompositionReport& report, int precision) {
  std::ostringstream out;
  const auto num = [&](double v) { return format_fixed(v, precision); };
  const std::size_t n = report.sources.size();

  if (!report.pointwise.empty()) {
    std::vector<std::vector<std::string>> rows;
    if (n == 2) {
      std::vector<std::string> head{"p"};
      for (const auto& a : report.sources) head.push_back(a.name());
      head.push_back(report.target.name());
      for (const char* part : {"pi+", "pi-"})
        for (const auto& node : report.nodes) head.push_back(std::string(part) + node);
      rows.push_back(head);
      for (const auto& pw : report.pointwise) {
        std::vector<std::string> row{num(pw.weight)};
        for (auto& c : realization_cells(report, pw.realization)) row.push_back(c);
        for (double v : pw.atom_plus) row.push_back(num(v));
        for (double v : pw.atom_minus) row.push_back(num(v));
        rows.push_back(row);
      }
    } else {
      std::vector<std::string> head{"realization", "p", "node", "i+", "i-", "i", "pi+", "pi-", "pi"};
      rows.push_back(head);
      for (const auto& pw : report.pointwise) {
        std::string where;
        for (auto& c : realization_cells(report, pw.realization)) where += (where.empty() ? "" : ",") + c;
        for (std::size_t k = 0; k < report.nodes.size(); ++k)
          rows.push_back({where, num(pw.weight), report.nodes[k], num(pw.shared_plus[k]), num(pw.shared_minus[k]),
                          num(pw.shared[k]), num(pw.atom_plus[k]), num(pw.atom_minus[k]), num(pw.atom[k])});
      }
    }
    out << "pointwise (" << report.source << ")\n";
    write_rows(out, rows);
    out << '\n';
  }

  std::vector<std::vector<std::string>> rows{{"node", "I+", "I-", "I", "Pi+", "Pi-", "Pi"}};
  for (std::size_t k = 0; k < report.nodes.size(); ++k) {
    const auto& a = report.averages;
    rows.push_back({report.nodes[k], num(a.shared_plus[k]), num(a.shared_minus[k]), num(a.shared[k]),
                    num(a.atom_plus[k]), num(a.atom_minus[k]), num(a.atom[k])});
  }
  out << "average (" << report.source << ")\n";
  write_rows(out, rows);
  return out.str();
}

} // namespace sxpid
