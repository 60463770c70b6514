// sxpid: command-line front end for the shared-exclusion decomposition.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sxpid/builtins.hpp"
#include "sxpid/examples.hpp"
#include "sxpid/grad.hpp"
#include "sxpid/io.hpp"
#include "sxpid/parallel.hpp"
#include "sxpid/report.hpp"

namespace {

using namespace sxpid;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_assertion = 3;

struct Input {
  std::string name;
  double tolerance = JointDistribution::default_tolerance;
};

JointDistribution load(const Input& in) {
  if (std::filesystem::is_regular_file(in.name)) return load_distribution_file(in.name, in.tolerance);
  if (is_builtin(in.name)) return builtin(in.name);
  throw std::invalid_argument("'" + in.name + "' is neither a readable file nor a builtin (" + [] {
    std::string all;
    for (const auto& n : builtin_names()) all += (all.empty() ? "" : ", ") + n;
    return all;
  }() + ")");
}

Part parse_part(const std::string& which) {
  if (which == "plus") return Part::plus;
  if (which == "minus") return Part::minus;
  return Part::net;
}

std::vector<std::string> split_labels(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

// "t,s1,...,sn" in alphabet labels.
Realization parse_realization(const JointDistribution& d, const std::string& text) {
  const auto labels = split_labels(text);
  if (labels.size() != d.n_sources() + 1)
    throw std::invalid_argument("realization needs " + std::to_string(d.n_sources() + 1) + " comma-separated labels");
  Realization r;
  const auto t = d.target_alphabet().index_of(labels[0]);
  if (!t) throw std::invalid_argument("unknown target symbol '" + labels[0] + "'");
  r.t = *t;
  for (std::size_t i = 0; i < d.n_sources(); ++i) {
    const auto s = d.source_alphabets()[i].index_of(labels[i + 1]);
    if (!s) throw std::invalid_argument("unknown symbol '" + labels[i + 1] + "' for source " + std::to_string(i + 1));
    r.s.push_back(*s);
  }
  return r;
}

std::string cell_label(const SimplexPoint& p, std::size_t k) {
  const auto r = p.realization(k);
  std::string out = p.target_alphabet().label(r.t);
  for (std::size_t i = 0; i < r.s.size(); ++i) out += "," + p.source_alphabets()[i].label(r.s[i]);
  return out;
}

SimplexPoint grid_point(const JointDistribution& d, double mixing, double epsilon) {
  if (mixing > 0.0) return SimplexPoint::mix(d, mixing, epsilon);
  try {
    return SimplexPoint(d.target_alphabet(), d.source_alphabets(), grid_masses(d), epsilon);
  } catch (const BoundaryError&) {
    throw BoundaryError("distribution has zero-mass grid cells; pass --mixing to move it into the interior");
  }
}

// ---- compute --------------------------------------------------------------

struct ComputeArgs {
  Input input;
  std::string format = "table";
  bool pointwise = false;
  bool exact = false;
  std::vector<std::string> nodes;
  std::size_t workers = 1;
  int precision = 4;
};

int run_compute(const ComputeArgs& a) {
  const auto d = load(a.input);
  auto report = make_report(d, a.input.name, a.pointwise, {a.workers, a.exact});
  if (!a.nodes.empty()) report = filter_nodes(report, a.nodes);
  std::cout << (a.format == "json" ? render_json(report) : render_table(report, a.precision));
  return exit_ok;
}

// ---- example --------------------------------------------------------------

struct ExampleArgs {
  std::string name;
  std::string atom;
  int precision = 4;
  std::size_t workers = 1;
};

int run_example_cmd(const ExampleArgs& a) {
  const auto result =
      run_example(a.name, a.atom.empty() ? std::nullopt : std::optional<std::string>(a.atom), a.precision, a.workers);
  std::cout << result.body;
  std::size_t failed = 0;
  for (const auto& c : result.checks) {
    failed += !c.passed();
    std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << ": expected " << format_fixed(c.expected, 6)
              << ", got " << format_fixed(c.actual, 6) << " (tol " << c.tolerance << ")\n";
  }
  for (const auto& [what, ok] : result.conditions) {
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
  }
  std::cout << result.name << ": " << (result.checks.size() + result.conditions.size() - failed) << " passed, " << failed
            << " failed\n";
  return failed == 0 ? exit_ok : exit_assertion;
}

// ---- lattice --------------------------------------------------------------

struct LatticeArgs {
  std::size_t n = 2;
  bool children = false;
  bool count_only = false;
};

int run_lattice(const LatticeArgs& a) {
  const auto& lattice = RedundancyLattice::get(a.n);
  std::cout << "n = " << a.n << ", nodes = " << lattice.size() << '\n';
  if (a.count_only) return exit_ok;
  for (RedundancyLattice::NodeId id = 0; id < lattice.size(); ++id) {
    std::cout << id << ' ' << lattice.node(id).name();
    if (a.children) {
      std::cout << " <-";
      for (auto c : lattice.children(id)) std::cout << ' ' << lattice.node(c).name();
    }
    std::cout << '\n';
  }
  return exit_ok;
}

// ---- gradient -------------------------------------------------------------

struct GradientArgs {
  Input input;
  std::string atom;
  std::string which = "net";
  std::string level = "average";
  std::string realization;
  bool check_fd = false;
  double mixing = 0.0;
  double epsilon = default_interior_margin;
  std::size_t workers = 1;
  std::string format = "table";
  int precision = 6;
};

int run_gradient(const GradientArgs& a) {
  const auto d = load(a.input);
  const auto p = grid_point(d, a.mixing, a.epsilon);
  QuantitySpec q;
  q.node = Antichain::parse(a.atom, d.n_sources());
  q.part = parse_part(a.which);
  q.level = a.level == "shared" ? Level::shared : a.level == "atom" ? Level::atom : Level::average;
  if (q.level != Level::average) {
    if (a.realization.empty()) throw std::invalid_argument("--realization is required for pointwise quantities");
    q.cell = p.cell(parse_realization(d, a.realization));
  }
  const auto rec = gradient(p, q, a.workers);
  std::vector<double> fd;
  FdComparison cmp;
  if (a.check_fd) {
    fd = finite_difference(p, q, default_fd_step, a.workers);
    cmp = compare_gradients(rec.partials, fd);
  }

  if (a.format == "json") {
    nlohmann::ordered_json doc;
    doc["quantity"] = rec.quantity;
    doc["value"] = rec.value;
    doc["tie_warning"] = rec.tie_warning;
    nlohmann::ordered_json partials = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < p.size(); ++k) partials[cell_label(p, k)] = rec.partials[k];
    doc["partials"] = partials;
    if (a.check_fd) {
      nlohmann::ordered_json f = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < p.size(); ++k) f[cell_label(p, k)] = fd[k];
      doc["finite_difference"] = f;
      doc["max_rel_error"] = cmp.max_rel_error;
      doc["max_abs_error"] = cmp.max_abs_error;
      doc["fd_passed"] = cmp.passed();
    }
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << rec.quantity << " = " << format_fixed(rec.value, a.precision) << '\n';
    if (rec.tie_warning) std::cout << "warning: tied child probabilities, partials from the recursion\n";
    std::cout << "cell (t,s)  partial" << (a.check_fd ? "  finite-difference" : "") << '\n';
    for (std::size_t k = 0; k < p.size(); ++k) {
      std::cout << cell_label(p, k) << "  " << format_fixed(rec.partials[k], a.precision);
      if (a.check_fd) std::cout << "  " << format_fixed(fd[k], a.precision);
      std::cout << '\n';
    }
    if (a.check_fd)
      std::cout << "fd check " << (cmp.passed() ? "PASS" : "FAIL") << ": max relative error " << cmp.max_rel_error
                << ", max absolute error " << cmp.max_abs_error << '\n';
  }
  return a.check_fd && !cmp.passed() ? exit_assertion : exit_ok;
}

// ---- optimize -------------------------------------------------------------

struct OptimizeArgs {
  Input input;
  std::string atom;
  std::string which = "net";
  bool minimize = false;
  bool mechanism_fixed = false;
  std::size_t steps = 100;
  double lr = 0.05;
  double mixing = 0.0;
  double epsilon = default_interior_margin;
  std::size_t workers = 1;
  bool masses = false;
};

int run_optimize(const OptimizeArgs& a) {
  const auto d = load(a.input);
  Objective obj{Antichain::parse(a.atom, d.n_sources()), parse_part(a.which), !a.minimize};
  OptimizerOptions opts;
  opts.steps = a.steps;
  opts.learning_rate = a.lr;
  opts.epsilon = a.epsilon;
  opts.workers = a.workers;
  std::vector<TrajectoryStep> trajectory;
  if (a.mechanism_fixed) {
    const auto mech = Mechanism::of(d);
    const auto joint = grid_masses(d);
    std::vector<double> q(mech.source_cells(), 0.0);
    for (std::size_t k = 0; k < joint.size(); ++k) q[k % q.size()] += joint[k];
    if (a.mixing > 0.0)
      for (auto& v : q) v = (1.0 - a.mixing) * v + a.mixing / static_cast<double>(q.size());
    trajectory = optimize_inputs(mech, q, obj, opts);
  } else {
    trajectory = optimize_atom(grid_point(d, a.mixing, a.epsilon), obj, opts);
  }
  for (const auto& s : trajectory) {
    nlohmann::ordered_json line;
    line["step"] = s.step;
    line["objective"] = s.objective;
    line["grad_norm"] = s.grad_norm;
    if (a.masses) line["masses"] = s.masses;
    std::cout << line.dump() << '\n';
  }
  return exit_ok;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::size_t n = 4;
  std::size_t trials = 3;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
};

std::uint64_t dedekind_minus_two(std::size_t n) {
  constexpr std::uint64_t d[] = {2, 3, 6, 20, 168, 7581, 7828354};
  return d[n] - 2;
}

JointDistribution random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<Alphabet> sources;
  for (std::size_t i = 0; i < n; ++i) sources.push_back(Alphabet::range("s" + std::to_string(i + 1), 2));
  std::vector<SupportPoint> support;
  double total = 0.0;
  for (std::uint32_t cell = 0; cell < (2u << n); ++cell) {
    Realization r{cell >> n, {}};
    for (std::size_t i = 0; i < n; ++i) r.s.push_back(cell >> (n - 1 - i) & 1u);
    support.push_back({r, u(rng)});
    total += support.back().p;
  }
  for (auto& pt : support) pt.p /= total;
  return JointDistribution(Alphabet::range("t", 2), std::move(sources), std::move(support));
}

// Order-sensitive digest of every double in the output.
std::uint64_t digest(const std::vector<PointwiseDecomposition>& pw) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 1099511628211ull;
  };
  for (const auto& p : pw)
    for (const auto* v : {&p.shared_plus, &p.shared_minus, &p.atom_plus, &p.atom_minus})
      for (double x : *v) mix(x);
  return h;
}

int run_bench(const BenchArgs& a) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto& lattice = RedundancyLattice::get(a.n);
  const double build = std::chrono::duration<double>(clock::now() - t0).count();
  std::cout << "n = " << a.n << ", lattice nodes = " << lattice.size() << " (d(n) - 2 = " << dedekind_minus_two(a.n)
            << ", " << (lattice.size() == dedekind_minus_two(a.n) ? "match" : "MISMATCH") << ")\n";
  std::cout << "lattice build: " << build << " s\n";

  std::mt19937_64 rng(a.seed);
  std::vector<JointDistribution> dists;
  for (std::size_t i = 0; i < a.trials; ++i) dists.push_back(random_distribution(a.n, rng));

  auto time_with = [&](std::size_t workers, std::uint64_t& h) {
    h = 0;
    const auto start = clock::now();
    for (const auto& d : dists) h ^= digest(all_pointwise(d, {workers, false})) + (h << 1);
    return std::chrono::duration<double>(clock::now() - start).count() / static_cast<double>(dists.size());
  };
  std::uint64_t h1 = 0, hw = 0;
  const double single = time_with(1, h1);
  std::cout << "workers = 1: " << single << " s per decomposition, digest " << std::hex << h1 << std::dec << '\n';
  if (a.workers > 1) {
    const double multi = time_with(a.workers, hw);
    std::cout << "workers = " << a.workers << ": " << multi << " s per decomposition, digest " << std::hex << hw
              << std::dec << '\n';
    std::cout << "speedup: " << single / multi << "x, outputs " << (h1 == hw ? "identical" : "DIFFER") << '\n';
    if (h1 != hw) return exit_assertion;
  }
  return lattice.size() == dedekind_minus_two(a.n) ? exit_ok : exit_assertion;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const DistributionError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const BoundaryError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return exit_invalid;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-exclusion pointwise partial information decomposition"};
  app.require_subcommand(1);
  const std::size_t workers = default_workers();
  auto workers_check = CLI::PositiveNumber;

  ComputeArgs compute;
  compute.workers = workers;
  auto* c = app.add_subcommand("compute", "Decompose a distribution file or builtin");
  c->add_option("input", compute.input.name, "CSV/JSON distribution file or builtin name")->required();
  c->add_option("--format", compute.format)->check(CLI::IsMember({"table", "json"}));
  c->add_flag("--pointwise", compute.pointwise, "Include per-realization values");
  c->add_flag("--exact", compute.exact, "Attach exact rational log arguments (n <= 3, exact masses)");
  c->add_option("--nodes", compute.nodes, "Restrict output to these nodes")->delimiter(';');
  c->add_option("--workers", compute.workers)->check(workers_check);
  c->add_option("--precision", compute.precision)->check(CLI::Range(0, 17));
  c->add_option("--tolerance", compute.input.tolerance, "Normalization tolerance")->check(CLI::NonNegativeNumber);

  ExampleArgs example;
  example.workers = workers;
  auto* e = app.add_subcommand("example", "Run a worked example with its assertions");
  e->add_option("name", example.name, "xor, pwunq, rnd, rnderr, xorduplicate, parity:k, vchannel")->required();
  e->add_option("--atom", example.atom, "Also report this node's atom");
  e->add_option("--precision", example.precision)->check(CLI::Range(0, 17));
  e->add_option("--workers", example.workers)->check(workers_check);

  LatticeArgs lat;
  auto* l = app.add_subcommand("lattice", "List the redundancy lattice");
  l->add_option("n", lat.n, "Number of sources")->required()->check(CLI::Range(std::size_t{1}, max_sources));
  l->add_flag("--children", lat.children, "Show each node's children");
  l->add_flag("--count", lat.count_only, "Only print the node count");

  GradientArgs grad;
  grad.workers = workers;
  auto* g = app.add_subcommand("gradient", "Analytic gradient over the outcome grid");
  g->add_option("input", grad.input.name)->required();
  g->add_option("--atom", grad.atom, "Node")->required();
  g->add_option("--which", grad.which)->check(CLI::IsMember({"plus", "minus", "net"}));
  g->add_option("--level", grad.level)->check(CLI::IsMember({"average", "atom", "shared"}));
  g->add_option("--realization", grad.realization, "t,s1,...,sn labels for pointwise levels");
  g->add_flag("--check-fd", grad.check_fd, "Compare with central differences");
  g->add_option("--mixing", grad.mixing, "Mix with the uniform grid pmf")->check(CLI::Range(0.0, 1.0));
  g->add_option("--epsilon", grad.epsilon, "Interior margin")->check(CLI::PositiveNumber);
  g->add_option("--format", grad.format)->check(CLI::IsMember({"table", "json"}));
  g->add_option("--precision", grad.precision)->check(CLI::Range(0, 17));
  g->add_option("--workers", grad.workers)->check(workers_check);

  OptimizeArgs opt;
  opt.workers = workers;
  auto* o = app.add_subcommand("optimize", "Projected gradient ascent on an averaged atom");
  o->add_option("input", opt.input.name)->required();
  o->add_option("--atom", opt.atom)->required();
  o->add_option("--which", opt.which)->check(CLI::IsMember({"plus", "minus", "net"}));
  auto* maximize = o->add_flag("--maximize", "Ascend (default)");
  o->add_flag("--minimize", opt.minimize, "Descend")->excludes(maximize);
  o->add_option("--steps", opt.steps);
  o->add_option("--lr", opt.lr)->check(CLI::NonNegativeNumber);
  o->add_flag("--mechanism-fixed", opt.mechanism_fixed, "Keep p(t|s) fixed, vary p(s)");
  o->add_option("--mixing", opt.mixing)->check(CLI::Range(0.0, 1.0));
  o->add_option("--epsilon", opt.epsilon)->check(CLI::PositiveNumber);
  o->add_flag("--masses", opt.masses, "Emit the joint masses at each step");
  o->add_option("--workers", opt.workers)->check(workers_check);

  BenchArgs bench;
  bench.workers = std::max<std::size_t>(workers, 1);
  auto* b = app.add_subcommand("bench", "Time full pointwise decompositions on random distributions");
  b->add_option("--n", bench.n)->check(CLI::Range(std::size_t{1}, max_sources));
  b->add_option("--trials", bench.trials)->check(CLI::PositiveNumber);
  b->add_option("--workers", bench.workers)->check(workers_check);
  b->add_option("--seed", bench.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? exit_ok : exit_invalid;
  }

  if (*c) return guarded([&] { return run_compute(compute); });
  if (*e) return guarded([&] { return run_example_cmd(example); });
  if (*l) return guarded([&] { return run_lattice(lat); });
  if (*g) return guarded([&] { return run_gradient(grad); });
  if (*o) return guarded([&] { return run_optimize(opt); });
  if (*b) return guarded([&] { return run_bench(bench); });
  return exit_invalid;
}
