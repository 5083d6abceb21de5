// Command-line front end: verification, factorization search, rank analysis
// and protocol simulation over the document formats, with deterministic
// reports. Exit codes: 0 success, 1 clean negative, 2 input/usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netfactor/contraction.hpp"
#include "netfactor/io.hpp"
#include "netfactor/network.hpp"
#include "netfactor/rank.hpp"
#include "netfactor/search.hpp"
#include "netfactor/sim.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"

namespace nf = netfactor;

namespace {

constexpr const char* kEvidenceBanner =
    "no factorization found (evidence, not proof)";

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw nf::ParseError("cannot write '" + out_path + "'");
  out << text;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("NETFACTOR_SEED");
  if (!env) return 0;
  return std::strtoull(env, nullptr, 10);
}

// Instance names: butterfly | ternary-square | single-edge-D |
// channel-D[-DU-DV] | square-DI-DC | star-N-D.
std::optional<nf::Network> builtin_network(const std::string& name) {
  auto parse_ints = [](const std::string& s) {
    std::vector<long> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, '-')) vals.push_back(std::stol(item));
    return vals;
  };
  try {
    if (name == "butterfly") return nf::butterfly_network();
    if (name == "ternary-square") return nf::ternary_square_network();
    if (name.rfind("single-edge-", 0) == 0)
      return nf::single_edge_network(std::stol(name.substr(12)));
    if (name.rfind("channel-", 0) == 0) {
      auto v = parse_ints(name.substr(8));
      if (v.size() == 1) return nf::channel_network(v[0]);
      if (v.size() == 3) return nf::channel_network(v[0], v[1], v[2]);
      return std::nullopt;
    }
    if (name.rfind("square-", 0) == 0) {
      auto v = parse_ints(name.substr(7));
      if (v.size() == 2) return nf::square_network(v[0], v[1]);
      return std::nullopt;
    }
    if (name.rfind("star-", 0) == 0) {
      auto v = parse_ints(name.substr(5));
      if (v.size() == 2) return nf::star_network(static_cast<int>(v[0]), v[1]);
      return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

struct VerifyBundle {
  nf::Network network;
  nf::DistributionTask task;
  nf::NodeAssignment assignment;
  std::string description;
};

std::optional<VerifyBundle> builtin_verify(const std::string& name) {
  if (name == "butterfly" || name == "butterfly-xor") {
    return VerifyBundle{nf::butterfly_network(),
                        nf::cross_pairs_task({{"S1", "T1"}, {"S2", "T2"}}, {2, 2},
                                             nf::Domain::NonNegative),
                        nf::butterfly_xor_assignment(),
                        "butterfly crossing task with the XOR assignment"};
  }
  if (name.rfind("star-ghz-", 0) == 0) {
    int n = std::stoi(name.substr(9));
    return VerifyBundle{nf::star_network(n, 2), nf::ghz_task(n, 2, nf::Domain::NonNegative),
                        nf::star_ghz_assignment(n, 2),
                        "GHZ distribution over the star via the center delta"};
  }
  if (name == "appendix-cross" || name == "appendix-cross-0" || name == "appendix-cross-1") {
    int x = (name.back() == '1') ? 1 : 0;
    return VerifyBundle{nf::ternary_square_network(),
                        nf::cross_pairs_task({{"a", "d"}, {"b", "c"}}, {2, 2},
                                             nf::Domain::Complex),
                        nf::ternary_square_cross_assignment(x),
                        "ternary-square cross pairs, outcome bit " + std::to_string(x)};
  }
  return std::nullopt;
}

int cmd_instances(const std::string& emit_name, const std::string& out_path) {
  if (emit_name.empty()) {
    std::ostringstream ss;
    ss << "canonical instances:\n"
       << "  single-edge-D        two clients joined by one dim-D channel\n"
       << "  channel-D[-DU-DV]    coding nodes around a dim-D channel, client dims DU, DV\n"
       << "  butterfly            two crossing unit connections over the bottleneck\n"
       << "  square-DI-DC         4-cycle with internal dim DI and client dim DC\n"
       << "  ternary-square       square of dim-3 channels with qubit clients\n"
       << "  star-N-D             N clients around one hub, edges dim D\n";
    emit(out_path, ss.str());
    return 0;
  }
  auto net = builtin_network(emit_name);
  if (!net) throw nf::ParseError("unknown instance '" + emit_name + "'");
  emit(out_path, nf::network_to_json_text(*net));
  return 0;
}

int cmd_verify(const std::string& builtin, const std::string& network_path,
               const std::string& task_path, const std::string& assignment_path,
               double tol, const std::string& out_path) {
  nf::Network net;
  nf::DistributionTask task;
  nf::NodeAssignment assignment;
  std::string source;
  if (!builtin.empty()) {
    auto bundle = builtin_verify(builtin);
    if (!bundle) throw nf::ParseError("unknown verify builtin '" + builtin + "'");
    net = bundle->network;
    task = bundle->task;
    assignment = bundle->assignment;
    source = "builtin " + builtin + " (" + bundle->description + ")";
  } else {
    if (network_path.empty() || task_path.empty() || assignment_path.empty())
      throw nf::ParseError("verify needs --network, --task and --assignment (or --builtin)");
    net = nf::read_network(network_path);
    task = nf::read_task(task_path);
    assignment = nf::read_assignment(assignment_path);
    source = "network " + network_path + ", task " + task_path + ", assignment " +
             assignment_path;
  }

  nf::VerifyReport report = nf::verify_assignment(net, task, assignment, tol);

  std::ostringstream ss;
  ss << "verify report\n";
  ss << "inputs: " << source << "\n";
  ss << "domain: " << nf::to_string(task.domain()) << "\n";
  ss << "tolerance: " << nf::format_double(tol) << "\n";
  ss << "matched: " << (report.matched ? "yes" : "no") << "\n";
  ss << "scale: " << nf::format_complex(report.scale) << "\n";
  ss << "residual: " << nf::format_double(report.residual) << "\n";
  if (report.domain_violations.empty()) {
    ss << "domain violations: none\n";
  } else {
    ss << "domain violations:\n";
    for (const std::string& v : report.domain_violations) ss << "  " << v << "\n";
  }
  emit(out_path, ss.str());
  return report.matched ? 0 : 1;
}

struct SearchBundle {
  nf::Network network;
  nf::DistributionTask task;
  std::string description;
};

std::optional<SearchBundle> builtin_search(const std::string& name) {
  if (name == "typewriter")
    return SearchBundle{nf::channel_network(3, 4, 4), nf::typewriter_task(),
                        "typewriter correlation over a dim-3 channel"};
  if (name == "square-cross")
    return SearchBundle{nf::square_network(2, 2),
                        nf::cross_pairs_task({{"a", "c"}, {"b", "d"}}, {2, 2},
                                             nf::Domain::NonNegative),
                        "cross pairs over the square"};
  if (name == "butterfly-cross")
    return SearchBundle{nf::butterfly_network(),
                        nf::cross_pairs_task({{"S1", "T1"}, {"S2", "T2"}}, {2, 2},
                                             nf::Domain::NonNegative),
                        "crossing task over the butterfly"};
  return std::nullopt;
}

int cmd_search(const std::string& builtin, const std::string& network_path,
               const std::string& task_path, std::string domain_name,
               bool reduced, const nf::SearchConfig& config, const std::string& out_path) {
  nf::Network net;
  nf::DistributionTask task;
  std::string source;
  if (reduced) domain_name = "complex";  // the reduced family is complex-only
  nf::Domain domain = nf::domain_from_string(domain_name);

  if (!reduced) {
    if (!builtin.empty()) {
      auto bundle = builtin_search(builtin);
      if (!bundle) throw nf::ParseError("unknown search builtin '" + builtin + "'");
      net = bundle->network;
      task = bundle->task;
      source = "builtin " + builtin + " (" + bundle->description + ")";
    } else {
      if (network_path.empty() || task_path.empty())
        throw nf::ParseError("search needs --network and --task (or --builtin)");
      net = nf::read_network(network_path);
      task = nf::read_task(task_path);
      source = "network " + network_path + ", task " + task_path;
    }
    if (domain == nf::Domain::Complex && task.domain() == nf::Domain::NonNegative)
      task = task.retagged(nf::Domain::Complex);
  }

  nf::SearchResult result = reduced
                                ? nf::square_cross_reduced_search(config)
                                : nf::als_search(net, task, domain, config);

  std::ostringstream ss;
  ss << "search report\n";
  if (reduced) {
    ss << "inputs: reduced 15-parameter family, square(2,2) cross task\n";
  } else {
    ss << "inputs: " << source << "\n";
  }
  ss << "domain: " << domain_name << "\n";
  ss << "seed: " << config.seed << "  restarts: " << config.restarts
     << "  max_sweeps: " << config.max_sweeps << "\n";
  ss << "success_tol: " << nf::format_double(config.success_tol)
     << "  conv_tol: " << nf::format_double(config.conv_tol) << "\n";
  ss << "hit: " << (result.hit ? "yes" : "no") << "\n";
  if (!result.hit) ss << "verdict: " << kEvidenceBanner << "\n";
  ss << "best: restart " << result.best_restart << " residual "
     << nf::format_double(result.best_residual) << "\n";
  ss << "restart residual sweeps\n";
  for (size_t r = 0; r < result.residual_per_restart.size(); ++r)
    ss << r << " " << nf::format_double(result.residual_per_restart[r]) << " "
       << result.sweeps_used[r] << "\n";
  emit(out_path, ss.str());
  return result.hit ? 0 : 1;
}

int cmd_analyze(const std::string& builtin, const std::string& matrix_path,
                double rank_tol, const nf::SearchConfig& config,
                const std::string& out_path) {
  Eigen::MatrixXcd m;
  std::string source;
  if (builtin == "typewriter") {
    m = nf::to_matrix(nf::typewriter_task().tensor());
    source = "builtin typewriter";
  } else if (builtin.rfind("identity-", 0) == 0) {
    long d = std::stol(builtin.substr(9));
    if (d < 1) throw nf::ParseError("identity size must be positive");
    m = Eigen::MatrixXcd::Identity(d, d);
    source = "builtin " + builtin;
  } else if (!builtin.empty()) {
    throw nf::ParseError("unknown analyze builtin '" + builtin + "'");
  } else {
    if (matrix_path.empty())
      throw nf::ParseError("analyze needs --matrix (a two-client task file) or --builtin");
    nf::DistributionTask task = nf::read_task(matrix_path);
    if (task.clients().size() != 2)
      throw nf::ParseError("analyze needs a two-client task");
    m = nf::to_matrix(task.tensor());
    source = "matrix " + matrix_path;
  }

  std::ostringstream ss;
  ss << "rank analysis\n";
  ss << "inputs: " << source << "\n";
  nf::RankReport rank = nf::numerical_rank(m, rank_tol);
  ss << "rank: " << rank.rank << "\n";
  ss << "singular values:";
  for (double s : rank.singular_values) ss << " " << nf::format_double(s);
  ss << "\n";

  if (m.rows() == 4 && rank.rank == 3) {
    try {
      nf::ForcedRowResult forced = nf::forced_row_combination(m);
      if (forced.rows_independent) {
        ss << "forced row combination: row4 = " << nf::format_complex(forced.coeffs(0))
           << " * row1 + " << nf::format_complex(forced.coeffs(1)) << " * row2 + "
           << nf::format_complex(forced.coeffs(2)) << " * row3\n";
        ss << "negative forced coefficient: " << (forced.negative_coefficient ? "yes" : "no")
           << "\n";
      } else {
        ss << "forced row combination: rows 1-3 dependent\n";
      }
    } catch (const std::invalid_argument& err) {
      ss << "forced row combination: " << err.what() << "\n";
    }
  }

  bool nonneg = true;
  for (Eigen::Index k = 0; k < m.size(); ++k)
    if (m(k).imag() != 0.0 || m(k).real() < 0.0) nonneg = false;
  if (!nonneg)
    throw nf::ParseError("non-negative bounds need an entrywise non-negative matrix");

  nf::NNRankBounds bounds = nf::nonneg_rank_bounds(m.real(), config);
  ss << "fooling set size: " << bounds.fooling.size << "\n";
  ss << "fooling set witness:";
  for (auto [i, j] : bounds.fooling.witness) ss << " (" << i << "," << j << ")";
  ss << "\n";
  ss << "nonnegative rank bounds: [" << bounds.lower << ", " << bounds.upper << "]\n";
  if (bounds.lower == bounds.upper) {
    ss << "nonnegative rank: " << bounds.lower << " (certified)\n";
  } else if (bounds.inconclusive_gap) {
    ss << "nonnegative rank: inconclusive gap (" << kEvidenceBanner << ")\n";
  }
  if (bounds.upper > rank.rank)
    ss << "separation: nonnegative rank exceeds rank (" << bounds.upper << " > "
       << rank.rank << ")\n";
  emit(out_path, ss.str());
  return 0;
}

int cmd_simulate(const std::string& builtin, const std::string& network_path,
                 const std::string& protocol_path, const std::string& task_path,
                 double fidelity_threshold, const std::string& out_path) {
  nf::Network net;
  std::vector<nf::ProtocolStep> steps;
  std::optional<nf::DistributionTask> target;
  std::string source;

  if (builtin == "appendix-cross") {
    net = nf::ternary_square_network();
    steps = nf::ternary_cross_protocol();
    target = nf::cross_pairs_task({{"a", "d"}, {"b", "c"}}, {2, 2}, nf::Domain::Complex);
    source = "builtin appendix-cross";
  } else if (builtin == "measure-demo") {
    net = nf::single_edge_network(2);
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(1, 2), p1 = Eigen::MatrixXcd::Zero(1, 2);
    p0(0, 0) = 1.0;
    p1(0, 1) = 1.0;
    steps.push_back(nf::MeasureStep{
        "u", {"u.ch"}, {{"m", 1}}, "z", {{"0", p0}, {"1", p1}}});
    source = "builtin measure-demo";
  } else if (!builtin.empty()) {
    throw nf::ParseError("unknown simulate builtin '" + builtin + "'");
  } else {
    if (network_path.empty() || protocol_path.empty())
      throw nf::ParseError("simulate needs --network and --protocol (or --builtin)");
    net = nf::read_network(network_path);
    steps = nf::read_protocol(protocol_path);
    if (!task_path.empty()) target = nf::read_task(task_path);
    source = "network " + network_path + ", protocol " + protocol_path;
  }

  nf::RunInfo info;
  std::vector<nf::Branch> branches = nf::run_protocol(net, steps, {}, &info);

  std::optional<nf::PureState> target_state;
  if (target) target_state = nf::task_target_state(*target);

  std::ostringstream ss;
  ss << "simulation report\n";
  ss << "inputs: " << source << "\n";
  for (const auto& [name, factor] : info.normalizations)
    ss << "measurement '" << name << "' family normalized by "
       << nf::format_double(factor) << "\n";
  ss << "branches: " << branches.size() << "\n";

  double total = 0.0;
  bool all_fidelities_ok = true;
  for (const nf::Branch& branch : branches) {
    total += branch.probability;
    ss << "branch";
    for (const auto& [name, value] : branch.outcomes) ss << " " << name << "=" << value;
    ss << ": probability " << nf::format_double(branch.probability);
    if (target_state) {
      nf::PureState client = nf::relabel_to_clients(net, branch.state);
      double f = nf::fidelity(*target_state, client);
      ss << " fidelity " << nf::format_double(f);
      if (f < fidelity_threshold) all_fidelities_ok = false;
    }
    ss << "\n";
  }
  ss << "total probability: " << nf::format_double(total) << "\n";
  emit(out_path, ss.str());
  return (target_state && !all_fidelities_ok) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensor-factorization feasibility tools for network coding"};
  app.require_subcommand(1);

  std::string builtin, network_path, task_path, assignment_path, protocol_path,
      matrix_path, out_path, domain_name = "complex", emit_name;
  double tol = 1e-8;
  double rank_tol = 1e-9;
  double fidelity_threshold = 1.0 - 1e-9;
  bool reduced = false;
  nf::SearchConfig config;
  config.seed = default_seed();

  CLI::App* instances = app.add_subcommand("instances", "list or emit canonical instances");
  instances->add_option("--builtin", emit_name, "instance to emit as a network file");
  instances->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "check an assignment against a task");
  verify->add_option("--builtin", builtin, "bundled instance name");
  verify->add_option("--network", network_path, "network file");
  verify->add_option("--task", task_path, "task file");
  verify->add_option("--assignment", assignment_path, "assignment file");
  verify->add_option("--tol", tol, "relative residual tolerance");
  verify->add_option("--out", out_path, "report path (default stdout)");

  CLI::App* search = app.add_subcommand("search", "search for a factorization");
  search->add_option("--builtin", builtin, "bundled instance name");
  search->add_option("--network", network_path, "network file");
  search->add_option("--task", task_path, "task file");
  search->add_option("--domain", domain_name, "complex|nonneg")
      ->check(CLI::IsMember({"complex", "nonneg"}));
  search->add_flag("--reduced", reduced, "use the reduced square-cross family");
  search->add_option("--restarts", config.restarts, "number of restarts");
  search->add_option("--max-sweeps", config.max_sweeps, "sweep budget per restart");
  search->add_option("--seed", config.seed, "RNG seed (default NETFACTOR_SEED or 0)");
  search->add_option("--threads", config.threads, "parallel restart workers");
  search->add_option("--success-tol", config.success_tol, "hit threshold");
  search->add_option("--conv-tol", config.conv_tol, "per-sweep convergence threshold");
  search->add_option("--init-scale", config.init_scale, "initialization scale");
  search->add_option("--out", out_path, "report path (default stdout)");

  CLI::App* analyze = app.add_subcommand("analyze", "rank and non-negative rank bounds");
  analyze->add_option("--builtin", builtin, "typewriter or identity-N");
  analyze->add_option("--matrix", matrix_path, "two-client task file");
  analyze->add_option("--rank-tol", rank_tol, "singular value threshold");
  analyze->add_option("--restarts", config.restarts, "search restarts per width");
  analyze->add_option("--seed", config.seed, "RNG seed (default NETFACTOR_SEED or 0)");
  analyze->add_option("--threads", config.threads, "parallel restart workers");
  analyze->add_option("--out", out_path, "report path (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "run a protocol branch by branch");
  simulate->add_option("--builtin", builtin, "appendix-cross or measure-demo");
  simulate->add_option("--network", network_path, "network file");
  simulate->add_option("--protocol", protocol_path, "protocol file");
  simulate->add_option("--task", task_path, "target task for fidelity reporting");
  simulate->add_option("--fidelity-threshold", fidelity_threshold,
                       "per-branch pass threshold");
  simulate->add_option("--out", out_path, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (instances->parsed()) return cmd_instances(emit_name, out_path);
    if (verify->parsed())
      return cmd_verify(builtin, network_path, task_path, assignment_path, tol, out_path);
    if (search->parsed())
      return cmd_search(builtin, network_path, task_path, domain_name, reduced, config,
                        out_path);
    if (analyze->parsed())
      return cmd_analyze(builtin, matrix_path, rank_tol, config, out_path);
    if (simulate->parsed())
      return cmd_simulate(builtin, network_path, protocol_path, task_path,
                          fidelity_threshold, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
