#include "netfactor/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "netfactor/rng.hpp"

namespace netfactor {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SearchConfig::check() const {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (conv_tol <= 0.0 || success_tol <= 0.0)
    throw std::invalid_argument("tolerances must be strictly positive");
  if (init_scale <= 0.0) throw std::invalid_argument("init_scale must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     double kkt_tol) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);

  Eigen::VectorXd atb = a.transpose() * b;
  const double tol = kkt_tol * std::max(1.0, atb.lpNorm<Eigen::Infinity>());

  auto solve_passive = [&](const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    return Eigen::VectorXd(ap.colPivHouseholderQr().solve(b));
  };

  const int max_outer = 3 * static_cast<int>(n) + 10;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;

    for (int inner = 0; inner <= max_outer; ++inner) {
      std::vector<Eigen::Index> cols;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)]) cols.push_back(j);
      Eigen::VectorXd z = solve_passive(cols);

      double min_z = kInf;
      for (Eigen::Index k = 0; k < z.size(); ++k) min_z = std::min(min_z, z[k]);
      if (min_z > 0.0) {
        x.setZero();
        for (size_t k = 0; k < cols.size(); ++k) x[cols[k]] = z[static_cast<Eigen::Index>(k)];
        break;
      }

      // Step back to the feasible boundary and retire the blocking variables.
      double alpha = kInf;
      for (size_t k = 0; k < cols.size(); ++k) {
        double zk = z[static_cast<Eigen::Index>(k)];
        if (zk <= 0.0) {
          double xk = x[cols[k]];
          if (xk - zk > 0.0) alpha = std::min(alpha, xk / (xk - zk));
        }
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      for (size_t k = 0; k < cols.size(); ++k) {
        Eigen::Index j = cols[k];
        x[j] += alpha * (z[static_cast<Eigen::Index>(k)] - x[j]);
      }
      double cutoff = 1e-12 * std::max(1e-300, x.cwiseAbs().maxCoeff());
      for (size_t k = 0; k < cols.size(); ++k) {
        Eigen::Index j = cols[k];
        if (z[static_cast<Eigen::Index>(k)] <= 0.0 && x[j] <= cutoff) {
          x[j] = 0.0;
          passive[static_cast<size_t>(j)] = false;
        }
      }
      bool any_passive = std::any_of(passive.begin(), passive.end(), [](bool p) { return p; });
      if (!any_passive) break;
    }
  }
  return x.cwiseMax(0.0);
}

namespace {

// Environment of one node: the contraction of every other node tensor (and
// the client-edge bridging deltas), leaving the clients and the node's own
// axes free. The realized tensor is linear in the node's entries with this
// tensor as the design operator.
Tensor node_environment(const Network& net, const NodeAssignment& assignment,
                        const std::string& node) {
  std::vector<Tensor> tensors;
  std::vector<std::pair<std::string, std::string>> bonds;

  for (const auto& [id, t] : assignment.node_tensors) {
    if (id == node) continue;
    std::vector<std::pair<std::string, std::string>> renames;
    for (const NetworkEdge& e : net.incident_edges(id)) {
      std::string other = (e.a == id) ? e.b : e.a;
      if (net.is_client(other)) renames.push_back({e.label, other});
    }
    tensors.push_back(t.relabeled(renames));
  }

  for (const NetworkEdge& e : net.edges()) {
    bool a_client = net.is_client(e.a), b_client = net.is_client(e.b);
    bool touches_node = (e.a == node) || (e.b == node);
    if (a_client && b_client) {
      tensors.push_back(Tensor::delta({{e.a, e.dim}, {e.b, e.dim}}));
    } else if (touches_node) {
      // The node's own client edges bridge its axis label to the client id;
      // its internal edges stay free on the neighbour side.
      std::string other = (e.a == node) ? e.b : e.a;
      if (net.is_client(other))
        tensors.push_back(Tensor::delta({{other, e.dim}, {e.label, e.dim}}));
    } else if (!a_client && !b_client) {
      bonds.push_back({e.label, e.label});
    }
  }

  std::vector<std::string> free = net.clients();
  for (const NetworkEdge& e : net.incident_edges(node)) free.push_back(e.label);
  return contract(ContractionPlan{std::move(tensors), std::move(bonds), std::move(free)});
}

struct NodeProblem {
  std::string node;
  std::vector<std::string> axis_order;  // the node tensor's axis order
  Eigen::Index cols = 0;
};

// One ALS restart; returns (residual, sweeps). The assignment is left at the
// final iterate.
std::pair<double, int> run_restart(const Network& net, const DistributionTask& task,
                                   Domain domain, const SearchConfig& config,
                                   int restart, NodeAssignment& assignment) {
  RandomStream rng = RandomStream::derived(config.seed, static_cast<std::uint64_t>(restart));

  // Random initialization, nodes in sorted-id order.
  for (auto& [id, t] : assignment.node_tensors) {
    Eigen::VectorXcd data(t.size());
    for (Eigen::Index k = 0; k < data.size(); ++k) {
      if (domain == Domain::Complex) {
        data[k] = Complex(rng.gaussian(), rng.gaussian()) * (config.init_scale / std::sqrt(2.0));
      } else {
        data[k] = Complex(rng.uniform(0.0, config.init_scale), 0.0);
      }
    }
    t = Tensor(t.axes(), std::move(data), domain);
  }

  std::vector<std::string> client_order = net.clients();
  std::sort(client_order.begin(), client_order.end());
  Tensor target = task.tensor().transposed(client_order);
  const double target_norm = target.data().norm();

  double residual = kInf;
  double prev_residual = kInf;
  int sweeps = 0;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    sweeps = sweep;
    for (auto& [id, t] : assignment.node_tensors) {
      Tensor env = node_environment(net, assignment, id);

      std::vector<std::string> order = client_order;
      std::vector<std::string> node_axes;
      for (const Axis& ax : t.axes()) node_axes.push_back(ax.label);
      order.insert(order.end(), node_axes.begin(), node_axes.end());
      Tensor env_ordered = env.transposed(order);

      Eigen::Index rows = target.size();
      Eigen::Index cols = t.size();
      using RowMajor =
          Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
      Eigen::Map<const RowMajor> design(env_ordered.data().data(), rows, cols);

      Eigen::VectorXcd solution;
      if (domain == Domain::Complex) {
        Eigen::MatrixXcd a = design;
        solution = a.completeOrthogonalDecomposition().solve(target.data());
      } else {
        Eigen::MatrixXd a = design.real();
        Eigen::VectorXd b = target.data().real();
        Eigen::VectorXd x = nnls(a, b);
        solution = x.cast<Complex>();
      }
      if (!solution.allFinite()) return {kInf, sweeps};

      t = Tensor(t.axes(), solution, domain);
      residual = (design * solution - target.data()).norm() / target_norm;
      if (!std::isfinite(residual)) return {kInf, sweeps};
    }
    if (config.on_sweep) config.on_sweep(restart, sweep, residual);
    if (std::isfinite(prev_residual) &&
        std::abs(prev_residual - residual) <= config.conv_tol * std::max(prev_residual, 1e-300))
      break;
    prev_residual = residual;
  }
  return {residual, sweeps};
}

}  // namespace

SearchResult als_search(const Network& net, const DistributionTask& task,
                        Domain domain, const SearchConfig& config) {
  config.check();
  net.require_valid();
  if (domain == Domain::NonNegative && task.domain() != Domain::NonNegative)
    throw std::invalid_argument("non-negative search needs a non-negative task");

  std::vector<std::string> net_clients = net.clients();
  std::set<std::string> client_set(net_clients.begin(), net_clients.end());
  if (task.clients().size() != net_clients.size())
    throw std::invalid_argument("task clients do not match network clients");
  for (const TaskClient& c : task.clients()) {
    if (!client_set.count(c.id))
      throw std::invalid_argument("task client '" + c.id + "' is not a network client");
    if (net.incident_edges(c.id).front().dim != c.dim)
      throw std::invalid_argument("task dim mismatch for client '" + c.id + "'");
  }
  if (net.internal_nodes().empty())
    throw std::invalid_argument("network has no coding nodes to search over");

  // Template assignment carrying the axis structure.
  NodeAssignment shape;
  shape.domain = domain;
  for (const std::string& id : net.internal_nodes()) {
    std::vector<Axis> axes;
    for (const NetworkEdge& e : net.incident_edges(id)) axes.push_back({e.label, e.dim});
    shape.node_tensors.emplace(id, Tensor::zeros(axes, domain));
  }

  const int n = config.restarts;
  std::vector<double> residuals(static_cast<size_t>(n), kInf);
  std::vector<int> sweeps(static_cast<size_t>(n), 0);
  std::vector<NodeAssignment> finals(static_cast<size_t>(n));

  auto worker = [&](std::atomic<int>& next) {
    for (int r = next.fetch_add(1); r < n; r = next.fetch_add(1)) {
      NodeAssignment asg = shape;
      auto [res, sw] = run_restart(net, task, domain, config, r, asg);
      residuals[static_cast<size_t>(r)] = res;
      sweeps[static_cast<size_t>(r)] = sw;
      finals[static_cast<size_t>(r)] = std::move(asg);
    }
  };

  std::atomic<int> next{0};
  int n_threads = std::min(config.threads, n);
  if (n_threads <= 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back([&] { worker(next); });
    for (std::thread& th : pool) th.join();
  }

  SearchResult result;
  result.residual_per_restart = residuals;
  result.sweeps_used = sweeps;
  int best = 0;
  for (int r = 1; r < n; ++r)
    if (residuals[static_cast<size_t>(r)] < residuals[static_cast<size_t>(best)]) best = r;
  result.best_restart = best;
  result.best_residual = residuals[static_cast<size_t>(best)];
  result.best_assignment = std::move(finals[static_cast<size_t>(best)]);
  result.hit = result.best_residual <= config.success_tol;
  return result;
}

namespace {

using Matrix2 = Eigen::Matrix2cd;

struct ReducedFamily {
  std::array<Matrix2, 2> a, b, c, d;
};

ReducedFamily expand(const SquareReducedParams& p) {
  ReducedFamily f;
  f.a[0] = Matrix2::Identity();
  f.a[1] = p.a1;
  f.b[0] = Matrix2::Identity();
  f.b[1] = (Matrix2() << 1.0, 0.0, 0.0, -1.0).finished();  // Z
  f.c[0] = p.c0;
  f.c[1] = p.c1;
  f.d[0] = Matrix2::Identity();
  f.d[1] = p.d1;
  return f;
}

double objective_and_gradient(const SquareReducedParams& p, SquareReducedParams* grad) {
  ReducedFamily f = expand(p);
  double value = 0.0;
  if (grad) {
    grad->a1.setZero();
    grad->c0.setZero();
    grad->c1.setZero();
    grad->d1.setZero();
  }
  for (int ia = 0; ia < 2; ++ia)
    for (int ib = 0; ib < 2; ++ib)
      for (int ic = 0; ic < 2; ++ic)
        for (int id = 0; id < 2; ++id) {
          Matrix2 ab = f.a[ia] * f.b[ib];
          Matrix2 abc = ab * f.c[ic];
          Complex target = (ia == ic && ib == id) ? 1.0 : 0.0;
          Complex r = (abc * f.d[id]).trace() - target;
          value += std::norm(r);
          if (!grad) continue;
          // d tr(ABCD)/dX_{ij} is the (j,i) entry of the product of the
          // other three factors in cyclic order.
          if (ia == 1) {
            Matrix2 coef = f.b[ib] * f.c[ic] * f.d[id];
            grad->a1 += 2.0 * r * coef.transpose().conjugate();
          }
          Matrix2 dab = f.d[id] * ab;
          if (ic == 0)
            grad->c0 += 2.0 * r * dab.transpose().conjugate();
          else
            grad->c1 += 2.0 * r * dab.transpose().conjugate();
          if (id == 1) grad->d1 += 2.0 * r * abc.transpose().conjugate();
        }
  if (grad) grad->a1(0, 0) = 0.0;  // pinned parameter
  return value;
}

SquareReducedParams axpy(const SquareReducedParams& p, double step,
                         const SquareReducedParams& g) {
  SquareReducedParams q;
  q.a1 = p.a1 - step * g.a1;
  q.c0 = p.c0 - step * g.c0;
  q.c1 = p.c1 - step * g.c1;
  q.d1 = p.d1 - step * g.d1;
  return q;
}

double grad_norm2(const SquareReducedParams& g) {
  return g.a1.squaredNorm() + g.c0.squaredNorm() + g.c1.squaredNorm() + g.d1.squaredNorm();
}

}  // namespace

double square_reduced_objective(const SquareReducedParams& p) {
  return objective_and_gradient(p, nullptr);
}

NodeAssignment square_reduced_assignment(const SquareReducedParams& p) {
  ReducedFamily f = expand(p);
  auto corner = [](const std::string& client_axis, const std::string& row_axis,
                   const std::string& col_axis, const std::array<Matrix2, 2>& m) {
    Tensor t = Tensor::zeros({{client_axis, 2}, {row_axis, 2}, {col_axis, 2}},
                             Domain::Complex);
    for (Index i = 0; i < 2; ++i)
      for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 2; ++c) t.set({i, r, c}, m[static_cast<size_t>(i)](r, c));
    return t;
  };
  NodeAssignment asg;
  asg.domain = Domain::Complex;
  asg.node_tensors.emplace("A", corner("ia", "alpha", "beta", f.a));
  asg.node_tensors.emplace("B", corner("ib", "beta", "gamma", f.b));
  asg.node_tensors.emplace("C", corner("ic", "gamma", "delta", f.c));
  asg.node_tensors.emplace("D", corner("id", "delta", "alpha", f.d));
  return asg;
}

SearchResult square_cross_reduced_search(const SearchConfig& config) {
  config.check();
  const double task_norm = 2.0;  // |delta x delta|_F over four qubit clients

  const int n = config.restarts;
  std::vector<double> residuals(static_cast<size_t>(n), kInf);
  std::vector<int> iters(static_cast<size_t>(n), 0);
  std::vector<SquareReducedParams> finals(static_cast<size_t>(n));

  auto run_one = [&](int restart) {
    RandomStream rng = RandomStream::derived(config.seed, static_cast<std::uint64_t>(restart));
    auto random_matrix = [&]() {
      Matrix2 m;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          m(r, c) = Complex(rng.gaussian(), rng.gaussian()) * (config.init_scale / std::sqrt(2.0));
      return m;
    };
    SquareReducedParams p{random_matrix(), random_matrix(), random_matrix(), random_matrix()};
    p.a1(0, 0) = 1.0;

    double step = 0.05;
    SquareReducedParams g;
    double f = objective_and_gradient(p, &g);
    int it = 0;
    for (; it < config.max_sweeps; ++it) {
      double gn2 = grad_norm2(g);
      if (!std::isfinite(f)) {
        f = kInf;
        break;
      }
      if (gn2 <= 1e-24) break;
      double trial_step = step * 2.0;
      SquareReducedParams q;
      double fq = kInf;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        q = axpy(p, trial_step, g);
        q.a1(0, 0) = 1.0;
        fq = square_reduced_objective(q);
        if (fq <= f - 1e-4 * trial_step * gn2) {
          accepted = true;
          break;
        }
        trial_step *= 0.5;
      }
      if (!accepted) break;
      step = trial_step;
      double df = f - fq;
      p = q;
      f = objective_and_gradient(p, &g);
      if (config.on_sweep) config.on_sweep(restart, it + 1, std::sqrt(f) / task_norm);
      if (df <= config.conv_tol * std::max(f, 1e-30)) break;
    }
    residuals[static_cast<size_t>(restart)] = std::isfinite(f) ? std::sqrt(f) / task_norm : kInf;
    iters[static_cast<size_t>(restart)] = it;
    finals[static_cast<size_t>(restart)] = p;
  };

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next.fetch_add(1); r < n; r = next.fetch_add(1)) run_one(r);
  };
  int n_threads = std::min(config.threads, n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  SearchResult result;
  result.residual_per_restart = residuals;
  result.sweeps_used = iters;
  int best = 0;
  for (int r = 1; r < n; ++r)
    if (residuals[static_cast<size_t>(r)] < residuals[static_cast<size_t>(best)]) best = r;
  result.best_restart = best;
  result.best_residual = residuals[static_cast<size_t>(best)];
  result.best_assignment = square_reduced_assignment(finals[static_cast<size_t>(best)]);
  result.hit = result.best_residual <= config.success_tol;
  return result;
}

SquareConditionReport square_necessary_conditions(const NodeAssignment& assignment,
                                                  double tol) {
  struct CornerSpec {
    const char* node;
    const char* client;
    const char* row;
    const char* col;
  };
  const std::array<CornerSpec, 4> corners = {{{"A", "ia", "alpha", "beta"},
                                              {"B", "ib", "beta", "gamma"},
                                              {"C", "ic", "gamma", "delta"},
                                              {"D", "id", "delta", "alpha"}}};

  std::array<std::array<Matrix2, 2>, 4> mats;
  for (size_t k = 0; k < corners.size(); ++k) {
    auto it = assignment.node_tensors.find(corners[k].node);
    if (it == assignment.node_tensors.end())
      throw std::invalid_argument("assignment is not shaped for square(2,2): missing node '" +
                                  std::string(corners[k].node) + "'");
    const Tensor& t = it->second;
    for (const char* axis : {corners[k].client, corners[k].row, corners[k].col})
      if (!t.has_axis(axis) || t.dim(axis) != 2)
        throw std::invalid_argument("assignment is not shaped for square(2,2): node '" +
                                    std::string(corners[k].node) + "' lacks a dim-2 axis '" +
                                    axis + "'");
    std::vector<std::string> order = {corners[k].client, corners[k].row, corners[k].col};
    Tensor ord = t.transposed(order);
    for (Index i = 0; i < 2; ++i)
      for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 2; ++c)
          mats[k][static_cast<size_t>(i)](r, c) = ord.at({i, r, c});
  }

  auto matrix_rank = [&](const Matrix2& m) {
    Eigen::JacobiSVD<Matrix2> svd(m);
    double top = svd.singularValues()(0);
    if (top == 0.0) return 0;
    int rank = 0;
    for (Index k = 0; k < 2; ++k)
      if (svd.singularValues()(k) > tol * top) ++rank;
    return rank;
  };

  SquareConditionReport report;
  bool all_ok = true;
  for (size_t k = 0; k < corners.size(); ++k) {
    SquareConditionReport::Corner c;
    c.node = corners[k].node;
    c.rank = {matrix_rank(mats[k][0]), matrix_rank(mats[k][1])};
    c.full_rank = (c.rank[0] == 2 && c.rank[1] == 2);
    all_ok = all_ok && c.full_rank;
    report.corners.push_back(std::move(c));
  }

  for (size_t k = 0; k < corners.size(); ++k) {
    size_t kn = (k + 1) % 4;
    Eigen::Matrix4cd span;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) {
        Matrix2 prod = mats[k][static_cast<size_t>(i)] * mats[kn][static_cast<size_t>(j)];
        span.row(2 * i + j) << prod(0, 0), prod(0, 1), prod(1, 0), prod(1, 1);
      }
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(span);
    double top = svd.singularValues()(0);
    bool spans = top > 0.0 && svd.singularValues()(3) > tol * top;
    report.pairs.push_back({corners[k].node, corners[kn].node, spans});
    all_ok = all_ok && spans;
  }
  report.passed = all_ok;
  return report;
}

}  // namespace netfactor
