#include "harmony/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace harmony {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::exact: return "exact";
    case SolveStatus::eps: return "eps";
    case SolveStatus::failed: return "failed";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (mesh_start < 1) throw InputError("mesh_start must be >= 1");
  if (epsilon <= 0) throw InputError("epsilon must be positive");
  if (max_doublings < 0 || max_doublings > 40) throw InputError("max_doublings must lie in [0, 40]");
  if (beam < 1) throw InputError("beam width must be >= 1");
  if (vertex_budget < 1) throw InputError("vertex budget must be >= 1");
  if (snap_denominator < 0) throw InputError("snap denominator must be >= 0");
}

namespace {

struct BudgetExhausted {};

struct VertexInfo {
  std::vector<RoomSet> demand;
  std::int64_t deficiency = 0;
};

/// Memoized, budgeted demand evaluation at price vectors.
class Evaluator {
 public:
  Evaluator(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
            std::size_t budget, unsigned threads)
      : oracles_(oracles), capacities_(capacities.begin(), capacities.end()), budget_(budget) {
    bool sequential = std::any_of(oracles.begin(), oracles.end(), [](const PreferenceOracle& o) {
      return o.concurrency() == Concurrency::strictly_sequential;
    });
    threads_ = sequential ? 1u : (threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads);
    sequential_ = sequential;
  }

  bool sequential() const { return sequential_; }
  std::size_t evaluated() const { return cache_.size(); }
  std::size_t remaining() const { return budget_ - std::min(budget_, cache_.size()); }

  void evaluate(std::span<const PriceVector> points) {
    std::vector<const PriceVector*> missing;
    std::unordered_set<PriceVector, PriceVectorHash> seen;
    for (const auto& p : points) {
      if (!cache_.contains(p) && seen.insert(p).second) missing.push_back(&p);
    }
    if (missing.empty()) return;
    if (cache_.size() + missing.size() > budget_) throw BudgetExhausted{};

    std::vector<VertexInfo> results(missing.size());
    std::vector<std::exception_ptr> errors(missing.size());
    auto work = [&](std::size_t k) {
      try {
        DemandGraph g = build_demand_graph(oracles_, capacities_, *missing[k]);
        results[k].deficiency = deficiency(g);
        results[k].demand = std::move(g.edges);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    };
    unsigned workers = std::min<std::size_t>(threads_, missing.size());
    if (workers <= 1) {
      for (std::size_t k = 0; k < missing.size(); ++k) {
        work(k);
        if (errors[k]) break;
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
          for (std::size_t k = next++; k < missing.size(); k = next++) work(k);
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t k = 0; k < missing.size(); ++k) cache_.emplace(*missing[k], std::move(results[k]));
  }

  const VertexInfo& at(const PriceVector& p) const { return cache_.at(p); }

 private:
  std::span<const PreferenceOracle> oracles_;
  std::vector<int> capacities_;
  std::size_t budget_;
  unsigned threads_ = 1;
  bool sequential_ = false;
  std::unordered_map<PriceVector, VertexInfo, PriceVectorHash> cache_;
};

std::vector<std::int64_t> tail_key(const std::vector<std::int64_t>& x) {
  std::vector<std::int64_t> y(x.size() - 1);
  std::int64_t acc = 0;
  for (std::size_t j = x.size(); j-- > 1;) {
    acc += x[j];
    y[j - 1] = acc;
  }
  return y;
}

struct RankedCell {
  std::size_t index = 0;
  bool feasible = false;
  bool accepted = false;
  std::int64_t min_deficiency = 0;
  std::optional<Assignment> assignment;
};

Rational max_squared_distance(std::span<const PriceVector> points) {
  Rational best = 0;
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      Rational s = 0;
      for (std::size_t r = 0; r < points[a].size(); ++r) {
        Rational diff = points[a][r] - points[b][r];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  }
  return best;
}

PriceVector mean_of(std::span<const PriceVector> points) {
  std::vector<Rational> coords(points.front().size(), Rational(0));
  for (const auto& p : points) {
    for (std::size_t r = 0; r < coords.size(); ++r) coords[r] += p[r];
  }
  for (auto& c : coords) c /= static_cast<long>(points.size());
  return PriceVector::from_rationals(coords);
}

Rational floor_of(const Rational& v) {
  BigInt q = numerator_of(v) / denominator_of(v);
  if (Rational(q) > v) q -= 1;
  return Rational(q);
}

Rational ceil_of(const Rational& v) {
  Rational f = floor_of(v);
  return f == v ? f : f + 1;
}

class Search {
 public:
  Search(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
         const SolverConfig& config)
      : oracles_(oracles),
        capacities_(capacities.begin(), capacities.end()),
        config_(config),
        rooms_(capacities.size()),
        frame_(config.offset ? MeshFrame::seeded_offset(capacities.size(), config.seed) : MeshFrame{}),
        eval_(oracles, capacities, config.vertex_budget, config.threads) {}

  Solution run() {
    std::int64_t mesh = config_.mesh_start;
    if (vertex_count(rooms_, mesh) > static_cast<std::int64_t>(config_.vertex_budget)) {
      return failed();
    }
    std::vector<GridCell> region = triangulate(rooms_, mesh);
    const Rational eps_sq = config_.epsilon * config_.epsilon;

    for (int level = 0;; ++level) {
      stats_.levels = static_cast<std::size_t>(level) + 1;
      stats_.final_mesh = mesh;
      if (auto done = visit(region, mesh, level)) return *done;
      std::vector<RankedCell> ranked = rank(region);

      // Refined regions can lose every supporting cell; grow them by their
      // neighbours until one reappears.
      for (int round = 0; !ranked.front().feasible && round < kMaxWidening; ++round) {
        std::vector<GridCell> wider;
        if (vertex_count(rooms_, mesh) <= static_cast<std::int64_t>(eval_.remaining())) {
          wider = triangulate(rooms_, mesh);
        } else {
          wider = dilate(region);
        }
        if (wider.size() == region.size()) break;
        region = std::move(wider);
        if (auto done = visit(region, mesh, level)) return *done;
        ranked = rank(region);
      }
      best_cell_ = frame_.vertices(region[ranked.front().index]);

      for (const auto& rc : ranked) {
        if (!rc.feasible) break;
        const GridCell& cell = region[rc.index];
        if (frame_.squared_diameter(cell) > eps_sq) continue;
        if (!rc.accepted) continue;
        auto verts = frame_.vertices(cell);
        if (auto snapped = snap(verts)) return exact(*snapped);
        return eps(verts, *rc.assignment, frame_.squared_diameter(cell));
      }
      if (level >= config_.max_doublings || !ranked.front().feasible) break;

      std::vector<GridCell> next;
      std::size_t keep = std::min(config_.beam, ranked.size());
      for (std::size_t k = 0; k < keep; ++k) {
        for (auto& sub : refine(region[ranked[k].index])) next.push_back(std::move(sub));
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      region = std::move(next);
      mesh *= 2;
    }
    return finish_failed();
  }

 private:
  static constexpr int kMaxWidening = 12;

  /// Evaluates every vertex of the region in canonical order. Returns a
  /// finished solution on an exact hit or when the budget runs out.
  std::optional<Solution> visit(const std::vector<GridCell>& region, std::int64_t mesh, int level) {
    stats_.cells_visited += region.size();
    std::map<std::vector<std::int64_t>, std::vector<std::int64_t>> by_key;
    for (const auto& cell : region) {
      for (auto& v : cell.vertex_numerators()) by_key.emplace(tail_key(v), std::move(v));
    }
    std::vector<PriceVector> points;
    points.reserve(by_key.size());
    for (const auto& [key, x] : by_key) points.push_back(frame_.point(x, mesh));
    try {
      eval_.evaluate(points);
    } catch (const BudgetExhausted&) {
      return finish_failed();
    }
    report_progress(static_cast<std::size_t>(level), mesh, region.size());
    for (const auto& p : points) {
      if (eval_.at(p).deficiency == 0) return exact(p);
    }
    return std::nullopt;
  }

  /// The region plus every cell sharing a vertex with it.
  std::vector<GridCell> dilate(const std::vector<GridCell>& region) const {
    std::set<std::vector<std::int64_t>> seen;
    std::vector<GridCell> out = region;
    for (const auto& cell : region) {
      for (auto& v : cell.vertex_numerators()) {
        if (!seen.insert(v).second) continue;
        for (auto& c : locate(rooms_, cell.mesh, PriceVector(v, cell.mesh))) out.push_back(std::move(c));
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<RankedCell> rank(const std::vector<GridCell>& region) {
    std::vector<RankedCell> ranked(region.size());
    DemandGraph g;
    g.capacities = capacities_;
    for (std::size_t c = 0; c < region.size(); ++c) {
      RankedCell& rc = ranked[c];
      rc.index = c;
      g.edges.assign(oracles_.size(), RoomSet{});
      rc.min_deficiency = static_cast<std::int64_t>(oracles_.size()) + 1;
      for (const auto& v : frame_.vertices(region[c])) {
        const VertexInfo& info = eval_.at(v);
        rc.min_deficiency = std::min(rc.min_deficiency, info.deficiency);
        for (std::size_t i = 0; i < g.edges.size(); ++i) g.edges[i] |= info.demand[i];
      }
      FlowWitness w = feasible_assignment(g);
      rc.feasible = w.feasible();
      rc.assignment = std::move(w.assignment);
      rc.accepted = rc.feasible && (!config_.accept_cell || config_.accept_cell(frame_.vertices(region[c])));
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCell& a, const RankedCell& b) {
      if (a.feasible != b.feasible) return a.feasible;
      if (a.accepted != b.accepted) return a.accepted;
      if (a.min_deficiency != b.min_deficiency) return a.min_deficiency < b.min_deficiency;
      return a.index < b.index;
    });
    return ranked;
  }

  /// Looks for a zero-deficiency price with a small denominator in a box
  /// around the cell, scanning denominators in increasing order.
  std::optional<PriceVector> snap(const std::vector<PriceVector>& verts) {
    if (config_.snap_denominator == 0 || eval_.sequential() || rooms_ < 2) return std::nullopt;
    const std::size_t dims = rooms_ - 1;
    std::vector<Rational> lo(dims), hi(dims);
    for (std::size_t j = 0; j < dims; ++j) {
      bool first = true;
      for (const auto& v : verts) {
        Rational y = 0;
        for (std::size_t i = j + 1; i < rooms_; ++i) y += v[i];
        if (first || y < lo[j]) lo[j] = y;
        if (first || y > hi[j]) hi[j] = y;
        first = false;
      }
    }
    Rational width = 0;
    for (std::size_t j = 0; j < dims; ++j) width = std::max(width, hi[j] - lo[j]);
    for (std::size_t j = 0; j < dims; ++j) {
      lo[j] = std::max(Rational(0), lo[j] - width);
      hi[j] = std::min(Rational(1), hi[j] + width);
    }

    std::size_t tried = 0;
    for (std::int64_t q = 1; q <= config_.snap_denominator; ++q) {
      std::vector<std::int64_t> a(dims), b(dims);
      for (std::size_t j = 0; j < dims; ++j) {
        a[j] = ceil_of(lo[j] * q).convert_to<std::int64_t>();
        b[j] = floor_of(hi[j] * q).convert_to<std::int64_t>();
      }
      std::vector<PriceVector> batch;
      std::vector<std::int64_t> y(dims);
      bool overflow = false;
      std::function<void(std::size_t)> recurse = [&](std::size_t j) {
        if (overflow) return;
        if (j == dims) {
          std::vector<std::int64_t> x(rooms_);
          x[0] = q - y[0];
          for (std::size_t k = 1; k < rooms_; ++k) x[k] = y[k - 1] - (k < dims ? y[k] : 0);
          std::int64_t g = q;
          for (auto v : x) g = std::gcd(g, v);
          if (g != 1) return;  // already seen with a smaller denominator
          if (tried + batch.size() >= config_.snap_budget) {
            overflow = true;
            return;
          }
          batch.emplace_back(std::move(x), q);
          return;
        }
        std::int64_t upper = std::min(b[j], j == 0 ? q : y[j - 1]);
        for (std::int64_t v = std::max<std::int64_t>(a[j], 0); v <= upper; ++v) {
          y[j] = v;
          recurse(j + 1);
        }
      };
      recurse(0);
      try {
        eval_.evaluate(batch);
      } catch (const BudgetExhausted&) {
        return std::nullopt;
      }
      tried += batch.size();
      for (const auto& p : batch) {
        if (eval_.at(p).deficiency == 0) return p;
      }
      if (overflow) break;
    }
    return std::nullopt;
  }

  Solution exact(const PriceVector& p) {
    const VertexInfo& info = eval_.at(p);
    DemandGraph g{capacities_, info.demand, p};
    FlowWitness w = feasible_assignment(g);
    Solution s;
    s.status = SolveStatus::exact;
    s.prices = p;
    s.assignment = *w.assignment;
    s.demand = info.demand;
    s.stats = final_stats();
    return s;
  }

  Solution eps(const std::vector<PriceVector>& verts, const Assignment& assignment,
               const Rational& squared_diameter) {
    Solution s;
    s.status = SolveStatus::eps;
    s.prices = mean_of(verts);
    s.assignment = assignment;
    CellCertificate cert;
    cert.vertices = verts;
    cert.squared_diameter = squared_diameter;
    for (std::size_t i = 0; i < assignment.room_of.size(); ++i) {
      std::size_t room = assignment.room_of[i];
      for (std::size_t k = 0; k < verts.size(); ++k) {
        if (eval_.at(verts[k]).demand[i].contains(room)) {
          cert.witness.push_back(k);
          break;
        }
      }
    }
    s.cell = std::move(cert);
    s.stats = final_stats();
    return s;
  }

  Solution finish_failed() {
    if (!best_cell_.empty()) {
      if (auto snapped = snap(best_cell_)) return exact(*snapped);
    }
    return failed();
  }

  Solution failed() {
    Solution s;
    s.status = SolveStatus::failed;
    if (!best_cell_.empty()) {
      s.prices = mean_of(best_cell_);
      CellCertificate cert;
      cert.vertices = best_cell_;
      cert.squared_diameter = max_squared_distance(best_cell_);
      s.cell = std::move(cert);
    } else {
      s.prices = PriceVector::uniform(rooms_);
    }
    s.stats = final_stats();
    return s;
  }

  SolverStats final_stats() {
    stats_.vertices_evaluated = eval_.evaluated();
    stats_.oracle_queries = eval_.evaluated() * oracles_.size();
    return stats_;
  }

  void report_progress(std::size_t level, std::int64_t mesh, std::size_t cells) {
    if (!config_.on_progress) return;
    config_.on_progress(SolverProgress{level, mesh, cells, eval_.evaluated() * oracles_.size()});
  }

  std::span<const PreferenceOracle> oracles_;
  std::vector<int> capacities_;
  const SolverConfig& config_;
  std::size_t rooms_;
  MeshFrame frame_;
  Evaluator eval_;
  SolverStats stats_;
  std::vector<PriceVector> best_cell_;
};

void require_problem(std::span<const PreferenceOracle> oracles, std::span<const int> capacities) {
  if (capacities.empty()) throw InputError("room set must be nonempty");
  std::int64_t total = 0;
  for (int c : capacities) {
    if (c <= 0) throw InputError("capacities must be positive");
    total += c;
  }
  if (total != static_cast<std::int64_t>(oracles.size())) {
    throw InputError("capacities sum to " + std::to_string(total) + " but there are " +
                     std::to_string(oracles.size()) + " agents");
  }
  for (const auto& o : oracles) {
    if (o.rooms() != capacities.size()) throw InputError("oracle room count does not match the problem");
  }
}

}  // namespace

Solution solve_rental(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
                      const SolverConfig& config) {
  config.validate();
  require_problem(oracles, capacities);
  return Search(oracles, capacities, config).run();
}

VerifyReport verify_envy_free(const Solution& solution, std::span<const PreferenceOracle> oracles,
                              std::span<const int> capacities) {
  VerifyReport report;
  if (solution.status != SolveStatus::exact) {
    report.message = "solution is not exact";
    return report;
  }
  if (solution.assignment.room_of.size() != oracles.size() || !solution.assignment.respects(capacities)) {
    report.message = "assignment does not fill every room to capacity";
    return report;
  }
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    if (!oracles[i](solution.prices).contains(solution.assignment.room_of[i])) {
      report.offending_agents.push_back(i);
    }
  }
  report.ok = report.offending_agents.empty();
  if (!report.ok) {
    report.message = "agent '" + oracles[report.offending_agents.front()].agent() +
                     "' does not demand its assigned room";
  }
  return report;
}

VerifyReport check_cell_certificate(const Solution& solution,
                                    std::span<const PreferenceOracle> oracles,
                                    std::span<const int> capacities, const Rational& epsilon) {
  VerifyReport report;
  if (solution.status != SolveStatus::eps || !solution.cell) {
    report.message = "solution carries no cell certificate";
    return report;
  }
  const CellCertificate& cert = *solution.cell;
  if (solution.assignment.room_of.size() != oracles.size() || !solution.assignment.respects(capacities)) {
    report.message = "assignment does not fill every room to capacity";
    return report;
  }
  if (cert.vertices.empty() || cert.witness.size() != oracles.size()) {
    report.message = "certificate lacks a witness per agent";
    return report;
  }
  Rational diam = max_squared_distance(cert.vertices);
  if (diam != cert.squared_diameter) {
    report.message = "reported diameter does not match the cell";
    return report;
  }
  if (diam > epsilon * epsilon) {
    report.message = "cell diameter exceeds epsilon";
    return report;
  }
  if (mean_of(cert.vertices) != solution.prices) {
    report.message = "prices are not the cell barycenter";
    return report;
  }
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    std::size_t k = cert.witness[i];
    if (k >= cert.vertices.size() ||
        !oracles[i](cert.vertices[k]).contains(solution.assignment.room_of[i])) {
      report.offending_agents.push_back(i);
    }
  }
  report.ok = report.offending_agents.empty();
  if (!report.ok) {
    report.message = "witness vertex for agent '" + oracles[report.offending_agents.front()].agent() +
                     "' does not demand the assigned room";
  }
  return report;
}

RoomSet claim2_probe(std::span<const PreferenceOracle> oracles, std::span<const int> capacities,
                     const BalancedFamily& family, const PriceVector& p) {
  if (!family.is_balanced(capacities.size())) throw PropertyViolation("family is not balanced");
  DemandGraph g = build_demand_graph(oracles, capacities, p);
  for (auto t : family.members) {
    if (in_k_t(g, t)) return t;
  }
  throw PropertyViolation("no member of the balanced family is in K_T at p=" + p.to_string());
}

}  // namespace harmony
