#include "harmony/simplex.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace harmony {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

void require_rooms(std::size_t rooms) {
  if (rooms == 0) throw InputError("room set must be nonempty");
  if (rooms > kMaxRooms) throw InputError("at most 32 rooms are supported");
}

/// y_j = sum_{i >= j} x_i for j = 1..d-1.
std::vector<std::int64_t> tail_sums(std::span<const std::int64_t> x) {
  std::vector<std::int64_t> y(x.empty() ? 0 : x.size() - 1);
  std::int64_t acc = 0;
  for (std::size_t j = x.size(); j-- > 1;) {
    acc += x[j];
    y[j - 1] = acc;
  }
  return y;
}

std::vector<std::int64_t> from_tail_sums(std::span<const std::int64_t> y, std::int64_t mesh) {
  std::size_t d = y.size() + 1;
  std::vector<std::int64_t> x(d);
  x[0] = mesh - (y.empty() ? 0 : y[0]);
  for (std::size_t j = 1; j < d; ++j) x[j] = y[j - 1] - (j < y.size() ? y[j] : 0);
  return x;
}

/// Checks scale >= t[s0] >= t[s1] >= ... >= 0 where t = scaled offsets.
template <typename T>
bool ordered_within(std::span<const T> t, std::span<const std::size_t> steps, const T& scale) {
  if (steps.empty()) return true;
  if (t[steps.front()] > scale) return false;
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    if (t[steps[k]] < t[steps[k + 1]]) return false;
  }
  return t[steps.back()] >= T(0);
}

/// Containment of a mesh-(scale*m) integer point, given by tail sums, in a
/// mesh-m cell.
bool contains_scaled(const GridCell& cell, std::span<const std::int64_t> point_tail,
                     std::int64_t scale) {
  auto base_tail = tail_sums(cell.base);
  std::vector<std::int64_t> t(base_tail.size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = point_tail[j] - scale * base_tail[j];
  return ordered_within<std::int64_t>(t, cell.steps, scale);
}

}  // namespace

// ---------------------------------------------------------------------------
// PriceVector

PriceVector::PriceVector(std::vector<std::int64_t> numerators, std::int64_t denominator)
    : numerators_(std::move(numerators)), denominator_(denominator) {
  require_rooms(numerators_.size());
  if (denominator_ <= 0) throw InputError("price denominator must be positive");
  std::int64_t sum = 0;
  for (auto n : numerators_) {
    if (n < 0) throw InputError("prices must be nonnegative");
    if (__builtin_add_overflow(sum, n, &sum)) throw std::overflow_error("price numerator sum overflows");
  }
  if (sum != denominator_) throw InputError("prices must sum to 1");
  std::int64_t g = denominator_;
  for (auto n : numerators_) g = gcd64(g, n);
  if (g > 1) {
    for (auto& n : numerators_) n /= g;
    denominator_ /= g;
  }
}

PriceVector PriceVector::from_rationals(std::span<const Rational> coords) {
  require_rooms(coords.size());
  BigInt common = 1;
  for (const auto& c : coords) {
    BigInt den = denominator_of(c);
    common = boost::multiprecision::lcm(common, den);
  }
  std::vector<std::int64_t> nums;
  nums.reserve(coords.size());
  for (const auto& c : coords) {
    BigInt scaled = numerator_of(c) * (common / denominator_of(c));
    nums.push_back(checked_int64(scaled));
  }
  return PriceVector(std::move(nums), checked_int64(common));
}

PriceVector PriceVector::vertex(std::size_t rooms, std::size_t room) {
  std::vector<std::int64_t> nums(rooms, 0);
  nums.at(room) = 1;
  return PriceVector(std::move(nums), 1);
}

PriceVector PriceVector::uniform(std::size_t rooms) {
  return PriceVector(std::vector<std::int64_t>(rooms, 1), static_cast<std::int64_t>(rooms));
}

Rational PriceVector::operator[](std::size_t room) const {
  return Rational(numerators_[room]) / Rational(denominator_);
}

std::vector<Rational> PriceVector::coords() const {
  std::vector<Rational> out;
  out.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) out.push_back((*this)[r]);
  return out;
}

std::vector<double> PriceVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(size());
  for (auto n : numerators_) out.push_back(static_cast<double>(n) / static_cast<double>(denominator_));
  return out;
}

RoomSet PriceVector::support() const {
  RoomSet s;
  for (std::size_t r = 0; r < size(); ++r) {
    if (numerators_[r] > 0) s.insert(r);
  }
  return s;
}

std::string PriceVector::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t r = 0; r < size(); ++r) {
    if (r) out << ", ";
    out << harmony::to_string((*this)[r]);
  }
  out << ')';
  return out.str();
}

std::size_t PriceVectorHash::operator()(const PriceVector& p) const noexcept {
  std::size_t h = std::hash<std::int64_t>{}(p.denominator());
  for (auto n : p.numerators()) h = h * 1000003u ^ std::hash<std::int64_t>{}(n);
  return h;
}

// ---------------------------------------------------------------------------
// CubePoint

CubePoint::CubePoint(std::vector<Rational> coords) : coords_(std::move(coords)) {
  require_rooms(coords_.size());
  for (const auto& c : coords_) {
    if (c < 0 || c > 1) throw InputError("cube coordinates must lie in [0,1]");
  }
}

bool CubePoint::in_slice() const {
  return std::any_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
}

std::vector<double> CubePoint::to_doubles() const {
  std::vector<double> out;
  for (const auto& c : coords_) out.push_back(to_double(c));
  return out;
}

std::string CubePoint::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t r = 0; r < size(); ++r) {
    if (r) out << ", ";
    out << harmony::to_string(coords_[r]);
  }
  out << ']';
  return out.str();
}

// ---------------------------------------------------------------------------
// Triangulation

std::vector<std::vector<std::int64_t>> GridCell::vertex_numerators() const {
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(rooms());
  std::vector<std::int64_t> x = base;
  out.push_back(x);
  for (auto s : steps) {
    x[s] -= 1;
    x[s + 1] += 1;
    out.push_back(x);
  }
  return out;
}

bool operator<(const GridCell& a, const GridCell& b) {
  if (a.mesh != b.mesh) return a.mesh < b.mesh;
  auto ya = tail_sums(a.base);
  auto yb = tail_sums(b.base);
  if (ya != yb) return ya < yb;
  return a.steps < b.steps;
}

std::int64_t cell_count(std::size_t rooms, std::int64_t mesh) {
  std::int64_t out = 1;
  for (std::size_t i = 1; i < rooms; ++i) {
    if (__builtin_mul_overflow(out, mesh, &out)) throw std::overflow_error("cell count overflows");
  }
  return out;
}

std::int64_t vertex_count(std::size_t rooms, std::int64_t mesh) {
  // C(m + d - 1, d - 1), accumulated so every intermediate is an integer.
  __int128 out = 1;
  for (std::size_t k = 1; k < rooms; ++k) {
    out = out * (mesh + static_cast<std::int64_t>(k)) / static_cast<std::int64_t>(k);
  }
  return static_cast<std::int64_t>(out);
}

bool is_valid_cell(const GridCell& cell) {
  std::size_t d = cell.rooms();
  if (d == 0 || cell.mesh < 1 || cell.steps.size() + 1 != d) return false;
  std::int64_t sum = 0;
  for (auto x : cell.base) {
    if (x < 0) return false;
    sum += x;
  }
  if (sum != cell.mesh) return false;
  std::vector<bool> seen(cell.steps.size(), false);
  std::vector<std::int64_t> x = cell.base;
  for (auto s : cell.steps) {
    if (s >= seen.size() || seen[s]) return false;
    seen[s] = true;
    if (x[s] < 1) return false;
    x[s] -= 1;
    x[s + 1] += 1;
  }
  return true;
}

void for_each_cell(std::size_t rooms, std::int64_t mesh,
                   const std::function<void(const GridCell&)>& visit) {
  require_rooms(rooms);
  if (mesh < 1) throw InputError("mesh denominator must be >= 1");
  std::size_t dims = rooms - 1;
  if (dims == 0) {
    visit(GridCell{mesh, {mesh}, {}});
    return;
  }
  std::vector<std::int64_t> y(dims, 0);
  std::vector<std::size_t> identity(dims);
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  // Lexicographic walk over m-1 >= y_1 >= ... >= y_dims >= 0.
  std::function<void(std::size_t)> recurse = [&](std::size_t j) {
    if (j == dims) {
      GridCell cell{mesh, from_tail_sums(y, mesh), identity};
      do {
        if (is_valid_cell(cell)) visit(cell);
      } while (std::next_permutation(cell.steps.begin(), cell.steps.end()));
      return;
    }
    std::int64_t upper = j == 0 ? mesh - 1 : y[j - 1];
    for (std::int64_t v = 0; v <= upper; ++v) {
      y[j] = v;
      recurse(j + 1);
    }
  };
  recurse(0);
}

std::vector<GridCell> triangulate(std::size_t rooms, std::int64_t mesh) {
  std::vector<GridCell> cells;
  for_each_cell(rooms, mesh, [&](const GridCell& c) { cells.push_back(c); });
  return cells;
}

std::vector<PriceVector> cell_vertices(const GridCell& cell) { return MeshFrame{}.vertices(cell); }

PriceVector barycenter(const GridCell& cell) { return MeshFrame{}.barycenter(cell); }

Rational squared_diameter(const GridCell& cell) { return MeshFrame{}.squared_diameter(cell); }

bool cell_contains(const GridCell& cell, const PriceVector& point) {
  if (point.size() != cell.rooms()) throw InputError("dimension mismatch");
  std::size_t dims = cell.rooms() - 1;
  if (dims == 0) return true;
  // Scale everything by the point's denominator D: t_j = m * S_j - D * b_j.
  std::vector<__int128> t(dims);
  auto base_tail = tail_sums(cell.base);
  __int128 acc = 0;
  for (std::size_t j = cell.rooms(); j-- > 1;) {
    acc += point.numerator(j);
    t[j - 1] = static_cast<__int128>(cell.mesh) * acc -
               static_cast<__int128>(point.denominator()) * base_tail[j - 1];
  }
  return ordered_within<__int128>(t, cell.steps, static_cast<__int128>(point.denominator()));
}

std::vector<GridCell> locate(std::size_t rooms, std::int64_t mesh, const PriceVector& point) {
  require_rooms(rooms);
  if (point.size() != rooms) throw InputError("dimension mismatch");
  std::size_t dims = rooms - 1;
  if (dims == 0) return {GridCell{mesh, {mesh}, {}}};

  // Candidate base tail sums: floor(y_j), and floor(y_j) - 1 when y_j is integral.
  std::vector<std::vector<std::int64_t>> options(dims);
  __int128 acc = 0;
  for (std::size_t j = rooms; j-- > 1;) {
    acc += point.numerator(j);
    __int128 scaled = static_cast<__int128>(mesh) * acc;
    auto fl = static_cast<std::int64_t>(scaled / point.denominator());
    options[j - 1].push_back(std::min(fl, mesh - 1));
    if (scaled % point.denominator() == 0 && fl >= 1) options[j - 1].push_back(fl - 1);
  }

  std::vector<GridCell> found;
  std::vector<std::int64_t> y(dims);
  std::vector<std::size_t> identity(dims);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::function<void(std::size_t)> recurse = [&](std::size_t j) {
    if (j == dims) {
      for (std::size_t k = 0; k + 1 < dims; ++k) {
        if (y[k] < y[k + 1]) return;
      }
      if (y[0] > mesh - 1 || y[dims - 1] < 0) return;
      GridCell cell{mesh, from_tail_sums(y, mesh), identity};
      do {
        if (is_valid_cell(cell) && cell_contains(cell, point)) found.push_back(cell);
      } while (std::next_permutation(cell.steps.begin(), cell.steps.end()));
      return;
    }
    for (auto v : options[j]) {
      y[j] = v;
      recurse(j + 1);
    }
  };
  recurse(0);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

std::vector<GridCell> refine(const GridCell& cell) {
  std::size_t dims = cell.rooms() - 1;
  std::int64_t fine_mesh = cell.mesh * 2;
  if (dims == 0) return {GridCell{fine_mesh, {fine_mesh}, {}}};
  auto base_tail = tail_sums(cell.base);
  std::vector<GridCell> out;
  std::vector<std::size_t> identity(dims);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  for (std::uint32_t corner = 0; corner < (1u << dims); ++corner) {
    std::vector<std::int64_t> y(dims);
    for (std::size_t j = 0; j < dims; ++j) y[j] = 2 * base_tail[j] + ((corner >> j) & 1u);
    bool monotone = y[0] <= fine_mesh - 1;
    for (std::size_t j = 0; j + 1 < dims; ++j) monotone = monotone && y[j] >= y[j + 1];
    if (!monotone) continue;
    GridCell fine{fine_mesh, from_tail_sums(y, fine_mesh), identity};
    do {
      if (!is_valid_cell(fine)) continue;
      bool inside = true;
      for (const auto& v : fine.vertex_numerators()) {
        if (!contains_scaled(cell, tail_sums(v), 2)) {
          inside = false;
          break;
        }
      }
      if (inside) out.push_back(fine);
    } while (std::next_permutation(fine.steps.begin(), fine.steps.end()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// MeshFrame

MeshFrame::MeshFrame(std::vector<std::int64_t> weights) : weights_(std::move(weights)) {
  for (auto w : weights_) {
    if (w <= 0 || w > (std::int64_t{1} << 20)) throw InputError("mesh weights must lie in [1, 2^20]");
  }
}

MeshFrame MeshFrame::seeded_offset(std::size_t rooms, std::uint64_t seed) {
  require_rooms(rooms);
  std::mt19937_64 engine(seed);
  std::vector<std::int64_t> weights(rooms);
  for (auto& w : weights) w = 32 + static_cast<std::int64_t>(engine() % 33);
  return MeshFrame(std::move(weights));
}

PriceVector MeshFrame::point(std::span<const std::int64_t> numerators, std::int64_t mesh) const {
  if (weights_.empty()) return PriceVector({numerators.begin(), numerators.end()}, mesh);
  if (weights_.size() != numerators.size()) throw InputError("mesh frame dimension mismatch");
  std::vector<std::int64_t> scaled(numerators.size());
  std::int64_t total = 0;
  for (std::size_t r = 0; r < numerators.size(); ++r) {
    if (__builtin_mul_overflow(numerators[r], weights_[r], &scaled[r]) ||
        __builtin_add_overflow(total, scaled[r], &total)) {
      throw std::overflow_error("mesh too fine for the offset frame");
    }
  }
  return PriceVector(std::move(scaled), total);
}

std::vector<PriceVector> MeshFrame::vertices(const GridCell& cell) const {
  std::vector<PriceVector> out;
  for (const auto& v : cell.vertex_numerators()) out.push_back(point(v, cell.mesh));
  return out;
}

PriceVector MeshFrame::barycenter(const GridCell& cell) const {
  std::size_t d = cell.rooms();
  std::vector<Rational> coords(d, Rational(0));
  auto verts = vertices(cell);
  for (const auto& v : verts) {
    for (std::size_t r = 0; r < d; ++r) coords[r] += v[r];
  }
  for (auto& c : coords) c /= static_cast<long>(verts.size());
  return PriceVector::from_rationals(coords);
}

Rational MeshFrame::squared_diameter(const GridCell& cell) const {
  if (!weights_.empty()) {
    auto verts = vertices(cell);
    Rational best = 0;
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) {
        Rational s = 0;
        for (std::size_t r = 0; r < verts[a].size(); ++r) {
          Rational diff = verts[a][r] - verts[b][r];
          s += diff * diff;
        }
        best = std::max(best, s);
      }
    }
    return best;
  }
  auto verts = cell.vertex_numerators();
  std::int64_t best = 0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      std::int64_t s = 0;
      for (std::size_t r = 0; r < verts[a].size(); ++r) {
        std::int64_t diff = verts[a][r] - verts[b][r];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  }
  return Rational(best, cell.mesh * cell.mesh);
}

// ---------------------------------------------------------------------------
// Balanced families

bool BalancedFamily::is_balanced(std::size_t rooms) const {
  if (members.size() != weights.size()) return false;
  for (const auto& w : weights) {
    if (w < 0) return false;
  }
  for (std::size_t r = 0; r < rooms; ++r) {
    Rational total = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (members[k].contains(r)) total += weights[k];
    }
    if (total != 1) return false;
  }
  for (const auto& t : members) {
    if (!t.subset_of(RoomSet::all(rooms))) return false;
  }
  return true;
}

std::vector<BalancedFamily> canonical_balanced_families(std::size_t rooms) {
  require_rooms(rooms);
  std::vector<BalancedFamily> out;

  // Partitions via restricted growth strings, in lexicographic order.
  std::vector<std::size_t> block(rooms, 0);
  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t i, std::size_t blocks) {
    if (i == rooms) {
      BalancedFamily family;
      family.members.assign(blocks, RoomSet{});
      for (std::size_t r = 0; r < rooms; ++r) family.members[block[r]].insert(r);
      family.weights.assign(blocks, Rational(1));
      out.push_back(std::move(family));
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      block[i] = b;
      recurse(i + 1, std::max(blocks, b + 1));
    }
  };
  block[0] = 0;
  recurse(1, 1);

  // Uniform k-subset families.
  auto binom = [](std::int64_t n, std::int64_t k) {
    std::int64_t out = 1;
    for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
  };
  for (std::size_t k = 1; k <= rooms; ++k) {
    BalancedFamily family;
    Rational weight(1, binom(static_cast<std::int64_t>(rooms) - 1, static_cast<std::int64_t>(k) - 1));
    for (std::uint32_t mask = 1; mask < (std::uint64_t{1} << rooms); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) == k) {
        family.members.emplace_back(mask);
        family.weights.push_back(weight);
      }
    }
    out.push_back(std::move(family));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cake embedding

PriceVector cake_embed(const PriceVector& p) {
  std::size_t d = p.size();
  if (d < 2) throw DomainError("cake embedding needs at least two rooms");
  std::int64_t den = p.denominator();
  std::vector<std::int64_t> nums;
  for (std::size_t s = 0; s < d; ++s) nums.push_back(den - p.numerator(s));
  std::int64_t out_den = 0;
  if (__builtin_mul_overflow(den, static_cast<std::int64_t>(d - 1), &out_den)) {
    throw std::overflow_error("cake embedding denominator overflows");
  }
  return PriceVector(std::move(nums), out_den);
}

std::optional<PriceVector> cake_unembed(const PriceVector& q) {
  std::size_t d = q.size();
  if (d < 2) throw DomainError("cake embedding needs at least two rooms");
  std::int64_t den = q.denominator();
  auto k = static_cast<std::int64_t>(d - 1);
  std::vector<std::int64_t> nums;
  for (std::size_t s = 0; s < d; ++s) {
    std::int64_t n = den - k * q.numerator(s);
    if (n < 0) return std::nullopt;
    nums.push_back(n);
  }
  return PriceVector(std::move(nums), den);
}

ImageRegion classify_cake_image(const PriceVector& q) {
  std::size_t d = q.size();
  if (d < 2) throw DomainError("cake embedding needs at least two rooms");
  auto k = static_cast<__int128>(d - 1);
  bool boundary = false;
  for (std::size_t s = 0; s < d; ++s) {
    __int128 lhs = k * q.numerator(s);
    if (lhs > q.denominator()) return ImageRegion::outside;
    if (lhs == q.denominator()) boundary = true;
  }
  return boundary ? ImageRegion::boundary : ImageRegion::interior;
}

// ---------------------------------------------------------------------------
// Cube <-> simplex

PriceVector cube_to_simplex(const CubePoint& p) {
  if (!p.in_slice()) throw DomainError("cube point is not in B(R): no coordinate is 0");
  Rational total = 0;
  for (const auto& c : p.coords()) total += 1 - c;
  std::vector<Rational> q;
  for (const auto& c : p.coords()) q.push_back((1 - c) / total);
  return PriceVector::from_rationals(q);
}

CubePoint simplex_to_cube(const PriceVector& q) {
  std::int64_t max_num = *std::max_element(q.numerators().begin(), q.numerators().end());
  std::vector<Rational> p;
  for (auto n : q.numerators()) p.push_back(1 - Rational(n, max_num));
  return CubePoint(std::move(p));
}

std::vector<double> cube_to_simplex(std::span<const double> p) {
  if (p.empty()) throw InputError("room set must be nonempty");
  if (*std::min_element(p.begin(), p.end()) != 0.0) {
    throw DomainError("cube point is not in B(R): no coordinate is 0");
  }
  double total = 0;
  for (double c : p) total += 1 - c;
  std::vector<double> q;
  for (double c : p) q.push_back((1 - c) / total);
  return q;
}

std::vector<double> simplex_to_cube(std::span<const double> q) {
  if (q.empty()) throw InputError("room set must be nonempty");
  double mx = *std::max_element(q.begin(), q.end());
  if (!(mx > 0)) throw DomainError("simplex point has no positive coordinate");
  std::vector<double> p;
  for (double c : q) p.push_back(1 - c / mx);
  return p;
}

}  // namespace harmony
