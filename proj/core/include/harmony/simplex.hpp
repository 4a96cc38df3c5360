#pragma once

// Exact-rational geometry of the price simplex Delta(R): price vectors, the
// Freudenthal/Kuhn mesh, balanced families of room subsets, and the two maps
// used by the cake and exchange reductions.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmony/rational.hpp"
#include "harmony/room_set.hpp"

namespace harmony {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A point of Delta(R) stored as nonnegative integer numerators over one
/// common positive denominator, always in lowest terms.
class PriceVector {
 public:
  PriceVector() = default;
  /// Throws InputError unless numerators are >= 0 and sum to the denominator.
  PriceVector(std::vector<std::int64_t> numerators, std::int64_t denominator);

  static PriceVector from_rationals(std::span<const Rational> coords);
  static PriceVector vertex(std::size_t rooms, std::size_t room);
  static PriceVector uniform(std::size_t rooms);

  std::size_t size() const { return numerators_.size(); }
  std::int64_t numerator(std::size_t room) const { return numerators_[room]; }
  std::int64_t denominator() const { return denominator_; }
  const std::vector<std::int64_t>& numerators() const { return numerators_; }

  Rational operator[](std::size_t room) const;
  std::vector<Rational> coords() const;
  std::vector<double> to_doubles() const;

  /// supp(p), decided exactly.
  RoomSet support() const;
  /// supp(p)^c.
  RoomSet free_rooms() const { return support().complement(size()); }

  std::string to_string() const;

  friend bool operator==(const PriceVector&, const PriceVector&) = default;

 private:
  std::vector<std::int64_t> numerators_;
  std::int64_t denominator_ = 1;
};

struct PriceVectorHash {
  std::size_t operator()(const PriceVector& p) const noexcept;
};

/// A point of the cube [0,1]^R (exchange variant).
class CubePoint {
 public:
  CubePoint() = default;
  explicit CubePoint(std::vector<Rational> coords);

  std::size_t size() const { return coords_.size(); }
  const Rational& operator[](std::size_t room) const { return coords_[room]; }
  const std::vector<Rational>& coords() const { return coords_; }
  /// Membership in the slice B(R): some coordinate is exactly zero.
  bool in_slice() const;
  std::vector<double> to_doubles() const;
  std::string to_string() const;

  friend bool operator==(const CubePoint&, const CubePoint&) = default;

 private:
  std::vector<Rational> coords_;
};

// ---------------------------------------------------------------------------
// Mesh-m Freudenthal/Kuhn triangulation.
//
// Grid points are integer vectors x with sum m. A cell is a base point plus an
// ordering of the |R|-1 unit steps; step s moves one unit from coordinate s to
// coordinate s+1. The k-th vertex is the base after the first k steps.

struct GridCell {
  std::int64_t mesh = 1;
  std::vector<std::int64_t> base;
  std::vector<std::size_t> steps;

  std::size_t rooms() const { return base.size(); }

  /// Integer coordinates (sum == mesh) of every vertex, in step order.
  std::vector<std::vector<std::int64_t>> vertex_numerators() const;

  /// Canonical ordering: cumulative tail sums of the base, then steps.
  friend bool operator<(const GridCell& a, const GridCell& b);
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Number of cells of the mesh-m triangulation: m^(|R|-1).
std::int64_t cell_count(std::size_t rooms, std::int64_t mesh);

/// Number of grid points: C(m+|R|-1, |R|-1).
std::int64_t vertex_count(std::size_t rooms, std::int64_t mesh);

bool is_valid_cell(const GridCell& cell);

/// Visits every cell exactly once in canonical order.
void for_each_cell(std::size_t rooms, std::int64_t mesh,
                   const std::function<void(const GridCell&)>& visit);

std::vector<GridCell> triangulate(std::size_t rooms, std::int64_t mesh);

std::vector<PriceVector> cell_vertices(const GridCell& cell);

PriceVector barycenter(const GridCell& cell);

/// Exact squared Euclidean diameter (max over vertex pairs).
Rational squared_diameter(const GridCell& cell);

/// Closed-hull containment test.
bool cell_contains(const GridCell& cell, const PriceVector& point);

/// All cells of the mesh whose closed hull contains the point. Nonempty for
/// every point of the simplex; more than one cell means a shared face.
std::vector<GridCell> locate(std::size_t rooms, std::int64_t mesh, const PriceVector& point);

/// The 2^(|R|-1) cells of mesh 2m that tile the given cell, canonical order.
std::vector<GridCell> refine(const GridCell& cell);

/// Maps grid coordinates to prices. Without an offset this is x/m; with one,
/// each coordinate is reweighted, p[r] = w[r] x[r] / sum_s w[s] x[s]. The
/// reweighting is a projective bijection of the simplex that fixes every face,
/// so free rooms stay free and cells still tile, while grid points move off
/// degenerate alignments.
class MeshFrame {
 public:
  MeshFrame() = default;
  explicit MeshFrame(std::vector<std::int64_t> weights);

  /// Seeded weights drawn uniformly from [32, 64].
  static MeshFrame seeded_offset(std::size_t rooms, std::uint64_t seed);

  PriceVector point(std::span<const std::int64_t> numerators, std::int64_t mesh) const;
  std::vector<PriceVector> vertices(const GridCell& cell) const;
  PriceVector barycenter(const GridCell& cell) const;
  Rational squared_diameter(const GridCell& cell) const;
  bool has_offset() const { return !weights_.empty(); }

 private:
  std::vector<std::int64_t> weights_;
};

// ---------------------------------------------------------------------------
// Balanced families.

struct BalancedFamily {
  std::vector<RoomSet> members;
  std::vector<Rational> weights;

  /// Sum of weights times indicator vectors equals the all-ones vector exactly.
  bool is_balanced(std::size_t rooms) const;
};

/// Every partition of R (weights 1) followed by, for k = 1..|R|, the family of
/// all k-subsets with uniform weight 1/C(|R|-1, k-1).
std::vector<BalancedFamily> canonical_balanced_families(std::size_t rooms);

// ---------------------------------------------------------------------------
// Cake reduction: the affine embedding sending each vertex v_r to the
// barycenter of the opposite face, phi(p)[s] = (1 - p[s]) / (|R| - 1).

enum class ImageRegion { interior, boundary, outside };

PriceVector cake_embed(const PriceVector& p);
/// Inverse of cake_embed, or nullopt when q is not in the image.
std::optional<PriceVector> cake_unembed(const PriceVector& q);
ImageRegion classify_cake_image(const PriceVector& q);

// ---------------------------------------------------------------------------
// Exchange reduction: psi maps the slice B(R) = {p in [0,1]^R : min p = 0}
// onto Delta(R), psi(p)[r] = (1 - p[r]) / sum_s (1 - p[s]), with inverse
// p[r] = 1 - q[r] / max_s q[s]. psi(p)[r] = 0 exactly when p[r] = 1.

/// Throws DomainError when the point is not in B(R).
PriceVector cube_to_simplex(const CubePoint& p);
CubePoint simplex_to_cube(const PriceVector& q);

std::vector<double> cube_to_simplex(std::span<const double> p);
std::vector<double> simplex_to_cube(std::span<const double> q);

}  // namespace harmony
