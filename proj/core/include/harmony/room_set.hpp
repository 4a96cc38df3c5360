#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace harmony {

/// Maximum number of rooms; room subsets are 32-bit masks.
inline constexpr std::size_t kMaxRooms = 32;

/// A subset of the room index set {0, ..., |R|-1}. Used both for demand sets
/// L_i(p) and for the room subsets T of Hall-type conditions.
class RoomSet {
 public:
  constexpr RoomSet() = default;
  constexpr explicit RoomSet(std::uint32_t bits) : bits_(bits) {}
  RoomSet(std::initializer_list<std::size_t> rooms) {
    for (auto r : rooms) insert(r);
  }

  static constexpr RoomSet all(std::size_t rooms) {
    return RoomSet(rooms >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << rooms) - 1));
  }
  static constexpr RoomSet single(std::size_t room) { return RoomSet(std::uint32_t{1} << room); }

  constexpr bool contains(std::size_t room) const { return (bits_ >> room) & 1u; }
  constexpr void insert(std::size_t room) { bits_ |= std::uint32_t{1} << room; }
  constexpr void erase(std::size_t room) { bits_ &= ~(std::uint32_t{1} << room); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr std::uint32_t bits() const { return bits_; }

  constexpr bool intersects(RoomSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr bool subset_of(RoomSet other) const { return (bits_ & ~other.bits_) == 0; }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    }
    return out;
  }

  friend constexpr RoomSet operator|(RoomSet a, RoomSet b) { return RoomSet(a.bits_ | b.bits_); }
  friend constexpr RoomSet operator&(RoomSet a, RoomSet b) { return RoomSet(a.bits_ & b.bits_); }
  /// Complement relative to a room count.
  constexpr RoomSet complement(std::size_t rooms) const { return RoomSet(~bits_ & all(rooms).bits_); }
  constexpr RoomSet& operator|=(RoomSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  friend constexpr bool operator==(RoomSet, RoomSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace harmony
