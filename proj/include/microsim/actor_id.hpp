#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

namespace microsim {

/// Entity kind stored in the top four bits of an ActorId.
///
/// Tags are grouped so classification is a single mask-and-compare:
/// school-like kinds share the bit pattern 01xx and care units share 1xxx.
enum class ActorKind : std::uint8_t {
  person = 0x0,
  home = 0x1,
  workplace = 0x2,
  daycare = 0x4,
  school = 0x5,
  college = 0x6,
  er = 0x8,
  did = 0x9,
};

std::string_view kind_name(ActorKind kind) noexcept;
/// Inverse of kind_name; throws Error for unknown names.
ActorKind kind_from_name(std::string_view name);

class ActorId {
 public:
  static constexpr int kKindShift = 60;
  static constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << kKindShift) - 1;
  static constexpr std::uint64_t kNoneValue = ~std::uint64_t{0};

  constexpr ActorId() noexcept = default;
  constexpr explicit ActorId(std::uint64_t raw) noexcept : value_(raw) {}

  /// Throws Error if `index` does not fit in 60 bits.
  static ActorId encode(ActorKind kind, std::uint64_t index);
  static constexpr ActorId none() noexcept { return ActorId{}; }

  constexpr std::uint64_t value() const noexcept { return value_; }
  constexpr bool is_none() const noexcept { return value_ == kNoneValue; }
  constexpr std::uint64_t index() const noexcept { return value_ & kIndexMask; }
  constexpr std::uint8_t tag() const noexcept {
    return static_cast<std::uint8_t>(value_ >> kKindShift);
  }
  /// Unchecked; only meaningful for ids produced by encode().
  constexpr ActorKind kind() const noexcept { return static_cast<ActorKind>(tag()); }

  constexpr bool is_person() const noexcept { return (value_ >> kKindShift) == 0; }
  constexpr bool is_home() const noexcept {
    return (value_ & ~kIndexMask) == (std::uint64_t{0x1} << kKindShift);
  }
  constexpr bool is_workplace() const noexcept {
    return (value_ & ~kIndexMask) == (std::uint64_t{0x2} << kKindShift);
  }
  constexpr bool is_school_like() const noexcept {
    return (value_ & (std::uint64_t{0xC} << kKindShift)) == (std::uint64_t{0x4} << kKindShift);
  }
  constexpr bool is_care_unit() const noexcept {
    return !is_none() &&
           (value_ & (std::uint64_t{0x8} << kKindShift)) == (std::uint64_t{0x8} << kKindShift);
  }

  friend constexpr bool operator==(ActorId, ActorId) noexcept = default;
  friend constexpr auto operator<=>(ActorId, ActorId) noexcept = default;

 private:
  std::uint64_t value_ = kNoneValue;
};

struct DecodedActor {
  ActorKind kind;
  std::uint64_t index;
};

/// Throws Error when the tag is not one of the defined kinds.
DecodedActor decode_actor_id(ActorId id);

inline ActorId person_id(std::uint64_t index) { return ActorId::encode(ActorKind::person, index); }

bool is_valid_kind_tag(std::uint8_t tag) noexcept;

}  // namespace microsim

template <>
struct std::hash<microsim::ActorId> {
  std::size_t operator()(microsim::ActorId id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value());
  }
};
