#include "microsim/actor_id.hpp"

#include <array>
#include <string>

#include "microsim/error.hpp"

namespace microsim {

namespace {

struct KindEntry {
  ActorKind kind;
  std::string_view name;
};

constexpr std::array<KindEntry, 8> kKinds{{
    {ActorKind::person, "person"},
    {ActorKind::home, "home"},
    {ActorKind::workplace, "workplace"},
    {ActorKind::daycare, "daycare"},
    {ActorKind::school, "school"},
    {ActorKind::college, "college"},
    {ActorKind::er, "er"},
    {ActorKind::did, "did"},
}};

}  // namespace

bool is_valid_kind_tag(std::uint8_t tag) noexcept {
  for (const auto& k : kKinds) {
    if (static_cast<std::uint8_t>(k.kind) == tag) return true;
  }
  return false;
}

std::string_view kind_name(ActorKind kind) noexcept {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ActorKind kind_from_name(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw Error("unknown actor kind name '" + std::string(name) + "'");
}

ActorId ActorId::encode(ActorKind kind, std::uint64_t index) {
  if (index > kIndexMask) {
    throw Error("actor pool index " + std::to_string(index) + " does not fit in 60 bits");
  }
  return ActorId{(static_cast<std::uint64_t>(kind) << kKindShift) | index};
}

DecodedActor decode_actor_id(ActorId id) {
  if (!is_valid_kind_tag(id.tag())) {
    throw Error("unknown actor kind tag " + std::to_string(id.tag()));
  }
  return {id.kind(), id.index()};
}

}  // namespace microsim
