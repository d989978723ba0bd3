#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "microsim/actor_id.hpp"

namespace microsim {

/// Global fixed-capacity store of 20-slot overflow chunks shared by all
/// member lists. Chunks are recycled through a LIFO free list.
class ChunkPool {
 public:
  static constexpr std::size_t kSlots = 20;
  static constexpr std::uint32_t kNone = ~std::uint32_t{0};

  struct Chunk {
    std::array<ActorId, kSlots> slots;
    std::uint32_t next = kNone;
  };

  explicit ChunkPool(std::size_t capacity);

  /// Throws PoolExhausted when every chunk is in use.
  std::uint32_t allocate();
  void release(std::uint32_t chunk);

  Chunk& operator[](std::uint32_t i) noexcept { return chunks_[i]; }
  const Chunk& operator[](std::uint32_t i) const noexcept { return chunks_[i]; }

  std::size_t capacity() const noexcept { return chunks_.size(); }
  std::size_t in_use() const noexcept { return chunks_.size() - free_.size(); }
  std::uint64_t allocations() const noexcept { return allocations_; }
  std::uint64_t releases() const noexcept { return releases_; }
  std::size_t memory_bytes() const noexcept;

 private:
  std::vector<Chunk> chunks_;
  std::vector<std::uint32_t> free_;
  std::uint64_t allocations_ = 0;
  std::uint64_t releases_ = 0;
};

/// Up to four members stored inline, further members in a chain of pooled
/// chunks. Iteration is in insertion order; removal preserves the order of
/// the remaining members.
class MemberList {
 public:
  static constexpr std::size_t kInline = 4;

  /// Chunks needed to hold `count` members.
  static constexpr std::size_t chunks_for(std::size_t count) noexcept {
    return count <= kInline ? 0 : (count - kInline + ChunkPool::kSlots - 1) / ChunkPool::kSlots;
  }

  /// Throws Error if `id` is already a member.
  void add(ActorId id, ChunkPool& pool);
  /// Caller guarantees `id` is not a member (bulk loading).
  void add_unchecked(ActorId id, ChunkPool& pool);
  /// Throws Error if `id` is not a member.
  void remove(ActorId id, ChunkPool& pool);
  void clear(ChunkPool& pool);

  bool contains(ActorId id, const ChunkPool& pool) const;
  std::uint32_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  template <class F>
  void for_each(const ChunkPool& pool, F&& fn) const;

  /// Folds `fn(acc, member)` over the members in insertion order.
  template <class T, class F>
  T scan(const ChunkPool& pool, T init, F&& fn) const {
    for_each(pool, [&](ActorId id) { init = fn(std::move(init), id); });
    return init;
  }

 private:
  ActorId& slot(std::size_t pos, ChunkPool& pool);

  std::array<ActorId, kInline> inline_{};
  std::uint32_t head_ = ChunkPool::kNone;
  std::uint32_t count_ = 0;
};

template <class F>
void MemberList::for_each(const ChunkPool& pool, F&& fn) const {
  const std::uint32_t n_inline = count_ < kInline ? count_ : static_cast<std::uint32_t>(kInline);
  for (std::uint32_t i = 0; i < n_inline; ++i) fn(inline_[i]);
  std::uint32_t remaining = count_ - n_inline;
  for (std::uint32_t c = head_; remaining > 0; c = pool[c].next) {
    const auto& chunk = pool[c];
    const std::uint32_t take =
        remaining < ChunkPool::kSlots ? remaining : static_cast<std::uint32_t>(ChunkPool::kSlots);
    for (std::uint32_t i = 0; i < take; ++i) fn(chunk.slots[i]);
    remaining -= take;
  }
}

}  // namespace microsim
