#include "microsim/member_list.hpp"

#include <string>

#include "microsim/error.hpp"

namespace microsim {

ChunkPool::ChunkPool(std::size_t capacity) : chunks_(capacity) {
  free_.reserve(capacity);
  for (std::size_t i = capacity; i-- > 0;) free_.push_back(static_cast<std::uint32_t>(i));
}

std::uint32_t ChunkPool::allocate() {
  if (free_.empty()) {
    throw PoolExhausted("member chunk pool exhausted: capacity " +
                        std::to_string(chunks_.size()) + " chunks, at least " +
                        std::to_string(chunks_.size() + 1) + " required");
  }
  const std::uint32_t c = free_.back();
  free_.pop_back();
  chunks_[c].next = kNone;
  ++allocations_;
  return c;
}

void ChunkPool::release(std::uint32_t chunk) {
  chunks_[chunk].next = kNone;
  free_.push_back(chunk);
  ++releases_;
}

std::size_t ChunkPool::memory_bytes() const noexcept {
  return chunks_.capacity() * sizeof(Chunk) + free_.capacity() * sizeof(std::uint32_t);
}

ActorId& MemberList::slot(std::size_t pos, ChunkPool& pool) {
  if (pos < kInline) return inline_[pos];
  pos -= kInline;
  std::uint32_t c = head_;
  while (pos >= ChunkPool::kSlots) {
    c = pool[c].next;
    pos -= ChunkPool::kSlots;
  }
  return pool[c].slots[pos];
}

bool MemberList::contains(ActorId id, const ChunkPool& pool) const {
  bool found = false;
  for_each(pool, [&](ActorId m) { found = found || m == id; });
  return found;
}

void MemberList::add(ActorId id, ChunkPool& pool) {
  if (contains(id, pool)) {
    throw Error("actor " + std::to_string(id.value()) + " is already a member");
  }
  add_unchecked(id, pool);
}

void MemberList::add_unchecked(ActorId id, ChunkPool& pool) {
  const std::size_t pos = count_;
  if (chunks_for(pos + 1) > chunks_for(pos)) {
    const std::uint32_t fresh = pool.allocate();
    if (head_ == ChunkPool::kNone) {
      head_ = fresh;
    } else {
      std::uint32_t tail = head_;
      while (pool[tail].next != ChunkPool::kNone) tail = pool[tail].next;
      pool[tail].next = fresh;
    }
  }
  ++count_;
  slot(pos, pool) = id;
}

void MemberList::remove(ActorId id, ChunkPool& pool) {
  std::size_t pos = 0;
  bool found = false;
  for_each(pool, [&](ActorId m) {
    if (!found && m == id) {
      found = true;
    } else if (!found) {
      ++pos;
    }
  });
  if (!found) {
    throw Error("actor " + std::to_string(id.value()) + " is not a member");
  }

  // Shift the tail left by one, walking the chain once.
  const std::size_t n = count_;
  if (pos < kInline) {
    for (std::size_t i = pos; i + 1 < kInline && i + 1 < n; ++i) inline_[i] = inline_[i + 1];
    if (n > kInline) {
      inline_[kInline - 1] = pool[head_].slots[0];
      pos = kInline;
    }
  }
  if (pos >= kInline) {
    std::size_t rel = pos - kInline;
    std::uint32_t c = head_;
    while (rel >= ChunkPool::kSlots) {
      c = pool[c].next;
      rel -= ChunkPool::kSlots;
    }
    std::size_t remaining = n - 1 - pos;  // elements after pos
    while (remaining > 0) {
      if (rel + 1 < ChunkPool::kSlots) {
        pool[c].slots[rel] = pool[c].slots[rel + 1];
        ++rel;
      } else {
        const std::uint32_t next = pool[c].next;
        pool[c].slots[rel] = pool[next].slots[0];
        c = next;
        rel = 0;
      }
      --remaining;
    }
  }

  --count_;
  if (chunks_for(count_) < chunks_for(n)) {
    // Release the last chunk of the chain.
    if (chunks_for(count_) == 0) {
      pool.release(head_);
      head_ = ChunkPool::kNone;
    } else {
      std::uint32_t prev = head_;
      while (pool[pool[prev].next].next != ChunkPool::kNone) prev = pool[prev].next;
      pool.release(pool[prev].next);
      pool[prev].next = ChunkPool::kNone;
    }
  }
}

void MemberList::clear(ChunkPool& pool) {
  std::uint32_t c = head_;
  while (c != ChunkPool::kNone) {
    const std::uint32_t next = pool[c].next;
    pool.release(c);
    c = next;
  }
  head_ = ChunkPool::kNone;
  count_ = 0;
}

}  // namespace microsim
