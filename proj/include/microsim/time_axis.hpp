#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "microsim/actor_id.hpp"
#include "microsim/error.hpp"

namespace microsim {

using EventIndex = std::uint32_t;
using NoticeIndex = std::uint32_t;
inline constexpr NoticeIndex kNoNotice = ~NoticeIndex{0};

/// Person-class notices of an hour run before house-class notices.
enum class EventClass : std::uint8_t { person = 0, house = 1 };

enum class EventKind : std::uint8_t { life_of_person, life_of_house, housekeeping };

constexpr EventClass class_of(EventKind k) noexcept {
  return k == EventKind::life_of_person ? EventClass::person : EventClass::house;
}

enum class ExecState : std::uint8_t { idle, runnable, executing, passivated, terminated };

struct EventObject {
  std::uint32_t process_id = 0;
  EventKind kind = EventKind::life_of_person;
  ExecState exec_state = ExecState::idle;
  ActorId subject;
  NoticeIndex notice = kNoNotice;
};

struct EventNotice {
  EventIndex event_index = 0;
  NoticeIndex next_index = kNoNotice;
  Hour scheduled_hour = 0;
  bool active = false;
};

/// Hourly timeline. Each slot holds one singly linked list of notices per
/// event class; notices live in a fixed pool and are recycled LIFO.
///
/// Passivating an event only clears its notice's flag. The stale notice is
/// skipped when its slot is reached, or unlinked early by compact().
class TimeAxis {
 public:
  TimeAxis(Hour horizon, std::size_t event_capacity, std::size_t notice_capacity);

  EventIndex create_event(EventKind kind, ActorId subject);

  /// Throws Error if `hour` is before now or at/after the horizon, or if the
  /// event already has a pending notice.
  NoticeIndex add_event(EventIndex event, Hour hour);
  /// Idempotent. The notice stays linked but will never execute.
  void passivate(EventIndex event);
  /// Marks the event runnable at `hour`, replacing any pending notice.
  void activate(EventIndex event, Hour hour);
  /// Reschedules at now + delay; past the horizon the event terminates.
  void hold(EventIndex event, Hour delay);
  void terminate(EventIndex event);

  /// Executes every active notice with scheduled hour < until_hour, in
  /// (hour, class, insertion) order, calling exec(event_index). Returns the
  /// number of executed events. Stops early when running_limit is reached.
  template <class Exec>
  std::uint64_t run(Hour until_hour, Exec&& exec);

  /// Unlinks all inactive notices at or after now.
  std::size_t compact();

  bool is_scheduled(EventIndex e) const noexcept { return events_[e].notice != kNoNotice; }
  Hour scheduled_hour(EventIndex e) const noexcept;
  const EventObject& event(EventIndex e) const noexcept { return events_[e]; }
  std::size_t event_count() const noexcept { return events_.size(); }

  Hour now() const noexcept { return now_; }
  /// Only allowed while nothing is scheduled before `hour`.
  void set_current(Hour hour);
  Hour horizon() const noexcept { return horizon_; }

  std::size_t notice_capacity() const noexcept { return notices_.size(); }
  std::size_t free_notices() const noexcept { return free_.size(); }
  std::size_t notices_in_use() const noexcept { return notices_.size() - free_.size(); }
  /// Events with a pending active notice, per kind.
  std::size_t scheduled_count(EventKind k) const noexcept {
    return scheduled_[static_cast<int>(k)];
  }

  std::uint64_t cleanup_count() const noexcept { return cleanup_count_; }
  std::uint64_t remove_count() const noexcept { return remove_count_; }
  /// Orphaned notices that trigger compact() once reached (0 disables).
  void set_cleanup_limit(std::size_t limit) noexcept { cleanup_limit_ = limit; }
  /// Maximum events per run() call; 0 means unlimited.
  void set_running_limit(std::uint64_t limit) noexcept { running_limit_ = limit; }

  /// Writes "hour<TAB>class<TAB>subject" for each executed event.
  void set_trace(std::ostream* trace) noexcept { trace_ = trace; }

  std::size_t memory_bytes() const noexcept;

 private:
  struct SlotList {
    NoticeIndex head = kNoNotice;
    NoticeIndex tail = kNoNotice;
  };

  SlotList& list(Hour hour, EventClass c) { return slots_[2 * static_cast<std::size_t>(hour) + static_cast<int>(c)]; }
  NoticeIndex take_notice();
  void recycle(NoticeIndex n);
  void orphan(EventObject& ev);
  bool pop_next(Hour hour, EventClass c, NoticeIndex& out);
  void trace_line(const EventObject& ev);

  Hour horizon_;
  Hour now_ = 0;
  std::vector<SlotList> slots_;
  std::vector<EventNotice> notices_;
  std::vector<NoticeIndex> free_;
  std::vector<EventObject> events_;
  std::size_t scheduled_[3] = {0, 0, 0};
  std::size_t orphans_ = 0;
  std::size_t cleanup_limit_ = 0;
  std::uint64_t running_limit_ = 0;
  std::uint64_t cleanup_count_ = 0;
  std::uint64_t remove_count_ = 0;
  std::ostream* trace_ = nullptr;
};

template <class Exec>
std::uint64_t TimeAxis::run(Hour until_hour, Exec&& exec) {
  std::uint64_t executed = 0;
  const Hour stop = until_hour < horizon_ ? until_hour : horizon_;
  while (now_ < stop) {
    NoticeIndex n;
    // Re-check the person list after every house event so a person notice
    // added mid-slot still runs before the remaining house notices.
    while (pop_next(now_, EventClass::person, n) || pop_next(now_, EventClass::house, n)) {
      const EventNotice notice = notices_[n];
      recycle(n);
      if (!notice.active) {
        ++remove_count_;
        if (orphans_ > 0) --orphans_;
        continue;
      }
      EventObject& ev = events_[notice.event_index];
      ev.notice = kNoNotice;
      ev.exec_state = ExecState::executing;
      --scheduled_[static_cast<int>(ev.kind)];
      if (trace_) trace_line(ev);
      exec(notice.event_index);
      EventObject& after = events_[notice.event_index];
      if (after.exec_state == ExecState::executing) after.exec_state = ExecState::idle;
      ++executed;
      if (running_limit_ != 0 && executed >= running_limit_) return executed;
    }
    ++now_;
  }
  return executed;
}

}  // namespace microsim
