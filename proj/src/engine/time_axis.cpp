#include "microsim/time_axis.hpp"

#include <string>

#include "microsim/disease_profile.hpp"

namespace microsim {

TimeAxis::TimeAxis(Hour horizon, std::size_t event_capacity, std::size_t notice_capacity)
    : horizon_(horizon), slots_(2 * static_cast<std::size_t>(horizon > 0 ? horizon : 0)),
      notices_(notice_capacity) {
  if (horizon <= 0) throw ConfigError("horizon must be positive");
  events_.reserve(event_capacity);
  free_.reserve(notice_capacity);
  for (std::size_t i = notice_capacity; i-- > 0;) free_.push_back(static_cast<NoticeIndex>(i));
}

EventIndex TimeAxis::create_event(EventKind kind, ActorId subject) {
  if (events_.size() == events_.capacity()) {
    throw PoolExhausted("event pool exhausted: capacity " + std::to_string(events_.capacity()) +
                        ", at least " + std::to_string(events_.capacity() + 1) + " required");
  }
  EventObject ev;
  ev.process_id = static_cast<std::uint32_t>(events_.size() + 1);
  ev.kind = kind;
  ev.subject = subject;
  events_.push_back(ev);
  return static_cast<EventIndex>(events_.size() - 1);
}

NoticeIndex TimeAxis::take_notice() {
  if (free_.empty() && orphans_ > 0) compact();
  if (free_.empty()) {
    throw PoolExhausted("event notice pool exhausted: capacity " + std::to_string(notices_.size()) +
                        ", at least " + std::to_string(notices_.size() + 1) + " required");
  }
  const NoticeIndex n = free_.back();
  free_.pop_back();
  return n;
}

void TimeAxis::recycle(NoticeIndex n) {
  notices_[n] = EventNotice{};
  free_.push_back(n);
}

NoticeIndex TimeAxis::add_event(EventIndex event, Hour hour) {
  if (hour < now_) {
    throw Error("cannot schedule at hour " + std::to_string(hour) + " before now (" + std::to_string(now_) + ")");
  }
  if (hour >= horizon_) {
    throw Error("hour " + std::to_string(hour) + " is beyond the horizon " + std::to_string(horizon_));
  }
  EventObject& ev = events_.at(event);
  if (ev.notice != kNoNotice) {
    throw Error("event " + std::to_string(event) + " is already scheduled at hour " +
                std::to_string(notices_[ev.notice].scheduled_hour));
  }
  const NoticeIndex n = take_notice();
  notices_[n] = {event, kNoNotice, hour, true};
  SlotList& l = list(hour, class_of(ev.kind));
  if (l.tail == kNoNotice) {
    l.head = n;
  } else {
    notices_[l.tail].next_index = n;
  }
  l.tail = n;
  ev.notice = n;
  ev.exec_state = ExecState::runnable;
  ++scheduled_[static_cast<int>(ev.kind)];
  if (cleanup_limit_ != 0 && orphans_ >= cleanup_limit_) compact();
  return n;
}

void TimeAxis::orphan(EventObject& ev) {
  if (ev.notice == kNoNotice) return;
  notices_[ev.notice].active = false;
  ev.notice = kNoNotice;
  --scheduled_[static_cast<int>(ev.kind)];
  ++orphans_;
}

void TimeAxis::passivate(EventIndex event) {
  EventObject& ev = events_.at(event);
  orphan(ev);
  if (ev.exec_state != ExecState::terminated) ev.exec_state = ExecState::passivated;
}

void TimeAxis::activate(EventIndex event, Hour hour) {
  EventObject& ev = events_.at(event);
  if (ev.notice != kNoNotice && notices_[ev.notice].scheduled_hour == hour) return;
  orphan(ev);
  add_event(event, hour);
}

void TimeAxis::hold(EventIndex event, Hour delay) {
  EventObject& ev = events_.at(event);
  orphan(ev);
  const Hour at = now_ + delay;
  if (at >= horizon_) {
    ev.exec_state = ExecState::terminated;
    return;
  }
  add_event(event, at);
}

void TimeAxis::terminate(EventIndex event) {
  EventObject& ev = events_.at(event);
  orphan(ev);
  ev.exec_state = ExecState::terminated;
}

Hour TimeAxis::scheduled_hour(EventIndex e) const noexcept {
  const NoticeIndex n = events_[e].notice;
  return n == kNoNotice ? kNever : notices_[n].scheduled_hour;
}

void TimeAxis::set_current(Hour hour) {
  if (hour < now_) throw Error("time axis cannot move backwards");
  if (hour > horizon_) throw Error("time axis cannot move past the horizon");
  for (Hour h = now_; h < hour; ++h) {
    for (EventClass c : {EventClass::person, EventClass::house}) {
      for (NoticeIndex n = list(h, c).head; n != kNoNotice; n = notices_[n].next_index) {
        if (notices_[n].active) throw Error("cannot skip past scheduled events");
      }
    }
  }
  now_ = hour;
}

bool TimeAxis::pop_next(Hour hour, EventClass c, NoticeIndex& out) {
  SlotList& l = list(hour, c);
  if (l.head == kNoNotice) return false;
  out = l.head;
  l.head = notices_[out].next_index;
  if (l.head == kNoNotice) l.tail = kNoNotice;
  return true;
}

std::size_t TimeAxis::compact() {
  std::size_t removed = 0;
  for (Hour h = now_; h < horizon_ && orphans_ > 0; ++h) {
    for (EventClass c : {EventClass::person, EventClass::house}) {
      SlotList& l = list(h, c);
      NoticeIndex prev = kNoNotice;
      NoticeIndex n = l.head;
      while (n != kNoNotice) {
        const NoticeIndex next = notices_[n].next_index;
        if (!notices_[n].active) {
          if (prev == kNoNotice) l.head = next; else notices_[prev].next_index = next;
          if (l.tail == n) l.tail = prev;
          recycle(n);
          ++removed;
          --orphans_;
        } else {
          prev = n;
        }
        n = next;
      }
    }
  }
  remove_count_ += removed;
  ++cleanup_count_;
  return removed;
}

void TimeAxis::trace_line(const EventObject& ev) {
  *trace_ << now_ << '\t' << (class_of(ev.kind) == EventClass::person ? "person" : "house") << '\t'
          << ev.subject.value() << '\n';
}

std::size_t TimeAxis::memory_bytes() const noexcept {
  return slots_.capacity() * sizeof(SlotList) + notices_.capacity() * sizeof(EventNotice) +
         free_.capacity() * sizeof(NoticeIndex) + events_.capacity() * sizeof(EventObject);
}

}  // namespace microsim
