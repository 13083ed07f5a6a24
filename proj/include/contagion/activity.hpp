#pragma once

#include <array>
#include <ostream>
#include <span>
#include <vector>

#include "contagion/ingest.hpp"

namespace contagion {

// Per-day action tallies of one central user over the log window.
struct DailyActivity {
  int day = 0;
  std::array<int, kAllActions.size()> counts{};  // indexed by ActionKind

  int count(ActionKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
  int plays() const { return count(ActionKind::Play); }
  // Every non-play action.
  int reactions() const;
  // Plays and reactions within 10% of each other on an active day.
  bool near_contagion() const;
};

// Throws Error(NotFound) when the user never acts in the log.
std::vector<DailyActivity> daily_activity(const EventLog& log, const UserId& central);

// CSV `day,plays,likes,shares,downloads,creates,follows,unfollows,near_contagion`.
void write_activity_csv(std::ostream& out, std::span<const DailyActivity> days);

}  // namespace contagion
