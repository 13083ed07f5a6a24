#include "contagion/activity.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/error.hpp"

namespace contagion {

int DailyActivity::reactions() const {
  int total = 0;
  for (ActionKind kind : kAllActions)
    if (kind != ActionKind::Play) total += count(kind);
  return total;
}

bool DailyActivity::near_contagion() const {
  const int in = plays();
  if (in == 0) return false;
  return std::abs(in - reactions()) / static_cast<double>(std::max(in, 1)) < 0.1;
}

std::vector<DailyActivity> daily_activity(const EventLog& log, const UserId& central) {
  std::vector<DailyActivity> days(static_cast<std::size_t>(log.window.days));
  for (int d = 0; d < log.window.days; ++d) days[static_cast<std::size_t>(d)].day = log.window.start_day + d;
  bool seen = false;
  for (const auto& ev : log.events) {
    if (ev.actor != central) continue;
    seen = true;
    auto& row = days[static_cast<std::size_t>(log.window.offset(ev.event_day))];
    ++row.counts[static_cast<std::size_t>(ev.action)];
  }
  if (!seen) throw Error(ErrorKind::NotFound, "central user '" + central + "' not found in event log");
  return days;
}

void write_activity_csv(std::ostream& out, std::span<const DailyActivity> days) {
  out << "day,plays,likes,shares,downloads,creates,follows,unfollows,near_contagion\n";
  for (const auto& d : days) {
    out << d.day << ',' << d.plays() << ',' << d.count(ActionKind::Like) << ','
        << d.count(ActionKind::Share) << ',' << d.count(ActionKind::Download) << ','
        << d.count(ActionKind::Create) << ',' << d.count(ActionKind::Follow) << ','
        << d.count(ActionKind::Unfollow) << ',' << (d.near_contagion() ? 1 : 0) << '\n';
  }
}

}  // namespace contagion
