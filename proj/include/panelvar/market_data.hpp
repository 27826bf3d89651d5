#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "panelvar/csv.hpp"
#include "panelvar/errors.hpp"

namespace panelvar {

struct Tick {
  double second;  // seconds since midnight
  double price;
};

/// Raw ticks keyed by asset, then by trading date. Tick vectors are kept
/// sorted by time of day.
using TickTable = std::map<std::string, std::map<std::string, std::vector<Tick>>>;

struct SessionSpec {
  int start_second = 0;
  int end_second = 0;
  int grid_seconds = 0;
};

/// Parse "HH:MM" or "HH:MM:SS" into seconds since midnight.
inline int parse_clock(const std::string& hhmm) {
  int h = 0, m = 0, s = 0;
  const int n = std::sscanf(hhmm.c_str(), "%d:%d:%d", &h, &m, &s);
  if (n < 2) throw ConfigError("bad clock time '" + hhmm + "'");
  return h * 3600 + m * 60 + s;
}

/// Split an ISO-8601 timestamp into (date, seconds-of-day). Accepts 'T' or
/// space as the separator and an optional fractional second part.
inline std::pair<std::string, double> parse_timestamp(const std::string& ts) {
  const std::size_t sep = ts.find_first_of("T ");
  if (sep == std::string::npos || sep < 10)
    throw Error("bad timestamp '" + ts + "'");
  const std::string date = ts.substr(0, sep);
  int h = 0, m = 0;
  double s = 0.0;
  if (std::sscanf(ts.c_str() + sep + 1, "%d:%d:%lf", &h, &m, &s) != 3)
    throw Error("bad timestamp '" + ts + "'");
  return {date, h * 3600.0 + m * 60.0 + s};
}

/// Synchronized grid of intraday log-prices, identical length per (asset, day).
struct IntradayPanel {
  std::vector<std::string> assets;
  std::vector<std::string> days;
  int grid_seconds = 0;
  int steps = 0;  // N intraday returns; price vectors hold N+1 points
  // log_prices[asset][day], each of length steps + 1
  std::vector<std::vector<Eigen::VectorXd>> log_prices;

  int n_assets() const { return static_cast<int>(assets.size()); }
  int n_days() const { return static_cast<int>(days.size()); }

  Eigen::VectorXd intraday_returns(int asset, int day) const {
    const Eigen::VectorXd& p = log_prices[asset][day];
    return p.tail(steps) - p.head(steps);
  }
};

/// Daily open-to-close log returns, T days by n assets.
struct DailyPanel {
  std::vector<std::string> dates;
  Eigen::MatrixXd returns;
};

/// Previous-tick synchronization onto a fixed session grid. Cells before an
/// asset's first tick of the day are backfilled from that first tick; a day
/// with no ticks at all for some asset is a hard error.
inline IntradayPanel synchronize(const TickTable& ticks, const SessionSpec& session) {
  if (session.grid_seconds <= 0) throw ConfigError("grid_seconds must be positive");
  const int span = session.end_second - session.start_second;
  if (span <= 0 || span % session.grid_seconds != 0)
    throw ConfigError("session length must be a positive multiple of grid_seconds");

  IntradayPanel panel;
  panel.grid_seconds = session.grid_seconds;
  panel.steps = span / session.grid_seconds;

  std::vector<std::string> days;
  for (const auto& [asset, by_day] : ticks) {
    panel.assets.push_back(asset);
    for (const auto& [date, obs] : by_day) days.push_back(date);
  }
  std::sort(days.begin(), days.end());
  days.erase(std::unique(days.begin(), days.end()), days.end());
  panel.days = days;

  panel.log_prices.assign(panel.assets.size(), {});
  for (int a = 0; a < panel.n_assets(); ++a) {
    const auto& by_day = ticks.at(panel.assets[a]);
    panel.log_prices[a].reserve(panel.days.size());
    for (const std::string& date : panel.days) {
      const auto it = by_day.find(date);
      if (it == by_day.end() || it->second.empty())
        throw MissingDay(panel.assets[a], date);
      const std::vector<Tick>& obs = it->second;
      Eigen::VectorXd grid(panel.steps + 1);
      std::size_t cursor = 0;
      double last = obs.front().price;
      for (int k = 0; k <= panel.steps; ++k) {
        const double t = session.start_second + k * double(session.grid_seconds);
        while (cursor < obs.size() && obs[cursor].second <= t) {
          last = obs[cursor].price;
          ++cursor;
        }
        if (last <= 0.0) throw Error("non-positive price for " + panel.assets[a]);
        grid[k] = std::log(last);
      }
      panel.log_prices[a].push_back(std::move(grid));
    }
  }
  return panel;
}

/// Within-session open-to-close log returns per day.
inline DailyPanel daily_returns(const IntradayPanel& panel) {
  if (panel.n_days() == 0 || panel.n_assets() == 0)
    throw Error("empty intraday panel");
  DailyPanel out;
  out.dates = panel.days;
  out.returns.resize(panel.n_days(), panel.n_assets());
  for (int a = 0; a < panel.n_assets(); ++a)
    for (int d = 0; d < panel.n_days(); ++d) {
      const Eigen::VectorXd& p = panel.log_prices[a][d];
      out.returns(d, a) = p[p.size() - 1] - p[0];
    }
  return out;
}

/// Read tick CSV rows `timestamp_iso8601,asset_id,price`. A header row is
/// skipped when its first field is not a timestamp.
inline TickTable read_ticks_csv(const std::string& path) {
  TickTable table;
  CsvReader reader(path);
  std::vector<std::string> fields;
  bool first = true;
  while (reader.next(fields)) {
    if (fields.size() < 3) throw Error("tick row needs 3 fields in " + path);
    if (first) {
      first = false;
      if (fields[0].find(':') == std::string::npos) continue;  // header
    }
    const auto [date, second] = parse_timestamp(fields[0]);
    const double price = csv_num(fields[2]);
    if (price <= 0.0) throw Error("non-positive price in " + path);
    table[fields[1]][date].push_back({second, price});
  }
  for (auto& [asset, by_day] : table)
    for (auto& [date, obs] : by_day)
      std::stable_sort(obs.begin(), obs.end(),
                       [](const Tick& x, const Tick& y) { return x.second < y.second; });
  return table;
}

/// Audit dump: `date,asset,k,log_price`.
inline void write_panel_csv(const IntradayPanel& panel, const std::string& path) {
  CsvWriter w(path);
  w.row({"date", "asset", "k", "log_price"});
  for (int d = 0; d < panel.n_days(); ++d)
    for (int a = 0; a < panel.n_assets(); ++a) {
      const Eigen::VectorXd& p = panel.log_prices[a][d];
      for (int k = 0; k < p.size(); ++k)
        w.row({panel.days[d], panel.assets[a], std::to_string(k), fmt_double(p[k])});
    }
}

}  // namespace panelvar
