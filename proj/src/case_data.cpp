#include "epiflow/case_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "epiflow/dates.hpp"

namespace epiflow {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto a = f.find_first_not_of(" \t");
    const auto b = f.find_last_not_of(" \t");
    f = (a == std::string::npos) ? std::string() : f.substr(a, b - a + 1);
  }
  return fields;
}

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

double parse_count(const std::string& text, const std::string& column, int row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v)) {
    fail("row " + std::to_string(row) + ": column '" + column +
         "' has non-numeric value '" + text + "'");
  }
  if (v < 0.0) {
    fail("row " + std::to_string(row) + ": negative count " + text +
         " in column '" + column + "'");
  }
  if (v != std::floor(v)) {
    fail("row " + std::to_string(row) + ": column '" + column +
         "' has non-integer count '" + text + "'");
  }
  return v;
}

}  // namespace

CaseDataset load_cases(const std::string& path, const CaseSchema& schema) {
  std::ifstream in(path);
  if (!in) fail("cannot open case file: " + path);

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line[0] != '#') break;
    line.clear();
  }
  if (line.empty()) fail(path + ": no header row");

  const std::vector<std::string> header = split_csv_line(line);
  auto find_col = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };

  const int date_col = find_col(schema.date_column);
  if (date_col < 0) fail(path + ": missing date column '" + schema.date_column + "'");

  std::vector<std::string> channels;
  std::vector<int> cols;
  const std::pair<std::string, std::string> wanted[] = {
      {"new_infected", schema.infected_column},
      {"new_recovered", schema.recovered_column},
      {"new_dead", schema.dead_column},
  };
  for (const auto& [channel, column] : wanted) {
    if (column.empty()) continue;
    const int c = find_col(column);
    if (c >= 0) {
      channels.push_back(channel);
      cols.push_back(c);
    } else if (channel == "new_infected") {
      fail(path + ": missing case column '" + column + "'");
    }
  }
  if (channels.empty()) fail(path + ": no case columns found");

  // day -> (row number, counts per channel)
  std::map<std::int64_t, std::vector<double>> by_day;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      fail("row " + std::to_string(row) + ": expected " +
           std::to_string(header.size()) + " fields, got " +
           std::to_string(fields.size()));
    }
    std::int64_t day = 0;
    try {
      day = parse_iso_date(fields[date_col]);
    } catch (const std::exception& e) {
      fail("row " + std::to_string(row) + ": " + e.what());
    }
    if (by_day.count(day)) {
      fail("duplicate date " + day_to_iso(day) + " at row " + std::to_string(row));
    }
    std::vector<double> counts(channels.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      counts[i] = parse_count(fields[cols[i]], header[cols[i]], row);
    }
    by_day.emplace(day, std::move(counts));
  }
  if (by_day.empty()) fail(path + ": no data rows");

  // Contiguity: every day between first and last must be present.
  std::vector<std::string> missing;
  std::int64_t expect = by_day.begin()->first;
  for (const auto& [day, counts] : by_day) {
    for (; expect < day; ++expect) missing.push_back(day_to_iso(expect));
    ++expect;
  }
  if (!missing.empty()) {
    std::string list = missing.front();
    for (std::size_t i = 1; i < missing.size(); ++i) list += ", " + missing[i];
    fail(path + ": gap in dates, missing " + std::to_string(missing.size()) +
         " day(s): " + list);
  }

  CaseDataset ds;
  ds.region = schema.region;
  ds.population = schema.population;
  ds.series.channels = channels;
  ds.series.start_day = by_day.begin()->first;
  ds.series.values.reserve(by_day.size() * channels.size());
  for (const auto& [day, counts] : by_day) {
    for (double v : counts) ds.series.values.push_back(v);
  }

  if (schema.cumulative) {
    const int t = ds.series.rows();
    const int c = ds.series.cols();
    for (int ch = 0; ch < c; ++ch) {
      for (int k = t - 1; k >= 1; --k) {
        const double inc = ds.series.at(k, ch) - ds.series.at(k - 1, ch);
        if (inc < 0.0) {
          fail("cumulative column '" + channels[ch] + "' decreases on " +
               day_to_iso(ds.series.start_day + k));
        }
        ds.series.at(k, ch) = inc;
      }
    }
  }
  return ds;
}

std::pair<CaseDataset, CaseDataset> split_train_holdout(const CaseDataset& ds,
                                                        int holdout_days) {
  const int t = ds.series.rows();
  if (holdout_days < 0) fail("holdout_days must be non-negative");
  if (holdout_days >= t) {
    fail("holdout of " + std::to_string(holdout_days) +
         " day(s) leaves no training data (series has " + std::to_string(t) +
         " day(s))");
  }
  const int train_t = t - holdout_days;
  const int c = ds.series.cols();

  CaseDataset train = ds;
  train.series.values.assign(ds.series.values.begin(),
                             ds.series.values.begin() + static_cast<std::ptrdiff_t>(train_t) * c);

  CaseDataset holdout = ds;
  holdout.series.start_day = ds.series.start_day + train_t;
  holdout.series.values.assign(ds.series.values.begin() + static_cast<std::ptrdiff_t>(train_t) * c,
                               ds.series.values.end());
  return {std::move(train), std::move(holdout)};
}

void write_cases_csv(const std::string& path, const CaseDataset& ds) {
  std::ofstream out(path);
  if (!out) fail("cannot write case file: " + path);
  out << "date";
  for (const auto& ch : ds.series.channels) out << ',' << ch;
  out << '\n';
  char buf[32];
  for (int k = 0; k < ds.series.rows(); ++k) {
    out << day_to_iso(ds.series.start_day + k);
    for (int c = 0; c < ds.series.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.10g", ds.series.at(k, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

}  // namespace epiflow
