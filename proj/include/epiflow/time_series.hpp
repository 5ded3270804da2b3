#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiflow {

// Daily multichannel series, row-major T x C, anchored to a calendar day
// (days since 1970-01-01; 0 for synthetic data without an anchor).
struct TimeSeries {
  std::vector<std::string> channels;
  std::vector<double> values;
  std::int64_t start_day = 0;

  int rows() const {
    return channels.empty() ? 0
                            : static_cast<int>(values.size() / channels.size());
  }
  int cols() const { return static_cast<int>(channels.size()); }

  double& at(int t, int c) { return values[static_cast<std::size_t>(t) * channels.size() + c]; }
  double at(int t, int c) const { return values[static_cast<std::size_t>(t) * channels.size() + c]; }

  static TimeSeries zeros(std::vector<std::string> names, int t) {
    TimeSeries ts;
    ts.channels = std::move(names);
    ts.values.assign(static_cast<std::size_t>(t) * ts.channels.size(), 0.0);
    return ts;
  }

  int channel_index(const std::string& name) const {
    for (int c = 0; c < cols(); ++c) {
      if (channels[c] == name) return c;
    }
    throw std::out_of_range("TimeSeries: no channel named " + name);
  }
};

}  // namespace epiflow
