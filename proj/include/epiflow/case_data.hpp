#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "epiflow/time_series.hpp"

namespace epiflow {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column mapping for case-count CSV files. Channel columns left empty are
// absent from the dataset; at least the infected column must be present.
struct CaseSchema {
  std::string date_column = "date";
  std::string infected_column = "new_infected";
  std::string recovered_column = "new_recovered";
  std::string dead_column = "new_dead";
  bool cumulative = false;  // columns hold running totals, difference them
  std::string region = "unnamed";
  double population = 83e6;
};

struct CaseDataset {
  std::string region;
  double population = 0.0;
  TimeSeries series;  // daily increments; start_day anchors the calendar
};

// Strict reader: contiguous daily ISO dates, non-negative integer counts.
// Cumulative columns are first-differenced (first value anchors).
CaseDataset load_cases(const std::string& path, const CaseSchema& schema);

// Chronological split; holdout keeps its calendar anchor.
std::pair<CaseDataset, CaseDataset> split_train_holdout(const CaseDataset& ds,
                                                        int holdout_days);

void write_cases_csv(const std::string& path, const CaseDataset& ds);

}  // namespace epiflow
