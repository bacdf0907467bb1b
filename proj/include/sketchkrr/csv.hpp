#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sketchkrr/experiment.hpp"

namespace sketchkrr {

inline constexpr const char* kCsvHeader =
    "n,m,sketch,trial,seed,lambda,delta_n_sq,d_n,error,rescaled_error,wall_time_ms";

/// Floats are written with 17 significant digits so that reading back is exact.
void write_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void write_csv(const std::vector<TrialRecord>& records, const std::string& path);

/// Throws std::runtime_error naming the line of the first malformed row.
std::vector<TrialRecord> read_csv(std::istream& in);
std::vector<TrialRecord> read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace sketchkrr
