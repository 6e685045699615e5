#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace corrattack {

struct ImageRecord {
    std::string image_id;
    bool attempted = false;  // false when the clean image was already misclassified
    bool success = false;
    std::size_t queries = 0;
    double final_loss = 0.0;
    std::optional<double> wall_ms;
};

struct CurvePoint {
    std::size_t level = 0;
    double success_rate = 0.0;  // successes within `level` queries / attempted
};

struct BenchmarkReport {
    std::string method;
    std::vector<ImageRecord> records;  // sorted by image_id
    std::size_t attempted = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;  // 0 when nothing was attempted
    std::optional<double> mean_queries;    // over successes only
    std::optional<double> median_queries;  // over successes only
    std::vector<CurvePoint> curve;
};

/// Sorts the records and computes the aggregates. Empty `levels` gives ten
/// evenly spaced levels up to `budget`.
BenchmarkReport summarize(std::string method, std::vector<ImageRecord> records,
                          std::vector<std::size_t> levels, std::size_t budget);

/// Columns: image_id,attempted,success,queries,final_loss,wall_ms. Absent
/// wall times print as "-".
std::string report_csv(const BenchmarkReport& report);

/// One row per method: method,attempted,successes,success_rate,mean_queries,
/// median_queries, with "-" for undefined means.
std::string summary_csv(const std::vector<BenchmarkReport>& reports);

std::string report_json(const std::vector<BenchmarkReport>& reports);

}  // namespace corrattack
