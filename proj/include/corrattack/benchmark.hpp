#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corrattack/config.hpp"
#include "corrattack/dataset.hpp"
#include "corrattack/loss.hpp"
#include "corrattack/report.hpp"

namespace corrattack {

/// Returns a fresh oracle with its own counter; called once per image.
using OracleFactory = std::function<std::unique_ptr<LogitsOracle>()>;

/// Remote oracle when config.oracle is set, else the configured synthetic
/// model (shared, immutable).
OracleFactory make_oracle_factory(const BenchConfig& config);

/// Loads the PNG dataset, or generates the synthetic one and labels every
/// image with the target's clean prediction (queries on a throwaway oracle).
std::vector<Sample> prepare_dataset(const BenchConfig& config, const OracleFactory& oracles);

/// Attacks every sample with one method ("corrattack" or "random"). Images
/// whose clean prediction differs from the label are recorded as not
/// attempted. Image n uses seed config.attack.seed ^ n.
BenchmarkReport run_method(const std::string& method, const std::vector<Sample>& samples,
                           const OracleFactory& oracles, const BenchConfig& config);

std::vector<BenchmarkReport> run_benchmark(const BenchConfig& config);

/// <out_dir>/<method>.csv, summary.csv and report.json.
void write_benchmark(const std::vector<BenchmarkReport>& reports, const std::string& out_dir);

}  // namespace corrattack
