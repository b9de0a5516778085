#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gcnal/alloop.hpp"
#include "gcnal/config.hpp"

namespace gcnal {

/// Subcommands:
///   run      --config FILE --out DIR [--parallel-trials]
///   compare  --config FILE --strategies a,b,... --out DIR
///            [--sweep KEY=V1,V2,...] [--parallel-trials]
///   gen-data --spec SPEC --out FILE [--test-out FILE] [--seed N]
/// Returns 0 on success; prints a message to `err` and returns nonzero
/// otherwise.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

/// One curve per strategy, all under the same config and therefore the same
/// seed pools and subset draws. With a sweep, one curve per (strategy, value)
/// labelled `strategy[key=value]`.
std::vector<Curve> run_comparison(const ExperimentConfig& base,
                                  const std::vector<StrategyId>& strategies,
                                  const std::string& sweep_key = {},
                                  const std::vector<std::string>& sweep_values = {});

}  // namespace gcnal
