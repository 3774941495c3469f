#pragma once

#include <string>
#include <vector>

#include "herit/experiments.hpp"

namespace herit {

// Line chart of one metric ("se" or "bias") against n for every estimator in
// one scenario. The numeric series are embedded verbatim in a leading SVG
// comment so tools can recover them without parsing geometry.
std::string render_metric_svg(const std::vector<AggregateRow>& aggregates,
                              const std::string& scenario, const std::string& metric);

// Writes <scenario>_se.svg and <scenario>_bias.svg for every scenario present
// into out_dir (created when missing). Returns the paths written.
std::vector<std::string> write_report(const std::vector<AggregateRow>& aggregates,
                                      const std::string& out_dir);

}  // namespace herit
