#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corrnet/decomp.hpp"
#include "corrnet/io.hpp"

namespace corrnet {

// Sweep figure as a standalone SVG: log10 diff_t and tol_t against t, zero regions shaded,
// t0 marked when given. Output depends only on the inputs.
std::string sweep_svg(const SweepTable& table, const std::vector<TInterval>& regions,
                      std::optional<double> t0 = std::nullopt);

SweepTable sweep_table(const SweepResult& sr);

}  // namespace corrnet
