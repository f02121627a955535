#pragma once

#include <string>
#include <vector>

namespace sdm {

std::string usage_text();

// Subcommands: gen-data, train-teacher, distill, sample, eval, bench, ablate.
// Returns 0 on success, 1 on config errors, 2 on runtime/numeric errors.
int cmd_dispatch(const std::vector<std::string>& args);

}  // namespace sdm
