#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qht::verify {

// Named suites: divergences, regions, classical, sequential, pinching, all.
std::vector<std::string> suite_names();
bool is_suite(const std::string& name);

// Runs every check of the suite, printing a measured/expected/tolerance row
// per check and one PASS/FAIL line per criterion (or the same content as
// JSON).  Returns true if all pass.
bool run_suite(const std::string& name, std::ostream& out, bool as_json = false);

}  // namespace qht::verify
