#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treeshift::cli {

enum ExitCode {
	ok = 0,
	negative = 1,
	usage = 2,
	stalled = 3,
	needs_larger_n = 4,
};

/// Entry point of the treeshift command. Reports go to files; a one-line
/// summary goes to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& gallery_names();

} // namespace treeshift::cli
