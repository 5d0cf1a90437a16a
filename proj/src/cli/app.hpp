#pragma once

#include <ostream>

namespace recon::cli {

/// Parses flags and the optional --config file, runs the chosen subcommand and
/// returns the process exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recon::cli
