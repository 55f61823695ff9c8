#pragma once

#include <ostream>

namespace seqtest::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDegenerate = 2,
    kValidationFailed = 3,
};

/**
 * Entry point behind the `seqtest` binary:
 *
 *   seqtest solve    <penalty> (--K k | --alpha a --sigma s --cost c) [--tol t] [--json|--csv]
 *   seqtest sweep    <penalty> --K-min lo --K-max hi --points n [--log] [--out file.csv]
 *   seqtest simulate <penalty> (...params) --prior p --paths n --dt h [--seed s] [--perturb d]
 *   seqtest validate <penalty> (...params) [--grid n]
 *
 * Penalty strings: ce:a1,a2 | l1 | l2 | classic:a1,a2.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqtest::cli
