#pragma once

#include <cstdint>
#include <string>

namespace mcperturb {
namespace cli {

// Everything a command invocation needs besides its name. Caps may be
// lowered below the library hard limits but never raised; the empty format
// string selects each command's native output (JSON for the report commands,
// CSV for the tabular ones).
struct RunManifest {
  std::string input_path;
  std::string out_path;  // empty writes to stdout
  std::uint64_t seed = 12345;
  int max_states = 200;
  long max_horizon = 512;
  std::string format;  // "", "csv", or "json"
};

// Exit codes shared by all commands:
//   0 success, 2 bad spec or unusable chain, 3 every bound inapplicable
//   (report still written), 4 a verification row failed (verify only),
//   1 anything unexpected.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitSpecError = 2;
inline constexpr int kExitNothingApplicable = 3;
inline constexpr int kExitDominationFailure = 4;

int cmd_analyze(const RunManifest& manifest);
int cmd_verify(const RunManifest& manifest);
int cmd_noisy(const RunManifest& manifest);
int cmd_simulate(const RunManifest& manifest);
int cmd_sweep(const RunManifest& manifest);

// Dispatches on the command name and maps exceptions to exit codes.
int run(const std::string& command, const RunManifest& manifest);

}  // namespace cli
}  // namespace mcperturb
