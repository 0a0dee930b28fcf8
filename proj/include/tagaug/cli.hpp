#pragma once

#include <string>
#include <vector>

namespace tagaug {

// Front end behind the tagaug binary. Takes argv without the program name.
// Exit codes: 0 success, 1 runtime/domain error, 2 usage error.
//
// Every file-producing command writes "<primary output>.manifest" beside
// its output: plain key=value lines holding the fully resolved argument
// vector (argv=, tab-separated), input/output digests, and wall time.
// Feeding that argv back through run_cli reproduces the outputs byte for
// byte; defaults are baked into the vector, so later default changes
// cannot drift a recorded run.
int run_cli(std::vector<std::string> args);

// The resolved argument vector stored in a manifest's argv= line.
std::vector<std::string> manifest_argv(const std::string& manifest_text);

} // namespace tagaug
