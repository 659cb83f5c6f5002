#pragma once

namespace symnet {

// Full command-line entry point; returns the process exit code
// (0 ok, 1 falsified bound or failed verification, 2 usage).
int cli_main(int argc, char** argv);

}  // namespace symnet
