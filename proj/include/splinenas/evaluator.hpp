#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "splinenas/driver.hpp"

namespace splinenas {

/// How to call an external measurement command.
///
/// The command runs under `/bin/sh -c`. It receives one JSON line on stdin,
/// `{"study": <id>, "names": [...], "point": [...]}`, and each coordinate as
/// SPLINENAS_<NAME>=<value> in its environment. It must exit 0 and print the
/// measurement as the last non-empty line of stdout.
struct ExternalCommand {
    std::string command;
    std::string study_id;
    std::vector<std::string> names;
    /// Zero disables the timeout.
    std::chrono::milliseconds timeout{0};
    std::size_t retries = 0;
};

/// Environment variable carrying dimension `name`.
std::string env_var_name(std::string_view name);

/// The stdin line sent to the command.
std::string evaluator_request(const ExternalCommand& cmd, const Point& point);

/// Parses the last non-empty line as a finite decimal. Throws EvalUnparseable.
double parse_measurement(std::string_view stdout_text);

/// Spawns the command up to retries+1 times. Throws EvalTimeout,
/// EvalNonZeroExit or EvalUnparseable (with captured stderr) for the last
/// failed attempt. `spawned`, when non-null, is incremented per process.
double run_external_evaluator(const ExternalCommand& cmd, const Point& point, std::size_t* spawned = nullptr);

/// Adapts an external command to the driver's Evaluator.
Evaluator external_evaluator(ExternalCommand cmd);

}  // namespace splinenas
