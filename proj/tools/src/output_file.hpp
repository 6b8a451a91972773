#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

namespace expcorr::cli {

/// Writes `contents` to `path` through a temporary sibling file that is
/// renamed into place, so an interrupted run never leaves a partial file.
/// `path` "-" writes to `console` instead. Throws std::runtime_error.
void write_output(const std::string& path, std::string_view contents, std::ostream& console);

/// Installs SIGINT/SIGTERM handlers that delete in-flight temporary files
/// and exit with status 130.
void install_signal_cleanup();

}  // namespace expcorr::cli
