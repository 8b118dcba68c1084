#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace hho {

/// `key = value` pairs. Keys are case-sensitive; '-' in keys is read as '_'.
using ConfigMap = std::map<std::string, std::string>;

/// One `key = value` per line; '#' starts a comment; blank lines are skipped.
/// Throws IoError on a line without '=' or with an empty key (with line number).
ConfigMap read_config(std::istream& in);
ConfigMap read_config_file(const std::string& path);

} // namespace hho
