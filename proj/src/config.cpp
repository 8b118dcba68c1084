#include "hho/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include "hho/errors.hpp"

namespace hho {

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

} // namespace

ConfigMap read_config(std::istream& in)
{
  ConfigMap out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(number) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw IoError("config line " + std::to_string(number) + ": empty key");
    std::replace(key.begin(), key.end(), '-', '_');
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap read_config_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config file '" + path + "'");
  return read_config(in);
}

} // namespace hho
