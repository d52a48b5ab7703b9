#include "statediv/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "statediv/cli/parse.hpp"

namespace statediv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("unsupported config value " + v.dump());
}

std::string flag_of(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) return {};
  return arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (value.is_boolean()) {
        if (value.get<bool>()) out.emplace_back(key, "");
      } else if (value.is_array()) {
        for (const auto& item : value) out.emplace_back(key, scalar_text(item));
      } else {
        out.emplace_back(key, scalar_text(value));
      }
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    if (value == "true") {
      out.emplace_back(key, "");
    } else if (value != "false") {
      out.emplace_back(key, value);
    }
  }
  return out;
}

std::vector<std::string> merge_config_args(const std::vector<std::string>& args, const std::string& config_text) {
  std::set<std::string> given;
  for (const std::string& a : args) {
    const std::string f = flag_of(a);
    if (!f.empty()) given.insert(f);
  }
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : parse_config(config_text)) {
    if (key == "config" || given.count(key)) continue;
    merged.push_back(value.empty() ? "--" + key : "--" + key + "=" + value);
  }
  return merged;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return merge_config_args(args, buffer.str());
}

}  // namespace statediv::cli
