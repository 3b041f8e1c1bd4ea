#include "run_config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

namespace mixcsc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value,
                            const char* expected) {
  throw UsageError("invalid value '" + std::string(value) + "' for " + key +
                   " (expected " + expected + ")");
}

template <typename T>
T parse_as(const std::string& key, std::string_view text, const char* expected) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    bad_value(key, text, expected);
  }
  return value;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::string env_name(const std::string& key) {
  std::string out = "MIXCSC_";
  for (char c : key) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path);
  std::map<std::string, std::string> values;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || trim(line.substr(0, eq)).empty()) {
      throw UsageError(path + ":" + std::to_string(line_number) +
                       ": expected key=value");
    }
    values[std::string(trim(line.substr(0, eq)))] =
        std::string(trim(line.substr(eq + 1)));
  }
  return values;
}

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw std::logic_error("unknown config key '" + key + "'");
  }
  return it->second.value;
}

double RunConfig::real(const std::string& key) const {
  return parse_as<double>(key, trim(str(key)), "a number");
}

std::int64_t RunConfig::integer(const std::string& key) const {
  return parse_as<std::int64_t>(key, trim(str(key)), "an integer");
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  return parse_as<std::uint64_t>(key, trim(str(key)), "an unsigned integer");
}

bool RunConfig::flag(const std::string& key) const {
  const auto v = trim(str(key));
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  bad_value(key, v, "on or off");
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (auto part : split_commas(str(key))) {
    out.push_back(parse_as<double>(key, part, "a comma-separated number list"));
  }
  return out;
}

std::vector<std::int64_t> RunConfig::integers(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (auto part : split_commas(str(key))) {
    out.push_back(
        parse_as<std::int64_t>(key, part, "a comma-separated integer list"));
  }
  return out;
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json settings = nlohmann::ordered_json::object();
  for (const auto& [key, entry] : entries_) settings[key] = entry.value;
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand_;
  j["version"] = MIXCSC_VERSION_STRING;
  j["settings"] = std::move(settings);
  return j.dump();
}

std::vector<std::string> RunConfig::to_lines() const {
  std::vector<std::string> lines;
  lines.push_back("mixcsc " MIXCSC_VERSION_STRING " " + subcommand_);
  for (const auto& [key, entry] : entries_) {
    lines.push_back(key + "=" + entry.value);
  }
  return lines;
}

std::string_view to_string(RunConfig::Origin origin) {
  switch (origin) {
    case RunConfig::Origin::kDefault: return "default";
    case RunConfig::Origin::kFile: return "file";
    case RunConfig::Origin::kEnv: return "env";
    case RunConfig::Origin::kFlag: return "flag";
  }
  return "?";
}

RunConfig resolve_config(const std::string& subcommand,
                         std::span<const OptionSpec> specs,
                         const std::map<std::string, std::string>& flags,
                         const EnvLookup& env,
                         const std::map<std::string, std::string>& file_values) {
  std::map<std::string, RunConfig::Entry> entries;
  for (const auto& spec : specs) {
    RunConfig::Entry e{spec.default_value, RunConfig::Origin::kDefault};
    if (auto it = file_values.find(spec.key); it != file_values.end()) {
      e = {it->second, RunConfig::Origin::kFile};
    }
    if (env) {
      if (auto v = env(env_name(spec.key))) e = {*v, RunConfig::Origin::kEnv};
    }
    if (auto it = flags.find(spec.key); it != flags.end()) {
      e = {it->second, RunConfig::Origin::kFlag};
    }
    entries[spec.key] = std::move(e);
  }
  return RunConfig(subcommand, std::move(entries));
}

}  // namespace mixcsc::cli
