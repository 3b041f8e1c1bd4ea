#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mixcsc::cli {

// Bad flag values and other caller mistakes; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptionSpec {
  std::string key;  // flag name without dashes, also the config-file key
  std::string default_value;
  std::string help;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

// "alpha" -> "MIXCSC_ALPHA", "top-k" -> "MIXCSC_TOP_K".
std::string env_name(const std::string& key);

// Flat key=value file. '#' comments and blank lines are skipped; whitespace
// around keys and values is trimmed. Throws UsageError on malformed lines.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Fully resolved settings of one subcommand run.
class RunConfig {
 public:
  enum class Origin { kDefault, kFile, kEnv, kFlag };

  struct Entry {
    std::string value;
    Origin origin = Origin::kDefault;
  };

  RunConfig() = default;
  RunConfig(std::string subcommand, std::map<std::string, Entry> entries)
      : subcommand_(std::move(subcommand)), entries_(std::move(entries)) {}

  const std::string& subcommand() const { return subcommand_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Typed accessors throw UsageError naming the key on bad values.
  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;  // on/off, true/false, yes/no, 1/0
  std::vector<double> reals(const std::string& key) const;  // comma list
  std::vector<std::int64_t> integers(const std::string& key) const;

  // {"subcommand": ..., "version": ..., "settings": {key: value, ...}}
  std::string to_json() const;
  // "subcommand=...", "key=value", ... for '#'-comment headers.
  std::vector<std::string> to_lines() const;

 private:
  std::string subcommand_;
  std::map<std::string, Entry> entries_;
};

std::string_view to_string(RunConfig::Origin origin);

// Precedence: flags > environment (MIXCSC_<KEY>) > config file > defaults.
// `flags` holds only the options given on the command line.
RunConfig resolve_config(const std::string& subcommand,
                         std::span<const OptionSpec> specs,
                         const std::map<std::string, std::string>& flags,
                         const EnvLookup& env,
                         const std::map<std::string, std::string>& file_values);

}  // namespace mixcsc::cli
