#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace eventpulse {

struct Credentials {
  std::string consumer_key;
  std::string consumer_secret;
  std::string access_token;
  std::string access_token_secret;

  bool complete() const {
    return !consumer_key.empty() && !consumer_secret.empty() && !access_token.empty() &&
           !access_token_secret.empty();
  }

  friend bool operator==(const Credentials&, const Credentials&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  /// The missing or offending key, empty for file-level errors.
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Reads the four OAuth keys from an INI-style file. Keys may sit at top level or inside any
/// section; the first occurrence wins. Surplus keys and ";"/"#" comment lines are ignored.
inline Credentials load_credentials(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open credentials file " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "malformed credentials file " + path.string() + ": " + e.message());
  }

  auto lookup = [&](const std::string& key) -> std::string {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '\0')); v && !v->empty())
      return *v;
    for (const auto& [name, section] : tree) {
      if (section.empty()) continue;
      if (auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '\0')); v && !v->empty())
        return *v;
    }
    throw ConfigError(key, "credentials file " + path.string() + " lacks key " + key);
  };

  Credentials c;
  c.consumer_key = lookup("consumer_key");
  c.consumer_secret = lookup("consumer_secret");
  c.access_token = lookup("access_token");
  c.access_token_secret = lookup("access_token_secret");
  return c;
}

}  // namespace eventpulse
