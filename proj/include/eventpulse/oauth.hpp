#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "eventpulse/credentials.hpp"

namespace eventpulse::oauth {

/// RFC 3986 percent-encoding (unreserved characters pass through).
inline std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3);
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

inline std::string hmac_sha1_base64(std::string_view key, std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha1(), key.data(), static_cast<int>(key.size()),
       reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest, &len);
  std::string out(4 * ((len + 2) / 3) + 1, '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), digest, static_cast<int>(len));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

using Params = std::vector<std::pair<std::string, std::string>>;

/// The HMAC-SHA1 signature of a request. `params` holds query and form parameters (unencoded)
/// merged with the oauth_* protocol parameters.
inline std::string signature(std::string_view method, std::string_view base_url, Params params,
                             std::string_view consumer_secret, std::string_view token_secret) {
  for (auto& [k, v] : params) {
    k = percent_encode(k);
    v = percent_encode(v);
  }
  std::sort(params.begin(), params.end());
  std::string param_string;
  for (const auto& [k, v] : params) {
    if (!param_string.empty()) param_string += '&';
    param_string += k + '=' + v;
  }
  std::string base = std::string(method) + '&' + percent_encode(base_url) + '&' + percent_encode(param_string);
  std::string key = percent_encode(consumer_secret) + '&' + percent_encode(token_secret);
  return hmac_sha1_base64(key, base);
}

inline std::string authorization_header(std::string_view method, std::string_view base_url,
                                        const Params& request_params, const Credentials& creds,
                                        std::string nonce, std::int64_t timestamp) {
  Params oauth = {
      {"oauth_consumer_key", creds.consumer_key},
      {"oauth_nonce", std::move(nonce)},
      {"oauth_signature_method", "HMAC-SHA1"},
      {"oauth_timestamp", std::to_string(timestamp)},
      {"oauth_token", creds.access_token},
      {"oauth_version", "1.0"},
  };
  Params all = request_params;
  all.insert(all.end(), oauth.begin(), oauth.end());
  oauth.emplace_back("oauth_signature",
                     signature(method, base_url, all, creds.consumer_secret, creds.access_token_secret));
  std::sort(oauth.begin(), oauth.end());
  std::string header = "OAuth ";
  for (std::size_t i = 0; i < oauth.size(); ++i) {
    if (i) header += ", ";
    header += percent_encode(oauth[i].first) + "=\"" + percent_encode(oauth[i].second) + '"';
  }
  return header;
}

inline std::string random_nonce() {
  static constexpr char kAlnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::random_device rd;
  std::uniform_int_distribution<int> pick(0, 61);
  std::string s(32, ' ');
  for (auto& c : s) c = kAlnum[pick(rd)];
  return s;
}

inline std::string authorization_header(std::string_view method, std::string_view base_url,
                                        const Params& request_params, const Credentials& creds) {
  auto ts = std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  return authorization_header(method, base_url, request_params, creds, random_nonce(), ts);
}

}  // namespace eventpulse::oauth
