#include <string>

#include "httplib.h"
#include "regimecast/common.hpp"
#include "regimecast/series.hpp"

namespace regimecast {

std::string http_get(const std::string& url) {
  // Split scheme://host[:port]/path
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw DataError("malformed URL: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string host = url.substr(scheme_end + 3, path_start == std::string::npos
                                                          ? std::string::npos
                                                          : path_start - scheme_end - 3);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw DataError("https not supported in this build: " + url);
#endif
  if (scheme != "http" && scheme != "https")
    throw DataError("unsupported URL scheme: " + url);

  auto fetch = [&](auto& client) -> std::string {
    client.set_follow_location(true);
    client.set_connection_timeout(15);
    client.set_read_timeout(30);
    auto res = client.Get(path);
    if (!res) throw DataError("unreachable source: " + url);
    if (res->status != 200)
      throw DataError("HTTP " + std::to_string(res->status) + " fetching " + url);
    return res->body;
  };

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    httplib::SSLClient client(host);
    return fetch(client);
  }
#endif
  httplib::Client client(host);
  return fetch(client);
}

}  // namespace regimecast
