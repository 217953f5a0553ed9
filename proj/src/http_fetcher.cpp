#include "camwatch/http_fetcher.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>

#include <fmt/format.h>
#include <httplib.h>

#include "camwatch/url.hpp"

namespace camwatch {
namespace {

httplib::Client make_client(const Url& u, const HttpOptions& o) {
  httplib::Client cli(u.origin());
  cli.set_follow_location(true);
  cli.set_connection_timeout(static_cast<time_t>(o.connect_timeout.count()), 0);
  cli.set_read_timeout(static_cast<time_t>(o.read_timeout.count()), 0);
  cli.set_default_headers({{"User-Agent", o.user_agent}});
  cli.enable_server_certificate_verification(o.verify_tls);
  return cli;
}

std::string request_target(const Url& u) {
  std::string t = u.path.empty() ? "/" : u.path;
  if (u.query) t += "?" + *u.query;
  return t;
}

bool is_http(const Url& u) { return u.scheme == "http" || u.scheme == "https"; }

// Raw TCP for the rtsp/rtmp probes. Returns -1 on failure.
int connect_tcp(const std::string& host, int port, std::chrono::seconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    timeval tv{static_cast<time_t>(timeout.count()), 0};
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  return fd;
}

bool rtsp_options_ok(const Url& u, const HttpOptions& o) {
  const int fd = connect_tcp(u.host, u.effective_port(), o.connect_timeout);
  if (fd < 0) return false;
  const std::string req = fmt::format("OPTIONS {} RTSP/1.0\r\nCSeq: 1\r\nUser-Agent: {}\r\n\r\n", u.to_string(), o.user_agent);
  bool ok = ::send(fd, req.data(), req.size(), MSG_NOSIGNAL) == static_cast<ssize_t>(req.size());
  char buf[512];
  ssize_t n = ok ? ::recv(fd, buf, sizeof buf - 1, 0) : -1;
  ::close(fd);
  if (n <= 0) return false;
  buf[n] = '\0';
  // Any RTSP status line proves a server; 401 still means a stream exists.
  return std::strncmp(buf, "RTSP/1.0 200", 12) == 0 || std::strncmp(buf, "RTSP/1.0 401", 12) == 0;
}

bool has_jpeg_frame(const std::string& buf) {
  const auto soi = buf.find("\xFF\xD8");
  return soi != std::string::npos && buf.find("\xFF\xD9", soi + 2) != std::string::npos;
}

}  // namespace

FetchResult HttpFetcher::fetch(const std::string& url) {
  const auto u = parse_url(url);
  if (!u || !is_http(*u)) return FetchResult::failure("unsupported url");
  auto cli = make_client(*u, options_);
  std::string body;
  bool too_big = false;
  auto res = cli.Get(request_target(*u), [&](const char* data, std::size_t n) {
    if (body.size() + n > options_.max_body_bytes) {
      too_big = true;
      return false;
    }
    body.append(data, n);
    return true;
  });
  if (too_big) return FetchResult::failure("body exceeds size limit");
  if (!res) return FetchResult::failure(httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) return FetchResult::failure(fmt::format("http status {}", res->status), res->status);
  FetchResult r;
  r.ok = true;
  r.status = res->status;
  r.body.assign(body.begin(), body.end());
  r.content_type = res->get_header_value("Content-Type");
  return r;
}

FetchResult HttpFetcher::retrieve(const std::string& url) {
  const auto u = parse_url(url);
  if (!u || !is_http(*u)) return FetchResult::failure("unsupported url");
  return fetch(url);
}

bool HttpFetcher::probe_stream(const std::string& url) {
  const auto u = parse_url(url);
  if (!u) return false;
  if (u->scheme == "rtsp") return rtsp_options_ok(*u, options_);
  if (u->scheme == "rtmp") {
    const int fd = connect_tcp(u->host, u->effective_port(), options_.connect_timeout);
    if (fd < 0) return false;
    ::close(fd);
    return true;
  }
  if (!is_http(*u)) return false;
  auto cli = make_client(*u, options_);
  std::string buf;
  bool got_frame = false;
  cli.Get(request_target(*u), [&](const char* data, std::size_t n) {
    buf.append(data, n);
    got_frame = has_jpeg_frame(buf);
    return !got_frame && buf.size() < options_.max_body_bytes;
  });
  return got_frame;
}

FetchResult HttpFetcher::fetch_clip(const std::string& url, std::chrono::seconds duration) {
  const auto u = parse_url(url);
  if (!u) return FetchResult::failure("unsupported url");
  if (!is_http(*u)) return FetchResult::failure(fmt::format("{} clip recording is not supported", u->scheme));
  auto cli = make_client(*u, options_);
  const auto deadline = std::chrono::steady_clock::now() + duration;
  std::string body;
  int status = 0;
  std::string content_type;
  bool stopped = false;
  auto res = cli.Get(
      request_target(*u),
      [&](const httplib::Response& r) {
        status = r.status;
        content_type = r.get_header_value("Content-Type");
        return r.status >= 200 && r.status < 300;
      },
      [&](const char* data, std::size_t n) {
        body.append(data, std::min(n, options_.max_body_bytes - std::min(body.size(), options_.max_body_bytes)));
        stopped = std::chrono::steady_clock::now() >= deadline || body.size() >= options_.max_body_bytes;
        return !stopped;
      });
  if (status != 0 && (status < 200 || status >= 300)) return FetchResult::failure(fmt::format("http status {}", status), status);
  // Cancelling at the deadline is the normal end of a recording.
  if (!res && !(stopped && res.error() == httplib::Error::Canceled)) return FetchResult::failure(httplib::to_string(res.error()));
  if (body.empty()) return FetchResult::failure("empty stream");
  FetchResult r;
  r.ok = true;
  r.status = status;
  r.body.assign(body.begin(), body.end());
  r.content_type = content_type;
  return r;
}

}  // namespace camwatch
