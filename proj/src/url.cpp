#include "camwatch/url.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <vector>

namespace camwatch {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '+' || c == '-' || c == '.';
  });
}

bool has_bad_chars(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return c <= 0x20 || c == 0x7f || c == '<' || c == '>' || c == '"'; });
}

// Splits "//authority" into userinfo/host/port. Returns false if malformed.
bool parse_authority(std::string_view auth, Url& url) {
  if (const auto at = auth.rfind('@'); at != std::string_view::npos) {
    url.userinfo = std::string(auth.substr(0, at));
    auth.remove_prefix(at + 1);
  }
  std::string_view host = auth;
  std::string_view port;
  if (!auth.empty() && auth.front() == '[') {
    const auto close = auth.find(']');
    if (close == std::string_view::npos) return false;
    host = auth.substr(0, close + 1);
    std::string_view rest = auth.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') return false;
      port = rest.substr(1);
    }
  } else if (const auto colon = auth.rfind(':'); colon != std::string_view::npos) {
    host = auth.substr(0, colon);
    port = auth.substr(colon + 1);
  }
  if (!port.empty()) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value < 0 || value > 65535) return false;
    url.port = value;
  }
  url.host = lower(host);
  return true;
}

// RFC 3986 5.2.4
std::string remove_dot_segments(std::string_view input) {
  std::string in(input);
  std::string out;
  while (!in.empty()) {
    if (in.rfind("../", 0) == 0) {
      in.erase(0, 3);
    } else if (in.rfind("./", 0) == 0) {
      in.erase(0, 2);
    } else if (in.rfind("/./", 0) == 0) {
      in.replace(0, 3, "/");
    } else if (in == "/.") {
      in = "/";
    } else if (in.rfind("/../", 0) == 0 || in == "/..") {
      in = in.size() == 3 ? std::string("/") : in.substr(3);
      const auto slash = out.rfind('/');
      out.erase(slash == std::string::npos ? 0 : slash);
    } else if (in == "." || in == "..") {
      in.clear();
    } else {
      const std::size_t start = in[0] == '/' ? 1 : 0;
      const auto next = in.find('/', start);
      const std::size_t len = next == std::string::npos ? in.size() : next;
      out.append(in, 0, len);
      in.erase(0, len);
    }
  }
  return out;
}

struct Reference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

std::optional<Reference> split_reference(std::string_view text) {
  Reference ref;
  if (const auto hash = text.find('#'); hash != std::string_view::npos) {
    ref.fragment = std::string(text.substr(hash + 1));
    text = text.substr(0, hash);
  }
  if (const auto q = text.find('?'); q != std::string_view::npos) {
    ref.query = std::string(text.substr(q + 1));
    text = text.substr(0, q);
  }
  const auto colon = text.find(':');
  const auto first_slash = text.find('/');
  if (colon != std::string_view::npos && (first_slash == std::string_view::npos || colon < first_slash)) {
    const auto scheme = text.substr(0, colon);
    if (!valid_scheme(scheme)) return std::nullopt;
    ref.scheme = lower(scheme);
    text = text.substr(colon + 1);
  }
  if (text.rfind("//", 0) == 0) {
    text.remove_prefix(2);
    const auto end = text.find('/');
    ref.authority = std::string(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end);
  }
  ref.path = std::string(text);
  return ref;
}

std::optional<Url> build(const std::string& scheme, const std::optional<std::string>& authority, std::string path,
                         std::optional<std::string> query, std::optional<std::string> fragment) {
  Url url;
  url.scheme = scheme;
  if (authority) {
    url.has_authority = true;
    if (!parse_authority(*authority, url)) return std::nullopt;
  }
  url.path = std::move(path);
  url.query = std::move(query);
  url.fragment = std::move(fragment);
  return url;
}

}  // namespace

int default_port(std::string_view scheme) noexcept {
  if (scheme == "http") return 80;
  if (scheme == "https") return 443;
  if (scheme == "rtsp") return 554;
  if (scheme == "rtmp") return 1935;
  return 0;
}

std::string Url::host_port() const {
  return port ? host + ":" + std::to_string(*port) : host;
}

std::string Url::origin() const { return scheme + "://" + host_port(); }

int Url::effective_port() const { return port ? *port : default_port(scheme); }

std::string Url::to_string() const {
  std::string out = scheme + ":";
  if (has_authority) {
    out += "//";
    if (!userinfo.empty()) out += userinfo + "@";
    out += host_port();
  }
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

std::optional<Url> parse_url(std::string_view text) {
  if (text.empty() || has_bad_chars(text)) return std::nullopt;
  const auto ref = split_reference(text);
  if (!ref || !ref->scheme) return std::nullopt;
  auto url = build(*ref->scheme, ref->authority, ref->path, ref->query, ref->fragment);
  if (url && url->has_authority && url->host.empty() && url->scheme != "file") return std::nullopt;
  return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view reference) {
  // Surrounding whitespace is common in hand-written markup.
  while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.front()))) reference.remove_prefix(1);
  while (!reference.empty() && std::isspace(static_cast<unsigned char>(reference.back()))) reference.remove_suffix(1);
  if (has_bad_chars(reference)) return std::nullopt;
  const auto ref = split_reference(reference);
  if (!ref) return std::nullopt;

  std::string scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  if (ref->scheme) {
    scheme = *ref->scheme;
    authority = ref->authority;
    path = remove_dot_segments(ref->path);
    query = ref->query;
  } else {
    scheme = base.scheme;
    if (ref->authority) {
      authority = ref->authority;
      path = remove_dot_segments(ref->path);
      query = ref->query;
    } else {
      if (base.has_authority) {
        std::string a = base.userinfo.empty() ? "" : base.userinfo + "@";
        authority = a + base.host_port();
      }
      if (ref->path.empty()) {
        path = base.path;
        query = ref->query ? ref->query : base.query;
      } else {
        if (ref->path.front() == '/') {
          path = remove_dot_segments(ref->path);
        } else {
          std::string merged;
          if (base.has_authority && base.path.empty()) {
            merged = "/" + ref->path;
          } else {
            const auto slash = base.path.rfind('/');
            merged = (slash == std::string::npos ? std::string{} : base.path.substr(0, slash + 1)) + ref->path;
          }
          path = remove_dot_segments(merged);
        }
        query = ref->query;
      }
    }
  }
  auto url = build(scheme, authority, std::move(path), std::move(query), ref->fragment);
  if (url && url->has_authority && url->host.empty() && url->scheme != "file") return std::nullopt;
  return url;
}

std::optional<std::string> canonical_url(std::string_view text) {
  auto url = parse_url(text);
  if (!url) return std::nullopt;
  if (url->port && *url->port == default_port(url->scheme)) url->port.reset();
  url->path = remove_dot_segments(url->path);
  if (url->has_authority && url->path.empty()) url->path = "/";
  url->fragment.reset();
  return url->to_string();
}

std::string registrable_domain(std::string_view host_in) {
  std::string host = lower(host_in);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty() || host.front() == '[') return host;
  if (std::all_of(host.begin(), host.end(), [](unsigned char c) { return std::isdigit(c) || c == '.'; })) return host;

  std::vector<std::string_view> labels;
  std::string_view rest = host;
  while (true) {
    const auto dot = rest.find('.');
    labels.push_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  if (labels.size() <= 2) return host;
  static constexpr std::array<std::string_view, 9> kGenericSecondLevel = {"co", "com", "org", "net", "ac",
                                                                          "gov", "edu", "or", "ne"};
  const auto tld = labels.back();
  const auto sld = labels[labels.size() - 2];
  std::size_t keep = 2;
  if (tld.size() == 2 && std::find(kGenericSecondLevel.begin(), kGenericSecondLevel.end(), sld) != kGenericSecondLevel.end()) {
    keep = 3;
  }
  if (labels.size() <= keep) return host;
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

}  // namespace camwatch
