#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace camwatch {

// Generic absolute URI split per RFC 3986. Components keep their original
// spelling except scheme and host, which are lowercased.
struct Url {
  std::string scheme;
  std::string userinfo;
  std::string host;
  std::optional<int> port;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  bool has_authority = false;

  std::string to_string() const;
  // scheme://host[:port]
  std::string origin() const;
  // host[:port]
  std::string host_port() const;
  // Port when explicit, else the scheme default (0 if unknown).
  int effective_port() const;
};

// Absolute URLs only; returns nullopt for relative references or garbage.
std::optional<Url> parse_url(std::string_view text);

// RFC 3986 reference resolution. nullopt if the reference is malformed.
std::optional<Url> resolve_url(const Url& base, std::string_view reference);

// Lowercase scheme and host, default port dropped, empty path as "/",
// dot segments removed, fragment dropped. nullopt if not absolute.
std::optional<std::string> canonical_url(std::string_view text);

// Approximates the registrable domain: the last two host labels, or three
// when the second-level label is a common generic one under a two-letter
// country TLD (example.co.uk). IP literals are returned unchanged.
std::string registrable_domain(std::string_view host);

int default_port(std::string_view scheme) noexcept;

}  // namespace camwatch
