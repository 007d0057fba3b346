#pragma once

#include <optional>
#include <string>
#include <unordered_map>

#include "netprof/packet.hpp"

namespace netprof {

// Declarative client -> subject attribution. File format: one
// `client_ip<TAB>subject_id` per line, `#` starts a comment.
class SubjectMap {
 public:
  static SubjectMap load(const std::string& path);

  void add(const IpAddr& client, const std::string& subject_id);

  // Matches either endpoint so both directions attribute to the
  // declared client. Unmatched packets return nullopt and are dropped
  // downstream.
  std::optional<std::string> assign(const Packet& p) const;

  std::optional<std::string> subject_of(const IpAddr& client) const;
  size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<IpAddr, std::string> entries_;
};

}  // namespace netprof
