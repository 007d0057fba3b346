#include "netprof/subject_map.hpp"

#include <fstream>
#include <stdexcept>

#include "netprof/util.hpp"

namespace netprof {

SubjectMap SubjectMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open subject map: " + path);
  SubjectMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("subject map line " + std::to_string(lineno) +
                               ": expected client_ip<TAB>subject_id");
    std::string ip_text = trim(t.substr(0, tab));
    std::string subject = trim(t.substr(tab + 1));
    if (subject.empty())
      throw std::runtime_error("subject map line " + std::to_string(lineno) + ": empty subject id");
    map.add(IpAddr::parse(ip_text), subject);
  }
  return map;
}

void SubjectMap::add(const IpAddr& client, const std::string& subject_id) {
  auto it = entries_.find(client);
  if (it != entries_.end() && it->second != subject_id)
    throw std::runtime_error("conflicting subject for client " + client.to_string());
  entries_[client] = subject_id;
}

std::optional<std::string> SubjectMap::assign(const Packet& p) const {
  if (auto it = entries_.find(p.src_ip); it != entries_.end()) return it->second;
  if (auto it = entries_.find(p.dst_ip); it != entries_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::string> SubjectMap::subject_of(const IpAddr& client) const {
  if (auto it = entries_.find(client); it != entries_.end()) return it->second;
  return std::nullopt;
}

}  // namespace netprof
