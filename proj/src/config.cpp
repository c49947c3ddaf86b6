#include "pcore/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcore {

namespace {

std::string trim(std::string s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

uint64_t parse_u64(const std::string& v, int line) {
  try {
    size_t idx = 0;
    unsigned long long x = std::stoull(v, &idx, 0);
    if (idx != v.size()) fail(line, "bad number '" + v + "'");
    return x;
  } catch (const std::exception&) {
    fail(line, "bad number '" + v + "'");
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || path.front() == '/') return path;
  return base_dir + "/" + path;
}

}  // namespace

RunConfig parse_config_text(std::string_view text, const std::string& base_dir) {
  RunConfig cfg;
  int section = -1;  // -1 globals, otherwise partition index
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner.rfind("partition", 0) != 0) fail(line_no, "unknown section '" + inner + "'");
      std::string idx = trim(inner.substr(9));
      uint64_t p = parse_u64(idx, line_no);
      if (p >= 3) fail(line_no, "partition index must be 0..2");
      section = static_cast<int>(p);
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line_no, "expected key = value");

    if (section < 0) {
      if (key == "switch_window") cfg.schedule.switch_window = parse_u64(value, line_no);
      else if (key == "clock_hz") cfg.schedule.clock_hz = parse_u64(value, line_no);
      else if (key == "horizon") cfg.horizon = parse_u64(value, line_no);
      else if (key == "trace") cfg.trace_path = resolve(base_dir, value);
      else if (key == "inject") cfg.inject_path = resolve(base_dir, value);
      else if (key == "verbose") cfg.verbose = parse_u64(value, line_no) != 0;
      else fail(line_no, "unknown global key '" + key + "'");
    } else {
      PartitionSlot& slot = cfg.schedule.parts[section];
      if (key == "period_cycles") slot.period_cycles = parse_u64(value, line_no);
      else if (key == "exec_cycles") slot.exec_cycles = parse_u64(value, line_no);
      else if (key == "offset_cycles") slot.offset_cycles = parse_u64(value, line_no);
      else if (key == "enabled") slot.enabled = parse_u64(value, line_no) != 0;
      else if (key == "code") cfg.code_paths[section] = resolve(base_dir, value);
      else if (key == "data") cfg.data_paths[section] = resolve(base_dir, value);
      else fail(line_no, "unknown partition key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  std::string dir;
  if (auto slash = path.find_last_of('/'); slash != std::string::npos) dir = path.substr(0, slash);
  return parse_config_text(ss.str(), dir);
}

std::vector<Injection> parse_injection_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open injection script: " + path);
  std::vector<Injection> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (line_no == 1 && t.rfind("cycle", 0) == 0) continue;  // header
    Injection inj{};
    char extra;
    unsigned long long cyc, val;
    unsigned port;
    std::istringstream ls(t);
    char c1, c2;
    if (!(ls >> cyc >> c1 >> port >> c2 >> val) || c1 != ',' || c2 != ',' || (ls >> extra))
      throw std::runtime_error("injection script line " + std::to_string(line_no) +
                               ": expected cycle,port,value");
    inj.cycle = cyc;
    inj.port = port;
    inj.value = static_cast<uint32_t>(val);
    out.push_back(inj);
  }
  return out;
}

}  // namespace pcore
