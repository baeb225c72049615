#pragma once

// vertex_id.hpp — hierarchical vertex identity for recursion-built CDAGs.
//
// A vertex is identified by where the recursion created it (the path of
// branch digits), what kind of node it is (role), and a small index tuple
// that disambiguates it within its role (encoder output number, matrix
// position, summation step).  The string rendering is unique, parseable and
// totally ordered, so every downstream analysis can be deterministic.
//
// Grammar:   id   := (digit ('.' digit)* ':')? token ('(' int (',' int)* ')')?
// Tokens:    A B  (inputs)   eA eB (encoder combinations)
//            mul  (product)  C     (decoder output / summation)
// Examples:  "A(0,1)"  "eA(5,0,0)"  "3.1:eB(7,0,1)"  "3.1.2:mul"  "3:C(1,1)"

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmio {

enum class Role : uint8_t {
  InputA = 0,
  InputB = 1,
  EncAOut = 2,
  EncBOut = 3,
  Product = 4,
  DecOut = 5,
};

inline const char* role_name(Role r) {
  switch (r) {
    case Role::InputA: return "input-A";
    case Role::InputB: return "input-B";
    case Role::EncAOut: return "enc-A-out";
    case Role::EncBOut: return "enc-B-out";
    case Role::Product: return "product";
    case Role::DecOut: return "dec-out";
  }
  throw std::logic_error("role_name: bad role");
}

inline Role role_from_name(const std::string& s) {
  if (s == "input-A") return Role::InputA;
  if (s == "input-B") return Role::InputB;
  if (s == "enc-A-out") return Role::EncAOut;
  if (s == "enc-B-out") return Role::EncBOut;
  if (s == "product") return Role::Product;
  if (s == "dec-out") return Role::DecOut;
  throw std::invalid_argument("unknown role string: \"" + s + "\"");
}

struct VertexId {
  std::vector<uint8_t> path;   // recursion branch digits, each in 1..m0
  Role role = Role::Product;
  std::vector<int32_t> index;  // role-specific small indices

  friend bool operator==(const VertexId&, const VertexId&) = default;
};

// Canonical total order: path shortlex, then role, then index shortlex.
// Deterministic across runs; used as the storage order of every Cdag.
inline bool canonical_less(const VertexId& a, const VertexId& b) {
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  if (a.path != b.path) return a.path < b.path;
  if (a.role != b.role) return a.role < b.role;
  if (a.index.size() != b.index.size()) return a.index.size() < b.index.size();
  return a.index < b.index;
}

struct VertexIdLess {
  bool operator()(const VertexId& a, const VertexId& b) const { return canonical_less(a, b); }
};

struct VertexIdHash {
  size_t operator()(const VertexId& v) const {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](uint64_t x) {
      h ^= x;
      h *= 1099511628211ull;
    };
    for (uint8_t d : v.path) mix(d);
    mix(0xffu);
    mix(static_cast<uint64_t>(v.role));
    for (int32_t i : v.index) mix(static_cast<uint64_t>(i) + 0x9e3779b97f4a7c15ull);
    return static_cast<size_t>(h);
  }
};

inline const char* role_token(Role r) {
  switch (r) {
    case Role::InputA: return "A";
    case Role::InputB: return "B";
    case Role::EncAOut: return "eA";
    case Role::EncBOut: return "eB";
    case Role::Product: return "mul";
    case Role::DecOut: return "C";
  }
  throw std::logic_error("role_token: bad role");
}

inline std::string to_string(const VertexId& v) {
  std::string s;
  for (size_t i = 0; i < v.path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(static_cast<int>(v.path[i]));
  }
  if (!v.path.empty()) s += ':';
  s += role_token(v.role);
  if (!v.index.empty()) {
    s += '(';
    for (size_t i = 0; i < v.index.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(v.index[i]);
    }
    s += ')';
  }
  return s;
}

inline VertexId parse_vertex_id(const std::string& s) {
  auto fail = [&s]() -> void { throw std::invalid_argument("bad vertex id: \"" + s + "\""); };
  VertexId v;
  size_t pos = 0;
  size_t colon = s.find(':');
  if (colon != std::string::npos) {
    while (pos < colon) {
      size_t end = pos;
      while (end < colon && s[end] != '.') ++end;
      if (end == pos) fail();
      int d = 0;
      for (size_t i = pos; i < end; ++i) {
        if (s[i] < '0' || s[i] > '9') fail();
        d = d * 10 + (s[i] - '0');
        if (d > 255) fail();
      }
      if (d == 0) fail();
      v.path.push_back(static_cast<uint8_t>(d));
      pos = end < colon ? end + 1 : end;
      if (end + 1 == colon) fail();  // trailing '.'
    }
    if (v.path.empty()) fail();
    pos = colon + 1;
  }
  size_t tok_end = pos;
  while (tok_end < s.size() && s[tok_end] != '(') ++tok_end;
  std::string tok = s.substr(pos, tok_end - pos);
  if (tok == "A") v.role = Role::InputA;
  else if (tok == "B") v.role = Role::InputB;
  else if (tok == "eA") v.role = Role::EncAOut;
  else if (tok == "eB") v.role = Role::EncBOut;
  else if (tok == "mul") v.role = Role::Product;
  else if (tok == "C") v.role = Role::DecOut;
  else fail();
  pos = tok_end;
  if (pos < s.size()) {
    if (s[pos] != '(' || s.back() != ')') fail();
    std::string body = s.substr(pos + 1, s.size() - pos - 2);
    if (body.empty()) fail();  // "()"
    size_t at = 0;
    while (true) {
      size_t comma = body.find(',', at);
      std::string item = body.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
      if (item.empty()) fail();
      size_t i = 0;
      bool neg = item[0] == '-';
      if (neg) i = 1;
      if (i == item.size()) fail();
      int64_t val = 0;
      for (; i < item.size(); ++i) {
        if (item[i] < '0' || item[i] > '9') fail();
        val = val * 10 + (item[i] - '0');
        if (val > std::numeric_limits<int32_t>::max()) fail();
      }
      v.index.push_back(static_cast<int32_t>(neg ? -val : val));
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
  }
  return v;
}

}  // namespace mmio
