#include "finitist/wellfounded.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "finitist/errors.hpp"

namespace finitist::wellfounded {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating(const Natural& v) {
  return v > Natural(kMax) ? kMax : static_cast<std::uint64_t>(v);
}

// 3^a, or nullopt past 64 bits.
std::optional<std::uint64_t> pow3(std::uint64_t a) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < a; ++i) {
    if (r > kMax / 3) return std::nullopt;
    r *= 3;
  }
  return r;
}

// Largest b with 2^b * base < bound, or nullopt when base >= bound.
std::optional<std::uint64_t> largest_exponent(std::uint64_t base, std::uint64_t bound) {
  if (base >= bound) return std::nullopt;
  std::uint64_t b = 0;
  std::uint64_t v = base;
  while (v <= (kMax >> 1) && (v << 1) < bound) {
    v <<= 1;
    ++b;
  }
  return b;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  if (s.empty() || s.size() > 19) throw ValidationError("bad " + std::string(what) + " '" + std::string(s) + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ValidationError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

double parse_density(std::string_view s) {
  try {
    std::size_t used = 0;
    double d = std::stod(std::string(s), &used);
    if (used != s.size() || d < 0 || d > 1) throw std::invalid_argument("range");
    return d;
  } catch (const std::exception&) {
    throw ValidationError("bad density '" + std::string(s) + "'");
  }
}

}  // namespace

std::uint64_t omega2_code(std::uint64_t a, std::uint64_t b) {
  auto p = pow3(a);
  if (!p || b >= 64 || *p > (kMax >> b)) throw BudgetExceeded("omega2 code does not fit in 64 bits");
  return *p << b;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> omega2_decode(std::uint64_t code) {
  if (code == 0) return std::nullopt;
  std::uint64_t b = 0;
  while (code % 2 == 0) {
    code /= 2;
    ++b;
  }
  std::uint64_t a = 0;
  while (code % 3 == 0) {
    code /= 3;
    ++a;
  }
  if (code != 1) return std::nullopt;
  return std::pair{a, b};
}

RelationSpec RelationSpec::pred(std::uint64_t start) {
  RelationSpec r;
  r.kind_ = Kind::kPred;
  r.name_ = "pred";
  r.start_ = start;
  return r;
}

RelationSpec RelationSpec::succ(std::uint64_t start) {
  RelationSpec r;
  r.kind_ = Kind::kSucc;
  r.name_ = "succ";
  r.start_ = start;
  return r;
}

RelationSpec RelationSpec::omega2(std::uint64_t a, std::uint64_t b) {
  RelationSpec r;
  r.kind_ = Kind::kOmega2;
  r.name_ = "omega2";
  r.start_ = omega2_code(a, b);
  return r;
}

RelationSpec RelationSpec::graph(std::size_t nodes,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                                 std::string name) {
  if (nodes == 0) throw ValidationError("graph needs at least one node");
  RelationSpec r;
  r.kind_ = Kind::kGraph;
  r.name_ = std::move(name);
  r.start_ = nodes - 1;
  r.adjacency_.assign(nodes, {});
  for (auto [u, v] : edges) {
    if (u >= nodes || v >= nodes) throw ValidationError("graph edge outside 0..n-1");
    r.adjacency_[u].push_back(v);
  }
  for (auto& adj : r.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return r;
}

RelationSpec RelationSpec::parse(std::string_view text) {
  std::string_view base = text;
  std::optional<std::uint64_t> start;
  if (auto at = text.find('@'); at != std::string_view::npos) {
    base = text.substr(0, at);
    start = parse_u64(text.substr(at + 1), "start");
  }
  RelationSpec r;
  if (base == "pred") {
    r = pred();
  } else if (base == "succ") {
    r = succ();
  } else if (base == "omega2") {
    r = omega2();
  } else {
    auto parts = split(base, ':');
    if ((parts[0] == "dag" || parts[0] == "cyclic") && parts.size() == 4) {
      const std::uint64_t seed = parse_u64(parts[1], "seed");
      const std::uint64_t n = parse_u64(parts[2], "node count");
      const double density = parse_density(parts[3]);
      if (n == 0 || n > 4096) throw ValidationError("graph node count must be in 1..4096");
      if (parts[0] == "cyclic" && n < 2) throw ValidationError("cyclic graph needs 2 nodes");
      std::mt19937_64 rng(seed);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
      const auto threshold = static_cast<std::uint64_t>(density * 1000000.0);
      for (std::uint32_t u = 1; u < n; ++u) {
        for (std::uint32_t v = 0; v < u; ++v) {
          if (rng() % 1000000 < threshold) edges.emplace_back(u, v);
        }
      }
      if (parts[0] == "cyclic") {
        const auto hi = static_cast<std::uint32_t>(1 + rng() % (n - 1));
        const auto lo = static_cast<std::uint32_t>(rng() % hi);
        edges.emplace_back(hi, lo);
        edges.emplace_back(lo, hi);
        if (hi != n - 1) edges.emplace_back(static_cast<std::uint32_t>(n - 1), hi);
      }
      r = graph(n, std::move(edges), std::string(base));
    } else if (parts[0] == "graph" && parts.size() == 3) {
      const std::uint64_t n = parse_u64(parts[1], "node count");
      if (n == 0 || n > 4096) throw ValidationError("graph node count must be in 1..4096");
      std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
      if (!parts[2].empty()) {
        for (auto e : split(parts[2], ',')) {
          auto uv = split(e, '-');
          if (uv.size() != 2) throw ValidationError("bad edge '" + std::string(e) + "'");
          edges.emplace_back(static_cast<std::uint32_t>(parse_u64(uv[0], "node")),
                             static_cast<std::uint32_t>(parse_u64(uv[1], "node")));
        }
      }
      r = graph(n, std::move(edges), std::string(base));
    } else {
      throw ValidationError("unknown relation '" + std::string(text) + "'");
    }
  }
  if (start) r = r.with_start(*start);
  return r;
}

RelationSpec RelationSpec::with_start(std::uint64_t start) const {
  if (!in_field(start)) {
    throw ValidationError("start " + std::to_string(start) + " is outside the field of " + name_);
  }
  RelationSpec r = *this;
  r.start_ = start;
  return r;
}

bool RelationSpec::in_field(std::uint64_t x) const {
  switch (kind_) {
    case Kind::kPred:
    case Kind::kSucc:
      return true;
    case Kind::kOmega2:
      return omega2_decode(x).has_value();
    case Kind::kGraph:
      return x < adjacency_.size();
  }
  return false;
}

std::vector<std::uint64_t> RelationSpec::successors(std::uint64_t x, std::uint64_t bound) const {
  std::vector<std::uint64_t> out;
  switch (kind_) {
    case Kind::kPred:
      if (x > 0 && x - 1 < bound) out.push_back(x - 1);
      break;
    case Kind::kSucc:
      if (x < kMax && x + 1 < bound) out.push_back(x + 1);
      break;
    case Kind::kOmega2: {
      auto ab = omega2_decode(x);
      if (!ab) break;
      auto [a, b] = *ab;
      // Same a, smaller b.
      if (b > 0) {
        auto p = pow3(a);
        if (p) {
          if (auto top = largest_exponent(*p, bound)) {
            out.push_back(omega2_code(a, std::min(b - 1, *top)));
            break;
          }
        }
      }
      // Smaller a, any b: the largest a' with a code below the bound wins.
      for (std::uint64_t a2 = a; a2-- > 0;) {
        auto p = pow3(a2);
        if (!p) continue;
        if (auto top = largest_exponent(*p, bound)) {
          out.push_back(omega2_code(a2, *top));
          break;
        }
      }
      break;
    }
    case Kind::kGraph:
      if (x < adjacency_.size()) {
        for (std::uint32_t v : adjacency_[x]) {
          if (v < bound) out.push_back(v);
        }
      }
      break;
  }
  return out;
}

Truth RelationSpec::ground_truth(std::uint64_t start) const {
  switch (kind_) {
    case Kind::kPred:
    case Kind::kOmega2:
      return Truth::kWellFounded;
    case Kind::kSucc:
      return Truth::kIllFounded;
    case Kind::kGraph: {
      if (start >= adjacency_.size()) return Truth::kWellFounded;
      // Cycle reachable from start, by colouring DFS.
      std::vector<int> colour(adjacency_.size(), 0);
      std::vector<std::pair<std::uint32_t, std::size_t>> stack{{static_cast<std::uint32_t>(start), 0}};
      colour[start] = 1;
      while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (i < adjacency_[u].size()) {
          std::uint32_t v = adjacency_[u][i++];
          if (colour[v] == 1) return Truth::kIllFounded;
          if (colour[v] == 0) {
            colour[v] = 1;
            stack.emplace_back(v, 0);
          }
        } else {
          colour[u] = 2;
          stack.pop_back();
        }
      }
      return Truth::kWellFounded;
    }
  }
  return Truth::kWellFounded;
}

std::string RelationSpec::rank(std::uint64_t start) const {
  if (ground_truth(start) == Truth::kIllFounded) return "inf";
  switch (kind_) {
    case Kind::kPred:
      return std::to_string(start);
    case Kind::kOmega2: {
      auto ab = omega2_decode(start);
      if (!ab) return "0";
      return "w*" + std::to_string(ab->first) + "+" + std::to_string(ab->second);
    }
    case Kind::kGraph: {
      // Longest path by memoized DFS over the acyclic reachable part.
      std::vector<std::int64_t> memo(adjacency_.size(), -1);
      auto longest = [&](auto&& self, std::uint32_t u) -> std::int64_t {
        if (memo[u] >= 0) return memo[u];
        std::int64_t best = 0;
        for (std::uint32_t v : adjacency_[u]) best = std::max(best, 1 + self(self, v));
        return memo[u] = best;
      };
      return std::to_string(longest(longest, static_cast<std::uint32_t>(start)));
    }
    case Kind::kSucc:
      break;
  }
  return "inf";
}

std::uint64_t input_size(const RelationSpec& r, std::uint64_t start) {
  if (r.kind() == RelationSpec::Kind::kGraph) return r.nodes();
  std::uint64_t bits = 1;
  while (start >>= 1) ++bits;
  return bits;
}

// ---- search -----------------------------------------------------------------

namespace {

class Search {
 public:
  Search(const RelationSpec& r, const FastSeq& A, std::size_t def_len)
      : r_(r), A_(A), m_(def_len) {
    target_ = A.size() > def_len + 1 ? A.size() - 1 - def_len : 0;
  }

  std::size_t target() const { return target_; }

  // Longest descent from x having taken j steps, capped at target - j.
  std::size_t longest(std::uint64_t x, std::size_t j) {
    if (j >= target_) return 0;
    auto key = std::pair{x, j};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;
    const std::uint64_t bound = saturating(A_[m_ + j + 1]);
    std::size_t best = 0;
    std::uint64_t best_next = 0;
    for (std::uint64_t y : r_.successors(x, bound)) {
      std::size_t len = 1 + longest(y, j + 1);
      if (len > best) {
        best = len;
        best_next = y;
      }
      if (best == target_ - j) break;
    }
    memo_[key] = {best, best_next};
    return best;
  }

  std::vector<std::uint64_t> path(std::uint64_t x) {
    std::vector<std::uint64_t> out{x};
    for (std::size_t j = 0; j < target_; ++j) {
      auto it = memo_.find(std::pair{x, j});
      if (it == memo_.end() || it->second.first == 0) break;
      x = it->second.second;
      out.push_back(x);
    }
    return out;
  }

 private:
  const RelationSpec& r_;
  const FastSeq& A_;
  std::size_t m_;
  std::size_t target_ = 0;
  std::map<std::pair<std::uint64_t, std::size_t>, std::pair<std::size_t, std::uint64_t>> memo_;
};

}  // namespace

WfVerdict bounded_wf_search(const RelationSpec& r, std::uint64_t start, const FastSeq& A,
                            std::size_t def_len) {
  if (A.values.empty()) throw ContractViolation("bounded_wf_search needs a non-empty sequence");
  Search search(r, A, def_len);
  WfVerdict v;
  v.target = search.target();
  v.longest = r.in_field(start) ? search.longest(start, 0) : 0;
  if (v.longest >= v.target && r.in_field(start)) {
    v.verdict = Truth::kIllFounded;
    v.path = search.path(start);
  }
  return v;
}

Acceptance path_acceptance(const RelationSpec& order, const FastSeq& A, std::uint64_t input_size) {
  if (A.values.empty() || A[0] <= input_size) {
    throw ContractViolation("path acceptance needs A(0) > input size " + std::to_string(input_size));
  }
  for (std::uint64_t x = 0; x <= input_size; ++x) {
    if (!order.in_field(x)) continue;
    if (bounded_wf_search(order, x, A).verdict == Truth::kIllFounded) return Acceptance::kRejected;
  }
  return Acceptance::kAccepted;
}

std::vector<bool> partial_hyperjump(const std::vector<RelationSpec>& relations, const FastSeq& A) {
  std::vector<bool> bits;
  for (const auto& r : relations) {
    bits.push_back(bounded_wf_search(r, r.start(), A).verdict == Truth::kWellFounded);
  }
  return bits;
}

// ---- machines ---------------------------------------------------------------

MachineSpec parse_machine(std::string_view text) {
  MachineSpec m;
  std::size_t offset = 0;
  for (auto raw : split(text, ';')) {
    const std::size_t here = offset;
    offset += raw.size() + 1;
    std::vector<std::string> words;
    std::string cur;
    for (char c : raw) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    if (words.empty()) continue;
    auto num = [&](std::size_t i) -> std::uint32_t {
      if (i >= words.size()) throw ParseError("missing operand", here);
      try {
        return static_cast<std::uint32_t>(parse_u64(words[i], "operand"));
      } catch (const ValidationError&) {
        throw ParseError("bad operand '" + words[i] + "'", here);
      }
    };
    const std::string& op = words[0];
    Instruction ins;
    std::size_t arity = 0;
    if (op.rfind("regs=", 0) == 0) {
      for (const auto& w : words) {
        if (w.rfind("regs=", 0) == 0) {
          m.registers = static_cast<std::uint32_t>(parse_u64(std::string_view(w).substr(5), "regs"));
        } else if (w.rfind("cap=", 0) == 0) {
          m.cap = static_cast<std::uint32_t>(parse_u64(std::string_view(w).substr(4), "cap"));
        } else {
          throw ParseError("unknown machine option '" + w + "'", here);
        }
      }
      continue;
    }
    if (op == "INC") {
      ins = {Instruction::Op::kInc, num(1), 0};
      arity = 1;
    } else if (op == "DEC") {
      ins = {Instruction::Op::kDec, num(1), 0};
      arity = 1;
    } else if (op == "JZ") {
      ins = {Instruction::Op::kJz, num(1), num(2)};
      arity = 2;
    } else if (op == "JMP") {
      ins = {Instruction::Op::kJmp, 0, num(1)};
      arity = 1;
    } else if (op == "QUERY") {
      ins = {Instruction::Op::kQuery, num(1), num(2)};
      arity = 2;
    } else if (op == "HALT") {
      ins = {Instruction::Op::kHalt, 0, 0};
    } else {
      throw ParseError("unknown instruction '" + op + "'", here);
    }
    if (words.size() != arity + 1) throw ParseError("wrong operand count for " + op, here);
    m.program.push_back(ins);
  }
  if (m.registers == 0 || m.registers > 8) throw ValidationError("machines have 1..8 registers");
  for (const auto& ins : m.program) {
    const bool uses_reg = ins.op == Instruction::Op::kInc || ins.op == Instruction::Op::kDec ||
                          ins.op == Instruction::Op::kJz || ins.op == Instruction::Op::kQuery;
    if (uses_reg && ins.reg >= m.registers) throw ValidationError("register index out of range");
  }
  return m;
}

std::string render_machine(const MachineSpec& m) {
  std::string out = "regs=" + std::to_string(m.registers) + " cap=" + std::to_string(m.cap);
  for (const auto& ins : m.program) {
    out += "; ";
    switch (ins.op) {
      case Instruction::Op::kInc:
        out += "INC " + std::to_string(ins.reg);
        break;
      case Instruction::Op::kDec:
        out += "DEC " + std::to_string(ins.reg);
        break;
      case Instruction::Op::kJz:
        out += "JZ " + std::to_string(ins.reg) + " " + std::to_string(ins.target);
        break;
      case Instruction::Op::kJmp:
        out += "JMP " + std::to_string(ins.target);
        break;
      case Instruction::Op::kQuery:
        out += "QUERY " + std::to_string(ins.reg) + " " + std::to_string(ins.target);
        break;
      case Instruction::Op::kHalt:
        out += "HALT";
        break;
    }
  }
  return out;
}

bool halts(const MachineSpec& m, const std::vector<bool>& oracle) {
  std::vector<std::uint32_t> state(m.registers + 1, 0);  // pc, then registers
  std::set<std::vector<std::uint32_t>> seen;
  for (;;) {
    std::uint32_t& pc = state[0];
    if (pc >= m.program.size()) return true;
    if (!seen.insert(state).second) return false;
    const Instruction& ins = m.program[pc];
    std::uint32_t* reg = ins.reg < m.registers ? &state[1 + ins.reg] : nullptr;
    switch (ins.op) {
      case Instruction::Op::kInc:
        if (reg && *reg < m.cap) ++*reg;
        ++pc;
        break;
      case Instruction::Op::kDec:
        if (reg && *reg > 0) --*reg;
        ++pc;
        break;
      case Instruction::Op::kJz:
        pc = (reg && *reg == 0) ? ins.target : pc + 1;
        break;
      case Instruction::Op::kJmp:
        pc = ins.target;
        break;
      case Instruction::Op::kQuery: {
        const std::uint32_t index = reg ? *reg : 0;
        const bool bit = index < oracle.size() && oracle[index];
        pc = bit ? ins.target : pc + 1;
        break;
      }
      case Instruction::Op::kHalt:
        return true;
    }
  }
}

std::vector<MachineSpec> machine_catalog(std::uint64_t seed, std::size_t count) {
  static const char* kFixed[] = {
      "HALT",
      "JMP 0",
      "regs=1 cap=7; INC 0; INC 0; INC 0; HALT",
      "regs=1 cap=7; QUERY 0 2; JMP 1; HALT",
      "regs=2 cap=7; INC 0; INC 0; QUERY 0 4; JMP 3; HALT",
      "regs=1 cap=3; INC 0; JMP 0",
  };
  std::vector<MachineSpec> out;
  for (const char* text : kFixed) {
    if (out.size() == count) return out;
    out.push_back(parse_machine(text));
  }
  std::mt19937_64 rng(seed);
  while (out.size() < count) {
    MachineSpec m;
    m.registers = 1 + static_cast<std::uint32_t>(rng() % 2);
    static constexpr std::uint32_t kCaps[] = {3, 7, 19};
    m.cap = kCaps[rng() % 3];
    const std::size_t len = 3 + rng() % 5;
    for (std::size_t i = 0; i < len; ++i) {
      Instruction ins;
      const auto reg = static_cast<std::uint32_t>(rng() % m.registers);
      const auto target = static_cast<std::uint32_t>(rng() % (len + 1));
      switch (rng() % 6) {
        case 0:
        case 1:
          ins = {Instruction::Op::kInc, reg, 0};
          break;
        case 2:
          ins = {Instruction::Op::kDec, reg, 0};
          break;
        case 3:
          ins = {Instruction::Op::kJz, reg, target};
          break;
        case 4:
          ins = {Instruction::Op::kJmp, 0, target};
          break;
        default:
          ins = {Instruction::Op::kQuery, reg, target};
          break;
      }
      m.program.push_back(ins);
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

struct Tower {
  const std::vector<MachineSpec>& machines;
  const FastSeq& A;
  std::map<std::pair<std::uint32_t, std::size_t>, bool> memo;

  bool eval(std::uint32_t level, std::size_t n) {
    auto key = std::pair{level, n};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result;
    if (level == 0) {
      result = halts(machines[n], {});
    } else {
      const Natural& reach = A.clamped(n);
      const std::size_t last = machines.size() - 1;
      const std::size_t upto = reach < Natural(last) ? static_cast<std::size_t>(reach) : last;
      std::vector<bool> oracle;
      for (std::size_t j = 0; j <= upto; ++j) oracle.push_back(eval(level - 1, j));
      result = halts(machines[n], oracle);
    }
    memo[key] = result;
    return result;
  }
};

}  // namespace

bool jump_tower_eval(std::uint32_t level, const std::vector<MachineSpec>& machines,
                     std::size_t n, const FastSeq& A) {
  if (n >= machines.size()) {
    throw ContractViolation("machine index " + std::to_string(n) + " out of range");
  }
  if (A.values.empty()) throw ContractViolation("jump tower needs a non-empty sequence");
  Tower t{machines, A, {}};
  return t.eval(level, n);
}

}  // namespace finitist::wellfounded
