#ifndef FINITIST_WELLFOUNDED_HPP
#define FINITIST_WELLFOUNDED_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finitist/fastgrow.hpp"

namespace finitist::wellfounded {

using fastgrow::FastSeq;

enum class Truth { kWellFounded, kIllFounded };

// A strict order x > y ("y is a successor of x") on naturals.
//
//   pred                 x > x-1
//   succ                 x > x+1 (ill-founded)
//   omega2               codes 2^b * 3^a of pairs (a, b), lexicographic
//   dag:<seed>:<n>:<d>   random DAG on 0..n-1, edges u > v only for v < u,
//                        each present with probability d
//   cyclic:<seed>:<n>:<d> the same plus a cycle reachable from n-1
//   graph:<n>:<u>-<v>,.. explicit edges
class RelationSpec {
 public:
  enum class Kind { kPred, kSucc, kOmega2, kGraph };

  static RelationSpec parse(std::string_view name);
  static RelationSpec pred(std::uint64_t start = 5);
  static RelationSpec succ(std::uint64_t start = 0);
  static RelationSpec omega2(std::uint64_t a = 2, std::uint64_t b = 3);
  static RelationSpec graph(std::size_t nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                            std::string name = "graph");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // Default start: 5 for pred, 0 for succ, the code of (2,3) for omega2 and
  // the top node n-1 for graphs.
  std::uint64_t start() const { return start_; }
  RelationSpec with_start(std::uint64_t start) const;

  // Whether x belongs to the field (non-codes are outside omega2, nodes
  // beyond n outside a graph).
  bool in_field(std::uint64_t x) const;

  // Successors of x strictly below `bound`, ascending. For omega2 only the
  // greatest one is returned: the order is linear, so the greatest successor
  // dominates every other for the purpose of descending further.
  std::vector<std::uint64_t> successors(std::uint64_t x, std::uint64_t bound) const;

  // Analytic status of the order restricted to elements reachable from
  // `start`.
  Truth ground_truth(std::uint64_t start) const;
  Truth ground_truth() const { return ground_truth(start_); }
  // Rank annotation where known ("5", "w*2+3", "inf").
  std::string rank(std::uint64_t start) const;

  // Graph access (Kind::kGraph).
  std::size_t nodes() const { return adjacency_.size(); }
  const std::vector<std::vector<std::uint32_t>>& adjacency() const { return adjacency_; }

 private:
  Kind kind_ = Kind::kPred;
  std::string name_;
  std::uint64_t start_ = 0;
  std::vector<std::vector<std::uint32_t>> adjacency_;  // edges u -> v with u > v in the order
};

std::uint64_t omega2_code(std::uint64_t a, std::uint64_t b);
// (a, b) for a code, nullopt for non-codes.
std::optional<std::pair<std::uint64_t, std::uint64_t>> omega2_decode(std::uint64_t code);

// Size of the input `start` for r: its binary length for numeric orders,
// the node count for graphs. Sequences handed to the search should have
// A(0) above it.
std::uint64_t input_size(const RelationSpec& r, std::uint64_t start);

struct WfVerdict {
  Truth verdict = Truth::kWellFounded;  // kIllFounded means evidence found
  std::vector<std::uint64_t> path;      // evidence path, start first
  std::size_t longest = 0;              // longest bounded chain, in steps, capped at the target
  std::size_t target = 0;               // steps needed for evidence
};

// Descends from `start`; step j (j >= 1) must land below A(m + j). A path of
// |A| - 1 - m steps reaches the end of A and is reported as evidence of an
// infinite path; otherwise the bounded tree is exhausted and the relation is
// reported well-founded from `start`. Smaller successors are explored first.
WfVerdict bounded_wf_search(const RelationSpec& r, std::uint64_t start, const FastSeq& A,
                            std::size_t def_len = 0);

enum class Acceptance { kAccepted, kRejected };

// Rejected iff some x_0 <= input_size in the field starts a descending path
// x_0 > x_1 > ... of |A| - 1 steps with x_j < A(j). Requires A(0) > input_size.
Acceptance path_acceptance(const RelationSpec& order, const FastSeq& A, std::uint64_t input_size);

// Bit per relation (from its default start): 1 when reported well-founded.
std::vector<bool> partial_hyperjump(const std::vector<RelationSpec>& relations, const FastSeq& A);

// ---- bounded-register machines ----------------------------------------------

struct Instruction {
  enum class Op { kInc, kDec, kJz, kJmp, kQuery, kHalt };
  Op op = Op::kHalt;
  std::uint32_t reg = 0;
  std::uint32_t target = 0;
};

// Registers saturate at `cap`, so (pc, registers) ranges over a finite set
// and halting is decided by detecting a repeated state. A jump past the end
// halts. QUERY r t jumps to t when the oracle bit at index reg[r] is set.
struct MachineSpec {
  std::uint32_t registers = 2;
  std::uint32_t cap = 7;
  std::vector<Instruction> program;
};

// Semicolon-separated instructions: `INC r`, `DEC r`, `JZ r t`, `JMP t`,
// `QUERY r t`, `HALT`, optionally prefixed by `regs=<n> cap=<c>;`.
MachineSpec parse_machine(std::string_view text);
std::string render_machine(const MachineSpec& m);

// Oracle bits; indices past the end read as 0.
bool halts(const MachineSpec& m, const std::vector<bool>& oracle);

// Deterministic catalog of `count` machines mixing plain loops, halting
// programs and oracle queries.
std::vector<MachineSpec> machine_catalog(std::uint64_t seed = 1, std::size_t count = 20);

// Level 0: halting with the empty oracle. Level i+1 on n: level-i bits for
// indices j <= A(n) (A clamped to its last element past the end), then
// machine n run against them; queries outside the computed range read 0.
bool jump_tower_eval(std::uint32_t level, const std::vector<MachineSpec>& machines,
                     std::size_t n, const FastSeq& A);

}  // namespace finitist::wellfounded

#endif  // FINITIST_WELLFOUNDED_HPP
