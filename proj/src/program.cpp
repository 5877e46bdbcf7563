#include "confbound/program.hpp"

#include <bit>
#include <cstring>

namespace confbound {

namespace {

std::size_t hash_instr(const Program::Instr& in) {
  std::uint64_t bits;
  std::memcpy(&bits, &in.value, sizeof(bits));
  std::uint64_t h = static_cast<std::uint64_t>(in.op) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::uint64_t>(in.a + 1) * 0xC2B2AE3D27D4EB4FULL;
  h ^= std::rotl(static_cast<std::uint64_t>(in.b + 1) * 0x165667B19E3779F9ULL, 17);
  h ^= std::rotl(bits, 29) ^ static_cast<std::uint64_t>(in.slot) << 3 ^ (in.const_pow ? 1 : 0);
  return static_cast<std::size_t>(h ^ (h >> 31));
}

bool same(const Program::Instr& x, const Program::Instr& y) {
  return x.op == y.op && x.a == y.a && x.b == y.b && x.slot == y.slot && x.const_pow == y.const_pow &&
         std::memcmp(&x.value, &y.value, sizeof(double)) == 0;
}

}  // namespace

int Program::intern(const Instr& ins) {
  auto& bucket = buckets_[hash_instr(ins) % buckets_.size()];
  for (int idx : bucket) {
    if (same(code_[idx], ins)) return idx;
  }
  code_.push_back(ins);
  int idx = static_cast<int>(code_.size()) - 1;
  bucket.push_back(idx);
  if (code_.size() > buckets_.size() * 2) {
    std::vector<std::vector<int>> grown(buckets_.size() * 4);
    for (int i = 0; i < static_cast<int>(code_.size()); ++i) {
      grown[hash_instr(code_[i]) % grown.size()].push_back(i);
    }
    buckets_.swap(grown);
  }
  return idx;
}

int Program::emit(const ExprNode& n) {
  Instr ins;
  ins.op = n.op;
  if (n.var_mask == 0 && n.op != Op::Const) {
    // Constant subtrees fold to a literal.
    ins.op = Op::Const;
    ins.value = Expr(std::make_shared<ExprNode>(n)).eval(std::array<double, 4>{});
    return intern(ins);
  }
  switch (n.op) {
    case Op::Const: ins.value = n.value; break;
    case Op::Pi: break;
    case Op::Var: ins.slot = n.slot; break;
    case Op::Pow:
      ins.a = emit(*n.a);
      if (n.b->var_mask == 0) {
        ins.const_pow = true;
        ins.value = Expr(n.b).eval(std::array<double, 4>{});
      } else {
        ins.b = emit(*n.b);
      }
      break;
    default:
      ins.a = emit(*n.a);
      if (n.b) ins.b = emit(*n.b);
      break;
  }
  return intern(ins);
}

int Program::add(const Expr& e) {
  outputs_.push_back(emit(e.node()));
  output_masks_.push_back(e.node().var_mask);
  var_mask_ |= e.node().var_mask;
  return static_cast<int>(outputs_.size()) - 1;
}

}  // namespace confbound
