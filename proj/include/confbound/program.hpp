#pragma once

// A flat, hash-consed evaluation tape for a set of expressions. Identical
// subtrees across all registered expressions are evaluated once per point.

#include <array>
#include <cstdint>
#include <vector>

#include "confbound/expr.hpp"

namespace confbound {

class Program {
 public:
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    double value = 0.0;  // Const value, or the exponent of a constant power
    int slot = 0;
    bool const_pow = false;
  };

  // Registers an expression and returns its output index.
  int add(const Expr& e);
  int outputs() const { return static_cast<int>(outputs_.size()); }
  int size() const { return static_cast<int>(code_.size()); }
  // Bit k set when some output depends on x<k>.
  int var_mask() const { return var_mask_; }
  int output_var_mask(int k) const { return output_masks_[k]; }

  template <class T>
  void run(const std::array<T, 4>& x, std::vector<T>& regs) const;
  template <class T>
  const T& output(const std::vector<T>& regs, int k) const {
    return regs[outputs_[k]];
  }

 private:
  int emit(const ExprNode& n);
  int intern(const Instr& ins);

  std::vector<Instr> code_;
  std::vector<int> outputs_;
  std::vector<int> output_masks_;
  int var_mask_ = 0;
  // Hash table for structural sharing, keyed by instruction fields.
  std::vector<std::vector<int>> buckets_ = std::vector<std::vector<int>>(1024);
};

template <class T>
void Program::run(const std::array<T, 4>& x, std::vector<T>& regs) const {
  using namespace expr_detail;
  regs.resize(code_.size());
  try {
    for (std::size_t k = 0; k < code_.size(); ++k) {
      const Instr& in = code_[k];
      switch (in.op) {
        case Op::Const: regs[k] = T(in.value); break;
        case Op::Pi: regs[k] = T(std::numbers::pi); break;
        case Op::Var: regs[k] = x[in.slot]; break;
        case Op::Add: regs[k] = regs[in.a] + regs[in.b]; break;
        case Op::Sub: regs[k] = regs[in.a] - regs[in.b]; break;
        case Op::Mul: regs[k] = regs[in.a] * regs[in.b]; break;
        case Op::Div: regs[k] = divide(regs[in.a], regs[in.b]); break;
        case Op::Neg: regs[k] = -regs[in.a]; break;
        case Op::Pow:
          regs[k] = in.const_pow ? power(regs[in.a], in.value) : exp_log_power(regs[in.a], regs[in.b]);
          break;
        default: regs[k] = apply(in.op, regs[in.a]); break;
      }
    }
  } catch (const JetDomainError& e) {
    double pt[4];
    for (int i = 0; i < 4; ++i) {
      if constexpr (std::is_same_v<T, double>) {
        pt[i] = x[i];
      } else {
        pt[i] = x[i].value();
      }
    }
    throw_domain(e.what(), pt);
  }
}

}  // namespace confbound
