#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biabd/slcore.hpp"

namespace biabd {

// null is 0; locations are positive.
struct HeapModel {
  std::map<Expr, long long> stack;
  std::map<long long, std::map<std::string, long long>> heap;
};

std::string render(const HeapModel& m);

// Satisfaction with the heap exactly covered by the formula.
bool holds(const HeapModel& m, const SymbolicHeap& h);
bool holds(const HeapModel& m, const QFHeap& h);

// Calls `visit` for every model of `h` with at most `bound` cells, up to
// renaming of locations and order-preserving renaming of values. Stack
// variables are the free variables of `h` and of `context`; sorts are
// inferred from both. Stops early when `visit` returns false.
void for_each_model(const SymbolicHeap& h, const std::vector<SymbolicHeap>& context, int bound,
                    const std::function<bool(const HeapModel&)>& visit);

std::optional<HeapModel> counter_model(const SymbolicHeap& lhs, const SymbolicHeap& rhs, int bound);
bool entails_bounded(const SymbolicHeap& lhs, const SymbolicHeap& rhs, int bound);

}  // namespace biabd
