#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rhl/common.hpp"

namespace rhl {

// Dense symmetric tensor of the given order over R^d, row-major layout:
// offset(i_1..i_k) = sum_j i_j * d^{k-1-j}. Construction enforces the entry
// cap so callers cannot allocate unbounded dense arrays by accident.
struct SymmetricTensor {
    int d = 0;
    int order = 0;
    std::vector<double> data;

    std::size_t size() const { return data.size(); }
    double entry(const std::vector<int>& idx) const;
};

constexpr std::size_t kTensorEntryCap = 100000000;  // 1e8 dense entries

SymmetricTensor zero_tensor(int d, int order);

// acc += weight * H_order(x), where H_k is the normalized Hermite tensor:
// entry (i_1..i_k) with coordinate multiplicity profile a equals
// sqrt(prod_j a_j!) / sqrt(k!) * prod_j h_{a_j}(x_j).
void accumulate_hermite_into(SymmetricTensor& acc, const double* x, double weight);

SymmetricTensor hermite_tensor(const double* x, int d, int order);

// Full contraction <T, w tensor-power order>.
double contract_full(const SymmetricTensor& t, const double* w);

void scale_tensor(SymmetricTensor& t, double factor);

}  // namespace rhl
