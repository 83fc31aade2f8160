#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "rhl/instances.hpp"
#include "rhl/tensor.hpp"

namespace rhl {

enum class ChowMode {
    negatives,  // weight 1(y == -1)
    labels,     // weight y
};

// Order-m label moment tensor: sample mean of weight(y) * H_m(x).
struct ChowTensor {
    int order = 1;
    ChowMode mode = ChowMode::negatives;
    SymmetricTensor tensor;
    std::size_t sample_count = 0;
};

// d x d^{m-1} unfolding of an order-m tensor. The first tensor index selects
// the row; the remaining indices run through the columns with the second
// tensor index fastest. Stored column-major.
struct FlatMatrix {
    int rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(int r, std::size_t c) const {
        return data[c * static_cast<std::size_t>(rows) + static_cast<std::size_t>(r)];
    }
};

// Orthonormal direction set with per-column provenance: which tensor order
// produced the column and the singular value it carried before
// orthogonalization.
struct SubspaceBasis {
    int d = 0;
    std::vector<double> columns;  // d x size(), column-major
    std::vector<int> source_order;
    std::vector<double> singular_value;

    int size() const { return static_cast<int>(source_order.size()); }
    bool empty() const { return source_order.empty(); }
    const double* column(int j) const { return columns.data() + static_cast<std::size_t>(j) * d; }
};

struct DirectionParams {
    int max_order = 4;
    double tau_thr = 0.05;
    // Empirical Pr[y = -1]; estimated from the batch when left NaN.
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double mode_coin = 0.5;  // probability of picking negatives mode over labels mode
};

// Estimates the order-m Chow tensor from a labeled batch. Parallel over fixed
// 4096-sample chunks whose partial sums are combined in chunk order, so the
// result is bitwise identical for any worker count.
ChowTensor estimate_chow(const SampleBatch& samples, int m, ChowMode mode);

namespace reference {
// Serial twin of estimate_chow, kept for testing the parallel kernel.
ChowTensor estimate_chow(const SampleBatch& samples, int m, ChowMode mode);
}  // namespace reference

FlatMatrix flatten(const ChowTensor& chow);

// Collects the left singular directions with singular value above tau_thr
// from every tensor and orthonormalizes their union in order, dropping
// near-duplicates. An empty basis signals that no tensor carried usable
// spectral mass; callers fall back to a random direction.
SubspaceBasis extract_subspace(const std::vector<ChowTensor>& chows, double tau_thr);

// One coin flip picks negatives vs labels mode for all orders 1..max_order,
// the per-order tensors are estimated on the batch, the subspace is extracted
// at threshold tau_thr * gamma, and the returned direction is a random unit
// vector in its span (uniform on the sphere when the subspace is empty).
// Deterministic in (samples, params, seed).
std::vector<double> candidate_direction(const SampleBatch& samples, const DirectionParams& params,
                                        std::uint64_t seed);

}  // namespace rhl
