#include "rhl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "rhl/gaussian.hpp"

namespace rhl {

namespace {

// Shared per-(d, order) enumeration of index groups. Each group is one sorted
// multi-index: the normalization coefficient for its multiplicity profile and
// the dense offsets of all distinct permutations.
struct EntryPlan {
    int d = 0;
    int order = 0;
    // Sorted coordinates per group, flattened (order entries per group).
    std::vector<int> coords;
    std::vector<double> coeffs;
    // positions[group_start[g] .. group_start[g+1]) are dense offsets.
    std::vector<std::size_t> group_start;
    std::vector<std::uint32_t> positions;

    std::size_t group_count() const { return coeffs.size(); }
};

void check_shape(int d, int order) {
    if (d < 1) throw argument_error("tensor dimension must be positive");
    if (order < 1 || order > kHermiteMaxDegree) {
        throw argument_error("tensor order must be in [1, 64], got " + std::to_string(order));
    }
    double entries = 1.0;
    for (int i = 0; i < order; ++i) entries *= d;
    if (entries > double(kTensorEntryCap)) {
        throw resource_error("dense tensor with d = " + std::to_string(d) + ", order = " +
                             std::to_string(order) + " exceeds the entry cap");
    }
}

std::shared_ptr<const EntryPlan> build_plan(int d, int order) {
    auto plan = std::make_shared<EntryPlan>();
    plan->d = d;
    plan->order = order;
    std::vector<int> idx(order, 0);
    std::vector<double> lfact(order + 1, 0.0);
    for (int i = 1; i <= order; ++i) lfact[i] = lfact[i - 1] + std::log(double(i));

    // Enumerate nondecreasing multi-indices with an odometer.
    while (true) {
        // Multiplicity profile of this sorted index.
        double log_prod_fact = 0.0;
        int run = 1;
        for (int j = 1; j <= order; ++j) {
            if (j < order && idx[j] == idx[j - 1]) {
                ++run;
            } else {
                log_prod_fact += lfact[run];
                run = 1;
            }
        }
        const double coeff = std::exp(0.5 * (log_prod_fact - lfact[order]));
        plan->coeffs.push_back(coeff);
        plan->group_start.push_back(plan->positions.size());
        for (int j = 0; j < order; ++j) plan->coords.push_back(idx[j]);

        std::vector<int> perm = idx;
        do {
            std::uint64_t off = 0;
            for (int j = 0; j < order; ++j) off = off * d + std::uint64_t(perm[j]);
            plan->positions.push_back(static_cast<std::uint32_t>(off));
        } while (std::next_permutation(perm.begin(), perm.end()));

        // Advance to the next nondecreasing index.
        int j = order - 1;
        while (j >= 0 && idx[j] == d - 1) --j;
        if (j < 0) break;
        const int v = idx[j] + 1;
        for (int l = j; l < order; ++l) idx[l] = v;
    }
    plan->group_start.push_back(plan->positions.size());
    return plan;
}

const EntryPlan& entry_plan(int d, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const EntryPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{d, order}];
    if (!slot) slot = build_plan(d, order);
    return *slot;
}

}  // namespace

double SymmetricTensor::entry(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != order) throw argument_error("tensor index arity mismatch");
    std::size_t off = 0;
    for (int i : idx) {
        if (i < 0 || i >= d) throw argument_error("tensor index out of range");
        off = off * d + std::size_t(i);
    }
    return data[off];
}

SymmetricTensor zero_tensor(int d, int order) {
    check_shape(d, order);
    SymmetricTensor t;
    t.d = d;
    t.order = order;
    std::size_t entries = 1;
    for (int i = 0; i < order; ++i) entries *= std::size_t(d);
    t.data.assign(entries, 0.0);
    return t;
}

void accumulate_hermite_into(SymmetricTensor& acc, const double* x, double weight) {
    const int d = acc.d;
    const int k = acc.order;
    const EntryPlan& plan = entry_plan(d, k);

    // Per-coordinate Hermite values h_0..h_k.
    std::vector<double> herm(std::size_t(d) * (k + 1));
    for (int j = 0; j < d; ++j) hermite_values(k, x[j], herm.data() + std::size_t(j) * (k + 1));

    const std::size_t groups = plan.group_count();
    for (std::size_t g = 0; g < groups; ++g) {
        const int* coords = plan.coords.data() + g * std::size_t(k);
        double value = plan.coeffs[g];
        // prod_j h_{a_j}(x_j) over the multiplicity runs of the sorted index.
        int run = 1;
        for (int j = 1; j <= k; ++j) {
            if (j < k && coords[j] == coords[j - 1]) {
                ++run;
            } else {
                value *= herm[std::size_t(coords[j - 1]) * (k + 1) + run];
                run = 1;
            }
        }
        value *= weight;
        for (std::size_t p = plan.group_start[g]; p < plan.group_start[g + 1]; ++p) {
            acc.data[plan.positions[p]] += value;
        }
    }
}

SymmetricTensor hermite_tensor(const double* x, int d, int order) {
    SymmetricTensor t = zero_tensor(d, order);
    accumulate_hermite_into(t, x, 1.0);
    return t;
}

double contract_full(const SymmetricTensor& t, const double* w) {
    const EntryPlan& plan = entry_plan(t.d, t.order);
    const int k = t.order;
    double acc = 0.0;
    for (std::size_t g = 0; g < plan.group_count(); ++g) {
        const int* coords = plan.coords.data() + g * std::size_t(k);
        double wp = 1.0;
        for (int j = 0; j < k; ++j) wp *= w[coords[j]];
        // The coordinate product is permutation invariant, so it multiplies
        // the sum of the tensor entries across the group.
        double entry_sum = 0.0;
        for (std::size_t p = plan.group_start[g]; p < plan.group_start[g + 1]; ++p) {
            entry_sum += t.data[plan.positions[p]];
        }
        acc += wp * entry_sum;
    }
    return acc;
}

void scale_tensor(SymmetricTensor& t, double factor) {
    for (double& v : t.data) v *= factor;
}

}  // namespace rhl
