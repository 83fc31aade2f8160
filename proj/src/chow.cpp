#include "rhl/chow.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "rhl/gaussian.hpp"
#include "rhl/rng.hpp"

namespace rhl {

namespace {

constexpr std::size_t kChunkSamples = 4096;  // fixed logical chunk, reduction order follows chunk index
constexpr std::size_t kMaxChunksInFlight = 64;
constexpr double kDropTol = 1e-8;  // Gram-Schmidt residual below this is a duplicate direction

double sample_weight(int y, ChowMode mode) {
    if (mode == ChowMode::negatives) return y == -1 ? 1.0 : 0.0;
    return static_cast<double>(y);
}

void validate_estimate_args(const SampleBatch& samples, int m) {
    if (samples.count == 0) throw argument_error("chow estimation needs a nonempty batch");
    if (samples.d < 1) throw argument_error("chow estimation needs dimension >= 1");
    if (m < 1) throw argument_error("chow order must be at least 1");
}

// Candidate direction from one tensor before orthogonalization.
struct SpectralColumn {
    double sigma = 0.0;
    Eigen::VectorXd v;
};

std::vector<SpectralColumn> spectral_columns(const ChowTensor& chow, double tau_thr) {
    const int d = chow.tensor.d;
    std::vector<SpectralColumn> cols;
    if (chow.order == 1) {
        Eigen::Map<const Eigen::VectorXd> v(chow.tensor.data.data(), d);
        const double sigma = v.norm();
        if (sigma > tau_thr) cols.push_back({sigma, v / sigma});
        return cols;
    }
    if (chow.order == 2) {
        // Row-major symmetric square matrix reads the same column-major.
        Eigen::Map<const Eigen::MatrixXd> mat(chow.tensor.data.data(), d, d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
        if (es.info() != Eigen::Success) throw numeric_error("order-2 eigendecomposition failed");
        for (int i = 0; i < d; ++i) {
            const double sigma = std::abs(es.eigenvalues()[i]);
            if (sigma > tau_thr) cols.push_back({sigma, es.eigenvectors().col(i)});
        }
        return cols;
    }
    // Higher orders: left singular directions of the d x d^{m-1} unfolding via
    // the d x d Gram matrix, so the factorization cost never scales with
    // d^{m-1}.
    const FlatMatrix flat = flatten(chow);
    Eigen::Map<const Eigen::MatrixXd> mat(flat.data.data(), flat.rows,
                                          static_cast<Eigen::Index>(flat.cols));
    const Eigen::MatrixXd gram = mat * mat.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw numeric_error("gram eigendecomposition failed");
    for (int i = 0; i < d; ++i) {
        const double sigma = std::sqrt(std::max(es.eigenvalues()[i], 0.0));
        if (sigma > tau_thr) cols.push_back({sigma, es.eigenvectors().col(i)});
    }
    return cols;
}

}  // namespace

namespace reference {

ChowTensor estimate_chow(const SampleBatch& samples, int m, ChowMode mode) {
    validate_estimate_args(samples, m);
    ChowTensor out;
    out.order = m;
    out.mode = mode;
    out.sample_count = samples.count;
    out.tensor = zero_tensor(samples.d, m);
    for (std::size_t i = 0; i < samples.count; ++i) {
        const double w = sample_weight(samples.ys[i], mode);
        if (w != 0.0) accumulate_hermite_into(out.tensor, samples.x(i), w);
    }
    scale_tensor(out.tensor, 1.0 / static_cast<double>(samples.count));
    return out;
}

}  // namespace reference

ChowTensor estimate_chow(const SampleBatch& samples, int m, ChowMode mode) {
    validate_estimate_args(samples, m);
    ChowTensor out;
    out.order = m;
    out.mode = mode;
    out.sample_count = samples.count;
    out.tensor = zero_tensor(samples.d, m);

    const std::size_t chunks = (samples.count + kChunkSamples - 1) / kChunkSamples;
    // Chunks are processed in waves so partial-sum memory stays bounded; the
    // serial combine always walks chunks in index order, which keeps the
    // floating-point reduction tree independent of the worker count.
    std::vector<std::vector<double>> partial(std::min(chunks, kMaxChunksInFlight));
    for (std::size_t wave = 0; wave < chunks; wave += kMaxChunksInFlight) {
        const std::size_t wave_end = std::min(wave + kMaxChunksInFlight, chunks);
        const std::ptrdiff_t wave_len = static_cast<std::ptrdiff_t>(wave_end - wave);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t slot = 0; slot < wave_len; ++slot) {
            const std::size_t ci = wave + static_cast<std::size_t>(slot);
            SymmetricTensor acc = zero_tensor(samples.d, m);
            const std::size_t begin = ci * kChunkSamples;
            const std::size_t end = std::min(begin + kChunkSamples, samples.count);
            for (std::size_t i = begin; i < end; ++i) {
                const double w = sample_weight(samples.ys[i], mode);
                if (w != 0.0) accumulate_hermite_into(acc, samples.x(i), w);
            }
            partial[static_cast<std::size_t>(slot)] = std::move(acc.data);
        }
        for (std::ptrdiff_t slot = 0; slot < wave_len; ++slot) {
            const std::vector<double>& p = partial[static_cast<std::size_t>(slot)];
            for (std::size_t j = 0; j < p.size(); ++j) out.tensor.data[j] += p[j];
        }
    }
    scale_tensor(out.tensor, 1.0 / static_cast<double>(samples.count));
    return out;
}

FlatMatrix flatten(const ChowTensor& chow) {
    const int d = chow.tensor.d;
    const int m = chow.order;
    if (d < 1 || m < 1) throw argument_error("flatten needs a materialized tensor");
    FlatMatrix out;
    out.rows = d;
    out.cols = chow.tensor.size() / static_cast<std::size_t>(d);
    out.data.resize(chow.tensor.size());

    // Tensor offsets are row-major (last index fastest); the matrix wants the
    // second index fastest in the column, so the trailing digits reverse.
    const std::size_t total = chow.tensor.size();
    std::vector<std::size_t> power(static_cast<std::size_t>(m > 1 ? m - 1 : 1), 1);
    for (std::size_t j = 1; j + 1 < static_cast<std::size_t>(m); ++j)
        power[j] = power[j - 1] * static_cast<std::size_t>(d);
    for (std::size_t offset = 0; offset < total; ++offset) {
        const int row = static_cast<int>(offset / out.cols);
        std::size_t rest = offset % out.cols;
        std::size_t col = 0;
        // Digits of rest from least significant: the last tensor index comes
        // out first and takes the largest column stride d^{m-2}.
        for (int t = 0; t < m - 1; ++t) {
            col += (rest % static_cast<std::size_t>(d)) * power[static_cast<std::size_t>(m - 2 - t)];
            rest /= static_cast<std::size_t>(d);
        }
        out.data[col * static_cast<std::size_t>(d) + static_cast<std::size_t>(row)] =
            chow.tensor.data[offset];
    }
    return out;
}

SubspaceBasis extract_subspace(const std::vector<ChowTensor>& chows, double tau_thr) {
    if (chows.empty()) throw argument_error("subspace extraction needs at least one tensor");
    if (!(tau_thr > 0.0)) throw argument_error("singular value threshold must be positive");
    const int d = chows.front().tensor.d;
    for (const ChowTensor& chow : chows) {
        if (chow.tensor.d != d) throw argument_error("tensors disagree on ambient dimension");
    }

    SubspaceBasis basis;
    basis.d = d;
    std::vector<Eigen::VectorXd> kept;
    for (const ChowTensor& chow : chows) {
        std::vector<SpectralColumn> cands = spectral_columns(chow, tau_thr);
        std::sort(cands.begin(), cands.end(),
                  [](const SpectralColumn& a, const SpectralColumn& b) { return a.sigma > b.sigma; });
        for (SpectralColumn& cand : cands) {
            Eigen::VectorXd v = std::move(cand.v);
            // Two Gram-Schmidt passes for orthogonality well below the drop
            // tolerance even when candidates nearly repeat earlier columns.
            for (int pass = 0; pass < 2; ++pass) {
                for (const Eigen::VectorXd& u : kept) v -= u.dot(v) * u;
            }
            const double residual = v.norm();
            if (residual <= kDropTol) continue;
            v /= residual;
            kept.push_back(v);
            basis.source_order.push_back(chow.order);
            basis.singular_value.push_back(cand.sigma);
            basis.columns.insert(basis.columns.end(), v.data(), v.data() + d);
        }
    }
    return basis;
}

std::vector<double> candidate_direction(const SampleBatch& samples, const DirectionParams& params,
                                        std::uint64_t seed) {
    if (samples.count == 0) throw argument_error("direction finding needs a nonempty batch");
    if (params.max_order < 1) throw argument_error("direction finding needs max order >= 1");
    if (!(params.tau_thr > 0.0)) throw argument_error("singular value threshold must be positive");
    if (!(params.mode_coin >= 0.0 && params.mode_coin <= 1.0))
        throw argument_error("mode coin probability must lie in [0, 1]");

    double gamma = params.gamma;
    if (std::isnan(gamma)) {
        std::size_t negatives = 0;
        for (std::size_t i = 0; i < samples.count; ++i) negatives += samples.ys[i] == -1 ? 1 : 0;
        gamma = static_cast<double>(negatives) / static_cast<double>(samples.count);
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw argument_error("gamma must lie in [0, 1]");

    Rng coin_rng = derive_rng(seed, stream::kDirectionCoin);
    const ChowMode mode = coin_rng.coin(params.mode_coin) ? ChowMode::negatives : ChowMode::labels;
    Rng span_rng = derive_rng(seed, stream::kDirectionSpan);

    // gamma == 0 makes the threshold degenerate (and leaves negatives-mode
    // tensors empty), so fall straight through to the random direction.
    if (gamma > 0.0) {
        std::vector<ChowTensor> chows;
        chows.reserve(static_cast<std::size_t>(params.max_order));
        for (int m = 1; m <= params.max_order; ++m) chows.push_back(estimate_chow(samples, m, mode));
        const SubspaceBasis basis = extract_subspace(chows, params.tau_thr * gamma);
        if (!basis.empty()) return random_unit_in_span(basis.columns, basis.d, basis.size(), span_rng);
    }
    return span_rng.unit_vector(samples.d);
}

}  // namespace rhl
