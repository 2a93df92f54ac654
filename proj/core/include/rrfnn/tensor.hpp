#pragma once

// Order-3 tensors and CP-factorized weight tensors.
//
// Mode convention used everywhere in the library: a tensor has dims
// (bands, rows, cols), i.e. spectral mode first, and is stored row-major with
// the spectral index slowest-varying:
//
//     offset(m, j, i) = (m * rows + j) * cols + i
//
// Patches cut from a hyperspectral cube and the hidden-layer weight tensors of
// the networks both follow it, so a weight tensor and a patch can be
// contracted element by element without any permutation.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rrfnn {

struct Dims3 {
    std::size_t bands = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    constexpr std::size_t size() const noexcept { return bands * rows * cols; }
    constexpr std::size_t offset(std::size_t m, std::size_t j, std::size_t i) const noexcept {
        return (m * rows + j) * cols + i;
    }
    friend constexpr bool operator==(const Dims3&, const Dims3&) = default;
};

std::string to_string(const Dims3& dims);

/// Non-owning read-only view of an order-3 tensor.
class Tensor3View {
public:
    Tensor3View() = default;
    /// Throws ShapeError if `values.size() != dims.size()`.
    Tensor3View(Dims3 dims, std::span<const double> values);

    const Dims3& dims() const noexcept { return dims_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator()(std::size_t m, std::size_t j, std::size_t i) const noexcept {
        return values_[dims_.offset(m, j, i)];
    }

private:
    Dims3 dims_;
    std::span<const double> values_;
};

/// Dense order-3 tensor of doubles.
class Tensor3 {
public:
    Tensor3() = default;
    /// Zero-filled tensor. Every dimension must be positive.
    explicit Tensor3(Dims3 dims);
    /// Takes ownership of `values`; they must be finite and match `dims`.
    Tensor3(Dims3 dims, std::vector<double> values);

    const Dims3& dims() const noexcept { return dims_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double& operator()(std::size_t m, std::size_t j, std::size_t i) noexcept {
        return values_[dims_.offset(m, j, i)];
    }
    double operator()(std::size_t m, std::size_t j, std::size_t i) const noexcept {
        return values_[dims_.offset(m, j, i)];
    }

    Tensor3View view() const noexcept { return Tensor3View(dims_, values_); }
    operator Tensor3View() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

private:
    Dims3 dims_;
    std::vector<double> values_;
};

/// Row-major dense matrix, used for the s x s intermediates of contractions.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values[r * cols + c]; }
};

/// Read-only view of the R rank-one terms of a CP-factorized tensor of dims
/// (bands, side, side). Term k is spectral_k ∘ spatial_a_k ∘ spatial_b_k where
/// spatial_a indexes rows and spatial_b indexes columns. Factor vectors of the
/// same group are stored back to back, term after term.
struct CPFactorView {
    std::size_t rank = 0;
    std::size_t bands = 0;
    std::size_t side = 0;
    std::span<const double> spectral;   // rank * bands
    std::span<const double> spatial_a;  // rank * side
    std::span<const double> spatial_b;  // rank * side

    std::span<const double> spectral_k(std::size_t k) const { return spectral.subspan(k * bands, bands); }
    std::span<const double> spatial_a_k(std::size_t k) const { return spatial_a.subspan(k * side, side); }
    std::span<const double> spatial_b_k(std::size_t k) const { return spatial_b.subspan(k * side, side); }
    Dims3 dims() const noexcept { return {bands, side, side}; }
};

/// Owning set of CP factors for one hidden neuron.
class CPFactorSet {
public:
    CPFactorSet() = default;
    /// Zero factors. rank, bands and side must be positive.
    CPFactorSet(std::size_t rank, std::size_t bands, std::size_t side);
    /// Builds from per-term vectors; every group must have `rank` entries of
    /// consistent length and all values must be finite.
    CPFactorSet(const std::vector<std::vector<double>>& spectral,
                const std::vector<std::vector<double>>& spatial_a,
                const std::vector<std::vector<double>>& spatial_b);

    std::size_t rank() const noexcept { return rank_; }
    std::size_t bands() const noexcept { return bands_; }
    std::size_t side() const noexcept { return side_; }

    std::span<double> spectral(std::size_t k) { return std::span(spectral_).subspan(k * bands_, bands_); }
    std::span<double> spatial_a(std::size_t k) { return std::span(spatial_a_).subspan(k * side_, side_); }
    std::span<double> spatial_b(std::size_t k) { return std::span(spatial_b_).subspan(k * side_, side_); }

    CPFactorView view() const noexcept { return {rank_, bands_, side_, spectral_, spatial_a_, spatial_b_}; }
    operator CPFactorView() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

private:
    std::size_t rank_ = 0;
    std::size_t bands_ = 0;
    std::size_t side_ = 0;
    std::vector<double> spectral_;
    std::vector<double> spatial_a_;
    std::vector<double> spatial_b_;
};

/// result(m, j, i) = v3[m] * v2[j] * v1[i]. Throws InvalidArgument on an
/// empty or non-finite vector.
Tensor3 outer3(std::span<const double> v3, std::span<const double> v2, std::span<const double> v1);

/// Sum of the R rank-one terms.
Tensor3 cp_reconstruct(const CPFactorView& factors);

/// Frobenius inner product. Throws ShapeError naming both dims on mismatch.
double inner(const Tensor3View& x, const Tensor3View& y);

/// out(j, i) = sum_m v[m] * x(m, j, i).
Matrix contract_spectral(const Tensor3View& x, std::span<const double> v);

/// out[m] = sum_{j,i} x(m, j, i) * row[j] * col[i]. This is the partial
/// derivative of a rank-one contraction with respect to its spectral factor.
std::vector<double> contract_spatial(const Tensor3View& x, std::span<const double> row,
                                     std::span<const double> col);

/// <cp_reconstruct(factors), x> without materializing the full tensor: each
/// term is reduced over the spectral mode first (to an s x s matrix) and then
/// against both spatial factors. O(R s^2 b) time, O(s^2) extra memory.
double cp_inner(const CPFactorView& factors, const Tensor3View& x);

}  // namespace rrfnn
