#include "rrfnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrfnn/errors.hpp"

namespace rrfnn {

namespace {

bool all_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_positive(const Dims3& dims) {
    if (dims.bands == 0 || dims.rows == 0 || dims.cols == 0) {
        throw InvalidArgument("tensor dimensions must be positive, got " + to_string(dims));
    }
}

void require_length(std::span<const double> v, std::size_t expected, const char* what) {
    if (v.size() != expected) {
        throw ShapeError(std::string(what) + ": expected length " + std::to_string(expected) + ", got " +
                         std::to_string(v.size()));
    }
}

void require_cp_compatible(const CPFactorView& f, const Dims3& dims) {
    if (f.dims() != dims) {
        throw ShapeError("CP factors of dims " + to_string(f.dims()) + " cannot contract a tensor of dims " +
                         to_string(dims));
    }
}

}  // namespace

std::string to_string(const Dims3& dims) {
    return "(" + std::to_string(dims.bands) + ", " + std::to_string(dims.rows) + ", " + std::to_string(dims.cols) +
           ")";
}

Tensor3View::Tensor3View(Dims3 dims, std::span<const double> values) : dims_(dims), values_(values) {
    if (values.size() != dims.size()) {
        throw ShapeError("tensor view of dims " + to_string(dims) + " needs " + std::to_string(dims.size()) +
                         " values, got " + std::to_string(values.size()));
    }
}

Tensor3::Tensor3(Dims3 dims) : dims_(dims) {
    require_positive(dims);
    values_.assign(dims.size(), 0.0);
}

Tensor3::Tensor3(Dims3 dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    require_positive(dims);
    if (values_.size() != dims.size()) {
        throw ShapeError("tensor of dims " + to_string(dims) + " needs " + std::to_string(dims.size()) +
                         " values, got " + std::to_string(values_.size()));
    }
    if (!all_finite(values_)) throw InvalidArgument("tensor values must be finite");
}

CPFactorSet::CPFactorSet(std::size_t rank, std::size_t bands, std::size_t side)
    : rank_(rank), bands_(bands), side_(side) {
    if (rank == 0 || bands == 0 || side == 0) {
        throw InvalidArgument("CP factor set needs positive rank, bands and side");
    }
    spectral_.assign(rank * bands, 0.0);
    spatial_a_.assign(rank * side, 0.0);
    spatial_b_.assign(rank * side, 0.0);
}

CPFactorSet::CPFactorSet(const std::vector<std::vector<double>>& spectral,
                         const std::vector<std::vector<double>>& spatial_a,
                         const std::vector<std::vector<double>>& spatial_b) {
    rank_ = spectral.size();
    if (rank_ == 0 || spatial_a.size() != rank_ || spatial_b.size() != rank_) {
        throw ShapeError("CP factor groups must all hold the same positive number of terms");
    }
    bands_ = spectral.front().size();
    side_ = spatial_a.front().size();
    if (bands_ == 0 || side_ == 0) throw InvalidArgument("CP factor vectors must be non-empty");
    for (std::size_t k = 0; k < rank_; ++k) {
        require_length(spectral[k], bands_, "spectral factor");
        require_length(spatial_a[k], side_, "spatial factor a");
        require_length(spatial_b[k], side_, "spatial factor b");
        spectral_.insert(spectral_.end(), spectral[k].begin(), spectral[k].end());
        spatial_a_.insert(spatial_a_.end(), spatial_a[k].begin(), spatial_a[k].end());
        spatial_b_.insert(spatial_b_.end(), spatial_b[k].begin(), spatial_b[k].end());
    }
    if (!all_finite(spectral_) || !all_finite(spatial_a_) || !all_finite(spatial_b_)) {
        throw InvalidArgument("CP factors must be finite");
    }
}

Tensor3 outer3(std::span<const double> v3, std::span<const double> v2, std::span<const double> v1) {
    if (v3.empty() || v2.empty() || v1.empty()) {
        throw InvalidArgument("outer3 needs non-empty vectors");
    }
    if (!all_finite(v3) || !all_finite(v2) || !all_finite(v1)) {
        throw InvalidArgument("outer3 needs finite vectors");
    }
    Tensor3 out(Dims3{v3.size(), v2.size(), v1.size()});
    auto dst = out.values().begin();
    for (double a : v3) {
        for (double b : v2) {
            const double ab = a * b;
            for (double c : v1) *dst++ = ab * c;
        }
    }
    return out;
}

Tensor3 cp_reconstruct(const CPFactorView& factors) {
    Tensor3 out(factors.dims());
    auto values = out.values();
    for (std::size_t k = 0; k < factors.rank; ++k) {
        const auto w3 = factors.spectral_k(k);
        const auto w2 = factors.spatial_a_k(k);
        const auto w1 = factors.spatial_b_k(k);
        std::size_t n = 0;
        for (double a : w3) {
            for (double b : w2) {
                const double ab = a * b;
                for (double c : w1) values[n++] += ab * c;
            }
        }
    }
    return out;
}

double inner(const Tensor3View& x, const Tensor3View& y) {
    if (x.dims() != y.dims()) {
        throw ShapeError("inner product of tensors with dims " + to_string(x.dims()) + " and " +
                         to_string(y.dims()));
    }
    const auto a = x.values();
    const auto b = y.values();
    double sum = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) sum += a[n] * b[n];
    return sum;
}

Matrix contract_spectral(const Tensor3View& x, std::span<const double> v) {
    const Dims3& d = x.dims();
    require_length(v, d.bands, "contract_spectral weight vector");
    Matrix out{d.rows, d.cols, std::vector<double>(d.rows * d.cols, 0.0)};
    const std::size_t plane = d.rows * d.cols;
    const auto xs = x.values();
    for (std::size_t m = 0; m < d.bands; ++m) {
        const double w = v[m];
        const double* src = xs.data() + m * plane;
        for (std::size_t n = 0; n < plane; ++n) out.values[n] += w * src[n];
    }
    return out;
}

std::vector<double> contract_spatial(const Tensor3View& x, std::span<const double> row,
                                     std::span<const double> col) {
    const Dims3& d = x.dims();
    require_length(row, d.rows, "contract_spatial row factor");
    require_length(col, d.cols, "contract_spatial column factor");
    std::vector<double> out(d.bands, 0.0);
    const auto xs = x.values();
    for (std::size_t m = 0; m < d.bands; ++m) {
        double sum = 0.0;
        for (std::size_t j = 0; j < d.rows; ++j) {
            const double* src = xs.data() + d.offset(m, j, 0);
            double partial = 0.0;
            for (std::size_t i = 0; i < d.cols; ++i) partial += src[i] * col[i];
            sum += row[j] * partial;
        }
        out[m] = sum;
    }
    return out;
}

double cp_inner(const CPFactorView& factors, const Tensor3View& x) {
    require_cp_compatible(factors, x.dims());
    const Dims3& d = x.dims();
    const std::size_t plane = d.rows * d.cols;
    const auto xs = x.values();
    std::vector<double> reduced(plane);

    double total = 0.0;
    for (std::size_t k = 0; k < factors.rank; ++k) {
        const auto w3 = factors.spectral_k(k);
        const auto w2 = factors.spatial_a_k(k);
        const auto w1 = factors.spatial_b_k(k);

        std::fill(reduced.begin(), reduced.end(), 0.0);
        for (std::size_t m = 0; m < d.bands; ++m) {
            const double w = w3[m];
            const double* src = xs.data() + m * plane;
            for (std::size_t n = 0; n < plane; ++n) reduced[n] += w * src[n];
        }

        double term = 0.0;
        for (std::size_t j = 0; j < d.rows; ++j) {
            const double* row = reduced.data() + j * d.cols;
            double partial = 0.0;
            for (std::size_t i = 0; i < d.cols; ++i) partial += w1[i] * row[i];
            term += w2[j] * partial;
        }
        total += term;
    }
    return total;
}

}  // namespace rrfnn
