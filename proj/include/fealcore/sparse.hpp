#pragma once

#include "backend.hpp"
#include "error.hpp"
#include "tensor.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace fealcore {

/// Coordinate-format sparse matrix. Values are absent (pattern only), [nnz],
/// or [B, nnz] with every batch slice sharing the index pattern.
class COOMatrix {
public:
    COOMatrix() : indices_({2, 0}) {}

    COOMatrix(IndexTensor indices, std::optional<FloatTensor> values, Index nrows, Index ncols,
              bool coalesced = false)
        : indices_(std::move(indices)), values_(std::move(values)), nrows_(nrows), ncols_(ncols),
          coalesced_(coalesced)
    {
        FEALCORE_THROW_IF(nrows < 0 || ncols < 0, InvalidArgument, "COOMatrix: negative shape");
        FEALCORE_THROW_IF(indices_.ndim() != 2 || indices_.shape(0) != 2, InvalidArgument,
                          "COOMatrix: indices must be [2, nnz]");
        const Index nnz = indices_.shape(1);
        if (values_) {
            FEALCORE_THROW_IF(values_->ndim() < 1 || values_->ndim() > 2 ||
                                  values_->shape(values_->ndim() - 1) != nnz,
                              InvalidArgument, "COOMatrix: values must be [nnz] or [B, nnz] with nnz = ", nnz);
        }
        for (Index k = 0; k < nnz; ++k) {
            FEALCORE_THROW_IF(indices_(0, k) < 0 || indices_(0, k) >= nrows || indices_(1, k) < 0 ||
                                  indices_(1, k) >= ncols,
                              InvalidArgument, "COOMatrix: entry ", k, " (", indices_(0, k), ", ",
                              indices_(1, k), ") outside ", nrows, "x", ncols);
        }
    }

    /// Empty matrix with the given shape and batch count (0 = unbatched, -1 = pattern only).
    static COOMatrix empty(Index nrows, Index ncols, Index batch = 0)
    {
        std::optional<FloatTensor> v;
        if (batch == 0) v = FloatTensor({0});
        if (batch > 0) v = FloatTensor({batch, 0});
        return COOMatrix(IndexTensor({2, 0}), std::move(v), nrows, ncols, true);
    }

    [[nodiscard]] Index nrows() const noexcept { return nrows_; }
    [[nodiscard]] Index ncols() const noexcept { return ncols_; }
    [[nodiscard]] Index nnz() const noexcept { return indices_.shape(1); }
    [[nodiscard]] bool has_values() const noexcept { return values_.has_value(); }
    [[nodiscard]] bool is_batched() const noexcept { return values_ && values_->ndim() == 2; }
    /// Batch count B, or 0 when values are unbatched or absent.
    [[nodiscard]] Index batch() const noexcept { return is_batched() ? values_->shape(0) : 0; }
    [[nodiscard]] bool coalesced() const noexcept { return coalesced_; }

    [[nodiscard]] const IndexTensor& indices() const noexcept { return indices_; }
    [[nodiscard]] const FloatTensor& values() const
    {
        FEALCORE_THROW_IF(!values_, PatternOnlyError, "COOMatrix: pattern-only matrix has no values");
        return *values_;
    }
    [[nodiscard]] const std::optional<FloatTensor>& maybe_values() const noexcept { return values_; }

private:
    IndexTensor indices_;
    std::optional<FloatTensor> values_;
    Index nrows_ = 0;
    Index ncols_ = 0;
    bool coalesced_ = true;
};

/// Compressed sparse row matrix with the same value conventions as COOMatrix.
class CSRMatrix {
public:
    CSRMatrix() : indptr_({1}) {}

    CSRMatrix(IndexTensor indptr, IndexTensor col_indices, std::optional<FloatTensor> values, Index nrows,
              Index ncols)
        : indptr_(std::move(indptr)), col_(std::move(col_indices)), values_(std::move(values)), nrows_(nrows),
          ncols_(ncols)
    {
        FEALCORE_THROW_IF(indptr_.ndim() != 1 || indptr_.size() != nrows + 1, InvalidArgument,
                          "CSRMatrix: indptr must have nrows + 1 = ", nrows + 1, " entries");
        FEALCORE_THROW_IF(indptr_[0] != 0 || indptr_[nrows] != col_.size(), InvalidArgument,
                          "CSRMatrix: indptr must start at 0 and end at nnz");
        for (Index r = 0; r < nrows; ++r) {
            FEALCORE_THROW_IF(indptr_[r + 1] < indptr_[r], InvalidArgument, "CSRMatrix: indptr decreases at row ", r);
            for (Index k = indptr_[r]; k < indptr_[r + 1]; ++k) {
                FEALCORE_THROW_IF(col_[k] < 0 || col_[k] >= ncols, InvalidArgument, "CSRMatrix: column ",
                                  col_[k], " out of range in row ", r);
                FEALCORE_THROW_IF(k > indptr_[r] && col_[k] <= col_[k - 1], InvalidArgument,
                                  "CSRMatrix: columns not sorted and unique in row ", r);
            }
        }
        if (values_) {
            FEALCORE_THROW_IF(values_->ndim() < 1 || values_->ndim() > 2 ||
                                  values_->shape(values_->ndim() - 1) != col_.size(),
                              InvalidArgument, "CSRMatrix: values must be [nnz] or [B, nnz]");
        }
    }

    [[nodiscard]] Index nrows() const noexcept { return nrows_; }
    [[nodiscard]] Index ncols() const noexcept { return ncols_; }
    [[nodiscard]] Index nnz() const noexcept { return col_.size(); }
    [[nodiscard]] bool has_values() const noexcept { return values_.has_value(); }
    [[nodiscard]] bool is_batched() const noexcept { return values_ && values_->ndim() == 2; }
    [[nodiscard]] Index batch() const noexcept { return is_batched() ? values_->shape(0) : 0; }

    [[nodiscard]] const IndexTensor& indptr() const noexcept { return indptr_; }
    [[nodiscard]] const IndexTensor& col_indices() const noexcept { return col_; }
    [[nodiscard]] const FloatTensor& values() const
    {
        FEALCORE_THROW_IF(!values_, PatternOnlyError, "CSRMatrix: pattern-only matrix has no values");
        return *values_;
    }
    [[nodiscard]] const std::optional<FloatTensor>& maybe_values() const noexcept { return values_; }

private:
    IndexTensor indptr_;
    IndexTensor col_;
    std::optional<FloatTensor> values_;
    Index nrows_ = 0;
    Index ncols_ = 0;
};

namespace detail {

/// Number of value slices (1 when unbatched).
inline Index slices(const std::optional<FloatTensor>& v) { return v && v->ndim() == 2 ? v->shape(0) : 1; }

} // namespace detail

/// Concatenate the entries of a and b. The result is not coalesced.
inline COOMatrix coo_add(const COOMatrix& a, const COOMatrix& b)
{
    FEALCORE_THROW_IF(a.nrows() != b.nrows() || a.ncols() != b.ncols(), InvalidArgument, "coo_add: shape ",
                      a.nrows(), "x", a.ncols(), " vs ", b.nrows(), "x", b.ncols());
    FEALCORE_THROW_IF(a.has_values() != b.has_values(), PatternOnlyError,
                      "coo_add: cannot add a pattern-only matrix to a valued one");
    FEALCORE_THROW_IF(a.batch() != b.batch(), InvalidArgument, "coo_add: batch ", a.batch(), " vs ", b.batch());
    const Index na = a.nnz(), nb = b.nnz(), n = na + nb;
    IndexTensor idx({2, n});
    for (Index r = 0; r < 2; ++r) {
        for (Index k = 0; k < na; ++k) idx(r, k) = a.indices()(r, k);
        for (Index k = 0; k < nb; ++k) idx(r, na + k) = b.indices()(r, k);
    }
    std::optional<FloatTensor> vals;
    if (a.has_values()) {
        const Index s = detail::slices(a.maybe_values());
        FloatTensor v(a.is_batched() ? FloatTensor::Shape{s, n} : FloatTensor::Shape{n});
        for (Index bb = 0; bb < s; ++bb) {
            for (Index k = 0; k < na; ++k) v[bb * n + k] = a.values()[bb * na + k];
            for (Index k = 0; k < nb; ++k) v[bb * n + na + k] = b.values()[bb * nb + k];
        }
        vals = std::move(v);
    }
    return COOMatrix(std::move(idx), std::move(vals), a.nrows(), a.ncols(), n == 0);
}

/// Sum duplicate entries. Output entries are sorted by (row, col) and unique;
/// pattern-only inputs are merged as a logical OR.
inline COOMatrix coalesce(const COOMatrix& a)
{
    if (a.coalesced()) return a;
    const Index nnz = a.nnz();
    IndexTensor keys({nnz, 2});
    for (Index k = 0; k < nnz; ++k) {
        keys(k, 0) = a.indices()(0, k);
        keys(k, 1) = a.indices()(1, k);
    }
    Backend& be = bm();
    UniqueRows u = be.unique_rows(keys);
    keys = IndexTensor();
    const Index nu = u.unique.shape(0);
    IndexTensor idx({2, nu});
    for (Index k = 0; k < nu; ++k) {
        idx(0, k) = u.unique(k, 0);
        idx(1, k) = u.unique(k, 1);
    }
    std::optional<FloatTensor> vals;
    if (a.has_values()) {
        const Index s = detail::slices(a.maybe_values());
        FloatTensor v(a.is_batched() ? FloatTensor::Shape{s, nu} : FloatTensor::Shape{nu});
        const FloatTensor zero({nu});
        const std::span<const Index> inv(u.inverse.data());
        for (Index b = 0; b < s; ++b) {
            const std::span<const double> slice =
                std::span<const double>(a.values().data()).subspan(static_cast<std::size_t>(b * nnz),
                                                                   static_cast<std::size_t>(nnz));
            const FloatTensor acc = be.scatter_add(zero, inv, slice);
            std::copy(acc.data().begin(), acc.data().end(), v.data().begin() + b * nu);
        }
        vals = std::move(v);
    }
    return COOMatrix(std::move(idx), std::move(vals), a.nrows(), a.ncols(), true);
}

inline CSRMatrix to_csr(const COOMatrix& a)
{
    const COOMatrix c = coalesce(a);
    const Index nnz = c.nnz();
    IndexTensor indptr({c.nrows() + 1});
    IndexTensor col({nnz});
    for (Index k = 0; k < nnz; ++k) {
        ++indptr[c.indices()(0, k) + 1];
        col[k] = c.indices()(1, k);
    }
    for (Index r = 0; r < c.nrows(); ++r) indptr[r + 1] += indptr[r];
    return CSRMatrix(std::move(indptr), std::move(col), c.maybe_values(), c.nrows(), c.ncols());
}

inline COOMatrix to_coo(const CSRMatrix& a)
{
    const Index nnz = a.nnz();
    IndexTensor idx({2, nnz});
    for (Index r = 0; r < a.nrows(); ++r)
        for (Index k = a.indptr()[r]; k < a.indptr()[r + 1]; ++k) {
            idx(0, k) = r;
            idx(1, k) = a.col_indices()[k];
        }
    return COOMatrix(std::move(idx), a.maybe_values(), a.nrows(), a.ncols(), true);
}

/// Dense equivalent, [nrows, ncols] or [B, nrows, ncols].
inline FloatTensor to_dense(const COOMatrix& a)
{
    const FloatTensor& v = a.values();
    const Index s = detail::slices(a.maybe_values());
    const Index nnz = a.nnz(), nr = a.nrows(), nc = a.ncols();
    FloatTensor d(a.is_batched() ? FloatTensor::Shape{s, nr, nc} : FloatTensor::Shape{nr, nc});
    for (Index b = 0; b < s; ++b)
        for (Index k = 0; k < nnz; ++k) d[(b * nr + a.indices()(0, k)) * nc + a.indices()(1, k)] += v[b * nnz + k];
    return d;
}

inline FloatTensor to_dense(const CSRMatrix& a) { return to_dense(to_coo(a)); }

/// y = A x for every batch slice. A batched matrix broadcasts an unbatched x,
/// and an unbatched matrix is applied to every row of a batched x.
inline FloatTensor spmv(const CSRMatrix& a, const FloatTensor& x)
{
    const FloatTensor& v = a.values();
    FEALCORE_THROW_IF(x.ndim() < 1 || x.ndim() > 2 || x.shape(x.ndim() - 1) != a.ncols(), InvalidArgument,
                      "spmv: x must be [", a.ncols(), "] or [B, ", a.ncols(), "]");
    const Index sa = a.batch(), sx = x.ndim() == 2 ? x.shape(0) : 0;
    FEALCORE_THROW_IF(sa > 0 && sx > 0 && sa != sx, InvalidArgument, "spmv: batch ", sa, " vs ", sx);
    const Index s = std::max<Index>({sa, sx, 1});
    const Index nr = a.nrows(), nc = a.ncols(), nnz = a.nnz();
    FloatTensor y(sa > 0 || sx > 0 ? FloatTensor::Shape{s, nr} : FloatTensor::Shape{nr});
    const Index* ip = a.indptr().data().data();
    const Index* ci = a.col_indices().data().data();
    bm().parallel_for(nr, [&](Index r0, Index r1) {
        for (Index b = 0; b < s; ++b) {
            const double* vb = v.data().data() + (sa > 0 ? b * nnz : 0);
            const double* xb = x.data().data() + (sx > 0 ? b * nc : 0);
            double* yb = y.data().data() + b * nr;
            for (Index r = r0; r < r1; ++r) {
                double acc = 0.0;
                for (Index k = ip[r]; k < ip[r + 1]; ++k) acc += vb[k] * xb[ci[k]];
                yb[r] = acc;
            }
        }
    });
    return y;
}

inline FloatTensor spmv(const COOMatrix& a, const FloatTensor& x)
{
    FEALCORE_THROW_IF(!a.has_values(), PatternOnlyError, "spmv: pattern-only matrix");
    return spmv(to_csr(a), x);
}

/// Diagonal entries, [min(nrows, ncols)] or [B, min(nrows, ncols)]. Missing entries read as 0.
inline FloatTensor extract_diagonal(const CSRMatrix& a)
{
    const FloatTensor& v = a.values();
    const Index n = std::min(a.nrows(), a.ncols());
    const Index s = detail::slices(a.maybe_values()), nnz = a.nnz();
    FloatTensor d(a.is_batched() ? FloatTensor::Shape{s, n} : FloatTensor::Shape{n});
    for (Index r = 0; r < n; ++r)
        for (Index k = a.indptr()[r]; k < a.indptr()[r + 1]; ++k)
            if (a.col_indices()[k] == r)
                for (Index b = 0; b < s; ++b) d[b * n + r] = v[b * nnz + k];
    return d;
}

inline FloatTensor extract_diagonal(const COOMatrix& a)
{
    FEALCORE_THROW_IF(!a.has_values(), PatternOnlyError, "extract_diagonal: pattern-only matrix");
    FEALCORE_THROW_IF(!a.coalesced(), InvalidArgument, "extract_diagonal: matrix must be coalesced");
    return extract_diagonal(to_csr(a));
}

/// Zero the masked rows and columns and put 1 on their diagonal.
inline CSRMatrix set_rows_cols_identity(const CSRMatrix& a, const BoolTensor& mask)
{
    FEALCORE_THROW_IF(a.nrows() != a.ncols(), InvalidArgument, "set_rows_cols_identity: matrix is ",
                      a.nrows(), "x", a.ncols(), ", not square");
    FEALCORE_THROW_IF(mask.size() != a.nrows(), InvalidArgument, "set_rows_cols_identity: mask has ",
                      mask.size(), " entries for ", a.nrows(), " rows");
    const Index n = a.nrows(), nnz = a.nnz();
    const Index s = detail::slices(a.maybe_values());
    IndexTensor indptr({n + 1});
    std::vector<Index> keep;
    std::vector<Index> col;
    keep.reserve(static_cast<std::size_t>(nnz));
    col.reserve(static_cast<std::size_t>(nnz));
    constexpr Index k_unit = -1;
    for (Index r = 0; r < n; ++r) {
        if (mask[r]) {
            keep.push_back(k_unit);
            col.push_back(r);
        } else {
            for (Index k = a.indptr()[r]; k < a.indptr()[r + 1]; ++k) {
                if (mask[a.col_indices()[k]]) continue;
                keep.push_back(k);
                col.push_back(a.col_indices()[k]);
            }
        }
        indptr[r + 1] = static_cast<Index>(col.size());
    }
    const auto m = static_cast<Index>(col.size());
    std::optional<FloatTensor> vals;
    if (a.has_values()) {
        FloatTensor v(a.is_batched() ? FloatTensor::Shape{s, m} : FloatTensor::Shape{m});
        for (Index b = 0; b < s; ++b)
            for (Index k = 0; k < m; ++k) {
                const Index src = keep[static_cast<std::size_t>(k)];
                v[b * m + k] = src == k_unit ? 1.0 : a.values()[b * nnz + src];
            }
        vals = std::move(v);
    }
    return CSRMatrix(std::move(indptr), IndexTensor::vector(std::move(col)), std::move(vals), n, n);
}

inline COOMatrix set_rows_cols_identity(const COOMatrix& a, const BoolTensor& mask)
{
    return to_coo(set_rows_cols_identity(to_csr(a), mask));
}

} // namespace fealcore
