#pragma once

#include "backend.hpp"
#include "sparse.hpp"

#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

namespace fealcore {

enum class SolveMethod { cg_jacobi, cg, dense_lu };
enum class Preconditioner { none, jacobi };

inline std::string_view to_string(SolveMethod m)
{
    switch (m) {
    case SolveMethod::cg_jacobi: return "cg_jacobi";
    case SolveMethod::cg: return "cg";
    case SolveMethod::dense_lu: return "dense_lu";
    }
    return "?";
}

struct SolveReport {
    Index iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
    SolveMethod method = SolveMethod::cg_jacobi;
    std::vector<double> residual_history; ///< ||r_k|| / ||b|| per iteration, starting with k = 0
};

struct CGOptions {
    double rtol = 1e-10;
    Index max_iter = -1; ///< negative selects 10 * n
    Preconditioner precond = Preconditioner::jacobi;
};

/// Preconditioned conjugate gradients for a symmetric positive definite matrix.
/// Stops when ||b - A x|| <= rtol ||b||; hitting max_iter is reported, not thrown.
inline std::pair<FloatTensor, SolveReport> cg(const CSRMatrix& a, const FloatTensor& b, const CGOptions& opt = {})
{
    FEALCORE_THROW_IF(a.nrows() != a.ncols(), InvalidArgument, "cg: matrix is ", a.nrows(), "x", a.ncols(),
                      ", not square");
    FEALCORE_THROW_IF(a.is_batched(), InvalidArgument, "cg: batched matrices are not supported");
    const Index n = a.nrows();
    FEALCORE_THROW_IF(b.ndim() != 1 || b.size() != n, InvalidArgument, "cg: right-hand side must have ", n,
                      " entries");
    FEALCORE_THROW_IF(!(opt.rtol > 0.0), InvalidArgument, "cg: rtol must be positive");
    for (Index i = 0; i < n; ++i) FEALCORE_THROW_IF(!std::isfinite(b[i]), NumericalError, "cg: non-finite b[", i, "]");
    const Index max_iter = opt.max_iter < 0 ? 10 * n : opt.max_iter;

    Backend& be = bm();
    SolveReport rep;
    rep.method = opt.precond == Preconditioner::jacobi ? SolveMethod::cg_jacobi : SolveMethod::cg;

    FloatTensor inv_diag({n}, 1.0);
    if (opt.precond == Preconditioner::jacobi) {
        const FloatTensor d = extract_diagonal(a);
        for (Index i = 0; i < n; ++i) {
            FEALCORE_THROW_IF(!(d[i] > 0.0), NumericalError, "cg: Jacobi preconditioner needs a positive diagonal, A[",
                              i, ",", i, "] = ", d[i]);
            inv_diag[i] = 1.0 / d[i];
        }
    }

    FloatTensor x({n});
    const double bnorm = std::sqrt(be.dot(b.data(), b.data()));
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.residual_history.push_back(0.0);
        return {std::move(x), rep};
    }
    FloatTensor r = b;
    FloatTensor z({n});
    auto apply_precond = [&] {
        be.parallel_for(n, [&](Index i0, Index i1) {
            for (Index i = i0; i < i1; ++i) z[i] = inv_diag[i] * r[i];
        });
    };
    apply_precond();
    FloatTensor p = z;
    double rz = be.dot(r.data(), z.data());
    double rnorm = bnorm;
    rep.residual_history.push_back(1.0);
    Index it = 0;
    while (rnorm > opt.rtol * bnorm && it < max_iter) {
        const FloatTensor ap = spmv(a, p);
        const double pap = be.dot(p.data(), ap.data());
        FEALCORE_THROW_IF(!(pap > 0.0), NumericalError, "cg: matrix is not positive definite (p^T A p = ", pap,
                          " at iteration ", it, ")");
        const double alpha = rz / pap;
        be.parallel_for(n, [&](Index i0, Index i1) {
            for (Index i = i0; i < i1; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
        });
        apply_precond();
        const double rz_new = be.dot(r.data(), z.data());
        const double beta = rz_new / rz;
        rz = rz_new;
        be.parallel_for(n, [&](Index i0, Index i1) {
            for (Index i = i0; i < i1; ++i) p[i] = z[i] + beta * p[i];
        });
        rnorm = std::sqrt(be.dot(r.data(), r.data()));
        ++it;
        rep.residual_history.push_back(rnorm / bnorm);
    }
    // report the true residual rather than the recursively updated one
    const FloatTensor ax = spmv(a, x);
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += (b[i] - ax[i]) * (b[i] - ax[i]);
    rep.iterations = it;
    rep.final_relative_residual = std::sqrt(s) / bnorm;
    rep.converged = rep.final_relative_residual <= opt.rtol;
    return {std::move(x), rep};
}

inline std::pair<FloatTensor, SolveReport> cg(const COOMatrix& a, const FloatTensor& b, const CGOptions& opt = {})
{
    return cg(to_csr(a), b, opt);
}

inline constexpr Index k_dense_lu_cap = 2000;

/// Gaussian elimination with partial pivoting on a dense [n, n] matrix.
inline FloatTensor dense_lu(FloatTensor a, const FloatTensor& b, Index cap = k_dense_lu_cap)
{
    FEALCORE_THROW_IF(a.ndim() != 2 || a.shape(0) != a.shape(1), InvalidArgument, "dense_lu: matrix must be square");
    const Index n = a.shape(0);
    FEALCORE_THROW_IF(n > cap, InvalidArgument, "dense_lu: n = ", n, " exceeds the cap of ", cap);
    FEALCORE_THROW_IF(b.size() != n, InvalidArgument, "dense_lu: right-hand side must have ", n, " entries");
    FloatTensor x = b.reshaped({n});
    double scale = 0.0;
    for (Index i = 0; i < a.size(); ++i) scale = std::max(scale, std::abs(a[i]));
    const double tiny = scale * n * 1e-15;
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        FEALCORE_THROW_IF(!(std::abs(a(piv, k)) > tiny), NumericalError, "dense_lu: matrix is singular at column ", k);
        if (piv != k) {
            for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            x[i] -= f * x[k];
        }
    }
    for (Index k = n - 1; k >= 0; --k) {
        double s = x[k];
        for (Index j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

inline std::pair<FloatTensor, SolveReport> dense_lu(const CSRMatrix& a, const FloatTensor& b,
                                                    Index cap = k_dense_lu_cap)
{
    FEALCORE_THROW_IF(a.nrows() > cap, InvalidArgument, "dense_lu: n = ", a.nrows(), " exceeds the cap of ", cap);
    FloatTensor x = dense_lu(to_dense(a), b, cap);
    const FloatTensor ax = spmv(a, x);
    double rr = 0.0, bb = 0.0;
    for (Index i = 0; i < b.size(); ++i) {
        rr += (b[i] - ax[i]) * (b[i] - ax[i]);
        bb += b[i] * b[i];
    }
    SolveReport rep;
    rep.method = SolveMethod::dense_lu;
    rep.iterations = 1;
    rep.final_relative_residual = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
    rep.converged = true;
    return {std::move(x), rep};
}

} // namespace fealcore
