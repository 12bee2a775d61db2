#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "oamqnd/errors.hpp"

namespace oamqnd {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

// Dense row-major complex matrix. Everything here is desk-scale (<= 64x64),
// so clarity wins over sparsity.
struct CMat {
    int rows = 0;
    int cols = 0;
    CVec a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx{0.0, 0.0}) {}

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMat zeros(int r, int c) { return CMat(r, c); }

    CMat transpose() const {
        CMat m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    CMat conjugate() const {
        CMat m(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) m.a[i] = std::conj(a[i]);
        return m;
    }
    CMat adjoint() const { return conjugate().transpose(); }

    double max_abs() const {
        double v = 0.0;
        for (const auto& x : a) v = std::max(v, std::abs(x));
        return v;
    }
    double frobenius() const {
        double v = 0.0;
        for (const auto& x : a) v += std::norm(x);
        return std::sqrt(v);
    }
};

inline CMat operator*(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw ConsistencyError("matrix product: dimension mismatch");
    CMat z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline CMat operator+(const CMat& x, const CMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw ConsistencyError("matrix sum: dimension mismatch");
    CMat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

inline CMat operator-(const CMat& x, const CMat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw ConsistencyError("matrix diff: dimension mismatch");
    CMat z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

inline CMat operator*(cplx s, const CMat& x) {
    CMat z = x;
    for (auto& v : z.a) v *= s;
    return z;
}

inline CVec matvec(const CMat& m, const CVec& v) {
    if (m.cols != static_cast<int>(v.size())) throw ConsistencyError("matvec: dimension mismatch");
    CVec out(m.rows, cplx{0.0, 0.0});
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
    return out;
}

// Dense row-major real symmetric matrix support for the eigensolver.
struct RMat {
    int n = 0;
    RVec a;

    RMat() = default;
    explicit RMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const double& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct SymmetricEigen {
    RVec values;                 // ascending
    std::vector<RVec> vectors;   // vectors[r] is the eigenvector for values[r], unit norm
};

// Cyclic Jacobi for real symmetric matrices. Deterministic, accurate to
// ~1e-14 relative for the sizes used here.
inline SymmetricEigen jacobi_eigensym(RMat m, int max_sweeps = 64) {
    const int n = m.n;
    std::vector<RVec> vecs(n, RVec(n, 0.0));
    for (int i = 0; i < n; ++i) vecs[i][i] = 1.0;  // vecs[r][i]: component i of vector r (rows)

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (std::sqrt(off) < 1e-15 * scale * n) {
            SymmetricEigen out;
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            std::stable_sort(order.begin(), order.end(),
                             [&](int x, int y) { return m(x, x) < m(y, y); });
            for (int r : order) {
                out.values.push_back(m(r, r));
                out.vectors.push_back(vecs[r]);
            }
            return out;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (int i = 0; i < n; ++i) {
                    const double mpi = m(p, i), mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
                for (int i = 0; i < n; ++i) {
                    const double vp = vecs[p][i], vq = vecs[q][i];
                    vecs[p][i] = c * vp - s * vq;
                    vecs[q][i] = s * vp + c * vq;
                }
            }
        }
    }
    throw NumericError("jacobi_eigensym: no convergence");
}

inline double dot(const RVec& x, const RVec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const RVec& x) { return std::sqrt(dot(x, x)); }

// Sign convention used throughout: first coefficient above threshold is positive.
inline void canonical_sign(RVec& v, double threshold = 1e-12) {
    for (double x : v) {
        if (std::abs(x) > threshold) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

}  // namespace oamqnd
