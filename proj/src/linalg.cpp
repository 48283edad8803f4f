#include "nonloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nonloc {

namespace {

void require_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxDim) {
        throw std::invalid_argument("dimension " + std::to_string(dim) + " outside [1, " +
                                    std::to_string(kMaxDim) + "]");
    }
}

}  // namespace

Operator::Operator(std::size_t dim) : dim_(dim), entries_(dim * dim) { require_dim(dim); }

Operator::Operator(std::size_t dim, std::vector<Complex> entries) : dim_(dim), entries_(std::move(entries)) {
    require_dim(dim);
    if (entries_.size() != dim * dim) {
        throw std::invalid_argument("operator entry count does not match dimension");
    }
}

Operator Operator::identity(std::size_t dim) {
    Operator op(dim);
    for (std::size_t i = 0; i < dim; ++i) op(i, i) = 1.0;
    return op;
}

Operator Operator::zero(std::size_t dim) { return Operator(dim); }

Operator Operator::outer(const StateVector& v) {
    Operator op(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
        for (std::size_t j = 0; j < v.dim(); ++j) op(i, j) = v[i] * std::conj(v[j]);
    return op;
}

Operator Operator::adjoint() const {
    Operator out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(j, i));
    return out;
}

double Operator::max_abs() const {
    double m = 0.0;
    for (const auto& z : entries_) m = std::max(m, std::abs(z));
    return m;
}

Operator& Operator::operator+=(const Operator& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("operator dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
    return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
    if (rhs.dim_ != dim_) throw std::invalid_argument("operator dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
    return *this;
}

Operator& Operator::operator*=(Complex s) {
    for (auto& z : entries_) z *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
    if (lhs.dim_ != rhs.dim_) throw std::invalid_argument("operator dimension mismatch");
    const std::size_t n = lhs.dim_;
    Operator out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            if (a == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

StateVector operator*(const Operator& op, const StateVector& v) {
    if (op.dim_ != v.dim()) throw std::invalid_argument("operator/state dimension mismatch");
    StateVector out(v.dim());
    for (std::size_t i = 0; i < op.dim_; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < op.dim_; ++j) acc += op(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

StateVector::StateVector(std::size_t dim) : amplitudes_(dim) { require_dim(dim); }

StateVector::StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    require_dim(amplitudes_.size());
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes) : amplitudes_(amplitudes) {
    require_dim(amplitudes_.size());
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::invalid_argument("basis index out of range");
    StateVector v(dim);
    v[index] = 1.0;
    return v;
}

double StateVector::squared_norm() const {
    double s = 0.0;
    for (const auto& z : amplitudes_) s += std::norm(z);
    return s;
}

double StateVector::norm() const { return std::sqrt(squared_norm()); }

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalise the zero vector");
    StateVector out = *this;
    out *= 1.0 / n;
    return out;
}

bool StateVector::is_normalized(double tol) const { return std::abs(squared_norm() - 1.0) <= tol; }

StateVector& StateVector::operator+=(const StateVector& rhs) {
    if (rhs.dim() != dim()) throw std::invalid_argument("state dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) amplitudes_[i] += rhs.amplitudes_[i];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& rhs) {
    if (rhs.dim() != dim()) throw std::invalid_argument("state dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) amplitudes_[i] -= rhs.amplitudes_[i];
    return *this;
}

StateVector& StateVector::operator*=(Complex s) {
    for (auto& z : amplitudes_) z *= s;
    return *this;
}

Complex inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("state dimension mismatch");
    Complex acc{};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

Operator kron(const Operator& a, const Operator& b) {
    const std::size_t n = a.dim(), m = b.dim();
    Operator out(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Complex s = a(i, j);
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = s * b(k, l);
        }
    return out;
}

StateVector kron(const StateVector& a, const StateVector& b) {
    StateVector out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = 0; k < b.dim(); ++k) out[i * b.dim() + k] = a[i] * b[k];
    return out;
}

bool is_hermitian(const Operator& p, double tol) { return (p - p.adjoint()).max_abs() <= tol; }

bool is_projection(const Operator& p, double tol) {
    return is_hermitian(p, tol) && (p * p - p).max_abs() <= tol;
}

bool commutes(const Operator& p, const Operator& q, double tol) {
    if (p.dim() != q.dim()) throw std::invalid_argument("commutes: dimension mismatch");
    return (p * q - q * p).max_abs() <= tol;
}

Operator spin_projection(double theta, double phi) {
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);
    Operator p(2);
    p(0, 0) = 0.5 * (1.0 + nz);
    p(1, 1) = 0.5 * (1.0 - nz);
    p(0, 1) = 0.5 * Complex(nx, -ny);
    p(1, 0) = 0.5 * Complex(nx, ny);
    return p;
}

Operator embed(const Operator& single, std::size_t qubit, std::size_t n_qubits) {
    if (single.dim() != 2) throw std::invalid_argument("embed: expected a single-qubit operator");
    if (qubit >= n_qubits) throw std::invalid_argument("embed: qubit index out of range");
    Operator out = qubit == 0 ? single : Operator::identity(2);
    for (std::size_t k = 1; k < n_qubits; ++k) out = kron(out, k == qubit ? single : Operator::identity(2));
    return out;
}

StateVector orthogonal_complement_vector(std::span<const StateVector> excluded, double tol) {
    if (excluded.empty()) throw std::invalid_argument("orthogonal_complement_vector: nothing to exclude");
    const std::size_t dim = excluded.front().dim();
    std::vector<StateVector> basis;
    auto residual = [&](StateVector v) {
        for (const auto& b : basis) v -= inner(b, v) * b;
        return v;
    };
    for (const auto& v : excluded) {
        StateVector r = residual(v);
        if (r.norm() > tol) basis.push_back(r.normalized());
    }
    StateVector best;
    double best_norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        StateVector r = residual(StateVector::basis(dim, i));
        // second pass keeps the residual orthogonal to working precision
        r = residual(r);
        if (r.norm() > best_norm + tol) {
            best_norm = r.norm();
            best = r;
        }
    }
    if (best_norm <= tol) throw std::invalid_argument("orthogonal_complement_vector: excluded vectors span the space");
    return best.normalized();
}

}  // namespace nonloc
