#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nonloc {

using Complex = std::complex<double>;

/// Tolerance for every algebraic check (hermiticity, idempotence, commutation,
/// normalisation, probability-1 validation).
inline constexpr double kTolAlg = 1e-9;

/// Largest Hilbert-space dimension the engine accepts.
inline constexpr std::size_t kMaxDim = 16;

class StateVector;

/// Dense complex square matrix, row-major.
class Operator {
public:
    Operator() = default;
    explicit Operator(std::size_t dim);
    Operator(std::size_t dim, std::vector<Complex> entries);

    static Operator identity(std::size_t dim);
    static Operator zero(std::size_t dim);
    /// |v><v| for the given vector (not normalised here).
    static Operator outer(const StateVector& v);

    std::size_t dim() const { return dim_; }
    Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
    const Complex& operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
    std::span<const Complex> entries() const { return entries_; }

    Operator adjoint() const;
    double max_abs() const;

    Operator& operator+=(const Operator& rhs);
    Operator& operator-=(const Operator& rhs);
    Operator& operator*=(Complex s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
    friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);
    friend StateVector operator*(const Operator& op, const StateVector& v);

private:
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t dim);
    explicit StateVector(std::vector<Complex> amplitudes);
    StateVector(std::initializer_list<Complex> amplitudes);

    /// Computational basis vector |index>.
    static StateVector basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return amplitudes_.size(); }
    Complex& operator[](std::size_t i) { return amplitudes_[i]; }
    const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
    std::span<const Complex> amplitudes() const { return amplitudes_; }

    double squared_norm() const;
    double norm() const;
    StateVector normalized() const;
    bool is_normalized(double tol = kTolAlg) const;

    StateVector& operator+=(const StateVector& rhs);
    StateVector& operator-=(const StateVector& rhs);
    StateVector& operator*=(Complex s);
    friend StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
    friend StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
    friend StateVector operator*(Complex s, StateVector v) { return v *= s; }

private:
    std::vector<Complex> amplitudes_;
};

/// <a|b>
Complex inner(const StateVector& a, const StateVector& b);

Operator kron(const Operator& a, const Operator& b);
StateVector kron(const StateVector& a, const StateVector& b);

bool is_hermitian(const Operator& p, double tol = kTolAlg);
bool is_projection(const Operator& p, double tol = kTolAlg);

/// ||pq - qp||_max <= tol. Throws std::invalid_argument on dimension mismatch.
bool commutes(const Operator& p, const Operator& q, double tol = kTolAlg);

/// Projection onto spin-up along the Bloch direction (theta, phi): (I + n.sigma)/2.
Operator spin_projection(double theta, double phi);

/// Places a single-qubit operator on `qubit` of an `n_qubits` register (qubit 0 is
/// the leftmost tensor factor).
Operator embed(const Operator& single, std::size_t qubit, std::size_t n_qubits);

/// Unit vector orthogonal to every vector in `excluded`. Throws std::invalid_argument
/// when the excluded vectors span the whole space.
StateVector orthogonal_complement_vector(std::span<const StateVector> excluded, double tol = kTolAlg);

}  // namespace nonloc
